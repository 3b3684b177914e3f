//! A reduced batch experiment: three proportionality styles across two voter
//! distributions, with per-group box-plot summaries.
//!
//! Run with: cargo run -p phragmen-lab --example experiment_batch
//!
//! The full-size scenario suite (1000 runs per cell) is driven by the
//! `phragmen-lab simulate` subcommand; this example keeps the run count
//! small enough to finish in seconds.

use phragmen_lab::harness::{parse_config, run_experiment};

fn main() {
    let cfg = parse_config(
        r#"
        distributions = [[2.0, 2.0], [0.5, 2.0]]
        xi = [0.2]
        rules = ["alpha:geom:0.5", "classic", "beta:exp:0.9:100"]
        n = 200
        m = 150
        k = 25
        runs = 100
        p = 100
        seed = 2024
        "#,
    )
    .unwrap();
    let summary = run_experiment(&cfg).unwrap();

    println!("distribution      rule               seats/voter (std)    decision agreement (std)");
    for row in &summary.rows {
        println!(
            "Beta({}, {})      {:<18} {:>5.2} ({:>5.2})        {:.3} ({:.3})",
            row.beta_a,
            row.beta_b,
            row.rule,
            row.repr_avg,
            row.repr_std,
            row.decision_avg,
            row.decision_std
        );
    }

    println!("\nper-group seat distribution (median [q1, q3]):");
    for b in &summary.boxplots {
        if b.measure != "representatives" {
            continue;
        }
        println!(
            "Beta({}, {}) {:<18} {:>6}: {:>5.1} [{:>5.1}, {:>5.1}]",
            b.beta_a, b.beta_b, b.rule, b.group, b.stats.median, b.stats.q1, b.stats.q3
        );
    }
}
