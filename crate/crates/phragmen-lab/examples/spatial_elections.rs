//! Spatial election generation: positions from a scaled beta distribution,
//! radius approvals, and the interval-domain property.
//!
//! Run with: cargo run -p phragmen-lab --example spatial_elections

use phragmen_lab::euclidean::{build_euclidean_election, is_candidate_interval, EuclideanConfig};
use phragmen_lab::phragmen::run_float;
use phragmen_lab::rules::{CostFunction, SpeedSchedule, TieRule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let cfg = EuclideanConfig {
        beta_a: 2.0,
        beta_b: 4.0,
        num_voters: 200,
        num_candidates: 150,
        committee_size: 25,
        xi: 0.2,
        seed: 42,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pe = build_euclidean_election(&cfg, &mut rng).unwrap();

    let sizes: Vec<usize> = (0..cfg.num_voters)
        .map(|v| pe.election.approval_set(v).count())
        .collect();
    let empty = sizes.iter().filter(|&&s| s == 0).count();
    println!(
        "generated {} voters / {} candidates at radius {}; mean ballot size {:.1}, {} empty ballots",
        cfg.num_voters,
        cfg.num_candidates,
        cfg.xi,
        sizes.iter().sum::<usize>() as f64 / sizes.len() as f64,
        empty
    );
    println!("interval domain: {}", is_candidate_interval(&pe));

    // A histogram of voter positions against their seats under the classic
    // rule: representation tracks local voter density.
    let trace = run_float(
        &pe.election,
        &SpeedSchedule::Constant,
        &CostFunction::Constant,
        &TieRule::LexCandidate,
        1e-9,
    )
    .unwrap();
    println!("\nposition bucket | voters | avg seats (classic rule)");
    for bucket in 0..8 {
        let lo = -1.0 + bucket as f64 * 0.25;
        let hi = lo + 0.25;
        let members: Vec<usize> = (0..cfg.num_voters)
            .filter(|&v| pe.voter_positions[v] >= lo && pe.voter_positions[v] < hi)
            .collect();
        if members.is_empty() {
            continue;
        }
        let avg: f64 = members
            .iter()
            .map(|&v| pe.election.representation_count(&trace.committee, v) as f64)
            .sum::<f64>()
            / members.len() as f64;
        println!("[{lo:5.2}, {hi:5.2}) | {:>6} | {avg:.2}", members.len());
    }
}
