//! The issue-voting model: positioned binary issues, stance probabilities,
//! majority decisions by an elected committee, and voter satisfaction.
//!
//! Run with: cargo run -p phragmen-lab --example issue_voting

use phragmen_lab::euclidean::{
    build_euclidean_election, committee_decisions, decision_satisfaction, generate_issue_profile,
    issue_satisfactions, p_eta, sample_beta_scaled, EuclideanConfig, IssueModelConfig,
};
use phragmen_lab::phragmen::run_float;
use phragmen_lab::rules::{CostFunction, SpeedSchedule, TieRule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let issue_cfg = IssueModelConfig::default();

    println!("stance probability p(individual eta is for issue x):");
    println!("{:>6} | x=-0.8  x=-0.3  x=0.0  x=0.3  x=0.8", "eta");
    for eta in [-0.8, -0.3, 0.0, 0.3, 0.8] {
        let row: Vec<String> = [-0.8, -0.3, 0.0, 0.3, 0.8]
            .iter()
            .map(|&x| format!("{:6.3}", p_eta(eta, x, issue_cfg.tau, issue_cfg.delta)))
            .collect();
        println!("{eta:>6} | {}", row.join(" "));
    }

    // Full pipeline on one sampled election.
    let cfg = EuclideanConfig {
        beta_a: 2.0,
        beta_b: 2.0,
        num_voters: 200,
        num_candidates: 150,
        committee_size: 25,
        xi: 0.2,
        seed: 3,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pe = build_euclidean_election(&cfg, &mut rng).unwrap();
    let issues: Vec<f64> = (0..issue_cfg.issues)
        .map(|_| sample_beta_scaled(cfg.beta_a, cfg.beta_b, &mut rng))
        .collect();
    let all_positions: Vec<f64> = pe
        .voter_positions
        .iter()
        .chain(&pe.candidate_positions)
        .copied()
        .collect();
    let profile = generate_issue_profile(&all_positions, &issues, &issue_cfg, &mut rng);

    let trace = run_float(
        &pe.election,
        &SpeedSchedule::Constant,
        &CostFunction::Constant,
        &TieRule::LexCandidate,
        1e-9,
    )
    .unwrap();
    let member_rows: Vec<&[bool]> = trace
        .committee
        .members()
        .iter()
        .map(|&c| profile[cfg.num_voters + c].as_slice())
        .collect();
    let decisions = committee_decisions(&member_rows);
    let accepted = decisions.iter().filter(|&&d| d).count();
    println!(
        "\ncommittee of {} accepts {accepted} of {} issues",
        trace.committee.len(),
        issues.len()
    );

    let sats = issue_satisfactions(&profile, cfg.num_voters, &trace.committee);
    let mean = sats.iter().sum::<f64>() / sats.len() as f64;
    println!("mean voter satisfaction with the decisions: {mean:.3}");

    // A single voter's satisfaction is just the agreement fraction.
    let v0 = decision_satisfaction(&profile[0], &decisions);
    println!(
        "voter v1 at position {:+.2} agrees with {:.0}% of decisions",
        pe.voter_positions[0],
        100.0 * v0
    );
}
