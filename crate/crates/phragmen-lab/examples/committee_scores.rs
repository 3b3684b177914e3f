//! Exact and greedy score-based committee selection on the worked profile.
//!
//! Run with: cargo run -p phragmen-lab --example committee_scores

use num::BigRational;
use phragmen_lab::election::worked_profile;
use phragmen_lab::rules::{ThieleWeights, TieRule};
use phragmen_lab::thiele::{exact_thiele, lambda_score, seq_thiele, DEFAULT_ENUMERATION_CAP};

fn main() {
    let e = worked_profile();
    let weight_families = [
        ("harmonic 1/j", ThieleWeights::Pav),
        ("constant 1 (approval voting)", ThieleWeights::Constant),
        (
            "geometric (1/2)^j",
            ThieleWeights::Geometric {
                q: BigRational::new(1.into(), 2.into()),
            },
        ),
    ];

    for (name, weights) in &weight_families {
        let winners = exact_thiele(&e, weights, DEFAULT_ENUMERATION_CAP).unwrap();
        let score = lambda_score(&e, &winners[0], weights);
        println!("{name}: optimal score {score}");
        for w in &winners {
            println!("  optimal committee {:?}", w.labels(&e));
        }
        let greedy = seq_thiele(&e, weights, &TieRule::LexCandidate);
        println!(
            "  greedy pick order {:?} (score {})\n",
            greedy.labels(&e),
            lambda_score(&e, &greedy, weights)
        );
    }
}
