//! Axiom verification: representation-guarantee checking, independence of a
//! unanimously approved candidate, and committee monotonicity.
//!
//! Run with: cargo run -p phragmen-lab --example axiom_checks

use num::BigRational;
use phragmen_lab::axioms::{
    check_committee_monotonicity, check_iuac, find_iuac_violation, linear_degree,
    random_election_with_unanimous, verify_pjr_degree, PjrOutcome, SearchCaps, DEFAULT_CLASS_CAP,
};
use phragmen_lab::phragmen::increasing_speed_showcase;
use phragmen_lab::phragmen::run_exact;
use phragmen_lab::rules::{CostFunction, RuleSpec, SpeedSchedule, ThieleWeights, TieRule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn main() {
    // An increasing speed schedule elects the committee preferred by a
    // 30-voter minority and leaves the 50-voter bloc with at most one seat;
    // the verifier pinpoints the shortchanged group.
    let e = increasing_speed_showcase();
    let trace = run_exact(
        &e,
        &SpeedSchedule::Power { exponent: 100 },
        &CostFunction::Constant,
        &TieRule::LexCandidate,
    )
    .unwrap();
    println!(
        "speeds alpha(i) = i^100 elect {:?}",
        trace.committee.labels(&e)
    );
    match verify_pjr_degree(&e, &trace.committee, &linear_degree, DEFAULT_CLASS_CAP).unwrap() {
        PjrOutcome::Violation(v) => {
            let members = v.group.members().to_vec();
            println!(
                "  linear guarantee violated: voters v{}..v{} (share {}) hold {} of the {} owed seats\n",
                members.first().unwrap() + 1,
                members.last().unwrap() + 1,
                v.group.gamma(),
                v.covered,
                v.required
            );
        }
        PjrOutcome::Ok => println!("  no violation (unexpected)\n"),
    }

    // Geometric speed schedules and every cost rule forward a unanimously
    // approved candidate; harmonic score weights do not.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let e = random_election_with_unanimous(&mut rng, 8, 5, 3);
    let geometric = RuleSpec::Phragmen {
        alpha: SpeedSchedule::Geometric { q: rat(1, 2) },
        beta: CostFunction::Constant,
    };
    println!(
        "unanimous-candidate independence, geometric speeds: {}",
        if check_iuac(&geometric, &e).unwrap().holds() {
            "holds"
        } else {
            "fails"
        }
    );
    let caps = SearchCaps {
        max_voters: 40,
        max_candidates: 6,
        max_committee: 6,
    };
    let pav = RuleSpec::Thiele {
        weights: ThieleWeights::Pav,
    };
    match find_iuac_violation(&pav, caps).unwrap() {
        Some(counterexample) => println!(
            "harmonic weights: two-bloc counterexample with {} voters, committee size {}",
            counterexample.num_voters(),
            counterexample.committee_size()
        ),
        None => println!("harmonic weights: no counterexample in the search window"),
    }

    // Sequential rules grow their committees monotonically.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let e = phragmen_lab::axioms::random_election(&mut rng, 9, 7, 5);
    let outcome = check_committee_monotonicity(&RuleSpec::classic(), &e, 5).unwrap();
    println!(
        "\nclassic rule committee monotone up to size 5: {}",
        outcome.holds()
    );
}
