//! Cross-checks of the purchase engine against independent oracles and
//! numeric-mode agreement sweeps.

use num::{BigInt, BigRational, One, Zero};
use phragmen_lab::axioms::random_election;
use phragmen_lab::election::{Committee, Election};
use phragmen_lab::phragmen::{run_exact, run_float};
use phragmen_lab::rules::{CostFunction, SpeedSchedule, TieRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Textbook sequential rule with unit speeds and unit costs, in the load
/// formulation: candidate `c` is electable at absolute time
/// `(1 + sum of its approvers' loads) / |approvers|`; electing it sets every
/// approver's load to that time. Entirely independent of the event engine.
fn classic_by_loads(e: &Election, tie_lowest_id: bool) -> Committee {
    let n = e.num_voters();
    let m = e.num_candidates();
    let mut loads = vec![BigRational::zero(); n];
    let mut elected = vec![false; m];
    let mut committee = Vec::new();
    for _ in 0..e.committee_size() {
        let mut best: Option<(BigRational, usize)> = None;
        for (c, taken) in elected.iter().enumerate() {
            if *taken {
                continue;
            }
            let approvers = e.approvers(c);
            if approvers.is_empty() {
                continue;
            }
            let total: BigRational = approvers.iter().map(|&v| loads[v].clone()).sum();
            let t = (BigRational::one() + total)
                / BigRational::from_integer(BigInt::from(approvers.len() as u64));
            let better = match &best {
                None => true,
                Some((bt, bc)) => t < *bt || (t == *bt && tie_lowest_id && c < *bc),
            };
            if better {
                best = Some((t, c));
            }
        }
        let (t, c) = best.expect("some candidate is electable");
        for v in e.approvers(c) {
            loads[v] = t.clone();
        }
        elected[c] = true;
        committee.push(c);
    }
    Committee::new_ordered(committee)
}

#[test]
fn unit_parameter_engine_matches_load_formulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for round in 0..150 {
        let n = rng.random_range(2..=10);
        let m = rng.random_range(2..=8);
        let k = rng.random_range(1..=m.min(5));
        let e = random_election(&mut rng, n, m, k);
        let trace = run_exact(
            &e,
            &SpeedSchedule::Constant,
            &CostFunction::Constant,
            &TieRule::LexCandidate,
        )
        .unwrap();
        let oracle = classic_by_loads(&e, true);
        assert_eq!(
            trace.committee.members(),
            oracle.members(),
            "round {round}: engine and load oracle disagree on {e:?}"
        );
        // Purchase times coincide with the load formulation's thresholds.
        let mut loads = vec![BigRational::zero(); n];
        for ev in &trace.events {
            let approvers = e.approvers(ev.candidate);
            let total: BigRational = approvers.iter().map(|&v| loads[v].clone()).sum();
            let expected = (BigRational::one() + total)
                / BigRational::from_integer(BigInt::from(approvers.len() as u64));
            assert_eq!(ev.time, expected);
            for v in approvers {
                loads[v] = ev.time.clone();
            }
        }
    }
}

#[test]
fn float_mode_agrees_with_exact_mode_on_rational_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.random_range(2..=10);
        let m = rng.random_range(2..=8);
        let k = rng.random_range(1..=m.min(4));
        let e = random_election(&mut rng, n, m, k);

        let alpha = match rng.random_range(0..3) {
            0 => SpeedSchedule::Constant,
            1 => SpeedSchedule::Geometric {
                q: rat(rng.random_range(1..10), 10),
            },
            _ => SpeedSchedule::GeometricShifted {
                q: rat(rng.random_range(1..4), 4),
            },
        };
        // Exponential costs stay rational when the scale is a multiple of n.
        let beta = match rng.random_range(0..2) {
            0 => CostFunction::Constant,
            _ => CostFunction::Exponential {
                base: rat(rng.random_range(1..10), 10),
                scale: rat((n as i64) * rng.random_range(1..4), 1),
            },
        };
        let exact = run_exact(&e, &alpha, &beta, &TieRule::LexCandidate).unwrap();
        let float = run_float(&e, &alpha, &beta, &TieRule::LexCandidate, 1e-9).unwrap();
        assert_eq!(
            exact.committee.sorted_members(),
            float.committee.sorted_members(),
            "modes disagree on {e:?} with {alpha:?}, {beta:?}"
        );
        checked += 1;
    }
}

#[test]
fn float_mode_conserves_money_within_tolerance() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    for _ in 0..50 {
        let e = random_election(&mut rng, 9, 7, 4);
        let beta = CostFunction::Exponential {
            base: rat(9, 10),
            scale: rat(100, 1),
        };
        let trace = run_float(
            &e,
            &SpeedSchedule::Constant,
            &beta,
            &TieRule::LexCandidate,
            1e-9,
        )
        .unwrap();
        // Every voter earns at unit speed here, so total earned is n * t_end.
        let earned = e.num_voters() as f64 * trace.events.last().unwrap().time;
        let accounted: f64 = trace
            .events
            .iter()
            .flat_map(|ev| ev.payments.iter())
            .chain(trace.final_balances.iter())
            .sum();
        assert!((earned - accounted).abs() <= 1e-9 * earned.max(1.0));
        for ev in &trace.events {
            let paid: f64 = ev.payments.iter().sum();
            assert!((paid - ev.cost).abs() <= 1e-9 * ev.cost.max(1e-300));
        }
    }
}

#[test]
fn exact_mode_is_deterministic_across_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let e = random_election(&mut rng, 9, 7, 4);
    let alpha = SpeedSchedule::Geometric { q: rat(1, 3) };
    let run = || run_exact(&e, &alpha, &CostFunction::Constant, &TieRule::LexCandidate).unwrap();
    assert_eq!(run(), run());
}
