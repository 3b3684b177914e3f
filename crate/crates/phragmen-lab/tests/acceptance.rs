//! Acceptance suite: one test per release criterion, each printing a PASS
//! line (run with `--nocapture` to see them). Tolerances are fixed here, not
//! tuned at runtime.

use num::{BigInt, BigRational};
use phragmen_lab::axioms::{
    check_iuac, find_iuac_violation, linear_degree, random_election,
    random_election_with_unanimous, single_winner, small_fraction_instance, verify_pjr_degree,
    PjrOutcome, SearchCaps, DEFAULT_CLASS_CAP,
};
use phragmen_lab::bounds::{
    f_alpha_exact, f_alpha_geometric_closed, f_alpha_simple, f_beta, thiele_lower, thiele_upper,
};
use phragmen_lab::election::{worked_profile, Committee};
use phragmen_lab::euclidean::{build_euclidean_election, is_candidate_interval, EuclideanConfig};
use phragmen_lab::harness::{parse_config, run_experiment, summary_csv, SimConfig};
use phragmen_lab::phragmen::{
    increasing_speed_showcase, run_exact, run_phragmen, NumericMode, DEFAULT_TIE_EPS,
};
use phragmen_lab::rules::{CostFunction, RuleSpec, SpeedSchedule, ThieleWeights, TieRule};
use phragmen_lab::thiele::{exact_thiele, lambda_score, DEFAULT_ENUMERATION_CAP};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn criterion_01_speed_rule_golden_run() {
    let e = worked_profile();
    let alpha = SpeedSchedule::Geometric { q: rat(1, 10) };
    // Warm-up run, then the timed one.
    let _ = run_exact(&e, &alpha, &CostFunction::Constant, &TieRule::LexCandidate).unwrap();
    let started = Instant::now();
    let trace = run_exact(&e, &alpha, &CostFunction::Constant, &TieRule::LexCandidate).unwrap();
    let elapsed = started.elapsed();

    assert_eq!(trace.committee.members(), &[0, 1, 2]);
    let times: Vec<BigRational> = trace.events.iter().map(|ev| ev.time.clone()).collect();
    assert_eq!(times, vec![rat(1, 4), rat(1, 2), rat(1, 1)]);
    for v in 0..4 {
        assert_eq!(trace.final_balances[v], rat(3, 40));
    }
    for v in 4..6 {
        assert_eq!(trace.final_balances[v], rat(1, 20));
    }
    assert!(
        elapsed.as_micros() < 1000,
        "run took {elapsed:?}, budget is 1 ms"
    );
    println!("ACCEPTANCE 1 PASS: golden speed-schedule run exact in {elapsed:?}");
}

#[test]
fn criterion_02_cost_rule_golden_run() {
    let e = worked_profile();
    let beta = CostFunction::Exponential {
        base: rat(1, 4),
        scale: rat(7, 1),
    };
    let t1 = rat(1, 1024);
    let t2 = &t1 + rat(1, 192);
    let t3 = &t2 + rat(1, 288);
    let prefer_high = TieRule::FixedOrder(vec![5, 4, 3, 2, 1, 0]);
    for tie in [TieRule::LexCandidate, prefer_high] {
        let trace = run_exact(&e, &SpeedSchedule::Constant, &beta, &tie).unwrap();
        assert_eq!(trace.committee.sorted_members(), vec![0, 3, 5]);
        let times: Vec<BigRational> = trace.events.iter().map(|ev| ev.time.clone()).collect();
        assert_eq!(times, vec![t1.clone(), t2.clone(), t3.clone()]);
    }
    println!("ACCEPTANCE 2 PASS: golden cost-function run exact under both tie orders");
}

#[test]
fn criterion_03_exact_harmonic_winners() {
    let e = worked_profile();
    let winners = exact_thiele(&e, &ThieleWeights::Pav, DEFAULT_ENUMERATION_CAP).unwrap();
    let sets: Vec<Vec<usize>> = winners.iter().map(|w| w.sorted_members()).collect();
    assert_eq!(sets, vec![vec![0, 1, 3], vec![0, 1, 5]]);
    for w in &winners {
        assert_eq!(lambda_score(&e, w, &ThieleWeights::Pav), rat(15, 2));
    }
    println!("ACCEPTANCE 3 PASS: harmonic optimization finds both winners at score 15/2");
}

#[test]
fn criterion_04_increasing_speed_showcase() {
    let e = increasing_speed_showcase();
    let trace = run_exact(
        &e,
        &SpeedSchedule::Power { exponent: 100 },
        &CostFunction::Constant,
        &TieRule::LexCandidate,
    )
    .unwrap();
    assert_eq!(trace.committee.sorted_members(), vec![0, 1, 2, 3, 4, 5]);

    let outcome =
        verify_pjr_degree(&e, &trace.committee, &linear_degree, DEFAULT_CLASS_CAP).unwrap();
    match outcome {
        PjrOutcome::Violation(v) => {
            assert_eq!(v.group.members().to_vec(), (50..100).collect::<Vec<_>>());
            assert_eq!(v.covered, 1);
            assert_eq!(v.required, 3);
        }
        PjrOutcome::Ok => panic!("expected a guarantee violation"),
    }

    for beta in [
        CostFunction::Constant,
        CostFunction::Exponential {
            base: rat(9, 10),
            scale: rat(100, 1),
        },
        CostFunction::Exponential {
            base: rat(1, 4),
            scale: rat(7, 1),
        },
    ] {
        let run = run_phragmen(
            &e,
            &SpeedSchedule::Constant,
            &beta,
            &TieRule::LexCandidate,
            NumericMode::Auto {
                eps: DEFAULT_TIE_EPS,
            },
        )
        .unwrap();
        let bloc_seats = run
            .committee()
            .members()
            .iter()
            .filter(|&&c| c >= 6)
            .count();
        assert!(bloc_seats >= 3, "{beta:?} gave {bloc_seats} bloc seats");
    }
    println!("ACCEPTANCE 4 PASS: increasing speeds starve the 50-voter bloc; cost rules reseat it");
}

#[test]
fn criterion_05_guarantee_soundness_sweep() {
    let started = Instant::now();
    let speed_rules = [
        SpeedSchedule::Constant,
        SpeedSchedule::Geometric { q: rat(1, 2) },
        SpeedSchedule::Geometric { q: rat(9, 10) },
    ];
    let cost_rules = [
        CostFunction::Constant,
        CostFunction::Exponential {
            base: rat(1, 4),
            scale: rat(7, 1),
        },
        CostFunction::Exponential {
            base: rat(9, 10),
            scale: rat(100, 1),
        },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for round in 0..500 {
        let n = rng.random_range(2..=10);
        let m = rng.random_range(2..=8);
        let k = rng.random_range(1..=m.min(4));
        let e = random_election(&mut rng, n, m, k);

        for alpha in &speed_rules {
            let run = run_phragmen(
                &e,
                alpha,
                &CostFunction::Constant,
                &TieRule::LexCandidate,
                NumericMode::Auto {
                    eps: DEFAULT_TIE_EPS,
                },
            )
            .unwrap();
            let degree = |g: &BigRational, k: usize| f_alpha_exact(alpha, g, k);
            let outcome =
                verify_pjr_degree(&e, run.committee(), &degree, DEFAULT_CLASS_CAP).unwrap();
            assert!(
                outcome.is_ok(),
                "round {round}: speed guarantee violated for {alpha:?} on {e:?}"
            );
        }
        for beta in &cost_rules {
            let run = run_phragmen(
                &e,
                &SpeedSchedule::Constant,
                beta,
                &TieRule::LexCandidate,
                NumericMode::Auto {
                    eps: DEFAULT_TIE_EPS,
                },
            )
            .unwrap();
            let degree = |g: &BigRational, k: usize| f_beta(beta, g, k);
            let outcome =
                verify_pjr_degree(&e, run.committee(), &degree, DEFAULT_CLASS_CAP).unwrap();
            assert!(
                outcome.is_ok(),
                "round {round}: cost guarantee violated for {beta:?} on {e:?}"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 120,
        "sweep took {elapsed:?}, budget 2 min"
    );
    println!("ACCEPTANCE 5 PASS: 500-instance soundness sweep, zero violations in {elapsed:?}");
}

#[test]
fn criterion_06_bound_algebra_grid() {
    for k in [30usize, 50] {
        for i in 1..100i64 {
            let g = rat(i, 100);

            for alpha in [
                SpeedSchedule::Constant,
                SpeedSchedule::Geometric { q: rat(1, 2) },
                SpeedSchedule::Geometric { q: rat(9, 10) },
                SpeedSchedule::GeometricShifted { q: rat(1, 2) },
            ] {
                assert!(
                    f_alpha_exact(&alpha, &g, k) >= f_alpha_simple(&alpha, &g, k),
                    "exact < simple at gamma={g}, k={k}, {alpha:?}"
                );
            }

            for q in [rat(1, 2), rat(4, 5), rat(9, 10)] {
                let scan = f_alpha_simple(&SpeedSchedule::Geometric { q: q.clone() }, &g, k);
                let closed = f_alpha_geometric_closed(&q, &g, k);
                assert!(
                    closed == scan || closed + 1 == scan,
                    "closed form off by more than one at gamma={g}, k={k}, q={q}"
                );
            }

            let expect: usize = (&g * rat(k as i64 + 1, 1))
                .floor()
                .to_integer()
                .try_into()
                .unwrap();
            assert_eq!(f_beta(&CostFunction::Constant, &g, k), expect.min(k));

            for q in [rat(1, 2), rat(4, 5)] {
                let w = ThieleWeights::Geometric { q };
                assert!(thiele_lower(&w, &g, k) <= thiele_upper(&w, &g, k));
            }
        }
    }
    println!("ACCEPTANCE 6 PASS: bound algebra holds on the 99-point grid for k in {{30, 50}}");
}

#[test]
fn criterion_07_score_rule_bound_gap() {
    for q in [rat(1, 2), rat(4, 5)] {
        let w = ThieleWeights::Geometric { q: q.clone() };
        for i in 1..100i64 {
            let g = rat(i, 100);
            let lower = thiele_lower(&w, &g, 30);
            let upper = thiele_upper(&w, &g, 30);
            assert!(
                upper - lower <= 3,
                "gap {} at gamma={g}, q={q}",
                upper - lower
            );
        }
    }
    println!(
        "ACCEPTANCE 7 PASS: score-rule bound gap is at most 3 seats for q in {{0.5, 0.8}}, k=30"
    );
}

#[test]
fn criterion_08_unanimous_candidate_independence() {
    let started = Instant::now();
    let geometric = RuleSpec::Phragmen {
        alpha: SpeedSchedule::Geometric { q: rat(1, 2) },
        beta: CostFunction::Constant,
    };
    let exponential = RuleSpec::Phragmen {
        alpha: SpeedSchedule::Constant,
        beta: CostFunction::Exponential {
            base: rat(9, 10),
            scale: rat(100, 1),
        },
    };
    let mut rng = ChaCha8Rng::seed_from_u64(888);
    for round in 0..200 {
        let n = rng.random_range(2..=9);
        let m = rng.random_range(2..=6);
        let k = rng.random_range(2..=(m + 1).min(4));
        let e = random_election_with_unanimous(&mut rng, n, m, k);
        assert!(
            check_iuac(&geometric, &e).unwrap().holds(),
            "geometric speeds failed on round {round}: {e:?}"
        );
        assert!(
            check_iuac(&exponential, &e).unwrap().holds(),
            "exponential costs failed on round {round}: {e:?}"
        );
    }

    let caps = SearchCaps {
        max_voters: 40,
        max_candidates: 6,
        max_committee: 6,
    };
    let pav = RuleSpec::Thiele {
        weights: ThieleWeights::Pav,
    };
    let counterexample = find_iuac_violation(&pav, caps).unwrap();
    let e = counterexample.expect("harmonic weights admit a counterexample within the caps");
    assert!(e.num_voters() <= 40 && e.committee_size() <= 6);

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 300, "took {elapsed:?}, budget 5 min");
    println!(
        "ACCEPTANCE 8 PASS: independence holds for 200 instances; harmonic counterexample with n={}, k={} in {elapsed:?}",
        e.num_voters(),
        e.committee_size()
    );
}

#[test]
fn criterion_09_small_fraction_construction() {
    let q = rat(1, 2);
    let gamma = rat(1, 4);
    let epsilon = rat(1, 5);
    let (e, k) = small_fraction_instance(&q, &gamma, &epsilon, 8).unwrap();

    let winners = exact_thiele(
        &e,
        &ThieleWeights::Geometric { q: q.clone() },
        DEFAULT_ENUMERATION_CAP,
    )
    .unwrap();
    let cap = (k as f64 * 0.2).floor() as usize;
    for w in &winners {
        let cohesive_seats = w.members().iter().filter(|&&c| c < k).count();
        assert!(cohesive_seats <= cap);
        assert!(cohesive_seats as f64 / k as f64 <= 0.2);
    }

    let beta = CostFunction::Exponential {
        base: rat(9, 10),
        scale: rat(100, 1),
    };
    let rule = RuleSpec::Phragmen {
        alpha: SpeedSchedule::Constant,
        beta: beta.clone(),
    };
    let w = single_winner(&rule, &e).unwrap();
    let guaranteed = f_beta(&beta, &gamma, k);
    assert!(e.representation_count(&w, 0) >= guaranteed);
    println!(
        "ACCEPTANCE 9 PASS: cohesive group capped at {cap}/{k} seats under geometric scores, cost rule keeps its {guaranteed}-seat guarantee"
    );
}

fn table_scenario_config(runs: usize, xi: Vec<f64>, seed: u64) -> SimConfig {
    let doc = serde_json::json!({
        "distributions": [[2.0, 2.0], [2.0, 4.0], [0.5, 2.0], [0.5, 0.5]],
        "xi": xi,
        "rules": ["alpha:geom:0.5", "classic", "beta:exp:0.9:100"],
        "n": 200,
        "m": 150,
        "k": 25,
        "runs": runs,
        "p": 100,
        "tau": 30.0,
        "delta": 120.0,
        "seed": seed,
    });
    parse_config(&doc.to_string()).unwrap()
}

#[test]
fn criterion_10_reference_statistics_reproduction() {
    let started = Instant::now();
    let cfg = table_scenario_config(1000, vec![0.2], 20_240_101);
    let summary = run_experiment(&cfg).unwrap();

    // Reference means: ((a, b), rule) -> (representatives, decision
    // satisfaction). Stochastic reproduction: representatives within 10%
    // relative, decisions within 0.05 absolute.
    let reference = [
        ((2.0, 2.0), "alpha:geom:0.5", 5.753, 0.683),
        ((2.0, 2.0), "classic", 6.548, 0.686),
        ((2.0, 2.0), "beta:exp:0.9:100", 7.708, 0.681),
        ((2.0, 4.0), "alpha:geom:0.5", 6.977, 0.681),
        ((2.0, 4.0), "classic", 8.590, 0.687),
        ((2.0, 4.0), "beta:exp:0.9:100", 10.31, 0.677),
        ((0.5, 2.0), "alpha:geom:0.5", 6.990, 0.555),
        ((0.5, 2.0), "classic", 11.16, 0.659),
        ((0.5, 2.0), "beta:exp:0.9:100", 14.45, 0.651),
        ((0.5, 0.5), "alpha:geom:0.5", 5.137, 0.667),
        ((0.5, 0.5), "classic", 5.674, 0.668),
        ((0.5, 0.5), "beta:exp:0.9:100", 6.763, 0.584),
    ];
    assert_eq!(summary.rows.len(), reference.len());
    for ((a, b), rule, repr, decision) in reference {
        let row = summary
            .rows
            .iter()
            .find(|r| r.beta_a == a && r.beta_b == b && r.rule == rule)
            .expect("scenario row present");
        let repr_err = (row.repr_avg - repr).abs() / repr;
        assert!(
            repr_err <= 0.10,
            "({a},{b}) {rule}: representatives {:.3} vs reference {repr} ({:.1}% off)",
            row.repr_avg,
            100.0 * repr_err
        );
        let dec_err = (row.decision_avg - decision).abs();
        assert!(
            dec_err <= 0.05,
            "({a},{b}) {rule}: decisions {:.3} vs reference {decision}",
            row.decision_avg
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 900, "took {elapsed:?}, budget 15 min");
    println!("ACCEPTANCE 10 PASS: 1000-run statistics within tolerance of the reference table in {elapsed:?}");
}

#[test]
fn criterion_11_qualitative_orderings_across_regimes() {
    let cfg = table_scenario_config(300, vec![0.1, 0.2, 0.3, 0.4, 0.5], 555);
    let summary = run_experiment(&cfg).unwrap();
    assert_eq!(summary.rows.len(), 4 * 5 * 3);
    for dist in [[2.0, 2.0], [2.0, 4.0], [0.5, 2.0], [0.5, 0.5]] {
        for xi in [0.1, 0.2, 0.3, 0.4, 0.5] {
            let cell = |rule: &str| {
                summary
                    .rows
                    .iter()
                    .find(|r| {
                        r.beta_a == dist[0] && r.beta_b == dist[1] && r.xi == xi && r.rule == rule
                    })
                    .unwrap()
            };
            let degressive = cell("alpha:geom:0.5");
            let linear = cell("classic");
            let regressive = cell("beta:exp:0.9:100");
            assert!(
                regressive.repr_avg > linear.repr_avg && linear.repr_avg > degressive.repr_avg,
                "ordering broken at {dist:?}, xi={xi}: {} / {} / {}",
                regressive.repr_avg,
                linear.repr_avg,
                degressive.repr_avg
            );
            assert!(
                regressive.repr_std > linear.repr_std && regressive.repr_std > degressive.repr_std,
                "spread ordering broken at {dist:?}, xi={xi}"
            );
        }
    }
    println!("ACCEPTANCE 11 PASS: regressive > linear > degressive in every of the 20 regimes");
}

#[test]
fn criterion_12_interval_domain_everywhere() {
    let shapes = [[2.0, 2.0], [2.0, 4.0], [0.5, 2.0], [0.5, 0.5]];
    let radii = [0.1, 0.2, 0.3, 0.4, 0.5];
    for seed in 0..1000u64 {
        let shape = shapes[(seed % 4) as usize];
        let cfg = EuclideanConfig {
            beta_a: shape[0],
            beta_b: shape[1],
            num_voters: 60,
            num_candidates: 50,
            committee_size: 5,
            xi: radii[(seed % 5) as usize],
            seed,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pe = build_euclidean_election(&cfg, &mut rng).unwrap();
        assert!(is_candidate_interval(&pe), "seed {seed}");
    }
    println!("ACCEPTANCE 12 PASS: 1000 generated elections lie in the interval domain");
}

#[test]
fn criterion_13_deterministic_aggregation() {
    let doc = serde_json::json!({
        "distributions": [[2.0, 2.0], [0.5, 2.0]],
        "xi": [0.2],
        "rules": ["alpha:geom:0.5", "classic", "beta:exp:0.9:100"],
        "n": 50,
        "m": 40,
        "k": 6,
        "runs": 24,
        "p": 30,
        "seed": 777,
    });
    let cfg = parse_config(&doc.to_string()).unwrap();

    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_experiment(&cfg).unwrap());
    let wide = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap()
        .install(|| run_experiment(&cfg).unwrap());
    let again = run_experiment(&cfg).unwrap();

    let reference = summary_csv(&single);
    assert_eq!(
        reference,
        summary_csv(&wide),
        "worker count changed the bytes"
    );
    assert_eq!(
        reference,
        summary_csv(&again),
        "re-invocation changed the bytes"
    );
    println!(
        "ACCEPTANCE 13 PASS: summary bytes identical across invocations and worker counts 1/8"
    );
}

#[test]
fn showcase_committee_members_match_expected_order() {
    // Companion check: selection order of the showcase run is the bloc's
    // candidates ascending, and representation drops to at most one for the
    // starved half.
    let e = increasing_speed_showcase();
    let trace = run_exact(
        &e,
        &SpeedSchedule::Power { exponent: 100 },
        &CostFunction::Constant,
        &TieRule::LexCandidate,
    )
    .unwrap();
    assert_eq!(trace.committee.members(), &[0, 1, 2, 3, 4, 5]);
    let w: &Committee = &trace.committee;
    for v in 50..100 {
        assert!(e.representation_count(w, v) <= 1);
    }
}
