//! Tour of the purchase process on a small worked profile: the classic
//! sequential rule, a slowing speed schedule, and an exponential cost
//! function, with full traces.
//!
//! Run with: cargo run -p phragmen-lab --example purchase_process

use num::BigRational;
use phragmen_lab::election::{worked_profile, Election};
use phragmen_lab::phragmen::{run_exact, PhragmenTrace};
use phragmen_lab::rules::{CostFunction, SpeedSchedule, TieRule};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn print_trace(e: &Election, label: &str, trace: &PhragmenTrace<BigRational>) {
    println!("{label}");
    for ev in &trace.events {
        let payers: Vec<String> = ev.payers.iter().map(|v| format!("v{}", v + 1)).collect();
        println!(
            "  t = {:<8} buy {} (cost {}) paid by {}",
            ev.time.to_string(),
            e.candidate_label(ev.candidate),
            ev.cost,
            payers.join(", ")
        );
    }
    println!("  committee: {:?}", trace.committee.labels(e));
    let balances: Vec<String> = trace
        .final_balances
        .iter()
        .enumerate()
        .map(|(v, b)| format!("v{}={}", v + 1, b))
        .collect();
    println!("  leftover credits: {}\n", balances.join(" "));
}

fn main() {
    let e = worked_profile();
    println!(
        "profile: {} voters, {} candidates, committee size {}\n",
        e.num_voters(),
        e.num_candidates(),
        e.committee_size()
    );

    let classic = run_exact(
        &e,
        &SpeedSchedule::Constant,
        &CostFunction::Constant,
        &TieRule::LexCandidate,
    )
    .unwrap();
    print_trace(
        &e,
        "classic sequential rule (unit speeds, unit costs):",
        &classic,
    );

    // Earning slows tenfold with each purchase a voter takes part in, so
    // voters who already have representation wait much longer for the next
    // seat. Small groups win seats they would otherwise never afford.
    let slowed = run_exact(
        &e,
        &SpeedSchedule::Geometric { q: rat(1, 10) },
        &CostFunction::Constant,
        &TieRule::LexCandidate,
    )
    .unwrap();
    print_trace(&e, "speed schedule alpha(i) = (1/10)^(i-1):", &slowed);

    // Broadly approved candidates become exponentially cheaper, so large
    // groups fill the committee with their own slate.
    let discounted = run_exact(
        &e,
        &SpeedSchedule::Constant,
        &CostFunction::Exponential {
            base: rat(1, 4),
            scale: rat(7, 1),
        },
        &TieRule::LexCandidate,
    )
    .unwrap();
    print_trace(&e, "cost function beta(x) = (1/4)^(7x):", &discounted);
}
