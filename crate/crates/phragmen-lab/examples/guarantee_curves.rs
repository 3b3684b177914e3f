//! Representation guarantees: how many seats a cohesive group of a given
//! share can count on under each rule family, and how the guarantee curves
//! compare.
//!
//! Run with: cargo run -p phragmen-lab --example guarantee_curves

use num::BigRational;
use phragmen_lab::bounds::{
    emit_bound_curve, f_alpha_exact, f_alpha_geometric_closed, f_alpha_simple, f_beta,
    thiele_lower, thiele_upper, CurveFamily,
};
use phragmen_lab::rules::{CostFunction, SpeedSchedule, ThieleWeights};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn main() {
    let k = 50;
    println!("guaranteed seats for a group share gamma, committee size {k}:\n");
    println!("gamma   unit   alpha=0.5^i   closed-form   beta=0.1^x   scores q=0.5 (lo..hi)");
    let half_speed = SpeedSchedule::GeometricShifted { q: rat(1, 2) };
    let steep_cost = CostFunction::Exponential {
        base: rat(1, 10),
        scale: rat(1, 1),
    };
    let weights = ThieleWeights::Geometric { q: rat(1, 2) };
    for i in [5i64, 10, 25, 40, 50, 60, 75, 90] {
        let g = rat(i, 100);
        println!(
            "{:<7} {:<6} {:<13} {:<13} {:<12} {}..{}",
            format!("{}.{:02}", i / 100, i % 100),
            f_alpha_exact(&SpeedSchedule::Constant, &g, k),
            f_alpha_exact(&half_speed, &g, k),
            f_alpha_geometric_closed(&rat(1, 2), &g, k),
            f_beta(&steep_cost, &g, k),
            thiele_lower(&weights, &g, 30),
            thiele_upper(&weights, &g, 30),
        );
    }

    // The two forms of the geometric guarantee differ by at most one seat.
    let g = rat(1, 2);
    println!(
        "\nscan vs closed form at gamma=1/2: {} vs {}",
        f_alpha_simple(&SpeedSchedule::Geometric { q: rat(1, 2) }, &g, k),
        f_alpha_geometric_closed(&rat(1, 2), &g, k)
    );

    // Sampled curve rows, as the `bounds` subcommand would emit them.
    let curve = emit_bound_curve(
        &CurveFamily::BetaExp {
            base: rat(1, 10),
            scale: rat(1, 1),
        },
        k,
        20,
    );
    println!("\ncost rule beta(x) = 0.1^x, sampled curve (gamma, seats/k, slope):");
    for row in curve.rows.iter().step_by(4) {
        println!(
            "  {:>5.2}  {:>6.3}  {:>7.3}",
            num::ToPrimitive::to_f64(&row.gamma).unwrap(),
            num::ToPrimitive::to_f64(&row.value_over_k).unwrap(),
            row.derivative
        );
    }
}
