//! Representation-guarantee evaluators.
//!
//! Each function computes, for a rule family and a cohesive voter group
//! forming a `gamma`-fraction of the electorate, how many of the group's
//! commonly approved candidates the rule is guaranteed (or at most able) to
//! seat in a size-`k` committee. Every "largest satisfying integer" is found
//! by an ascending scan in exact arithmetic; no logarithm or floating-point
//! value enters a decision. The floor-free curve values used for plotting
//! derivatives are computed separately in `f64`.

use crate::rules::{rational_pow, rational_to_f64, CostFunction, SpeedSchedule, ThieleWeights};
use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt::Write as _;

fn check_gamma(gamma: &BigRational) {
    assert!(
        gamma.is_positive() && *gamma < BigRational::one(),
        "gamma must lie in (0, 1), got {gamma}"
    );
}

/// Largest `l` with `sum_{i=1..l} 1/alpha(i) < (k - l + 1) * gamma / (1 - gamma)`,
/// clamped to `[0, k]`.
///
/// Requires a non-increasing schedule with values in `(0, 1]`. The
/// inequality is strict: with exact equality the group holds exactly the
/// price of its next candidate at the stopping time and can still lose the
/// final purchase to a tie, so only the strict form is a guarantee over
/// every tie resolution.
pub fn f_alpha_exact(alpha: &SpeedSchedule, gamma: &BigRational, k: usize) -> usize {
    check_gamma(gamma);
    assert!(
        alpha.is_bound_compatible(k),
        "speed schedule must be non-increasing with values in (0, 1]"
    );
    let ratio = gamma / (BigRational::one() - gamma);
    let mut sum = BigRational::zero();
    let mut result = 0;
    for l in 1..=k {
        sum += alpha.eval_exact(l).recip();
        let rhs = BigRational::from_integer(BigInt::from((k - l + 1) as u64)) * &ratio;
        if sum < rhs {
            result = l;
        } else {
            break;
        }
    }
    result
}

/// Largest `l` with `sum_{i=1..l} 1/alpha(i) < gamma * (k + 1)`, clamped to
/// `[0, k]`. A weaker but simpler guarantee than [`f_alpha_exact`]; strict
/// for the same tie-boundary reason.
pub fn f_alpha_simple(alpha: &SpeedSchedule, gamma: &BigRational, k: usize) -> usize {
    check_gamma(gamma);
    assert!(
        alpha.is_bound_compatible(k),
        "speed schedule must be non-increasing with values in (0, 1]"
    );
    let rhs = gamma * BigRational::from_integer(BigInt::from((k + 1) as u64));
    let mut sum = BigRational::zero();
    let mut result = 0;
    for l in 1..=k {
        sum += alpha.eval_exact(l).recip();
        if sum < rhs {
            result = l;
        } else {
            break;
        }
    }
    result
}

/// Closed form for the geometric schedule `alpha(i) = q^(i-1)`: the largest
/// integer `e >= 0` with `(1/q)^(e+1) <= gamma*(k+1)*(1/q - 1) + 1`, clamped
/// to `[0, k]`. Evaluated by exact integer-power comparisons.
pub fn f_alpha_geometric_closed(q: &BigRational, gamma: &BigRational, k: usize) -> usize {
    check_gamma(gamma);
    assert!(
        q.is_positive() && *q < BigRational::one(),
        "q must be in (0, 1)"
    );
    let p = q.recip();
    let x =
        gamma * BigRational::from_integer(BigInt::from((k + 1) as u64)) * (&p - BigRational::one())
            + BigRational::one();
    let mut acc = p.clone();
    let mut e: usize = 0;
    if acc > x {
        return 0;
    }
    while e < k {
        acc *= &p;
        if acc <= x {
            e += 1;
        } else {
            break;
        }
    }
    e
}

/// Compares `a * beta(1 - gamma)` with `b * beta(gamma)` exactly for
/// `a, b >= 0`.
///
/// For exponential costs the two sides are compared after clearing the
/// rational exponent: `r <=> base^(p/d)` agrees with `r^d <=> base^p`.
fn cost_weighted_cmp(
    beta: &CostFunction,
    a: &BigRational,
    b: &BigRational,
    gamma: &BigRational,
) -> std::cmp::Ordering {
    match beta {
        CostFunction::Constant => a.cmp(b),
        CostFunction::Table { .. } => {
            // Table costs are rational on their grid; evaluate directly.
            let (num_g, den) = rational_as_share(gamma);
            let bg = beta
                .eval_exact(num_g, den)
                .expect("table evaluates at gamma");
            let bc = beta
                .eval_exact(den - num_g, den)
                .expect("table evaluates at 1 - gamma");
            (a * bc).cmp(&(b * bg))
        }
        CostFunction::Exponential { base, scale } => {
            if b.is_zero() {
                return a.cmp(b);
            }
            if a.is_zero() {
                return std::cmp::Ordering::Less;
            }
            // a * base^(scale*(1-gamma)) <=> b * base^(scale*gamma)
            //   iff  a/b <=> base^(scale*(2*gamma - 1)).
            let ratio = a / b;
            let exponent =
                scale * (gamma * BigRational::from_integer(2.into()) - BigRational::one());
            let d: i64 = exponent
                .denom()
                .try_into()
                .expect("exponent denominator fits i64");
            let p: i64 = exponent
                .numer()
                .try_into()
                .expect("exponent numerator fits i64");
            rational_pow(&ratio, d).cmp(&rational_pow(base, p))
        }
    }
}

fn rational_as_share(gamma: &BigRational) -> (u64, u64) {
    let num: u64 = gamma.numer().try_into().expect("share numerator fits u64");
    let den: u64 = gamma
        .denom()
        .try_into()
        .expect("share denominator fits u64");
    (num, den)
}

/// Largest integer strictly below `(k+1) * gamma*beta(1-gamma) /
/// ((1-gamma)*beta(gamma) + gamma*beta(1-gamma))`, clamped to `[0, k]`;
/// this agrees with the floor of the expression except when the expression
/// is itself an integer, where only the strict form survives adversarial
/// tie-breaking. Exact for the supported cost forms even when individual
/// cost values are irrational.
pub fn f_beta(beta: &CostFunction, gamma: &BigRational, k: usize) -> usize {
    check_gamma(gamma);
    assert!(
        beta.is_bound_compatible(),
        "cost function must be non-increasing with beta(0) = 1"
    );
    let one = BigRational::one();
    let mut result = 0;
    for j in 1..=k {
        // X > j  iff  gamma*(k+1-j)*beta(1-gamma) > j*(1-gamma)*beta(gamma).
        let a = gamma * BigRational::from_integer(BigInt::from((k + 1 - j) as u64));
        let b = BigRational::from_integer(BigInt::from(j as u64)) * (&one - gamma);
        if cost_weighted_cmp(beta, &a, &b, gamma) == std::cmp::Ordering::Greater {
            result = j;
        } else {
            break;
        }
    }
    result
}

/// Checks the simplified cost-rule estimate against the full one: for
/// `gamma >= 1/2` the full guarantee must reach `(k+1)*gamma`, and for
/// `gamma <= 1/2` it must reach `(k+1)*gamma*beta(1-gamma)/beta(gamma)`,
/// both integerized with the same strict convention as [`f_beta`].
pub fn f_beta_simple_check(beta: &CostFunction, gamma: &BigRational, k: usize) -> bool {
    check_gamma(gamma);
    let value = f_beta(beta, gamma, k);
    let half = BigRational::new(1.into(), 2.into());
    if *gamma >= half {
        let target = gamma * BigRational::from_integer(BigInt::from((k + 1) as u64));
        let mut bound = 0usize;
        for j in 1..=k {
            if BigRational::from_integer(BigInt::from(j as u64)) < target {
                bound = j;
            } else {
                break;
            }
        }
        value >= bound
    } else {
        // Strict integerization of (k+1)*gamma*beta(1-gamma)/beta(gamma).
        let mut bound = 0usize;
        for j in 1..=k {
            let a = gamma * BigRational::from_integer(BigInt::from((k + 1) as u64));
            let b = BigRational::from_integer(BigInt::from(j as u64));
            if cost_weighted_cmp(beta, &a, &b, gamma) == std::cmp::Ordering::Greater {
                bound = j;
            } else {
                break;
            }
        }
        value >= bound
    }
}

/// Largest `f <= k` with `(k - f) * lambda(1 + f) >= ((1-gamma)/gamma) *
/// max_{x in 1..=k} x*lambda(x)`; 0 when no `f` qualifies.
pub fn thiele_lower(weights: &ThieleWeights, gamma: &BigRational, k: usize) -> usize {
    check_gamma(gamma);
    weights
        .validate(k + 1)
        .expect("weights non-increasing convex");
    let rhs = (BigRational::one() - gamma) / gamma * max_x_lambda(weights, k);
    let mut result = 0;
    for f in 0..=k {
        let lhs = BigRational::from_integer(BigInt::from((k - f) as u64)) * weights.eval(1 + f);
        if lhs >= rhs {
            result = f;
        } else {
            break;
        }
    }
    result
}

/// Largest `f <= k` such that for every `x in 1..=(k - f + 1)`:
/// `(k - f + x + 1) * lambda(f) >= ((1-gamma)/gamma) * x*lambda(x)`.
/// Any achievable guarantee is at most this value; `f = 0` always qualifies.
pub fn thiele_upper(weights: &ThieleWeights, gamma: &BigRational, k: usize) -> usize {
    check_gamma(gamma);
    weights
        .validate(k + 1)
        .expect("weights non-increasing convex");
    let factor = (BigRational::one() - gamma) / gamma;
    let mut best = 0;
    for f in 1..=k {
        let lf = weights.eval(f);
        let ok = (1..=k - f + 1).all(|x| {
            let lhs = BigRational::from_integer(BigInt::from((k - f + x + 1) as u64)) * &lf;
            let rhs = &factor * BigRational::from_integer(BigInt::from(x as u64)) * weights.eval(x);
            lhs >= rhs
        });
        if ok {
            best = f;
        }
    }
    best
}

fn max_x_lambda(weights: &ThieleWeights, k: usize) -> BigRational {
    (1..=k)
        .map(|x| BigRational::from_integer(BigInt::from(x as u64)) * weights.eval(x))
        .max()
        .expect("k >= 1")
}

/// Curve families understood by [`emit_bound_curve`] and the `bounds` CLI.
#[derive(Debug, Clone)]
pub enum CurveFamily {
    /// Guarantee of the unit-speed rule; the straight line `floor(gamma*(k+1))`.
    AlphaConst,
    /// Guarantee of the speed schedule `alpha(i) = q^i`.
    AlphaGeom { q: BigRational },
    /// Guarantee of an arbitrary bound-compatible schedule. The floor-free
    /// series interpolates the inverse-speed partial sums piecewise-linearly.
    AlphaSchedule(SpeedSchedule),
    /// Guarantee of the unit-cost rule.
    BetaConst,
    /// Guarantee of the cost function `beta(x) = base^(scale*x)`.
    BetaExp {
        base: BigRational,
        scale: BigRational,
    },
    /// Guarantee of the geometric score rule `lambda(j) = q^j`.
    ThieleGeomLower { q: BigRational },
    /// Ceiling on any guarantee of the geometric score rule.
    ThieleGeomUpper { q: BigRational },
}

impl CurveFamily {
    /// Parses the CLI grammar `alpha-const | alpha-geom:<q> | beta-const |
    /// beta-exp:<b>[:<c>] | thiele-geom:<q> | thiele-geom-upper:<q>`.
    pub fn parse(s: &str) -> Result<Self, crate::rules::RuleParseError> {
        use crate::rules::{parse_rational, RuleParseError};
        let unit_interval = |name: &'static str, v: &str| -> Result<BigRational, RuleParseError> {
            let r = parse_rational(v)?;
            if !r.is_positive() || r >= BigRational::one() {
                return Err(RuleParseError::BadParameter {
                    what: name,
                    value: v.to_string(),
                    message: "must lie in (0, 1)".into(),
                });
            }
            Ok(r)
        };
        let positive = |name: &'static str, v: &str| -> Result<BigRational, RuleParseError> {
            let r = parse_rational(v)?;
            if !r.is_positive() {
                return Err(RuleParseError::BadParameter {
                    what: name,
                    value: v.to_string(),
                    message: "must be positive".into(),
                });
            }
            Ok(r)
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["alpha-const"] => Ok(CurveFamily::AlphaConst),
            ["alpha-geom", q] => Ok(CurveFamily::AlphaGeom {
                q: unit_interval("q", q)?,
            }),
            ["beta-const"] => Ok(CurveFamily::BetaConst),
            ["beta-exp", b] => Ok(CurveFamily::BetaExp {
                base: unit_interval("base", b)?,
                scale: BigRational::one(),
            }),
            ["beta-exp", b, c] => Ok(CurveFamily::BetaExp {
                base: unit_interval("base", b)?,
                scale: positive("scale", c)?,
            }),
            ["thiele-geom", q] => Ok(CurveFamily::ThieleGeomLower {
                q: unit_interval("q", q)?,
            }),
            ["thiele-geom-upper", q] => Ok(CurveFamily::ThieleGeomUpper {
                q: unit_interval("q", q)?,
            }),
            _ => Err(crate::rules::RuleParseError::UnknownFamily(s.to_string())),
        }
    }

    fn value(&self, gamma: &BigRational, k: usize) -> usize {
        match self {
            CurveFamily::AlphaConst => f_alpha_exact(&SpeedSchedule::Constant, gamma, k),
            CurveFamily::AlphaGeom { q } => {
                f_alpha_exact(&SpeedSchedule::GeometricShifted { q: q.clone() }, gamma, k)
            }
            CurveFamily::AlphaSchedule(s) => f_alpha_exact(s, gamma, k),
            CurveFamily::BetaConst => f_beta(&CostFunction::Constant, gamma, k),
            CurveFamily::BetaExp { base, scale } => f_beta(
                &CostFunction::Exponential {
                    base: base.clone(),
                    scale: scale.clone(),
                },
                gamma,
                k,
            ),
            CurveFamily::ThieleGeomLower { q } => {
                thiele_lower(&ThieleWeights::Geometric { q: q.clone() }, gamma, k)
            }
            CurveFamily::ThieleGeomUpper { q } => {
                thiele_upper(&ThieleWeights::Geometric { q: q.clone() }, gamma, k)
            }
        }
    }

    /// Floor-free value of the bound expression, used for the derivative
    /// column of emitted curves.
    fn smoothed(&self, gamma: f64, k: usize) -> f64 {
        let kf = k as f64;
        match self {
            CurveFamily::AlphaConst => (gamma * (kf + 1.0)).clamp(0.0, kf),
            CurveFamily::AlphaGeom { q } => {
                let q = rational_to_f64(q);
                // Continuous l solving sum_{i<=l} q^{-i} = (k - l + 1)g/(1-g).
                let lhs = |l: f64| (q.powf(-l) - 1.0) / (1.0 - q);
                let rhs = |l: f64| (kf - l + 1.0) * gamma / (1.0 - gamma);
                bisect_increasing(|l| lhs(l) - rhs(l), kf)
            }
            CurveFamily::AlphaSchedule(s) => {
                // Piecewise-linear interpolation of the partial sums.
                let inv: Vec<f64> = (1..=k).map(|i| 1.0 / s.eval_f64(i)).collect();
                let mut sums = vec![0.0];
                for v in &inv {
                    sums.push(sums.last().unwrap() + v);
                }
                let lhs = |l: f64| {
                    let i = (l.floor() as usize).min(k - 1);
                    sums[i] + (l - i as f64) * inv[i]
                };
                let rhs = |l: f64| (kf - l + 1.0) * gamma / (1.0 - gamma);
                bisect_increasing(|l| lhs(l) - rhs(l), kf)
            }
            CurveFamily::BetaConst => (gamma * (kf + 1.0)).clamp(0.0, kf),
            CurveFamily::BetaExp { base, scale } => {
                let b = rational_to_f64(base);
                let c = rational_to_f64(scale);
                let bg = b.powf(c * gamma);
                let bc = b.powf(c * (1.0 - gamma));
                ((kf + 1.0) * gamma * bc / ((1.0 - gamma) * bg + gamma * bc)).clamp(0.0, kf)
            }
            CurveFamily::ThieleGeomLower { q } => {
                let q = rational_to_f64(q);
                let rhs = (1.0 - gamma) / gamma
                    * (1..=k)
                        .map(|x| x as f64 * q.powi(x as i32))
                        .fold(0.0, f64::max);
                // (k - f) q^(1+f) decreases in f; find the crossing.
                bisect_increasing(|f| rhs - (kf - f) * q.powf(1.0 + f), kf)
            }
            CurveFamily::ThieleGeomUpper { q } => {
                let q = rational_to_f64(q);
                let factor = (1.0 - gamma) / gamma;
                let holds = |f: f64| {
                    let limit = (kf - f + 1.0).floor() as usize;
                    (1..=limit.max(1)).all(|x| {
                        (kf - f + x as f64 + 1.0) * q.powf(f)
                            >= factor * x as f64 * q.powi(x as i32)
                    })
                };
                // Fine descending scan; the satisfying set need not be an
                // interval, so take the largest satisfying grid point.
                let steps = (k * 256) as i64;
                (0..=steps)
                    .rev()
                    .map(|i| i as f64 / 256.0)
                    .find(|&f| holds(f))
                    .unwrap_or(0.0)
            }
        }
    }
}

/// Root of an increasing function on `[0, hi]`, clamped to the interval.
fn bisect_increasing(h: impl Fn(f64) -> f64, hi: f64) -> f64 {
    if h(0.0) >= 0.0 {
        return 0.0;
    }
    if h(hi) <= 0.0 {
        return hi;
    }
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if h(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One sampled point of a guarantee curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub gamma: BigRational,
    /// Guaranteed seats as a fraction of `k` (floored value).
    pub value_over_k: BigRational,
    /// Floor-free bound value (not divided by `k`).
    pub smoothed: f64,
    /// Forward difference of `smoothed / k` over the gamma grid; the last
    /// row repeats the previous difference.
    pub derivative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub k: usize,
    pub rows: Vec<CurveRow>,
}

/// Samples the guarantee of `family` on the grid `gamma = i/den`,
/// `i = 1..den`.
pub fn emit_bound_curve(family: &CurveFamily, k: usize, grid_denominator: u64) -> BoundCurve {
    assert!(grid_denominator >= 2, "grid must contain interior points");
    let mut rows: Vec<CurveRow> = Vec::with_capacity(grid_denominator as usize - 1);
    let mut smoothed_values = Vec::with_capacity(grid_denominator as usize - 1);
    for i in 1..grid_denominator {
        let gamma = BigRational::new(BigInt::from(i), BigInt::from(grid_denominator));
        let value = family.value(&gamma, k);
        let smoothed = family.smoothed(i as f64 / grid_denominator as f64, k);
        smoothed_values.push(smoothed);
        rows.push(CurveRow {
            gamma,
            value_over_k: BigRational::new(BigInt::from(value as u64), BigInt::from(k as u64)),
            smoothed,
            derivative: 0.0,
        });
    }
    let h = 1.0 / grid_denominator as f64;
    let count = rows.len();
    for i in 0..count {
        let d = if i + 1 < count {
            (smoothed_values[i + 1] - smoothed_values[i]) / h / k as f64
        } else if count >= 2 {
            (smoothed_values[i] - smoothed_values[i - 1]) / h / k as f64
        } else {
            0.0
        };
        rows[i].derivative = d;
    }
    BoundCurve { k, rows }
}

/// Renders a curve as CSV with header `gamma,value_over_k,derivative`.
pub fn curve_to_csv(curve: &BoundCurve) -> String {
    let mut out = String::from("gamma,value_over_k,derivative\n");
    for row in &curve.rows {
        let _ = writeln!(
            out,
            "{:.6},{:.6},{:.6}",
            rational_to_f64(&row.gamma),
            rational_to_f64(&row.value_over_k),
            row.derivative
        );
    }
    out
}
