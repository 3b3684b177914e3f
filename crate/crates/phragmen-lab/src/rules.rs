//! Rule parameters: voter earning-speed schedules, candidate cost functions,
//! Thiele weight sequences, tie-breaking, and the tagged rule descriptions
//! used by the CLI and the axiom verifiers.

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RuleParseError {
    #[error("unknown rule {0:?}")]
    UnknownRule(String),
    #[error("unknown curve family {0:?}")]
    UnknownFamily(String),
    #[error("invalid parameter {value:?} for {what}: {message}")]
    BadParameter {
        what: &'static str,
        value: String,
        message: String,
    },
}

fn bad(what: &'static str, value: &str, message: impl Into<String>) -> RuleParseError {
    RuleParseError::BadParameter {
        what,
        value: value.to_string(),
        message: message.into(),
    }
}

/// Parses `"0.5"`, `"1/2"` or `"2"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, RuleParseError> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt, RuleParseError> {
        t.parse()
            .map_err(|_| bad("rational", s, format!("invalid integer {t:?}")))
    };
    if let Some((num, den)) = s.split_once('/') {
        let den = parse_int(den)?;
        if den.is_zero() {
            return Err(bad("rational", s, "zero denominator"));
        }
        return Ok(BigRational::new(parse_int(num)?, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad("rational", s, "invalid decimal fraction"));
        }
        let negative = int_part.starts_with('-');
        let int_part = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            parse_int(int_part)?
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac: BigInt = parse_int(frac_part)?;
        let magnitude = int_part.abs() * &scale + frac;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(BigRational::new(signed, scale));
    }
    Ok(BigRational::from_integer(parse_int(s)?))
}

/// Earning-speed schedule: `alpha(i)` is a voter's speed while she has paid
/// for `i - 1` committee members so far.
#[derive(Debug, Clone, PartialEq)]
pub enum SpeedSchedule {
    /// `alpha(i) = 1`.
    Constant,
    /// `alpha(i) = q^(i-1)`, so the first credit accrues at unit speed.
    Geometric { q: BigRational },
    /// `alpha(i) = q^i`, the form used by the simulation scenarios.
    GeometricShifted { q: BigRational },
    /// `alpha(i) = i^p` for a signed integer exponent.
    Power { exponent: i32 },
    /// Explicit per-index speeds; queries beyond the table repeat the last
    /// entry.
    Table(Vec<BigRational>),
}

impl SpeedSchedule {
    /// Exact speed for index `i >= 1`. Every closed form is rational.
    pub fn eval_exact(&self, i: usize) -> BigRational {
        assert!(i >= 1, "speed index starts at 1");
        let value = match self {
            SpeedSchedule::Constant => BigRational::one(),
            SpeedSchedule::Geometric { q } => rational_pow(q, (i - 1) as i64),
            SpeedSchedule::GeometricShifted { q } => rational_pow(q, i as i64),
            SpeedSchedule::Power { exponent } => rational_pow(
                &BigRational::from_integer(BigInt::from(i)),
                *exponent as i64,
            ),
            SpeedSchedule::Table(values) => values[(i - 1).min(values.len() - 1)].clone(),
        };
        assert!(value.is_positive(), "speed alpha({i}) must be positive");
        value
    }

    pub fn eval_f64(&self, i: usize) -> f64 {
        match self {
            SpeedSchedule::Constant => 1.0,
            SpeedSchedule::Geometric { q } => rational_to_f64(q).powi(i as i32 - 1),
            SpeedSchedule::GeometricShifted { q } => rational_to_f64(q).powi(i as i32),
            SpeedSchedule::Power { exponent } => (i as f64).powi(*exponent),
            SpeedSchedule::Table(values) => rational_to_f64(&values[(i - 1).min(values.len() - 1)]),
        }
    }

    /// True when `alpha` is non-increasing with values in `(0, 1]` over
    /// `1..=up_to` — the domain required by the representation guarantees.
    pub fn is_bound_compatible(&self, up_to: usize) -> bool {
        let one = BigRational::one();
        let mut prev: Option<BigRational> = None;
        for i in 1..=up_to {
            let v = self.eval_exact(i);
            if !v.is_positive() || v > one {
                return false;
            }
            if let Some(p) = prev {
                if v > p {
                    return false;
                }
            }
            prev = Some(v);
        }
        true
    }
}

/// Candidate cost function: a candidate approved by an `x`-fraction of the
/// electorate costs `beta(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CostFunction {
    /// `beta(x) = 1`.
    Constant,
    /// `beta(x) = base^(scale * x)`.
    Exponential {
        base: BigRational,
        scale: BigRational,
    },
    /// Values tabulated on the grid `x = j / denominator`.
    Table {
        denominator: usize,
        values: Vec<BigRational>,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CostEvalError {
    #[error("cost beta({num}/{den}) is irrational in exact mode")]
    Irrational { num: u64, den: u64 },
    #[error("cost table with denominator {table} cannot evaluate share {num}/{den}")]
    TableMismatch { table: usize, num: u64, den: u64 },
}

impl CostFunction {
    /// Exact cost for the share `num/den`. Exponential forms are rational
    /// only when `scale * num / den` is an integer.
    pub fn eval_exact(&self, num: u64, den: u64) -> Result<BigRational, CostEvalError> {
        assert!(den > 0 && num <= den);
        match self {
            CostFunction::Constant => Ok(BigRational::one()),
            CostFunction::Exponential { base, scale } => {
                let exp = scale * BigRational::new(BigInt::from(num), BigInt::from(den));
                if !exp.is_integer() {
                    return Err(CostEvalError::Irrational { num, den });
                }
                let e: i64 = exp
                    .to_integer()
                    .try_into()
                    .map_err(|_| CostEvalError::Irrational { num, den })?;
                Ok(rational_pow(base, e))
            }
            CostFunction::Table {
                denominator,
                values,
            } => {
                if num == 0 {
                    return Ok(values[0].clone());
                }
                if (*denominator as u64).is_multiple_of(den) {
                    let idx = (num * (*denominator as u64 / den)) as usize;
                    Ok(values[idx].clone())
                } else {
                    Err(CostEvalError::TableMismatch {
                        table: *denominator,
                        num,
                        den,
                    })
                }
            }
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match self {
            CostFunction::Constant => 1.0,
            CostFunction::Exponential { base, scale } => {
                rational_to_f64(base).powf(rational_to_f64(scale) * x)
            }
            CostFunction::Table {
                denominator,
                values,
            } => {
                let idx = (x * *denominator as f64).round() as usize;
                rational_to_f64(&values[idx.min(values.len() - 1)])
            }
        }
    }

    /// True when `beta` is non-increasing on `[0, 1]` with `beta(0) = 1`,
    /// checked symbolically for the closed forms.
    pub fn is_bound_compatible(&self) -> bool {
        match self {
            CostFunction::Constant => true,
            CostFunction::Exponential { base, scale } => {
                base.is_positive() && *base <= BigRational::one() && scale.is_positive()
            }
            CostFunction::Table { values, .. } => {
                values.first().map(|v| v.is_one()).unwrap_or(false)
                    && values.windows(2).all(|w| w[1] <= w[0])
                    && values.iter().all(|v| v.is_positive())
            }
        }
    }
}

/// Thiele weight sequence `lambda(j)`: the marginal score of a voter's `j`-th
/// approved committee member.
#[derive(Debug, Clone, PartialEq)]
pub enum ThieleWeights {
    /// Harmonic weights `1/j`.
    Pav,
    /// `lambda(j) = q^j`.
    Geometric {
        q: BigRational,
    },
    /// `lambda(j) = 1` (approval voting).
    Constant,
    Table(Vec<BigRational>),
}

impl ThieleWeights {
    pub fn eval(&self, j: usize) -> BigRational {
        assert!(j >= 1);
        match self {
            ThieleWeights::Pav => BigRational::new(BigInt::one(), BigInt::from(j)),
            ThieleWeights::Geometric { q } => rational_pow(q, j as i64),
            ThieleWeights::Constant => BigRational::one(),
            ThieleWeights::Table(values) => values[(j - 1).min(values.len() - 1)].clone(),
        }
    }

    /// Cumulative weight `sum_{j=1..=count} lambda(j)`.
    pub fn prefix_sum(&self, count: usize) -> BigRational {
        (1..=count).map(|j| self.eval(j)).sum()
    }

    /// Checks that the weights are non-increasing and convex on
    /// `1..=up_to`, with `lambda(1) > 0`.
    pub fn validate(&self, up_to: usize) -> Result<(), RuleParseError> {
        if !self.eval(1).is_positive() {
            return Err(bad("thiele weights", "lambda(1)", "must be positive"));
        }
        for j in 1..=up_to {
            let a = self.eval(j);
            let b = self.eval(j + 1);
            let c = self.eval(j + 2);
            let d1 = &a - &b;
            let d2 = &b - &c;
            if d1 < BigRational::zero() || d2 < BigRational::zero() || d1 < d2 {
                return Err(bad(
                    "thiele weights",
                    "lambda",
                    format!("not non-increasing convex at j={j}"),
                ));
            }
        }
        Ok(())
    }
}

/// Tie-breaking among simultaneously purchasable candidates (or equal-score
/// greedy choices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TieRule {
    /// Lowest candidate id wins.
    LexCandidate,
    /// Explicit priority order; must be a permutation of the candidate ids.
    FixedOrder(Vec<usize>),
}

impl TieRule {
    /// Picks the winning candidate among `tied` (nonempty).
    pub fn pick(&self, tied: &[usize]) -> usize {
        assert!(!tied.is_empty());
        match self {
            TieRule::LexCandidate => *tied.iter().min().unwrap(),
            TieRule::FixedOrder(order) => {
                let rank = |c: usize| {
                    order
                        .iter()
                        .position(|&x| x == c)
                        .expect("tie order must cover all candidates")
                };
                *tied.iter().min_by_key(|&&c| rank(c)).unwrap()
            }
        }
    }

    pub fn validate(&self, m: usize) -> bool {
        match self {
            TieRule::LexCandidate => true,
            TieRule::FixedOrder(order) => {
                let mut sorted = order.clone();
                sorted.sort_unstable();
                sorted == (0..m).collect::<Vec<_>>()
            }
        }
    }
}

/// A tagged description of a committee rule.
#[derive(Debug, Clone, PartialEq)]
pub enum RuleSpec {
    /// The purchase process, parameterized by both a speed schedule and a
    /// cost function. The speed-only and cost-only variants are the
    /// restrictions with the other parameter constant.
    Phragmen {
        alpha: SpeedSchedule,
        beta: CostFunction,
    },
    /// Exact score maximization (set-valued).
    Thiele { weights: ThieleWeights },
    /// Greedy one-candidate-at-a-time score maximization.
    SeqThiele { weights: ThieleWeights },
}

impl RuleSpec {
    pub fn classic() -> Self {
        RuleSpec::Phragmen {
            alpha: SpeedSchedule::Constant,
            beta: CostFunction::Constant,
        }
    }

    pub fn is_sequential(&self) -> bool {
        matches!(self, RuleSpec::Phragmen { .. } | RuleSpec::SeqThiele { .. })
    }

    /// Parses the CLI rule grammar:
    ///
    /// * `classic` — unit speeds, unit costs
    /// * `alpha:const` | `alpha:geom:<q>` (speed `q^i`) | `alpha:geom1:<q>`
    ///   (speed `q^(i-1)`) | `alpha:pow:<p>`
    /// * `beta:const` | `beta:exp:<b>[:<c>]` (cost `b^(c*x)`, `c` defaults 1)
    /// * `thiele:pav` | `thiele:av` | `thiele:geom:<q>`
    /// * `seqthiele:pav` | `seqthiele:av` | `seqthiele:geom:<q>`
    pub fn parse(s: &str) -> Result<Self, RuleParseError> {
        let parts: Vec<&str> = s.split(':').collect();
        let positive_q = |value: &str| -> Result<BigRational, RuleParseError> {
            let q = parse_rational(value)?;
            if !q.is_positive() {
                return Err(bad("q", value, "must be positive"));
            }
            Ok(q)
        };
        match parts.as_slice() {
            ["classic"] => Ok(RuleSpec::classic()),
            ["alpha", "const"] => Ok(RuleSpec::Phragmen {
                alpha: SpeedSchedule::Constant,
                beta: CostFunction::Constant,
            }),
            ["alpha", "geom", q] => Ok(RuleSpec::Phragmen {
                alpha: SpeedSchedule::GeometricShifted { q: positive_q(q)? },
                beta: CostFunction::Constant,
            }),
            ["alpha", "geom1", q] => Ok(RuleSpec::Phragmen {
                alpha: SpeedSchedule::Geometric { q: positive_q(q)? },
                beta: CostFunction::Constant,
            }),
            ["alpha", "pow", p] => {
                let exponent: i32 = p
                    .parse()
                    .map_err(|_| bad("exponent", p, "must be a signed integer"))?;
                Ok(RuleSpec::Phragmen {
                    alpha: SpeedSchedule::Power { exponent },
                    beta: CostFunction::Constant,
                })
            }
            ["beta", "const"] => Ok(RuleSpec::classic()),
            ["beta", "exp", b] | ["beta", "exp", b, "1"] => Ok(RuleSpec::Phragmen {
                alpha: SpeedSchedule::Constant,
                beta: CostFunction::Exponential {
                    base: positive_q(b)?,
                    scale: BigRational::one(),
                },
            }),
            ["beta", "exp", b, c] => Ok(RuleSpec::Phragmen {
                alpha: SpeedSchedule::Constant,
                beta: CostFunction::Exponential {
                    base: positive_q(b)?,
                    scale: positive_q(c)?,
                },
            }),
            ["thiele", rest @ ..] => Ok(RuleSpec::Thiele {
                weights: parse_weights(s, rest)?,
            }),
            ["seqthiele", rest @ ..] => Ok(RuleSpec::SeqThiele {
                weights: parse_weights(s, rest)?,
            }),
            _ => Err(RuleParseError::UnknownRule(s.to_string())),
        }
    }
}

fn parse_weights(full: &str, parts: &[&str]) -> Result<ThieleWeights, RuleParseError> {
    match parts {
        ["pav"] => Ok(ThieleWeights::Pav),
        ["av"] | ["const"] => Ok(ThieleWeights::Constant),
        ["geom", q] => {
            let q = parse_rational(q)?;
            if !q.is_positive() || q > BigRational::one() {
                return Err(bad("q", full, "geometric weight base must be in (0, 1]"));
            }
            Ok(ThieleWeights::Geometric { q })
        }
        _ => Err(RuleParseError::UnknownRule(full.to_string())),
    }
}

/// `base^exp` for a signed exponent; `base` must be nonzero when `exp < 0`.
pub fn rational_pow(base: &BigRational, exp: i64) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let e: i32 = exp.try_into().expect("exponent fits i32");
    base.pow(e)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    num::ToPrimitive::to_f64(r).expect("rational representable as f64")
}
