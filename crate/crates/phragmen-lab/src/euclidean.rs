//! One-dimensional spatial election generation and the issue-voting model.
//!
//! Voters and candidates are points in `[-1, 1]` drawn from a scaled beta
//! distribution; a voter approves every candidate within a fixed radius.
//! The issue-voting model additionally assigns every individual a binary
//! stance on a set of positioned issues; an elected committee then decides
//! each issue by majority and a voter's satisfaction is the fraction of
//! decisions matching her own stances.

use crate::election::{Committee, Election, ElectionError};
use rand::Rng;
use rand_distr::{Beta, Distribution};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EuclideanError {
    #[error("beta shape parameters must be positive, got ({0}, {1})")]
    BadShape(f64, f64),
    #[error("approval radius must lie in (0, 0.5], got {0}")]
    BadRadius(f64),
    #[error(transparent)]
    Election(#[from] ElectionError),
}

/// Parameters of one generated spatial election.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanConfig {
    pub beta_a: f64,
    pub beta_b: f64,
    pub num_voters: usize,
    pub num_candidates: usize,
    pub committee_size: usize,
    /// Approval radius; capped at 0.5 so no ballot spans both extremes.
    pub xi: f64,
    pub seed: u64,
}

impl EuclideanConfig {
    pub fn validate(&self) -> Result<(), EuclideanError> {
        if !(self.beta_a > 0.0 && self.beta_b > 0.0) {
            return Err(EuclideanError::BadShape(self.beta_a, self.beta_b));
        }
        if !(self.xi > 0.0 && self.xi <= 0.5) {
            return Err(EuclideanError::BadRadius(self.xi));
        }
        Ok(())
    }
}

/// Parameters of the issue-voting model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IssueModelConfig {
    /// Number of binary issues.
    pub issues: usize,
    /// Slope of disagreement towards same-side issues.
    pub tau: f64,
    /// Additional slope of disagreement towards opposite-side issues.
    pub delta: f64,
}

impl Default for IssueModelConfig {
    fn default() -> Self {
        IssueModelConfig {
            issues: 100,
            tau: 30.0,
            delta: 120.0,
        }
    }
}

/// A generated election together with everyone's spatial position.
#[derive(Debug, Clone)]
pub struct PositionedElection {
    pub election: Election,
    pub voter_positions: Vec<f64>,
    pub candidate_positions: Vec<f64>,
}

/// Draws `Beta(a, b)` and rescales it from `[0, 1]` onto `[-1, 1]`.
pub fn sample_beta_scaled<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    let beta = Beta::new(a, b).expect("shape parameters are positive");
    2.0 * beta.sample(rng) - 1.0
}

/// Samples all positions (voters first, then candidates) and builds the
/// radius-approval profile. Voters whose radius contains no candidate are
/// kept with empty ballots; they still count towards cost shares and
/// satisfaction statistics but can never pay for or score anyone.
pub fn build_euclidean_election<R: Rng + ?Sized>(
    cfg: &EuclideanConfig,
    rng: &mut R,
) -> Result<PositionedElection, EuclideanError> {
    cfg.validate()?;
    let voter_positions: Vec<f64> = (0..cfg.num_voters)
        .map(|_| sample_beta_scaled(cfg.beta_a, cfg.beta_b, rng))
        .collect();
    let candidate_positions: Vec<f64> = (0..cfg.num_candidates)
        .map(|_| sample_beta_scaled(cfg.beta_a, cfg.beta_b, rng))
        .collect();
    let approvals = radius_approvals(&voter_positions, &candidate_positions, cfg.xi);
    let labels = (1..=cfg.num_candidates).map(|i| format!("c{i}")).collect();
    let election = Election::new_allow_empty(labels, approvals, cfg.committee_size)?;
    Ok(PositionedElection {
        election,
        voter_positions,
        candidate_positions,
    })
}

/// The radius rule: voter `v` approves candidate `c` iff `|v - c| <= xi`.
pub fn radius_approvals(
    voter_positions: &[f64],
    candidate_positions: &[f64],
    xi: f64,
) -> Vec<Vec<usize>> {
    voter_positions
        .iter()
        .map(|&v| {
            candidate_positions
                .iter()
                .enumerate()
                .filter(|(_, &c)| (v - c).abs() <= xi)
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

/// True iff, after ordering candidates by position, every ballot is a
/// contiguous block. Radius-generated profiles always satisfy this.
pub fn is_candidate_interval(pe: &PositionedElection) -> bool {
    let m = pe.candidate_positions.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        pe.candidate_positions[a]
            .partial_cmp(&pe.candidate_positions[b])
            .expect("positions are ordered")
            .then(a.cmp(&b))
    });
    let mut rank = vec![0usize; m];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    (0..pe.election.num_voters()).all(|v| {
        let mut ranks: Vec<usize> = pe
            .election
            .approval_set(v)
            .iter()
            .map(|c| rank[c])
            .collect();
        ranks.sort_unstable();
        ranks.windows(2).all(|w| w[1] == w[0] + 1)
    })
}

/// Probability that an individual at `eta` is for an issue at `x`.
///
/// The issue at 0 is the status quo and is accepted by everyone. Issues on
/// the individual's side but closer to the center are always accepted;
/// same-side issues beyond the individual's position are accepted with
/// probability decaying in the distance; opposite-side issues decay faster
/// the more extreme the individual.
pub fn p_eta(eta: f64, x: f64, tau: f64, delta: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&eta) && (-1.0..=1.0).contains(&x));
    if x * eta > 0.0 {
        if x.abs() > eta.abs() {
            1.0 / (tau * (1.0 - eta.abs()) * (eta - x).abs() + 1.0)
        } else {
            1.0
        }
    } else {
        1.0 / ((delta * eta.abs() + tau) * x.abs() + 1.0)
    }
}

/// Bernoulli stance matrix: entry `(individual, issue)` is `true` with
/// probability [`p_eta`], independently. Row order follows `positions`;
/// within a row, issues are drawn in order.
pub fn generate_issue_profile<R: Rng + ?Sized>(
    positions: &[f64],
    issue_positions: &[f64],
    cfg: &IssueModelConfig,
    rng: &mut R,
) -> Vec<Vec<bool>> {
    positions
        .iter()
        .map(|&eta| {
            issue_positions
                .iter()
                .map(|&x| rng.random::<f64>() < p_eta(eta, x, cfg.tau, cfg.delta))
                .collect()
        })
        .collect()
}

/// Majority decision per issue: accepted iff strictly more than half of the
/// member rows are for it. An even split keeps the status quo (rejected).
pub fn committee_decisions(member_rows: &[&[bool]]) -> Vec<bool> {
    assert!(!member_rows.is_empty());
    let issues = member_rows[0].len();
    (0..issues)
        .map(|i| {
            let ones = member_rows.iter().filter(|row| row[i]).count();
            2 * ones > member_rows.len()
        })
        .collect()
}

/// Fraction of issues on which the voter's stance matches the decision.
pub fn decision_satisfaction(voter_row: &[bool], decisions: &[bool]) -> f64 {
    assert_eq!(voter_row.len(), decisions.len());
    assert!(!decisions.is_empty());
    let matches = voter_row
        .iter()
        .zip(decisions)
        .filter(|(a, b)| a == b)
        .count();
    matches as f64 / decisions.len() as f64
}

/// Issue-model satisfaction of every voter under a committee, given a stance
/// matrix over all individuals (voters first, then candidates).
pub fn issue_satisfactions(
    profile: &[Vec<bool>],
    num_voters: usize,
    committee: &Committee,
) -> Vec<f64> {
    let member_rows: Vec<&[bool]> = committee
        .members()
        .iter()
        .map(|&c| profile[num_voters + c].as_slice())
        .collect();
    let decisions = committee_decisions(&member_rows);
    (0..num_voters)
        .map(|v| decision_satisfaction(&profile[v], &decisions))
        .collect()
}
