//! Event-driven continuous-time purchase process.
//!
//! Voters earn credits over time and greedily buy candidates they approve.
//! A voter's earning speed is `alpha(j + 1)` once she has paid in `j`
//! purchases; a candidate approved by a fraction `x` of the electorate
//! costs `beta(x)`. A candidate is bought at the first time its approvers'
//! combined balance reaches its cost; all of its approvers then pay their
//! entire balance (and their earning index advances). The process stops
//! after `k` purchases.
//!
//! The classic sequential rule is the restriction with both parameters
//! constant; the speed-only and cost-only rules fix the other parameter.
//!
//! The engine runs over either exact big-rational arithmetic or `f64` with a
//! relative tie tolerance. Exact mode refuses cost functions that take
//! irrational values on the instance's shares (e.g. fractional exponents);
//! [`run_phragmen`] can fall back to floating point in that case and reports
//! which mode was used.

use crate::election::{Committee, Election};
use crate::rules::{CostFunction, SpeedSchedule, TieRule};
use num::BigRational;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(
        "insufficient purchasable candidates: {available} have approvers, committee size is {k}"
    )]
    InsufficientCandidates { available: usize, k: usize },
    #[error("exact mode unavailable: {0}")]
    ExactUnavailable(#[from] crate::rules::CostEvalError),
    #[error("tie rule is not a permutation of the candidate ids")]
    BadTieRule,
}

/// Numeric field the purchase process runs over.
pub trait EngineNum: Clone + PartialOrd + std::fmt::Debug {
    fn zero() -> Self;
    fn from_ratio(num: i64, den: u64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    /// Tie test: exact equality for rationals, relative tolerance for floats.
    fn ties(&self, rhs: &Self, eps: f64) -> bool;
    fn to_f64(&self) -> f64;
}

impl EngineNum for BigRational {
    fn zero() -> Self {
        num::Zero::zero()
    }
    fn from_ratio(num: i64, den: u64) -> Self {
        BigRational::new(num.into(), den.into())
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn ties(&self, rhs: &Self, _eps: f64) -> bool {
        self == rhs
    }
    fn to_f64(&self) -> f64 {
        crate::rules::rational_to_f64(self)
    }
}

impl EngineNum for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_ratio(num: i64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn ties(&self, rhs: &Self, eps: f64) -> bool {
        (self - rhs).abs() <= eps * self.abs().max(rhs.abs())
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// One purchase: who was bought, when, by whom, and for how much.
#[derive(Debug, Clone, PartialEq)]
pub struct PurchaseEvent<N> {
    pub time: N,
    pub candidate: usize,
    /// All approvers of the candidate, ascending; each pays her full balance.
    pub payers: Vec<usize>,
    pub cost: N,
    /// Per-payer payment, aligned with `payers`.
    pub payments: Vec<N>,
}

/// Full record of a purchase-process run.
#[derive(Debug, Clone, PartialEq)]
pub struct PhragmenTrace<N> {
    pub events: Vec<PurchaseEvent<N>>,
    pub committee: Committee,
    /// Per-voter unspent credits at termination time.
    pub final_balances: Vec<N>,
}

impl<N: EngineNum> PhragmenTrace<N> {
    /// Total credits earned by all voters up to termination.
    pub fn total_earned(&self) -> N {
        let spent = self
            .events
            .iter()
            .flat_map(|e| e.payments.iter())
            .fold(N::zero(), |acc, p| acc.add(p));
        self.final_balances.iter().fold(spent, |acc, b| acc.add(b))
    }
}

/// Numeric mode selection for [`run_phragmen`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NumericMode {
    Exact,
    Float {
        eps: f64,
    },
    /// Exact when every cost evaluates rationally, otherwise float.
    Auto {
        eps: f64,
    },
}

pub const DEFAULT_TIE_EPS: f64 = 1e-9;

/// A finished run, tagged with the arithmetic that produced it.
#[derive(Debug, Clone, PartialEq)]
pub enum PhragmenRun {
    Exact(PhragmenTrace<BigRational>),
    Float(PhragmenTrace<f64>),
}

impl PhragmenRun {
    pub fn committee(&self) -> &Committee {
        match self {
            PhragmenRun::Exact(t) => &t.committee,
            PhragmenRun::Float(t) => &t.committee,
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self {
            PhragmenRun::Exact(_) => "exact",
            PhragmenRun::Float(_) => "float",
        }
    }
}

/// Runs the purchase process in the requested numeric mode.
pub fn run_phragmen(
    e: &Election,
    alpha: &SpeedSchedule,
    beta: &CostFunction,
    tie: &TieRule,
    mode: NumericMode,
) -> Result<PhragmenRun, EngineError> {
    match mode {
        NumericMode::Exact => run_exact(e, alpha, beta, tie).map(PhragmenRun::Exact),
        NumericMode::Float { eps } => run_float(e, alpha, beta, tie, eps).map(PhragmenRun::Float),
        NumericMode::Auto { eps } => match run_exact(e, alpha, beta, tie) {
            Ok(trace) => Ok(PhragmenRun::Exact(trace)),
            Err(EngineError::ExactUnavailable(_)) => {
                run_float(e, alpha, beta, tie, eps).map(PhragmenRun::Float)
            }
            Err(other) => Err(other),
        },
    }
}

pub fn run_exact(
    e: &Election,
    alpha: &SpeedSchedule,
    beta: &CostFunction,
    tie: &TieRule,
) -> Result<PhragmenTrace<BigRational>, EngineError> {
    let n = e.num_voters() as u64;
    let costs = candidate_costs(e, |count| {
        beta.eval_exact(count, n).map_err(EngineError::from)
    })?;
    let mut engine = Engine::new(e, costs, |i| alpha.eval_exact(i), tie.clone(), 0.0)?;
    engine.run()
}

pub fn run_float(
    e: &Election,
    alpha: &SpeedSchedule,
    beta: &CostFunction,
    tie: &TieRule,
    eps: f64,
) -> Result<PhragmenTrace<f64>, EngineError> {
    let n = e.num_voters() as f64;
    let costs = candidate_costs(e, |count| Ok(beta.eval_f64(count as f64 / n)))?;
    let mut engine = Engine::new(e, costs, |i| alpha.eval_f64(i), tie.clone(), eps)?;
    engine.run()
}

fn candidate_costs<N>(
    e: &Election,
    mut cost_of: impl FnMut(u64) -> Result<N, EngineError>,
) -> Result<Vec<N>, EngineError> {
    (0..e.num_candidates())
        .map(|c| cost_of(e.approver_count(c) as u64))
        .collect()
}

/// Live state of the purchase process. Exposed so callers can inspect
/// per-candidate purchase horizons mid-run.
pub struct Engine<'a, N: EngineNum, A: FnMut(usize) -> N> {
    election: &'a Election,
    tie: TieRule,
    eps: f64,
    alpha: A,
    alpha_cache: Vec<N>,
    approver_lists: Vec<Vec<usize>>,
    voter_lists: Vec<Vec<usize>>,
    costs: Vec<N>,
    now: N,
    balances: Vec<N>,
    speeds: Vec<N>,
    paid_count: Vec<usize>,
    group_balance: Vec<N>,
    group_speed: Vec<N>,
    elected: Vec<bool>,
    events: Vec<PurchaseEvent<N>>,
    committee: Vec<usize>,
}

impl<'a, N: EngineNum, A: FnMut(usize) -> N> Engine<'a, N, A> {
    pub fn new(
        election: &'a Election,
        costs: Vec<N>,
        mut alpha: A,
        tie: TieRule,
        eps: f64,
    ) -> Result<Self, EngineError> {
        let n = election.num_voters();
        let m = election.num_candidates();
        if !tie.validate(m) {
            return Err(EngineError::BadTieRule);
        }
        let approver_lists: Vec<Vec<usize>> = (0..m).map(|c| election.approvers(c)).collect();
        let available = approver_lists.iter().filter(|a| !a.is_empty()).count();
        if available < election.committee_size() {
            return Err(EngineError::InsufficientCandidates {
                available,
                k: election.committee_size(),
            });
        }
        let mut voter_lists = vec![Vec::new(); n];
        for (c, approvers) in approver_lists.iter().enumerate() {
            for &v in approvers {
                voter_lists[v].push(c);
            }
        }
        let initial_speed = alpha(1);
        let speeds = vec![initial_speed.clone(); n];
        let group_balance = vec![N::zero(); m];
        let group_speed: Vec<N> = approver_lists
            .iter()
            .map(|approvers| {
                approvers
                    .iter()
                    .fold(N::zero(), |acc, _| acc.add(&initial_speed))
            })
            .collect();
        Ok(Engine {
            election,
            tie,
            eps,
            alpha_cache: vec![initial_speed],
            alpha,
            approver_lists,
            voter_lists,
            costs,
            now: N::zero(),
            balances: vec![N::zero(); n],
            speeds,
            paid_count: vec![0; n],
            group_balance,
            group_speed,
            elected: vec![false; m],
            events: Vec::new(),
            committee: Vec::new(),
        })
    }

    fn speed_for(&mut self, index: usize) -> N {
        while self.alpha_cache.len() < index {
            let next = (self.alpha)(self.alpha_cache.len() + 1);
            self.alpha_cache.push(next);
        }
        self.alpha_cache[index - 1].clone()
    }

    /// Earliest time `t >= now` at which candidate `c`'s approvers hold its
    /// cost, or `None` if `c` has no approvers.
    pub fn next_purchase_time(&self, c: usize) -> Option<N> {
        if self.approver_lists[c].is_empty() {
            return None;
        }
        let deficit = self.costs[c].sub(&self.group_balance[c]);
        if deficit <= N::zero() {
            return Some(self.now.clone());
        }
        Some(self.now.add(&deficit.div(&self.group_speed[c])))
    }

    pub fn current_time(&self) -> &N {
        &self.now
    }

    pub fn balance(&self, voter: usize) -> &N {
        &self.balances[voter]
    }

    /// Executes one purchase. Must not be called after `k` purchases.
    pub fn step(&mut self) {
        // Earliest purchase horizon over all unelected candidates.
        let mut best: Option<N> = None;
        for c in 0..self.costs.len() {
            if self.elected[c] {
                continue;
            }
            if let Some(t) = self.next_purchase_time(c) {
                if best.as_ref().map(|b| t < *b).unwrap_or(true) {
                    best = Some(t);
                }
            }
        }
        let target = best.expect("a purchasable candidate exists");
        let mut tied = Vec::new();
        for c in 0..self.costs.len() {
            if self.elected[c] {
                continue;
            }
            if let Some(t) = self.next_purchase_time(c) {
                if t.ties(&target, self.eps) {
                    tied.push(c);
                }
            }
        }
        let winner = self.tie.pick(&tied);

        // Advance the clock: every balance and group aggregate grows by
        // speed * dt.
        let dt = target.sub(&self.now);
        if dt > N::zero() {
            for v in 0..self.balances.len() {
                self.balances[v] = self.balances[v].add(&self.speeds[v].mul(&dt));
            }
            for c in 0..self.costs.len() {
                self.group_balance[c] = self.group_balance[c].add(&self.group_speed[c].mul(&dt));
            }
        }
        self.now = target.clone();

        // All approvers of the winner pay their entire balance; their
        // earning index (and hence speed) advances.
        let payers = self.approver_lists[winner].clone();
        let mut payments = Vec::with_capacity(payers.len());
        for &v in &payers {
            let payment = std::mem::replace(&mut self.balances[v], N::zero());
            self.paid_count[v] += 1;
            let new_speed = self.speed_for(self.paid_count[v] + 1);
            let old_speed = std::mem::replace(&mut self.speeds[v], new_speed.clone());
            for idx in 0..self.voter_lists[v].len() {
                let c = self.voter_lists[v][idx];
                if !self.elected[c] {
                    self.group_balance[c] = self.group_balance[c].sub(&payment);
                    self.group_speed[c] = self.group_speed[c].add(&new_speed).sub(&old_speed);
                }
            }
            payments.push(payment);
        }
        self.elected[winner] = true;
        self.committee.push(winner);
        self.events.push(PurchaseEvent {
            time: target,
            candidate: winner,
            payers,
            cost: self.costs[winner].clone(),
            payments,
        });
    }

    pub fn run(&mut self) -> Result<PhragmenTrace<N>, EngineError> {
        for _ in 0..self.election.committee_size() {
            self.step();
        }
        Ok(PhragmenTrace {
            events: std::mem::take(&mut self.events),
            committee: Committee::new_ordered(std::mem::take(&mut self.committee)),
            final_balances: self.balances.clone(),
        })
    }
}

/// A 100-voter, 13-candidate, `k = 6` instance on which an increasing speed
/// schedule concentrates the committee on candidates approved by a small
/// minority, while every non-increasing cost rule guarantees the 50-voter
/// bloc several seats. Voters `v1..v55` approve `c1`; `v1..v30` additionally
/// approve `c2..c6`; `v51..v100` approve `c7..c13`.
pub fn increasing_speed_showcase() -> Election {
    let mut approvals = vec![Vec::new(); 100];
    for (v, ballot) in approvals.iter_mut().enumerate() {
        if v < 55 {
            ballot.push(0);
        }
        if v < 30 {
            ballot.extend(1..6);
        }
        if v >= 50 {
            ballot.extend(6..13);
        }
    }
    Election::from_approvals(13, approvals, 6).expect("valid instance")
}
