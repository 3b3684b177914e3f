//! Brute-force verifiers for representation guarantees, independence of a
//! unanimously approved candidate, and committee monotonicity, plus
//! constructive instances exhibiting their failure modes.

use crate::bitset::BitSet;
use crate::election::{Committee, Election, VoterGroup};
use crate::phragmen::{run_phragmen, EngineError, NumericMode, DEFAULT_TIE_EPS};
use crate::rules::{rational_pow, RuleSpec, TieRule};
use crate::thiele::{exact_thiele, seq_thiele, ThieleError, DEFAULT_ENUMERATION_CAP};
use num::{BigInt, BigRational, One, Signed};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AxiomError {
    #[error("instance has {0} distinct ballot classes; verifier cap is {1}")]
    ClassCapExceeded(usize, usize),
    #[error("no unanimously approved candidate")]
    NoUnanimousCandidate,
    #[error("{0} unanimously approved candidates; expected exactly one")]
    MultipleUnanimousCandidates(usize),
    #[error("committee size must be at least 2 to remove a candidate and a seat")]
    CommitteeTooSmall,
    #[error("rule is not sequential")]
    NotSequential,
    #[error("group sizes are not integral: {0}")]
    NoIntegralScaling(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Thiele(#[from] ThieleError),
    #[error("invalid election: {0}")]
    Election(#[from] crate::election::ElectionError),
}

/// Default cap on distinct ballot classes for the subset verifier. Groups of
/// voters with identical ballots are interchangeable, so enumerating ballot
/// classes is exhaustive over all voter subsets.
pub const DEFAULT_CLASS_CAP: usize = 16;

const CANDIDATE_FAMILY_CAP: usize = 13;

/// Runs a rule, returning every winning committee. Sequential rules yield a
/// single committee; exact score optimization may yield several.
pub fn winning_committees(rule: &RuleSpec, e: &Election) -> Result<Vec<Committee>, AxiomError> {
    match rule {
        RuleSpec::Phragmen { alpha, beta } => {
            let run = run_phragmen(
                e,
                alpha,
                beta,
                &TieRule::LexCandidate,
                NumericMode::Auto {
                    eps: DEFAULT_TIE_EPS,
                },
            )?;
            Ok(vec![run.committee().clone()])
        }
        RuleSpec::Thiele { weights } => Ok(exact_thiele(e, weights, DEFAULT_ENUMERATION_CAP)?),
        RuleSpec::SeqThiele { weights } => Ok(vec![seq_thiele(e, weights, &TieRule::LexCandidate)]),
    }
}

/// A witnessed failure of the representation guarantee.
#[derive(Debug, Clone)]
pub struct PjrViolation {
    pub group: VoterGroup,
    /// `|union of (A(v) ∩ W) over the group|`.
    pub covered: usize,
    /// `min(|common approvals|, guarantee)`.
    pub required: usize,
}

#[derive(Debug, Clone)]
pub enum PjrOutcome {
    Ok,
    Violation(PjrViolation),
}

impl PjrOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, PjrOutcome::Ok)
    }
}

/// Checks that every voter group `S` receives
/// `min(|common approvals of S|, degree(|S|/n, k))` covered candidates in
/// `w`, where `degree` must be non-decreasing in its first argument and is
/// expected to floor its value.
///
/// Two exhaustive passes: first the maximal cohesive families (all approvers
/// of each candidate subset), which produce the most informative witness;
/// then every union of ballot classes. Only groups with a nonempty common
/// approval set can violate the condition, and enlarging a group within the
/// same ballot classes changes neither side except to raise the guarantee,
/// so the class pass is exhaustive over all `2^n` subsets.
pub fn verify_pjr_degree(
    e: &Election,
    w: &Committee,
    degree: &dyn Fn(&BigRational, usize) -> usize,
    class_cap: usize,
) -> Result<PjrOutcome, AxiomError> {
    let n = e.num_voters();
    let m = e.num_candidates();
    let k = e.committee_size();
    let w_set = w.as_bitset(m);

    // Guarantee depends on the group only through its size. The full
    // electorate sits outside the open-interval domain of the bound
    // formulas; every supported family tends to k there, so use that.
    let mut degree_cache: Vec<Option<usize>> = vec![None; n + 1];
    let mut degree_for = |size: usize| -> usize {
        if let Some(v) = degree_cache[size] {
            return v;
        }
        let v = if size == n {
            k
        } else {
            let gamma = BigRational::new(BigInt::from(size as u64), BigInt::from(n as u64));
            degree(&gamma, k)
        };
        degree_cache[size] = Some(v);
        v
    };

    let ballots: Vec<&BitSet> = (0..n).map(|v| e.approval_set(v)).collect();

    let mut check = |members: &BitSet| -> Option<PjrViolation> {
        let mut voters = members.iter();
        let first = voters.next()?;
        let mut common = ballots[first].clone();
        let mut union = ballots[first].clone();
        for v in voters {
            common.intersect_with(ballots[v]);
            union.union_with(ballots[v]);
        }
        if common.is_empty() {
            return None;
        }
        let size = members.count();
        let required = common.count().min(degree_for(size));
        let covered = union.intersection_count(&w_set);
        if covered < required {
            Some(PjrViolation {
                group: VoterGroup::new(members.clone(), n),
                covered,
                required,
            })
        } else {
            None
        }
    };

    // Pass 1: maximal cohesive families, ordered by (size, lex) of the
    // candidate subset. The family for a subset T is every voter approving
    // all of T.
    if m <= CANDIDATE_FAMILY_CAP {
        let mut subsets: Vec<u32> = (1..(1u32 << m)).collect();
        subsets.sort_by_key(|s| (s.count_ones(), *s));
        for subset in subsets {
            let mut family = BitSet::new(n);
            'voters: for (v, ballot) in ballots.iter().enumerate() {
                for c in 0..m {
                    if subset >> c & 1 == 1 && !ballot.contains(c) {
                        continue 'voters;
                    }
                }
                family.insert(v);
            }
            if let Some(violation) = check(&family) {
                return Ok(PjrOutcome::Violation(violation));
            }
        }
    }

    // Pass 2: unions of ballot classes; exhaustive. Report the smallest
    // violating group, breaking size ties by member order.
    let mut classes: Vec<(&BitSet, BitSet)> = Vec::new();
    for (v, ballot) in ballots.iter().enumerate() {
        match classes.iter_mut().find(|(b, _)| **b == **ballot) {
            Some((_, members)) => members.insert(v),
            None => {
                let mut members = BitSet::new(n);
                members.insert(v);
                classes.push((ballot, members));
            }
        }
    }
    if classes.len() > class_cap {
        return Err(AxiomError::ClassCapExceeded(classes.len(), class_cap));
    }
    let mut best: Option<(usize, Vec<usize>, PjrViolation)> = None;
    for mask in 1u32..(1u32 << classes.len()) {
        let mut members = BitSet::new(n);
        for (i, (_, class_members)) in classes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                members.union_with(class_members);
            }
        }
        if let Some(violation) = check(&members) {
            let key = (members.count(), members.to_vec());
            if best
                .as_ref()
                .map(|(s, v, _)| (key.0, &key.1) < (*s, v))
                .unwrap_or(true)
            {
                best = Some((key.0, key.1, violation));
            }
        }
    }
    Ok(match best {
        Some((_, _, violation)) => PjrOutcome::Violation(violation),
        None => PjrOutcome::Ok,
    })
}

/// Outcome of the unanimously-approved-candidate independence check.
#[derive(Debug, Clone)]
pub enum IuacOutcome {
    Holds,
    Counterexample {
        /// A winner of the full election not expressible as a reduced winner
        /// plus the unanimous candidate.
        winning: Committee,
        reduced_winners: Vec<Committee>,
    },
}

impl IuacOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, IuacOutcome::Holds)
    }
}

/// Requires `e` to contain exactly one unanimously approved candidate `u`.
/// Runs the rule on `e` and on `e` with `u` removed and one seat fewer;
/// holds iff every winner of the former is a winner of the latter plus `u`.
pub fn check_iuac(rule: &RuleSpec, e: &Election) -> Result<IuacOutcome, AxiomError> {
    let n = e.num_voters();
    let unanimous: Vec<usize> = (0..e.num_candidates())
        .filter(|&c| e.approver_count(c) == n)
        .collect();
    let u = match unanimous.as_slice() {
        [] => return Err(AxiomError::NoUnanimousCandidate),
        [u] => *u,
        many => return Err(AxiomError::MultipleUnanimousCandidates(many.len())),
    };
    if e.committee_size() < 2 {
        return Err(AxiomError::CommitteeTooSmall);
    }

    let full_winners = winning_committees(rule, e)?;

    // Remove u; candidate ids above it shift down by one.
    let reduced_labels: Vec<String> = e
        .candidate_labels()
        .iter()
        .enumerate()
        .filter(|(c, _)| *c != u)
        .map(|(_, l)| l.clone())
        .collect();
    let reduced_approvals: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            e.approval_set(v)
                .iter()
                .filter(|&c| c != u)
                .map(|c| if c > u { c - 1 } else { c })
                .collect()
        })
        .collect();
    let reduced =
        Election::new_allow_empty(reduced_labels, reduced_approvals, e.committee_size() - 1)?;
    let reduced_winners = winning_committees(rule, &reduced)?;

    let lifted: Vec<Vec<usize>> = reduced_winners
        .iter()
        .map(|w| {
            let mut members: Vec<usize> = w
                .members()
                .iter()
                .map(|&c| if c >= u { c + 1 } else { c })
                .collect();
            members.push(u);
            members.sort_unstable();
            members
        })
        .collect();

    for w in &full_winners {
        if !lifted.contains(&w.sorted_members()) {
            return Ok(IuacOutcome::Counterexample {
                winning: w.clone(),
                reduced_winners,
            });
        }
    }
    Ok(IuacOutcome::Holds)
}

/// Search bounds for [`find_iuac_violation`].
#[derive(Debug, Clone, Copy)]
pub struct SearchCaps {
    pub max_voters: usize,
    pub max_candidates: usize,
    pub max_committee: usize,
}

/// Searches two-bloc instances for a failure of unanimous-candidate
/// independence: bloc `V1` (size `n1`) approves candidates `C1`, bloc `V2`
/// approves `C2`, and everyone approves one extra candidate. Instances are
/// enumerated by ascending `(committee size, n, n1, |C1|, |C2|)`; the first
/// failing election (including the unanimous candidate, with its enlarged
/// committee size) is returned.
pub fn find_iuac_violation(
    rule: &RuleSpec,
    caps: SearchCaps,
) -> Result<Option<Election>, AxiomError> {
    for k_base in 1..caps.max_committee.max(1) {
        for n in 2..=caps.max_voters {
            for n1 in 1..n {
                let n2 = n - n1;
                for c1 in 1..caps.max_candidates {
                    for c2 in 1..=c1 {
                        if c1 + c2 + 1 > caps.max_candidates {
                            continue;
                        }
                        if c1 + c2 + 1 < k_base + 1 {
                            continue;
                        }
                        let u = c1 + c2;
                        let mut approvals = Vec::with_capacity(n);
                        for _ in 0..n1 {
                            let mut b: Vec<usize> = (0..c1).collect();
                            b.push(u);
                            approvals.push(b);
                        }
                        for _ in 0..n2 {
                            let mut b: Vec<usize> = (c1..c1 + c2).collect();
                            b.push(u);
                            approvals.push(b);
                        }
                        let e = Election::from_approvals(c1 + c2 + 1, approvals, k_base + 1)?;
                        if let IuacOutcome::Counterexample { .. } = check_iuac(rule, &e)? {
                            return Ok(Some(e));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Builds an instance on which the `q`-geometric score rule seats at most a
/// `epsilon`-fraction of the committee from a cohesive group holding a
/// `gamma`-share of the electorate.
///
/// The committee size is the smallest `k` with
/// `(1 - gamma) / (k - floor(eps*k) + 1) > gamma * q^floor(eps*k)`. The
/// electorate splits into the cohesive group (share `gamma`, approving `k`
/// common candidates), `k - floor(eps*k)` singleton blocs of share
/// `(1 - gamma) / (k - floor(eps*k) + 1)` each approving a private
/// candidate, and a remainder with empty ballots. `scale` is the total
/// number of voters and must make every bloc integral; the error message
/// names the smallest valid value.
pub fn small_fraction_instance(
    q: &BigRational,
    gamma: &BigRational,
    epsilon: &BigRational,
    scale: usize,
) -> Result<(Election, usize), AxiomError> {
    assert!(q.is_positive() && *q < BigRational::one());
    assert!(gamma.is_positive() && *gamma < BigRational::one());
    assert!(epsilon.is_positive());

    let one = BigRational::one();
    let floor_eps_k = |k: usize| -> usize {
        let f = (epsilon * BigRational::from_integer(BigInt::from(k as u64)))
            .floor()
            .to_integer();
        let f: usize = f.try_into().unwrap_or(usize::MAX);
        f.min(k)
    };
    let mut chosen = None;
    for k in 1..=10_000usize {
        let z = floor_eps_k(k);
        let blocks_plus_one = k - z + 1;
        let lhs = (&one - gamma) / BigRational::from_integer(BigInt::from(blocks_plus_one as u64));
        let rhs = gamma * rational_pow(q, z as i64);
        if lhs > rhs {
            chosen = Some(k);
            break;
        }
    }
    let k = chosen.expect("a committee size satisfying the score gap always exists");
    let z = floor_eps_k(k);
    let blocks = k - z;
    let denom = blocks + 1;

    let n = scale;
    let n_big = BigRational::from_integer(BigInt::from(n as u64));
    let cohesive_size = gamma * &n_big;
    let block_size =
        (&one - gamma) * &n_big / BigRational::from_integer(BigInt::from(denom as u64));
    if !cohesive_size.is_integer() || !block_size.is_integer() {
        let gd: u64 = gamma.denom().try_into().unwrap_or(u64::MAX);
        let gn: u64 = gamma.numer().try_into().unwrap_or(0);
        let rem_factor = gd * denom as u64 / gcd(gd * denom as u64, gd - gn);
        let minimal = lcm(gd, rem_factor);
        return Err(AxiomError::NoIntegralScaling(format!(
            "with gamma={gamma} and k={k}, the voter count must be a multiple of {minimal}, got {n}"
        )));
    }
    let cohesive_size: usize = cohesive_size.to_integer().try_into().unwrap();
    let block_size: usize = block_size.to_integer().try_into().unwrap();
    let assigned = cohesive_size + blocks * block_size;
    assert!(assigned <= n, "shares exceed the electorate");

    // Candidates: k common ones for the cohesive group, then one per bloc.
    let m = k + blocks;
    let mut approvals = Vec::with_capacity(n);
    for _ in 0..cohesive_size {
        approvals.push((0..k).collect());
    }
    for b in 0..blocks {
        for _ in 0..block_size {
            approvals.push(vec![k + b]);
        }
    }
    // Remainder abstains.
    for _ in assigned..n {
        approvals.push(Vec::new());
    }
    let labels = (1..=m).map(|i| format!("c{i}")).collect();
    let e = Election::new_allow_empty(labels, approvals, k)?;
    Ok((e, k))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[derive(Debug, Clone)]
pub enum MonotonicityOutcome {
    Holds,
    Violation {
        committee_size: usize,
        smaller: Committee,
        larger: Committee,
    },
}

impl MonotonicityOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, MonotonicityOutcome::Holds)
    }
}

/// Checks that a sequential rule's committee for each size `k < k_max` is
/// contained in its committee for `k + 1`. Non-sequential rules are
/// rejected.
pub fn check_committee_monotonicity(
    rule: &RuleSpec,
    e: &Election,
    k_max: usize,
) -> Result<MonotonicityOutcome, AxiomError> {
    if !rule.is_sequential() {
        return Err(AxiomError::NotSequential);
    }
    let mut previous: Option<Committee> = None;
    for k in 1..=k_max.min(e.num_candidates()) {
        let sized = e.with_committee_size(k)?;
        let winners = winning_committees(rule, &sized)?;
        let current = winners
            .into_iter()
            .next()
            .expect("sequential rules yield one committee");
        if let Some(prev) = previous {
            if !prev.is_subset_of(&current) {
                return Ok(MonotonicityOutcome::Violation {
                    committee_size: k - 1,
                    smaller: prev,
                    larger: current,
                });
            }
        }
        previous = Some(current);
    }
    Ok(MonotonicityOutcome::Holds)
}

/// Seeded random election: each voter approves a uniform subset whose size
/// is uniform on `1..=m`. Regenerates until at least `k` candidates have an
/// approver, so every purchase process can fill its committee.
pub fn random_election(rng: &mut ChaCha8Rng, n: usize, m: usize, k: usize) -> Election {
    loop {
        let approvals: Vec<Vec<usize>> = (0..n)
            .map(|_| {
                let size = rng.random_range(1..=m);
                let mut pool: Vec<usize> = (0..m).collect();
                for i in 0..size {
                    let j = rng.random_range(i..m);
                    pool.swap(i, j);
                }
                pool.truncate(size);
                pool.sort_unstable();
                pool
            })
            .collect();
        let approved = (0..m)
            .filter(|&c| approvals.iter().any(|b| b.contains(&c)))
            .count();
        if approved >= k {
            return Election::from_approvals(m, approvals, k).expect("generated instance is valid");
        }
    }
}

/// Random election plus one extra candidate approved by everyone, appended
/// as the last candidate, with committee size `k <= m + 1`. Skips draws that
/// already contain a unanimous candidate.
pub fn random_election_with_unanimous(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    k: usize,
) -> Election {
    assert!((2..=m + 1).contains(&k));
    loop {
        // The unanimous candidate covers one committee seat, so the base
        // profile only needs k - 1 purchasable candidates.
        let base = random_election(rng, n, m, (k - 1).clamp(1, m));
        if (0..m).any(|c| base.approver_count(c) == n) {
            continue;
        }
        let approvals: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                let mut b = base.approval_set(v).to_vec();
                b.push(m);
                b
            })
            .collect();
        return Election::from_approvals(m + 1, approvals, k).expect("valid instance");
    }
}

/// Convenience: the committee of a sequential run in auto numeric mode.
pub fn single_winner(rule: &RuleSpec, e: &Election) -> Result<Committee, AxiomError> {
    Ok(winning_committees(rule, e)?.remove(0))
}

/// The guarantee of the unit-speed, unit-cost rule: `floor(gamma * (k+1))`.
pub fn linear_degree(gamma: &BigRational, k: usize) -> usize {
    let v = (gamma * BigRational::from_integer(BigInt::from((k + 1) as u64)))
        .floor()
        .to_integer();
    let v: usize = v.try_into().unwrap_or(usize::MAX);
    v.min(k)
}
