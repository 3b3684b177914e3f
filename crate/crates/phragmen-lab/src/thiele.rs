//! Thiele methods: score computation, exact optimization at desk scale, and
//! greedy sequential selection.

use crate::election::{Committee, Election};
use crate::rules::{ThieleWeights, TieRule};
use num::{BigRational, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ThieleError {
    #[error("instance too large for exact enumeration: C({m}, {k}) > {cap}")]
    EnumerationCapExceeded { m: usize, k: usize, cap: u64 },
}

/// Default cap on the number of committees exact optimization may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 2_000_000;

/// `sum_v sum_{j=1..|W ∩ A(v)|} lambda(j)`, exact.
pub fn lambda_score(e: &Election, w: &Committee, weights: &ThieleWeights) -> BigRational {
    let mut prefix = vec![BigRational::zero()];
    for j in 1..=w.len() {
        prefix.push(&prefix[j - 1] + weights.eval(j));
    }
    (0..e.num_voters())
        .map(|v| prefix[e.representation_count(w, v)].clone())
        .sum()
}

/// All committees maximizing the score, in canonical ascending order.
///
/// Exhaustive branch-and-bound: committees are enumerated in lexicographic
/// candidate order with an optimistic bound of `remaining slots * lambda(1) *
/// max remaining approver count`; pruning is strict, so exact ties survive.
pub fn exact_thiele(
    e: &Election,
    weights: &ThieleWeights,
    cap: u64,
) -> Result<Vec<Committee>, ThieleError> {
    let m = e.num_candidates();
    let k = e.committee_size();
    if binomial(m, k) > cap {
        return Err(ThieleError::EnumerationCapExceeded { m, k, cap });
    }

    let approvers: Vec<Vec<usize>> = (0..m).map(|c| e.approvers(c)).collect();
    // Suffix maximum of approver counts, for the optimistic bound.
    let mut suffix_max = vec![0usize; m + 1];
    for c in (0..m).rev() {
        suffix_max[c] = suffix_max[c + 1].max(approvers[c].len());
    }
    let lambda: Vec<BigRational> = (1..=k).map(|j| weights.eval(j)).collect();
    let lambda1 = lambda[0].clone();

    struct Search<'a> {
        k: usize,
        m: usize,
        approvers: &'a [Vec<usize>],
        suffix_max: &'a [usize],
        lambda: &'a [BigRational],
        lambda1: &'a BigRational,
        counts: Vec<usize>,
        chosen: Vec<usize>,
        best: Option<BigRational>,
        winners: Vec<Vec<usize>>,
    }

    impl Search<'_> {
        fn go(&mut self, next: usize, score: BigRational) {
            if self.chosen.len() == self.k {
                match &self.best {
                    Some(b) if *b > score => {}
                    Some(b) if *b == score => self.winners.push(self.chosen.clone()),
                    _ => {
                        self.best = Some(score);
                        self.winners = vec![self.chosen.clone()];
                    }
                }
                return;
            }
            let slots = self.k - self.chosen.len();
            if self.m - next < slots {
                return;
            }
            if let Some(best) = &self.best {
                let optimistic =
                    BigRational::from_integer(((slots * self.suffix_max[next]) as u64).into())
                        * self.lambda1;
                if &score + optimistic < *best {
                    return;
                }
            }
            // Include `next`.
            let mut gain = BigRational::zero();
            for &v in &self.approvers[next] {
                gain += &self.lambda[self.counts[v]];
                self.counts[v] += 1;
            }
            self.chosen.push(next);
            self.go(next + 1, &score + &gain);
            self.chosen.pop();
            for &v in &self.approvers[next] {
                self.counts[v] -= 1;
            }
            // Skip `next`.
            self.go(next + 1, score);
        }
    }

    let mut search = Search {
        k,
        m,
        approvers: &approvers,
        suffix_max: &suffix_max,
        lambda: &lambda,
        lambda1: &lambda1,
        counts: vec![0; e.num_voters()],
        chosen: Vec::with_capacity(k),
        best: None,
        winners: Vec::new(),
    };
    search.go(0, BigRational::zero());
    let mut winners: Vec<Committee> = search.winners.into_iter().map(Committee::new_set).collect();
    winners.sort_by(|a, b| a.members().cmp(b.members()));
    Ok(winners)
}

/// Greedy sequential selection: each round adds the candidate with the
/// largest marginal score, breaking ties with `tie`. Members are returned in
/// selection order.
pub fn seq_thiele(e: &Election, weights: &ThieleWeights, tie: &TieRule) -> Committee {
    let m = e.num_candidates();
    let k = e.committee_size();
    let approvers: Vec<Vec<usize>> = (0..m).map(|c| e.approvers(c)).collect();
    let mut counts = vec![0usize; e.num_voters()];
    let mut elected = vec![false; m];
    let mut committee = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<BigRational> = None;
        let mut tied: Vec<usize> = Vec::new();
        for c in 0..m {
            if elected[c] {
                continue;
            }
            let marginal: BigRational = approvers[c]
                .iter()
                .map(|&v| weights.eval(counts[v] + 1))
                .sum();
            match &best {
                Some(b) if *b > marginal => {}
                Some(b) if *b == marginal => tied.push(c),
                _ => {
                    best = Some(marginal);
                    tied = vec![c];
                }
            }
        }
        let winner = tie.pick(&tied);
        elected[winner] = true;
        for &v in &approvers[winner] {
            counts[v] += 1;
        }
        committee.push(winner);
    }
    Committee::new_ordered(committee)
}

fn binomial(m: usize, k: usize) -> u64 {
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((m - i) as u128) / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::worked_profile;
    use num::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn harmonic_score_on_worked_profile() {
        let e = worked_profile();
        let w = Committee::new_set(vec![0, 1, 3]); // {c1, c2, c4}
        assert_eq!(lambda_score(&e, &w, &ThieleWeights::Pav), rat(15, 2));
        assert_eq!(lambda_score(&e, &w, &ThieleWeights::Constant), rat(9, 1));
        let disjoint = Election::from_approvals(4, vec![vec![0], vec![1]], 2).unwrap();
        let w = Committee::new_set(vec![2, 3]);
        assert_eq!(lambda_score(&disjoint, &w, &ThieleWeights::Pav), rat(0, 1));
    }

    #[test]
    fn exact_harmonic_winners_on_worked_profile() {
        let e = worked_profile();
        let winners = exact_thiele(&e, &ThieleWeights::Pav, DEFAULT_ENUMERATION_CAP).unwrap();
        let sets: Vec<Vec<usize>> = winners.iter().map(|w| w.sorted_members()).collect();
        assert_eq!(sets, vec![vec![0, 1, 3], vec![0, 1, 5]]); // {c1,c2,c4}, {c1,c2,c6}
        for w in &winners {
            assert_eq!(lambda_score(&e, w, &ThieleWeights::Pav), rat(15, 2));
        }
    }

    #[test]
    fn full_committee_when_k_equals_m() {
        let e = Election::from_approvals(3, vec![vec![0], vec![1, 2]], 3).unwrap();
        let winners = exact_thiele(&e, &ThieleWeights::Pav, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(winners.len(), 1);
        assert_eq!(winners[0].sorted_members(), vec![0, 1, 2]);
    }

    #[test]
    fn cap_exceeded_is_reported() {
        let e = Election::from_approvals(30, vec![vec![0]], 15).unwrap();
        let err = exact_thiele(&e, &ThieleWeights::Pav, 1000).unwrap_err();
        assert!(matches!(err, ThieleError::EnumerationCapExceeded { .. }));
    }

    /// Plain combinations enumerator with a from-scratch scorer, kept free of
    /// the branch-and-bound machinery it cross-checks.
    fn naive_winners(e: &Election, weights: &ThieleWeights) -> Vec<Vec<usize>> {
        let m = e.num_candidates();
        let k = e.committee_size();
        let mut best: Option<BigRational> = None;
        let mut winners = Vec::new();
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let w = Committee::new_set(combo.clone());
            let mut score = BigRational::zero();
            for v in 0..e.num_voters() {
                for j in 1..=e.representation_count(&w, v) {
                    score += weights.eval(j);
                }
            }
            match &best {
                Some(b) if *b > score => {}
                Some(b) if *b == score => winners.push(combo.clone()),
                _ => {
                    best = Some(score);
                    winners = vec![combo.clone()];
                }
            }
            // Next k-combination of 0..m in lexicographic order.
            let mut i = k;
            loop {
                if i == 0 {
                    winners.sort();
                    return winners;
                }
                i -= 1;
                if combo[i] != i + m - k {
                    break;
                }
            }
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }

    #[test]
    fn branch_and_bound_matches_naive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for round in 0..50 {
            let n = rng.random_range(2..8);
            let m = rng.random_range(2..7);
            let k = rng.random_range(1..=m.min(4));
            let e = crate::axioms::random_election(&mut rng, n, m, k);
            let weights = match round % 3 {
                0 => ThieleWeights::Pav,
                1 => ThieleWeights::Geometric { q: rat(1, 2) },
                _ => ThieleWeights::Constant,
            };
            let fast: Vec<Vec<usize>> = exact_thiele(&e, &weights, DEFAULT_ENUMERATION_CAP)
                .unwrap()
                .iter()
                .map(|w| w.sorted_members())
                .collect();
            assert_eq!(fast, naive_winners(&e, &weights), "round {round}");
        }
    }

    #[test]
    fn first_greedy_round_maximizes_approvals() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..30 {
            let e = crate::axioms::random_election(&mut rng, 8, 6, 3);
            let w = seq_thiele(&e, &ThieleWeights::Pav, &TieRule::LexCandidate);
            let first = w.members()[0];
            let top = (0..e.num_candidates())
                .map(|c| e.approver_count(c))
                .max()
                .unwrap();
            assert_eq!(e.approver_count(first), top);
        }
    }

    #[test]
    fn greedy_score_never_beats_exact_and_matches_on_worked_profile() {
        let e = worked_profile();
        let greedy = seq_thiele(&e, &ThieleWeights::Pav, &TieRule::LexCandidate);
        assert_eq!(greedy.members(), &[0, 1, 3]); // c1 then c2 then c4
        let exact = exact_thiele(&e, &ThieleWeights::Pav, DEFAULT_ENUMERATION_CAP).unwrap();
        let best = lambda_score(&e, &exact[0], &ThieleWeights::Pav);
        assert_eq!(lambda_score(&e, &greedy, &ThieleWeights::Pav), best);

        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..30 {
            let e = crate::axioms::random_election(&mut rng, 7, 6, 3);
            let greedy = seq_thiele(&e, &ThieleWeights::Pav, &TieRule::LexCandidate);
            let exact = exact_thiele(&e, &ThieleWeights::Pav, DEFAULT_ENUMERATION_CAP).unwrap();
            let best = lambda_score(&e, &exact[0], &ThieleWeights::Pav);
            assert!(lambda_score(&e, &greedy, &ThieleWeights::Pav) <= best);
        }
    }

    #[test]
    fn constant_weights_reduce_to_approval_voting() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..30 {
            let e = crate::axioms::random_election(&mut rng, 8, 6, 3);
            let greedy = seq_thiele(&e, &ThieleWeights::Constant, &TieRule::LexCandidate);
            let exact =
                exact_thiele(&e, &ThieleWeights::Constant, DEFAULT_ENUMERATION_CAP).unwrap();
            let score = lambda_score(&e, &greedy, &ThieleWeights::Constant);
            assert_eq!(score, lambda_score(&e, &exact[0], &ThieleWeights::Constant));
        }
    }

    #[test]
    fn greedy_committee_is_prefix_across_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let e = crate::axioms::random_election(&mut rng, 7, 6, 4);
            let small = seq_thiele(
                &e.with_committee_size(3).unwrap(),
                &ThieleWeights::Pav,
                &TieRule::LexCandidate,
            );
            let big = seq_thiele(
                &e.with_committee_size(4).unwrap(),
                &ThieleWeights::Pav,
                &TieRule::LexCandidate,
            );
            assert_eq!(big.members()[..3], small.members()[..]);
        }
    }

    #[test]
    fn scores_invariant_under_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..20 {
            let n = 6;
            let m = 5;
            let e = crate::axioms::random_election(&mut rng, n, m, 2);
            // Reverse both voter and candidate identities.
            let remapped: Vec<Vec<usize>> = (0..n)
                .rev()
                .map(|v| e.approval_set(v).iter().map(|c| m - 1 - c).collect())
                .collect();
            let e2 = Election::from_approvals(m, remapped, 2).unwrap();
            let winners: Vec<BigRational> = exact_thiele(&e, &ThieleWeights::Pav, u64::MAX)
                .unwrap()
                .iter()
                .map(|w| lambda_score(&e, w, &ThieleWeights::Pav))
                .collect();
            let winners2: Vec<BigRational> = exact_thiele(&e2, &ThieleWeights::Pav, u64::MAX)
                .unwrap()
                .iter()
                .map(|w| lambda_score(&e2, w, &ThieleWeights::Pav))
                .collect();
            assert_eq!(winners[0], winners2[0]);
            assert_eq!(winners.len(), winners2.len());
        }
    }
}
