//! Canonical data model for approval-based committee elections.
//!
//! An election consists of `m` candidates, `n` voters with approval ballots
//! (sets of candidate indices) and a target committee size `k`. Candidate and
//! voter ids are 0-based internally; human-readable output uses 1-based
//! labels `c1..cm` / `v1..vn`.

use crate::bitset::BitSet;
use num::rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ElectionError {
    #[error("voter v{}: empty approval set", voter + 1)]
    EmptyApprovalSet { voter: usize },
    #[error("duplicate candidate label {label:?}")]
    DuplicateLabel { label: String },
    #[error("committee size {k} out of range 1..={m}")]
    KOutOfRange { k: usize, m: usize },
    #[error("no candidates")]
    NoCandidates,
    #[error("no voters")]
    NoVoters,
    #[error("voter v{}: candidate index {index} out of range 0..{m}", voter + 1)]
    CandidateOutOfRange {
        voter: usize,
        index: usize,
        m: usize,
    },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Input format for [`parse_election`] / [`serialize_election`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElectionFormat {
    /// `{"candidates": [...], "k": int, "approvals": [[0,3,5], ...]}`
    /// with 0-based candidate indices per voter.
    Json,
    /// Header `m n k`, then one line per voter of space-separated
    /// 1-based candidate indices.
    Lines,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Election {
    candidates: Vec<String>,
    approvals: Vec<BitSet>,
    k: usize,
}

impl Election {
    /// Builds an election, enforcing the model invariants: unique candidate
    /// labels, `1 <= k <= m` and nonempty approval sets.
    pub fn new(
        candidates: Vec<String>,
        approvals: Vec<Vec<usize>>,
        k: usize,
    ) -> Result<Self, ElectionError> {
        let e = Self::build(candidates, approvals, k)?;
        if let Some(v) = e.approvals.iter().position(|a| a.is_empty()) {
            return Err(ElectionError::EmptyApprovalSet { voter: v });
        }
        Ok(e)
    }

    /// Like [`Election::new`] but keeps voters with empty ballots. Generated
    /// spatial elections use this: such voters still count towards `n` (and
    /// towards cost shares) but can never pay for or score a candidate.
    pub fn new_allow_empty(
        candidates: Vec<String>,
        approvals: Vec<Vec<usize>>,
        k: usize,
    ) -> Result<Self, ElectionError> {
        Self::build(candidates, approvals, k)
    }

    fn build(
        candidates: Vec<String>,
        approvals: Vec<Vec<usize>>,
        k: usize,
    ) -> Result<Self, ElectionError> {
        let m = candidates.len();
        if m == 0 {
            return Err(ElectionError::NoCandidates);
        }
        if approvals.is_empty() {
            return Err(ElectionError::NoVoters);
        }
        if k == 0 || k > m {
            return Err(ElectionError::KOutOfRange { k, m });
        }
        let mut seen = std::collections::HashSet::new();
        for label in &candidates {
            if !seen.insert(label.as_str()) {
                return Err(ElectionError::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }
        let mut sets = Vec::with_capacity(approvals.len());
        for (voter, list) in approvals.iter().enumerate() {
            let mut set = BitSet::new(m);
            for &index in list {
                if index >= m {
                    return Err(ElectionError::CandidateOutOfRange { voter, index, m });
                }
                set.insert(index);
            }
            sets.push(set);
        }
        Ok(Election {
            candidates,
            approvals: sets,
            k,
        })
    }

    /// Convenience constructor with default labels `c1..cm`.
    pub fn from_approvals(
        m: usize,
        approvals: Vec<Vec<usize>>,
        k: usize,
    ) -> Result<Self, ElectionError> {
        Self::new(default_labels(m), approvals, k)
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn num_voters(&self) -> usize {
        self.approvals.len()
    }

    pub fn committee_size(&self) -> usize {
        self.k
    }

    /// Returns a copy with a different committee size (used by axiom checks
    /// that vary `k` on a fixed profile).
    pub fn with_committee_size(&self, k: usize) -> Result<Self, ElectionError> {
        if k == 0 || k > self.num_candidates() {
            return Err(ElectionError::KOutOfRange {
                k,
                m: self.num_candidates(),
            });
        }
        let mut e = self.clone();
        e.k = k;
        Ok(e)
    }

    pub fn candidate_label(&self, c: usize) -> &str {
        &self.candidates[c]
    }

    pub fn candidate_labels(&self) -> &[String] {
        &self.candidates
    }

    pub fn candidate_by_label(&self, label: &str) -> Option<usize> {
        self.candidates.iter().position(|l| l == label)
    }

    pub fn approval_set(&self, voter: usize) -> &BitSet {
        &self.approvals[voter]
    }

    pub fn approves(&self, voter: usize, candidate: usize) -> bool {
        self.approvals[voter].contains(candidate)
    }

    /// Voters approving candidate `c`; may be empty.
    pub fn approvers(&self, c: usize) -> Vec<usize> {
        assert!(c < self.num_candidates());
        (0..self.num_voters())
            .filter(|&v| self.approvals[v].contains(c))
            .collect()
    }

    pub fn approver_count(&self, c: usize) -> usize {
        self.approvers(c).len()
    }

    /// `|W ∩ A(v)|`: how many committee members voter `v` approves.
    pub fn representation_count(&self, committee: &Committee, voter: usize) -> usize {
        assert!(voter < self.num_voters());
        committee
            .members()
            .iter()
            .filter(|&&c| self.approvals[voter].contains(c))
            .count()
    }
}

fn default_labels(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("c{i}")).collect()
}

/// A selected committee. For sequential rules the member order is the
/// selection order; set-valued rules use canonical ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Committee {
    members: Vec<usize>,
}

impl Committee {
    /// Committee in selection order; members must be distinct.
    pub fn new_ordered(members: Vec<usize>) -> Self {
        let mut seen = std::collections::HashSet::new();
        assert!(
            members.iter().all(|c| seen.insert(*c)),
            "committee members must be distinct"
        );
        Committee { members }
    }

    /// Committee as a set, stored in ascending order.
    pub fn new_set(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Committee { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.members.contains(&c)
    }

    pub fn sorted_members(&self) -> Vec<usize> {
        let mut v = self.members.clone();
        v.sort_unstable();
        v
    }

    /// Set equality, ignoring selection order.
    pub fn same_set(&self, other: &Committee) -> bool {
        self.sorted_members() == other.sorted_members()
    }

    pub fn is_subset_of(&self, other: &Committee) -> bool {
        self.members.iter().all(|c| other.contains(*c))
    }

    pub fn as_bitset(&self, m: usize) -> BitSet {
        BitSet::from_indices(m, self.members.iter().copied())
    }

    pub fn labels(&self, e: &Election) -> Vec<String> {
        self.members
            .iter()
            .map(|&c| e.candidate_label(c).to_string())
            .collect()
    }
}

/// A group of voters together with its share of the electorate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoterGroup {
    members: BitSet,
    gamma: Ratio<u64>,
}

impl VoterGroup {
    pub fn new(members: BitSet, num_voters: usize) -> Self {
        assert!(!members.is_empty(), "voter group must be nonempty");
        assert!(members.universe() == num_voters);
        let gamma = Ratio::new(members.count() as u64, num_voters as u64);
        VoterGroup { members, gamma }
    }

    pub fn members(&self) -> &BitSet {
        &self.members
    }

    /// Exact share `|S|/n`.
    pub fn gamma(&self) -> Ratio<u64> {
        self.gamma
    }
}

#[derive(Serialize, Deserialize)]
struct ElectionDoc {
    candidates: Vec<String>,
    k: usize,
    approvals: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "is_false")]
    allow_empty: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Parses an election document. The JSON format may carry an optional
/// `"allow_empty": true` field for generated instances containing voters
/// with empty ballots; plain documents reject empty approval sets.
pub fn parse_election(text: &str, format: ElectionFormat) -> Result<Election, ElectionError> {
    match format {
        ElectionFormat::Json => {
            let doc: ElectionDoc = serde_json::from_str(text)?;
            if doc.allow_empty {
                Election::new_allow_empty(doc.candidates, doc.approvals, doc.k)
            } else {
                Election::new(doc.candidates, doc.approvals, doc.k)
            }
        }
        ElectionFormat::Lines => parse_lines(text),
    }
}

fn parse_lines(text: &str) -> Result<Election, ElectionError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (header_line, header) = lines.next().ok_or(ElectionError::Line {
        line: 1,
        message: "missing header \"m n k\"".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(ElectionError::Line {
            line: header_line + 1,
            message: format!("expected header \"m n k\", got {header:?}"),
        });
    }
    let parse_field = |s: &str, name: &str| -> Result<usize, ElectionError> {
        s.parse().map_err(|_| ElectionError::Line {
            line: header_line + 1,
            message: format!("invalid {name}: {s:?}"),
        })
    };
    let m = parse_field(fields[0], "candidate count")?;
    let n = parse_field(fields[1], "voter count")?;
    let k = parse_field(fields[2], "committee size")?;

    let mut approvals = Vec::with_capacity(n);
    for (line_idx, line) in lines {
        let mut ballot = Vec::new();
        for tok in line.split_whitespace() {
            let idx: usize = tok.parse().map_err(|_| ElectionError::Line {
                line: line_idx + 1,
                message: format!("invalid candidate index {tok:?}"),
            })?;
            if idx == 0 || idx > m {
                return Err(ElectionError::Line {
                    line: line_idx + 1,
                    message: format!("candidate index {idx} out of range 1..={m}"),
                });
            }
            ballot.push(idx - 1);
        }
        if ballot.is_empty() {
            return Err(ElectionError::Line {
                line: line_idx + 1,
                message: format!("voter v{}: empty approval set", approvals.len() + 1),
            });
        }
        approvals.push(ballot);
    }
    if approvals.len() != n {
        return Err(ElectionError::Line {
            line: header_line + 1,
            message: format!("header declares {n} voters, found {}", approvals.len()),
        });
    }
    Election::new(default_labels(m), approvals, k)
}

pub fn serialize_election(e: &Election, format: ElectionFormat) -> String {
    match format {
        ElectionFormat::Json => {
            let doc = ElectionDoc {
                candidates: e.candidates.clone(),
                k: e.k,
                approvals: e.approvals.iter().map(|a| a.to_vec()).collect(),
                allow_empty: e.approvals.iter().any(|a| a.is_empty()),
            };
            serde_json::to_string_pretty(&doc).expect("election serializes")
        }
        ElectionFormat::Lines => {
            let mut out = format!("{} {} {}\n", e.num_candidates(), e.num_voters(), e.k);
            for a in &e.approvals {
                let row: Vec<String> = a.iter().map(|c| (c + 1).to_string()).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
            out
        }
    }
}

/// The 7-voter, 6-candidate, `k = 3` worked profile used across the test
/// suite and the runnable examples.
pub fn worked_profile() -> Election {
    Election::from_approvals(
        6,
        vec![
            vec![0, 3, 5], // v1: c1 c4 c6
            vec![0, 3, 5], // v2: c1 c4 c6
            vec![0, 3],    // v3: c1 c4
            vec![0, 4, 5], // v4: c1 c5 c6
            vec![1, 4],    // v5: c2 c5
            vec![1],       // v6: c2
            vec![2],       // v7: c3
        ],
        3,
    )
    .expect("valid profile")
}
