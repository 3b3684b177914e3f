//! Approval-based committee elections with tunable proportionality.
//!
//! The crate centers on a continuous-time purchase process for electing a
//! committee: voters earn credits and greedily buy candidates they approve.
//! Two orthogonal dials generalize the classic sequential rule — a speed
//! schedule that slows voters down as they accumulate representatives
//! (favoring small groups) and a cost function that makes broadly approved
//! candidates cheaper (favoring large groups). Score-maximization rules with
//! configurable weight sequences are included for comparison, together with:
//!
//! * exact evaluators for the representation guarantees of each rule family
//!   ([`bounds`]), with curve emission for plotting;
//! * brute-force verifiers for those guarantees, for independence of a
//!   unanimously approved candidate, and for committee monotonicity
//!   ([`axioms`]);
//! * a one-dimensional spatial election generator and issue-voting model
//!   ([`euclidean`]) with a batch experiment harness ([`harness`]).
//!
//! Everything decision-relevant runs in exact rational arithmetic where the
//! inputs permit; the purchase engine falls back to `f64` with a relative
//! tie tolerance when a cost function takes irrational values.
//!
//! See the `examples/` directory for runnable tours of each capability, and
//! the `phragmen-lab` binary for the command-line interface.

pub mod axioms;
pub mod bitset;
pub mod bounds;
pub mod cli;
pub mod election;
pub mod euclidean;
pub mod harness;
pub mod phragmen;
pub mod rules;
pub mod thiele;

pub use election::{
    parse_election, serialize_election, Committee, Election, ElectionError, ElectionFormat,
    VoterGroup,
};
pub use phragmen::{
    run_phragmen, EngineError, NumericMode, PhragmenRun, PhragmenTrace, PurchaseEvent,
    DEFAULT_TIE_EPS,
};
pub use rules::{CostFunction, RuleSpec, SpeedSchedule, ThieleWeights, TieRule};
pub use thiele::{exact_thiele, lambda_score, seq_thiele};
