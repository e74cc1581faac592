//! An evidence calculus over finite frames of discernment.
//!
//! Partial knowledge is encoded as a mass distribution: movable evidence
//! masses attached to subsets of a frame. The crate provides the induced
//! belief, plausibility and commonality functions with fast subset-lattice
//! transforms, conditioning and revision by certain events, refinements
//! between compatible frames, and the specialization-matrix machinery that
//! describes arbitrary downward mass flows, including monotonicity analysis
//! and the encoding of non-monotonic default rules.
//!
//! All values are immutable after construction and safe to share across
//! threads.

pub mod codec;
pub mod frame;
pub mod mass;
mod maxflow;
pub mod rules;
pub mod specialization;
pub mod updating;

pub use frame::{Dimension, Frame, FrameError, Refinement, RefinementReport, SubsetMask};
pub use mass::{
    project, vacuous_extension, EvidenceTables, MassDistribution, MassError, DENSE_TABLE_CAP,
    EPSILON,
};
pub use rules::{
    rules_to_matrix, tweety, CompatibilityRelation, ImplicationRule, IrregularityReport,
    RuleError, TweetyExample,
};
pub use specialization::{
    flow_to_matrix, is_specialization, strong_inclusion, witness_flow, ApplyOutcome, FlowPlan,
    MonotonicityReport, SpecializationError, SpecializationMatrix,
};
pub use updating::{
    condition, revise, revised_belief, revised_plausibility, UpdateError, UpdateOutcome,
};
