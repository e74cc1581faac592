//! Updating a mass distribution by a certain event: conditioning keeps only
//! the focal sets inside the event, revision moves every focal set to its
//! intersection with the event. Both renormalize the surviving mass.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::frame::SubsetMask;
use crate::mass::{MassDistribution, EPSILON};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UpdateError {
    #[error("conditioning is undefined: the event carries belief {0}, no focal set lies inside it")]
    ConditioningUndefined(f64),
    #[error("revision is undefined: the event carries plausibility {0}, every focal set contradicts it")]
    RevisionUndefined(f64),
    #[error("event and distribution belong to different frames")]
    FrameMismatch,
}

/// Result of an update, together with how much mass the normalization threw
/// away and whether the event, while still plausible, carried no belief.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateOutcome {
    pub result: MassDistribution,
    /// Mass fraction discarded as contradiction: `1 - Bel(E)` for
    /// conditioning, `1 - Pl(E)` for revision.
    pub discarded: f64,
    /// Set when `Bel(E)` vanished although `Pl(E)` did not; revision is
    /// defined on such inputs but rests entirely on partially conflicting
    /// evidence.
    pub belief_vanished: bool,
}

/// Keeps the masses of focal sets inside `event` and renormalizes by the
/// event's belief; everything else is dropped as contradiction.
pub fn condition(m: &MassDistribution, event: SubsetMask) -> Result<UpdateOutcome, UpdateError> {
    condition_with_epsilon(m, event, EPSILON)
}

pub fn condition_with_epsilon(
    m: &MassDistribution,
    event: SubsetMask,
    epsilon: f64,
) -> Result<UpdateOutcome, UpdateError> {
    if !m.frame().admits(event) {
        return Err(UpdateError::FrameMismatch);
    }
    let belief = m.belief(event).expect("event admitted by frame");
    if belief <= epsilon {
        return Err(UpdateError::ConditioningUndefined(belief));
    }
    let mut focal: BTreeMap<SubsetMask, f64> = BTreeMap::new();
    for (set, mass) in m.focal() {
        if set.is_subset_of(event) {
            focal.insert(set, mass);
        }
    }
    Ok(UpdateOutcome {
        result: MassDistribution::from_raw(m.frame().clone(), focal, epsilon),
        discarded: 1.0 - belief,
        belief_vanished: false,
    })
}

/// Moves each focal set to its intersection with `event`, discards what
/// lands on the empty set, and renormalizes by the event's plausibility.
pub fn revise(m: &MassDistribution, event: SubsetMask) -> Result<UpdateOutcome, UpdateError> {
    revise_with_epsilon(m, event, EPSILON)
}

pub fn revise_with_epsilon(
    m: &MassDistribution,
    event: SubsetMask,
    epsilon: f64,
) -> Result<UpdateOutcome, UpdateError> {
    if !m.frame().admits(event) {
        return Err(UpdateError::FrameMismatch);
    }
    let plausibility = m.plausibility(event).expect("event admitted by frame");
    if plausibility <= epsilon {
        return Err(UpdateError::RevisionUndefined(plausibility));
    }
    let belief = m.belief(event).expect("event admitted by frame");
    let mut focal: BTreeMap<SubsetMask, f64> = BTreeMap::new();
    for (set, mass) in m.focal() {
        let moved = set.intersection(event);
        if !moved.is_empty() {
            *focal.entry(moved).or_insert(0.0) += mass;
        }
    }
    Ok(UpdateOutcome {
        result: MassDistribution::from_raw(m.frame().clone(), focal, epsilon),
        discarded: 1.0 - plausibility,
        belief_vanished: belief <= epsilon,
    })
}

/// Closed form for the belief function of the revised distribution:
/// `(Bel(A ∪ ~E) − Bel(~E)) / (1 − Bel(~E))`.
pub fn revised_belief(
    m: &MassDistribution,
    event: SubsetMask,
    set: SubsetMask,
) -> Result<f64, UpdateError> {
    revised_belief_with_epsilon(m, event, set, EPSILON)
}

pub fn revised_belief_with_epsilon(
    m: &MassDistribution,
    event: SubsetMask,
    set: SubsetMask,
    epsilon: f64,
) -> Result<f64, UpdateError> {
    if !m.frame().admits(event) || !m.frame().admits(set) {
        return Err(UpdateError::FrameMismatch);
    }
    let n = m.frame().len();
    let against = m
        .belief(event.complement(n))
        .expect("event admitted by frame");
    let denominator = 1.0 - against;
    if denominator <= epsilon {
        return Err(UpdateError::RevisionUndefined(
            m.plausibility(event).expect("event admitted by frame"),
        ));
    }
    let widened = m
        .belief(set.union(event.complement(n)))
        .expect("sets admitted by frame");
    Ok((widened - against) / denominator)
}

/// Closed form for the plausibility of the revised distribution:
/// `Pl(A ∩ E) / Pl(E)`.
pub fn revised_plausibility(
    m: &MassDistribution,
    event: SubsetMask,
    set: SubsetMask,
) -> Result<f64, UpdateError> {
    revised_plausibility_with_epsilon(m, event, set, EPSILON)
}

pub fn revised_plausibility_with_epsilon(
    m: &MassDistribution,
    event: SubsetMask,
    set: SubsetMask,
    epsilon: f64,
) -> Result<f64, UpdateError> {
    if !m.frame().admits(event) || !m.frame().admits(set) {
        return Err(UpdateError::FrameMismatch);
    }
    let total = m.plausibility(event).expect("event admitted by frame");
    if total <= epsilon {
        return Err(UpdateError::RevisionUndefined(total));
    }
    let moved = m
        .plausibility(set.intersection(event))
        .expect("sets admitted by frame");
    Ok(moved / total)
}
