//! Specialization matrices: row-stochastic flows from sets to their
//! subsets, the `⊙` application operator, the conditioning and revision
//! matrices, the specialization-relation test with witness construction,
//! monotonicity checking, and strong inclusion.

use std::borrow::Cow;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::frame::{Frame, SubsetMask};
use crate::mass::{MassDistribution, EPSILON};
use crate::maxflow::FlowNetwork;

/// Largest frame for which the exhaustive monotonicity check runs; it
/// enumerates supersets of every row.
pub const MONOTONICITY_CHECK_CAP: usize = 12;

/// Largest frame for which the dense matrix export is produced.
pub const DENSE_MATRIX_CAP: usize = 8;

/// Interval width at which the witness search stops refining consistency.
const WITNESS_RESOLUTION: f64 = 1e-9;

/// Slack allowed when deciding whether a max-flow saturated its demands.
const FLOW_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecializationError {
    #[error("row weights must sum to 1 (row sums to {0})")]
    RowNotStochastic(f64),
    #[error("a row may only move mass to subsets of its source set")]
    FlowOutsideSubset,
    #[error("the event must not be empty")]
    EmptyEvent,
    #[error("application is undefined: all mass flowed to the empty set (consistency {0})")]
    TotalContradiction(f64),
    #[error("inputs belong to different frames")]
    FrameMismatch,
    #[error("not a specialization: some focal set is inside no focal set of the coarser distribution")]
    NotASpecialization,
    #[error("flow plan does not conserve its source masses (set off by {0})")]
    ConservationViolated(f64),
    #[error("frame has {0} elements; this check is capped at {1}")]
    FrameTooLargeForCheck(usize, usize),
}

/// A sparse row-stochastic matrix over the subset lattice that only moves
/// mass from a set to its subsets. Rows that are not stored act as the
/// identity.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecializationMatrix {
    frame: Frame,
    rows: BTreeMap<SubsetMask, Vec<(SubsetMask, f64)>>,
}

impl SpecializationMatrix {
    /// Validates the row-stochastic and subset-flow laws, then stores the
    /// rows with their weights normalized to sum exactly to one. Rows equal
    /// to the identity are not stored.
    pub fn new<I, R>(frame: &Frame, rows: I) -> Result<Self, SpecializationError>
    where
        I: IntoIterator<Item = (SubsetMask, R)>,
        R: IntoIterator<Item = (SubsetMask, f64)>,
    {
        Self::with_epsilon(frame, rows, EPSILON)
    }

    pub fn with_epsilon<I, R>(
        frame: &Frame,
        rows: I,
        epsilon: f64,
    ) -> Result<Self, SpecializationError>
    where
        I: IntoIterator<Item = (SubsetMask, R)>,
        R: IntoIterator<Item = (SubsetMask, f64)>,
    {
        let mut stored = BTreeMap::new();
        for (source, entries) in rows {
            if !frame.admits(source) {
                return Err(SpecializationError::FrameMismatch);
            }
            let mut row: BTreeMap<SubsetMask, f64> = BTreeMap::new();
            for (target, weight) in entries {
                if weight < 0.0 {
                    return Err(SpecializationError::RowNotStochastic(weight));
                }
                if weight == 0.0 {
                    continue;
                }
                if !target.is_subset_of(source) {
                    return Err(SpecializationError::FlowOutsideSubset);
                }
                *row.entry(target).or_insert(0.0) += weight;
            }
            let sum: f64 = row.values().sum();
            if (sum - 1.0).abs() > epsilon {
                return Err(SpecializationError::RowNotStochastic(sum));
            }
            let row: Vec<(SubsetMask, f64)> =
                row.into_iter().map(|(t, w)| (t, w / sum)).collect();
            if row.len() == 1 && row[0].0 == source {
                continue; // identity row, the default already covers it
            }
            stored.insert(source, row);
        }
        Ok(SpecializationMatrix {
            frame: frame.clone(),
            rows: stored,
        })
    }

    /// The identity matrix: every set keeps its mass.
    pub fn identity(frame: &Frame) -> Self {
        SpecializationMatrix {
            frame: frame.clone(),
            rows: BTreeMap::new(),
        }
    }

    /// Conditioning as a matrix: sets inside `event` stay put, all others
    /// flow to the empty set.
    pub fn conditional(frame: &Frame, event: SubsetMask) -> Result<Self, SpecializationError> {
        if event.is_empty() {
            return Err(SpecializationError::EmptyEvent);
        }
        if !frame.admits(event) {
            return Err(SpecializationError::FrameMismatch);
        }
        let mut rows = BTreeMap::new();
        for source in frame.full_set().subsets() {
            if !source.is_subset_of(event) {
                rows.insert(source, vec![(SubsetMask::EMPTY, 1.0)]);
            }
        }
        Ok(SpecializationMatrix {
            frame: frame.clone(),
            rows,
        })
    }

    /// Revision as a matrix: every set flows to its intersection with
    /// `event`.
    pub fn revision(frame: &Frame, event: SubsetMask) -> Result<Self, SpecializationError> {
        if event.is_empty() {
            return Err(SpecializationError::EmptyEvent);
        }
        if !frame.admits(event) {
            return Err(SpecializationError::FrameMismatch);
        }
        let mut rows = BTreeMap::new();
        for source in frame.full_set().subsets() {
            let target = source.intersection(event);
            if target != source {
                rows.insert(source, vec![(target, 1.0)]);
            }
        }
        Ok(SpecializationMatrix {
            frame: frame.clone(),
            rows,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Explicitly stored (non-identity) rows, ascending by source mask.
    pub fn stored_rows(&self) -> impl Iterator<Item = (SubsetMask, &[(SubsetMask, f64)])> {
        self.rows.iter().map(|(s, row)| (*s, row.as_slice()))
    }

    pub fn stored_row_count(&self) -> usize {
        self.rows.len()
    }

    /// Effective row for `source`, falling back to the identity.
    pub fn row(&self, source: SubsetMask) -> Cow<'_, [(SubsetMask, f64)]> {
        match self.rows.get(&source) {
            Some(row) => Cow::Borrowed(row.as_slice()),
            None => Cow::Owned(vec![(source, 1.0)]),
        }
    }

    /// Single matrix entry.
    pub fn weight(&self, source: SubsetMask, target: SubsetMask) -> f64 {
        self.row(source)
            .iter()
            .find(|(t, _)| *t == target)
            .map(|(_, w)| *w)
            .unwrap_or(0.0)
    }

    /// Applies the matrix to a mass distribution: mass moves along the rows,
    /// whatever lands on the empty set is dropped, and the rest is
    /// renormalized by the consistency `c` (the surviving fraction).
    pub fn apply(&self, m: &MassDistribution) -> Result<ApplyOutcome, SpecializationError> {
        self.apply_with_epsilon(m, EPSILON)
    }

    pub fn apply_with_epsilon(
        &self,
        m: &MassDistribution,
        epsilon: f64,
    ) -> Result<ApplyOutcome, SpecializationError> {
        if m.frame() != &self.frame {
            return Err(SpecializationError::FrameMismatch);
        }
        let mut moved: BTreeMap<SubsetMask, f64> = BTreeMap::new();
        let mut consistency = 0.0;
        for (source, mass) in m.focal() {
            for &(target, weight) in self.row(source).iter() {
                if target.is_empty() {
                    continue;
                }
                let amount = mass * weight;
                *moved.entry(target).or_insert(0.0) += amount;
                consistency += amount;
            }
        }
        if consistency <= epsilon {
            return Err(SpecializationError::TotalContradiction(consistency));
        }
        Ok(ApplyOutcome {
            result: MassDistribution::from_raw(self.frame.clone(), moved, epsilon),
            consistency,
        })
    }

    /// Exhaustive monotonicity check: the matrix preserves the
    /// specialization order exactly when every mass flow `A → B` is matched,
    /// for every superset `C ⊇ A`, by some flow `C → D` with `D ⊇ B`.
    /// Returns the first violating triple in ascending mask order.
    pub fn monotonicity(&self) -> Result<MonotonicityReport, SpecializationError> {
        let n = self.frame.len();
        if n > MONOTONICITY_CHECK_CAP {
            return Err(SpecializationError::FrameTooLargeForCheck(
                n,
                MONOTONICITY_CHECK_CAP,
            ));
        }
        // Identity rows can never violate the condition as a superset row
        // (D = C ⊇ A ⊇ B), so only stored rows need checking on the C side.
        for source in self.frame.full_set().subsets() {
            for &(target, _) in self.row(source).iter() {
                for (&superset, row) in self.rows.range(source..) {
                    if !source.is_subset_of(superset) || superset == source {
                        continue;
                    }
                    let matched = row.iter().any(|&(d, w)| w > 0.0 && target.is_subset_of(d));
                    if !matched {
                        return Ok(MonotonicityReport::CounterExample {
                            source,
                            target,
                            superset,
                        });
                    }
                }
            }
        }
        Ok(MonotonicityReport::Monotonic)
    }

    /// Dense `2^n × 2^n` export for small frames, used as a test oracle.
    pub fn dense(&self) -> Result<Vec<Vec<f64>>, SpecializationError> {
        let n = self.frame.len();
        if n > DENSE_MATRIX_CAP {
            return Err(SpecializationError::FrameTooLargeForCheck(n, DENSE_MATRIX_CAP));
        }
        let size = 1usize << n;
        let mut out = vec![vec![0.0; size]; size];
        for source in self.frame.full_set().subsets() {
            for &(target, weight) in self.row(source).iter() {
                out[source.bits() as usize][target.bits() as usize] = weight;
            }
        }
        Ok(out)
    }
}

/// Result of applying a matrix: the renormalized distribution plus the
/// consistency constant `c`, the mass fraction that avoided the empty set.
#[derive(Debug, Clone, PartialEq)]
pub struct ApplyOutcome {
    pub result: MassDistribution,
    pub consistency: f64,
}

/// Outcome of the monotonicity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonotonicityReport {
    Monotonic,
    /// Flow `source → target` is outrun by `superset ⊇ source`, whose row
    /// reaches no superset of `target`.
    CounterExample {
        source: SubsetMask,
        target: SubsetMask,
        superset: SubsetMask,
    },
}

impl MonotonicityReport {
    pub fn is_monotonic(&self) -> bool {
        matches!(self, MonotonicityReport::Monotonic)
    }
}

/// True when `s` arises from `t` by mass flowing downward: every focal set
/// of `s` lies inside some focal set of `t`. Supports are compared as exact
/// sets; pruning keeps float dust out of them.
pub fn is_specialization(
    s: &MassDistribution,
    t: &MassDistribution,
) -> Result<bool, SpecializationError> {
    if s.frame() != t.frame() {
        return Err(SpecializationError::FrameMismatch);
    }
    Ok(s.focal()
        .all(|(b, _)| t.focal().any(|(a, _)| b.is_subset_of(a))))
}

/// Absolute mass flows between set pairs, together with the consistency
/// they realize. Each source conserves the mass of the distribution the
/// plan was built from; flows to the empty set carry the discarded part.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPlan {
    frame: Frame,
    flows: BTreeMap<(SubsetMask, SubsetMask), f64>,
    consistency: f64,
}

impl FlowPlan {
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn consistency(&self) -> f64 {
        self.consistency
    }

    /// Flows ascending by (source, target) mask pair.
    pub fn flows(&self) -> impl Iterator<Item = (SubsetMask, SubsetMask, f64)> + '_ {
        self.flows.iter().map(|(&(a, b), &v)| (a, b, v))
    }

    pub fn amount(&self, source: SubsetMask, target: SubsetMask) -> f64 {
        self.flows.get(&(source, target)).copied().unwrap_or(0.0)
    }
}

/// Builds a witness flow plan for `s ⊑ t`: sources are the focal sets of
/// `t`, sinks the focal sets of `s` scaled by a consistency `c`, and edges
/// run only from sets to their subsets (plus an implicit drain to the empty
/// set). The largest feasible `c` is located by bisection, each step decided
/// by a max-flow feasibility check; edges are explored in ascending
/// (source, target) order so the plan is deterministic.
pub fn witness_flow(
    s: &MassDistribution,
    t: &MassDistribution,
) -> Result<FlowPlan, SpecializationError> {
    if s.frame() != t.frame() {
        return Err(SpecializationError::FrameMismatch);
    }
    if !is_specialization(s, t)? {
        return Err(SpecializationError::NotASpecialization);
    }
    let sources: Vec<(SubsetMask, f64)> = t.focal().collect();
    let sinks: Vec<(SubsetMask, f64)> = s.focal().collect();

    let mut best = feasible_plan(&sources, &sinks, 1.0);
    if best.is_none() {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > WITNESS_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            match feasible_plan(&sources, &sinks, mid) {
                Some(plan) => {
                    lo = mid;
                    best = Some(plan);
                }
                None => hi = mid,
            }
        }
    }
    // Existence for some c > 0 is guaranteed by the support condition; the
    // bisection can only miss it if the maximum lies below the resolution.
    let (routed, consistency) = best.ok_or(SpecializationError::NotASpecialization)?;

    let mut flows: BTreeMap<(SubsetMask, SubsetMask), f64> = BTreeMap::new();
    for (source, mass) in &sources {
        let mut remaining = *mass;
        for (target, amount) in routed.iter().filter(|((a, _), _)| a == source).map(|((_, b), v)| (*b, *v)) {
            flows.insert((*source, target), amount);
            remaining -= amount;
        }
        if remaining > FLOW_SLACK {
            flows.insert((*source, SubsetMask::EMPTY), remaining);
        }
    }
    Ok(FlowPlan {
        frame: s.frame().clone(),
        flows,
        consistency: consistency.min(1.0),
    })
}

/// Feasibility of routing all of `t` so the sinks receive exactly
/// `c · s(B)`. Returns the routed non-empty flows and their total.
fn feasible_plan(
    sources: &[(SubsetMask, f64)],
    sinks: &[(SubsetMask, f64)],
    c: f64,
) -> Option<(BTreeMap<(SubsetMask, SubsetMask), f64>, f64)> {
    let mut net = FlowNetwork::new(2 + sources.len() + sinks.len());
    let source_node = |i: usize| 2 + i;
    let sink_node = |j: usize| 2 + sources.len() + j;
    for (i, (_, mass)) in sources.iter().enumerate() {
        net.add_edge(0, source_node(i), *mass);
    }
    let mut lattice_edges = Vec::new();
    for (i, (a, _)) in sources.iter().enumerate() {
        for (j, (b, _)) in sinks.iter().enumerate() {
            if b.is_subset_of(*a) {
                lattice_edges.push((i, j, net.add_edge(source_node(i), sink_node(j), f64::INFINITY)));
            }
        }
    }
    for (j, (_, mass)) in sinks.iter().enumerate() {
        net.add_edge(sink_node(j), 1, c * mass);
    }
    let demand: f64 = sinks.iter().map(|(_, mass)| c * mass).sum();
    let flow = net.max_flow(0, 1);
    if flow < demand - FLOW_SLACK {
        return None;
    }
    let mut routed = BTreeMap::new();
    let mut total = 0.0;
    for (i, j, edge) in lattice_edges {
        let amount = net.flow(edge);
        if amount > FLOW_SLACK {
            routed.insert((sources[i].0, sinks[j].0), amount);
            total += amount;
        }
    }
    Some((routed, total))
}

/// Turns a flow plan built from `t` into the specialization matrix with
/// rows `V[A, B] = flow(A, B) / t(A)` for focal `A` and identity rows
/// elsewhere.
pub fn flow_to_matrix(
    plan: &FlowPlan,
    t: &MassDistribution,
) -> Result<SpecializationMatrix, SpecializationError> {
    flow_to_matrix_with_epsilon(plan, t, EPSILON)
}

pub fn flow_to_matrix_with_epsilon(
    plan: &FlowPlan,
    t: &MassDistribution,
    epsilon: f64,
) -> Result<SpecializationMatrix, SpecializationError> {
    if plan.frame() != t.frame() {
        return Err(SpecializationError::FrameMismatch);
    }
    let mut per_source: BTreeMap<SubsetMask, Vec<(SubsetMask, f64)>> = BTreeMap::new();
    for (source, target, amount) in plan.flows() {
        per_source.entry(source).or_default().push((target, amount));
    }
    for (set, mass) in t.focal() {
        if !per_source.contains_key(&set) {
            return Err(SpecializationError::ConservationViolated(mass));
        }
    }
    let mut rows = Vec::new();
    for (source, entries) in per_source {
        let mass = t.mass(source);
        let total: f64 = entries.iter().map(|(_, v)| v).sum();
        if (total - mass).abs() > epsilon {
            return Err(SpecializationError::ConservationViolated((total - mass).abs()));
        }
        let row: Vec<(SubsetMask, f64)> = entries
            .into_iter()
            .map(|(target, amount)| (target, amount / total))
            .collect();
        rows.push((source, row));
    }
    SpecializationMatrix::with_epsilon(t.frame(), rows, epsilon)
}

/// Dubois-Prade containment of bodies of evidence: focal supports must
/// interlock (every focal of `s` inside a focal of `t`, every focal of `t`
/// holding a focal of `s`) and a lossless flow with no drain to the empty
/// set must carry `t` exactly onto `s`. The flow clause is one max-flow
/// feasibility check.
pub fn strong_inclusion(
    s: &MassDistribution,
    t: &MassDistribution,
) -> Result<bool, SpecializationError> {
    if s.frame() != t.frame() {
        return Err(SpecializationError::FrameMismatch);
    }
    let inner: Vec<(SubsetMask, f64)> = s.focal().collect();
    let outer: Vec<(SubsetMask, f64)> = t.focal().collect();
    let clause_one = inner
        .iter()
        .all(|(b, _)| outer.iter().any(|(a, _)| b.is_subset_of(*a)));
    let clause_two = outer
        .iter()
        .all(|(a, _)| inner.iter().any(|(b, _)| b.is_subset_of(*a)));
    if !clause_one || !clause_two {
        return Ok(false);
    }
    let mut net = FlowNetwork::new(2 + outer.len() + inner.len());
    for (i, (_, mass)) in outer.iter().enumerate() {
        net.add_edge(0, 2 + i, *mass);
    }
    for (i, (a, _)) in outer.iter().enumerate() {
        for (j, (b, _)) in inner.iter().enumerate() {
            if b.is_subset_of(*a) {
                net.add_edge(2 + i, 2 + outer.len() + j, f64::INFINITY);
            }
        }
    }
    for (j, (_, mass)) in inner.iter().enumerate() {
        net.add_edge(2 + outer.len() + j, 1, *mass);
    }
    let flow = net.max_flow(0, 1);
    Ok(flow >= 1.0 - EPSILON)
}
