//! Mass distributions over a frame and the induced belief, plausibility and
//! commonality functions, including the fast subset-lattice transforms and
//! their inverse.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::frame::{Frame, Refinement, SubsetMask};

/// Default tolerance for normalization checks and focal-entry pruning.
pub const EPSILON: f64 = 1e-9;

/// Largest frame for which dense `2^n` tables are materialized.
pub const DENSE_TABLE_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MassError {
    #[error("mass assigned to the empty set must be zero (got {0})")]
    EmptySetMass(f64),
    #[error("focal masses must sum to 1 (got {0})")]
    NotNormalized(f64),
    #[error("masses must be nonnegative (got {0})")]
    NegativeMass(f64),
    #[error("no positive mass left after pruning; nothing to distribute")]
    AllMassZero,
    #[error("set and distribution belong to different frames")]
    FrameMismatch,
    #[error("frame has {0} elements; dense tables are capped at {DENSE_TABLE_CAP}")]
    FrameTooLargeForDense(usize),
    #[error("table is not a belief function: {0}")]
    NotABeliefFunction(String),
}

/// A mass distribution: a sparse map from focal subsets to masses in
/// `(0, 1]` that sum to one, with nothing on the empty set. Entries at or
/// below the working tolerance are dropped and the rest renormalized when
/// the value is built, so focal sets can be compared exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct MassDistribution {
    frame: Frame,
    focal: BTreeMap<SubsetMask, f64>,
}

impl MassDistribution {
    /// Validates and builds a distribution. With `normalize` set, masses are
    /// scaled to sum to one; otherwise the sum must already be within the
    /// default tolerance of one. Duplicate sets merge additively.
    pub fn new<I>(frame: &Frame, assignments: I, normalize: bool) -> Result<Self, MassError>
    where
        I: IntoIterator<Item = (SubsetMask, f64)>,
    {
        Self::with_epsilon(frame, assignments, normalize, EPSILON)
    }

    /// `new` with an explicit tolerance.
    pub fn with_epsilon<I>(
        frame: &Frame,
        assignments: I,
        normalize: bool,
        epsilon: f64,
    ) -> Result<Self, MassError>
    where
        I: IntoIterator<Item = (SubsetMask, f64)>,
    {
        let mut merged: BTreeMap<SubsetMask, f64> = BTreeMap::new();
        for (set, mass) in assignments {
            if mass < 0.0 {
                return Err(MassError::NegativeMass(mass));
            }
            if !frame.admits(set) {
                return Err(MassError::FrameMismatch);
            }
            if set.is_empty() {
                if mass > 0.0 {
                    return Err(MassError::EmptySetMass(mass));
                }
                continue;
            }
            *merged.entry(set).or_insert(0.0) += mass;
        }
        let sum: f64 = merged.values().sum();
        if normalize {
            if sum <= epsilon {
                return Err(MassError::AllMassZero);
            }
        } else if (sum - 1.0).abs() > epsilon {
            return Err(MassError::NotNormalized(sum));
        }
        let before = merged.len();
        merged.retain(|_, mass| *mass / sum > epsilon);
        if merged.is_empty() {
            return Err(MassError::AllMassZero);
        }
        // Valid input that needed neither scaling nor pruning is stored as
        // given, so parse/serialize cycles keep masses bit-identical.
        if normalize || merged.len() != before {
            Ok(Self::renormalized(frame.clone(), merged))
        } else {
            Ok(MassDistribution {
                frame: frame.clone(),
                focal: merged,
            })
        }
    }

    /// Rescales a pruned focal map so the masses sum to one and wraps it.
    fn renormalized(frame: Frame, mut focal: BTreeMap<SubsetMask, f64>) -> Self {
        let sum: f64 = focal.values().sum();
        for mass in focal.values_mut() {
            *mass /= sum;
        }
        MassDistribution { frame, focal }
    }

    /// Output-side constructor: prunes dust below `epsilon` and renormalizes.
    pub(crate) fn from_raw(
        frame: Frame,
        mut focal: BTreeMap<SubsetMask, f64>,
        epsilon: f64,
    ) -> Self {
        let sum: f64 = focal.values().sum();
        focal.retain(|set, mass| !set.is_empty() && *mass / sum > epsilon);
        debug_assert!(!focal.is_empty(), "raw focal map lost all mass");
        Self::renormalized(frame, focal)
    }

    /// Total ignorance: the whole frame carries mass one.
    pub fn vacuous(frame: &Frame) -> Self {
        let mut focal = BTreeMap::new();
        focal.insert(frame.full_set(), 1.0);
        MassDistribution {
            frame: frame.clone(),
            focal,
        }
    }

    /// All mass on singletons: a discrete probability distribution.
    pub fn bayesian(frame: &Frame, probabilities: &[f64]) -> Result<Self, MassError> {
        Self::bayesian_with_epsilon(frame, probabilities, EPSILON)
    }

    pub fn bayesian_with_epsilon(
        frame: &Frame,
        probabilities: &[f64],
        epsilon: f64,
    ) -> Result<Self, MassError> {
        if probabilities.len() != frame.len() {
            return Err(MassError::FrameMismatch);
        }
        let assignments = probabilities
            .iter()
            .enumerate()
            .map(|(i, p)| (SubsetMask::singleton(i), *p));
        Self::with_epsilon(frame, assignments, false, epsilon)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Focal elements with their masses, ascending by mask.
    pub fn focal(&self) -> impl Iterator<Item = (SubsetMask, f64)> + '_ {
        self.focal.iter().map(|(set, mass)| (*set, *mass))
    }

    pub fn focal_count(&self) -> usize {
        self.focal.len()
    }

    /// Mass committed exactly to `set`; zero for non-focal sets.
    pub fn mass(&self, set: SubsetMask) -> f64 {
        self.focal.get(&set).copied().unwrap_or(0.0)
    }

    pub fn is_focal(&self, set: SubsetMask) -> bool {
        self.focal.contains_key(&set)
    }

    fn check(&self, set: SubsetMask) -> Result<(), MassError> {
        if self.frame.admits(set) {
            Ok(())
        } else {
            Err(MassError::FrameMismatch)
        }
    }

    /// Total mass of focal elements inside `set`: the credibility of `set`.
    pub fn belief(&self, set: SubsetMask) -> Result<f64, MassError> {
        self.check(set)?;
        Ok(self
            .focal
            .iter()
            .filter(|(focal, _)| focal.is_subset_of(set))
            .map(|(_, mass)| mass)
            .sum())
    }

    /// Total mass of focal elements meeting `set`: how far `set` remains
    /// unrefuted.
    pub fn plausibility(&self, set: SubsetMask) -> Result<f64, MassError> {
        self.check(set)?;
        Ok(self
            .focal
            .iter()
            .filter(|(focal, _)| focal.intersects(set))
            .map(|(_, mass)| mass)
            .sum())
    }

    /// Total mass on supersets of `set`: the mass still free to move into it.
    pub fn commonality(&self, set: SubsetMask) -> Result<f64, MassError> {
        self.check(set)?;
        Ok(self
            .focal
            .iter()
            .filter(|(focal, _)| set.is_subset_of(**focal))
            .map(|(_, mass)| mass)
            .sum())
    }

    /// Dense belief/plausibility/commonality tables over the whole subset
    /// lattice, computed with the one-bit-at-a-time lattice sweep in
    /// `O(n·2^n)`.
    pub fn tables(&self) -> Result<EvidenceTables, MassError> {
        let n = self.frame.len();
        if n > DENSE_TABLE_CAP {
            return Err(MassError::FrameTooLargeForDense(n));
        }
        let size = 1usize << n;
        let mut bel = vec![0.0f64; size];
        for (set, mass) in &self.focal {
            bel[set.bits() as usize] = *mass;
        }
        let mut q = bel.clone();
        zeta_subsets(&mut bel, n);
        zeta_supersets(&mut q, n);

        // The full-frame belief and empty-set commonality are the total mass,
        // which is one by construction; pin them so the dual tables cannot
        // drift past the unit bound through rounding.
        bel[size - 1] = 1.0;
        q[0] = 1.0;
        for value in q.iter_mut() {
            *value = value.min(1.0);
        }
        // Enforce bel[A] + bel[~A] <= 1 under rounding by lowering each pair
        // member to min(bel[A], 1 - bel[~A]); the adjustment is at most a few
        // ulps and keeps bel <= pl exact.
        for a in 0..size {
            let ca = (size - 1) ^ a;
            if a < ca {
                let (va, vc) = (bel[a], bel[ca]);
                bel[a] = va.min(1.0 - vc);
                bel[ca] = vc.min(1.0 - va);
            }
        }
        let pl: Vec<f64> = (0..size).map(|a| 1.0 - bel[(size - 1) ^ a]).collect();
        Ok(EvidenceTables {
            frame: self.frame.clone(),
            bel,
            pl,
            q,
        })
    }

    /// Recovers the mass distribution whose belief table is `bel`, by
    /// inverting the subset-sum transform. Fails if the recovered masses dip
    /// below `-epsilon`; smaller negative round-off is clamped away.
    pub fn from_belief_table(frame: &Frame, bel: &[f64]) -> Result<Self, MassError> {
        Self::from_belief_table_with_epsilon(frame, bel, EPSILON)
    }

    pub fn from_belief_table_with_epsilon(
        frame: &Frame,
        bel: &[f64],
        epsilon: f64,
    ) -> Result<Self, MassError> {
        let n = frame.len();
        if n > DENSE_TABLE_CAP {
            return Err(MassError::FrameTooLargeForDense(n));
        }
        let size = 1usize << n;
        if bel.len() != size {
            return Err(MassError::NotABeliefFunction(format!(
                "table has {} entries, frame needs {}",
                bel.len(),
                size
            )));
        }
        if bel[0].abs() > epsilon {
            return Err(MassError::NotABeliefFunction(format!(
                "belief of the empty set must be 0 (got {})",
                bel[0]
            )));
        }
        if (bel[size - 1] - 1.0).abs() > epsilon {
            return Err(MassError::NotABeliefFunction(format!(
                "belief of the full frame must be 1 (got {})",
                bel[size - 1]
            )));
        }
        let mut masses = bel.to_vec();
        mobius_subsets(&mut masses, n);
        let mut focal = BTreeMap::new();
        for (bits, mass) in masses.iter().enumerate() {
            if *mass < -epsilon {
                return Err(MassError::NotABeliefFunction(format!(
                    "recovered mass {mass} on a set; the table is not monotone"
                )));
            }
            if bits != 0 && *mass > epsilon {
                focal.insert(SubsetMask::from_bits(bits as u32), *mass);
            }
        }
        if focal.is_empty() {
            return Err(MassError::AllMassZero);
        }
        Ok(Self::renormalized(frame.clone(), focal))
    }
}

/// Coarse image of a fine-frame distribution: each focal set lands on its
/// outer reduction. Total mass is preserved, so no renormalization happens.
pub fn project(r: &Refinement, fine_mass: &MassDistribution) -> Result<MassDistribution, MassError> {
    if fine_mass.frame() != r.fine() {
        return Err(MassError::FrameMismatch);
    }
    let mut focal: BTreeMap<SubsetMask, f64> = BTreeMap::new();
    for (set, mass) in fine_mass.focal() {
        let coarse = r.outer_reduction(set).map_err(|_| MassError::FrameMismatch)?;
        *focal.entry(coarse).or_insert(0.0) += mass;
    }
    Ok(MassDistribution {
        frame: r.coarse().clone(),
        focal,
    })
}

/// Fine-frame formulation of a coarse distribution: each focal set moves to
/// the union of its element images, adding no information.
pub fn vacuous_extension(
    r: &Refinement,
    coarse_mass: &MassDistribution,
) -> Result<MassDistribution, MassError> {
    if coarse_mass.frame() != r.coarse() {
        return Err(MassError::FrameMismatch);
    }
    let mut focal: BTreeMap<SubsetMask, f64> = BTreeMap::new();
    for (set, mass) in coarse_mass.focal() {
        let fine = r.refine_set(set).map_err(|_| MassError::FrameMismatch)?;
        *focal.entry(fine).or_insert(0.0) += mass;
    }
    Ok(MassDistribution {
        frame: r.fine().clone(),
        focal,
    })
}

/// Dense belief, plausibility and commonality values for every subset of a
/// frame, indexed by mask bits.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceTables {
    frame: Frame,
    bel: Vec<f64>,
    pl: Vec<f64>,
    q: Vec<f64>,
}

impl EvidenceTables {
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn len(&self) -> usize {
        self.bel.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn belief(&self, set: SubsetMask) -> f64 {
        self.bel[set.bits() as usize]
    }

    pub fn plausibility(&self, set: SubsetMask) -> f64 {
        self.pl[set.bits() as usize]
    }

    pub fn commonality(&self, set: SubsetMask) -> f64 {
        self.q[set.bits() as usize]
    }

    pub fn belief_table(&self) -> &[f64] {
        &self.bel
    }

    pub fn plausibility_table(&self) -> &[f64] {
        &self.pl
    }

    pub fn commonality_table(&self) -> &[f64] {
        &self.q
    }
}

/// In-place subset-sum sweep: afterwards `v[A] = sum of v0[B] for B ⊆ A`.
fn zeta_subsets(values: &mut [f64], n: usize) {
    for bit in 0..n {
        let step = 1usize << bit;
        for mask in 0..values.len() {
            if mask & step != 0 {
                values[mask] += values[mask ^ step];
            }
        }
    }
}

/// In-place superset-sum sweep: afterwards `v[A] = sum of v0[B] for B ⊇ A`.
fn zeta_supersets(values: &mut [f64], n: usize) {
    for bit in 0..n {
        let step = 1usize << bit;
        for mask in 0..values.len() {
            if mask & step == 0 {
                values[mask] += values[mask | step];
            }
        }
    }
}

/// Inverse of `zeta_subsets`.
fn mobius_subsets(values: &mut [f64], n: usize) {
    for bit in 0..n {
        let step = 1usize << bit;
        for mask in 0..values.len() {
            if mask & step != 0 {
                values[mask] -= values[mask ^ step];
            }
        }
    }
}
