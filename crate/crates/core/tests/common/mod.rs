//! Shared test support: brute-force oracles that walk the focal list for
//! every subset, and seeded random generators for distributions, events and
//! matrices. The oracles share no code with the lattice transforms they
//! check.

#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use massflow::specialization::SpecializationMatrix;
use massflow::{Frame, MassDistribution, SubsetMask};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Focal-by-focal comparison of two distributions on the same frame.
pub fn assert_mass_close(a: &MassDistribution, b: &MassDistribution, tolerance: f64) {
    assert_eq!(a.frame(), b.frame(), "distributions on different frames");
    let supports: std::collections::BTreeSet<SubsetMask> = a
        .focal()
        .map(|(set, _)| set)
        .chain(b.focal().map(|(set, _)| set))
        .collect();
    for set in supports {
        let (left, right) = (a.mass(set), b.mass(set));
        assert!(
            (left - right).abs() <= tolerance,
            "mass on {set} differs: {left} vs {right}"
        );
    }
}

/// Brute-force reference tables: a dense mass vector scanned pairwise over
/// the whole lattice, `O(4^n)`.
pub struct NaiveTables {
    pub bel: Vec<f64>,
    pub pl: Vec<f64>,
    pub q: Vec<f64>,
}

pub fn naive_tables(m: &MassDistribution) -> NaiveTables {
    let n = m.frame().len();
    let size = 1usize << n;
    let mut dense = vec![0.0; size];
    for (set, mass) in m.focal() {
        dense[set.bits() as usize] = mass;
    }
    let mut bel = vec![0.0; size];
    let mut pl = vec![0.0; size];
    let mut q = vec![0.0; size];
    for a in 0..size {
        for b in 0..size {
            if b & !a == 0 {
                bel[a] += dense[b];
            }
            if b & a != 0 {
                pl[a] += dense[b];
            }
            if a & !b == 0 {
                q[a] += dense[b];
            }
        }
    }
    NaiveTables { bel, pl, q }
}

pub fn random_frame(rng: &mut ChaCha8Rng, max_elements: usize) -> Frame {
    let n = rng.gen_range(1..=max_elements);
    Frame::new((0..n).map(|i| format!("e{i}"))).unwrap()
}

pub fn random_nonempty_set(rng: &mut ChaCha8Rng, frame: &Frame) -> SubsetMask {
    let full = (1u32 << frame.len()) - 1;
    SubsetMask::from_bits(rng.gen_range(1..=full))
}

/// A sparse random distribution with up to `max_focals` focal sets and
/// weights bounded away from the pruning floor.
pub fn random_mass(rng: &mut ChaCha8Rng, frame: &Frame, max_focals: usize) -> MassDistribution {
    let full = (1u32 << frame.len()) - 1;
    let limit = max_focals.min(full as usize);
    let count = rng.gen_range(1..=limit);
    let mut assignments = Vec::with_capacity(count);
    for _ in 0..count {
        let set = SubsetMask::from_bits(rng.gen_range(1..=full));
        let weight = rng.gen_range(0.05..1.0);
        assignments.push((set, weight));
    }
    MassDistribution::new(frame, assignments, true).unwrap()
}

/// A random valid matrix: a handful of explicit rows, each splitting its
/// mass over a few subsets of the source. `empty_share` bounds how much of
/// a row may drain to the empty set.
pub fn random_matrix(
    rng: &mut ChaCha8Rng,
    frame: &Frame,
    max_rows: usize,
    empty_share: f64,
) -> SpecializationMatrix {
    let full = (1u32 << frame.len()) - 1;
    let rows_wanted = rng.gen_range(0..=max_rows.min(full as usize));
    let mut rows = Vec::new();
    let mut used = std::collections::BTreeSet::new();
    for _ in 0..rows_wanted {
        let source = SubsetMask::from_bits(rng.gen_range(1..=full));
        if !used.insert(source) {
            continue;
        }
        let subsets: Vec<SubsetMask> = source.subsets().collect();
        let target_count = rng.gen_range(1..=3.min(subsets.len()));
        let mut entries: Vec<(SubsetMask, f64)> = (0..target_count)
            .map(|_| (subsets[rng.gen_range(0..subsets.len())], rng.gen_range(0.1..1.0)))
            .collect();
        let total: f64 = entries.iter().map(|(_, w)| w).sum();
        for (_, w) in &mut entries {
            *w /= total;
        }
        // Cap how much of the row drains away so applications stay defined.
        let drain: f64 = entries
            .iter()
            .filter(|(t, _)| t.is_empty())
            .map(|(_, w)| w)
            .sum();
        if drain > empty_share {
            let scale = empty_share / drain;
            for (t, w) in &mut entries {
                if t.is_empty() {
                    *w *= scale;
                }
            }
            entries.push((source, drain - empty_share));
        }
        rows.push((source, entries));
    }
    SpecializationMatrix::new(frame, rows).unwrap()
}

/// A random pair `(s, t)` with `s ⊑ t`, built by pushing `t` through a
/// random matrix. Retries until the application is defined.
pub fn random_specialization_pair(
    rng: &mut ChaCha8Rng,
    frame: &Frame,
    max_focals: usize,
) -> (MassDistribution, MassDistribution) {
    loop {
        let t = random_mass(rng, frame, max_focals);
        let v = random_matrix(rng, frame, 6, 0.5);
        if let Ok(out) = v.apply(&t) {
            return (out.result, t);
        }
    }
}

/// A random pair where `s` is not a specialization of `t`: some focal set
/// of `s` fits inside no focal set of `t`. Needs at least two elements; on
/// a singleton frame every distribution specializes every other.
pub fn random_non_specialization_pair(
    rng: &mut ChaCha8Rng,
    frame: &Frame,
    max_focals: usize,
) -> (MassDistribution, MassDistribution) {
    assert!(frame.len() >= 2, "no non-specializations on a singleton frame");
    let full = (1u32 << frame.len()) - 1;
    loop {
        let t = random_mass(rng, frame, max_focals);
        let uncovered: Vec<SubsetMask> = (1..=full)
            .map(SubsetMask::from_bits)
            .filter(|candidate| !t.focal().any(|(a, _)| candidate.is_subset_of(a)))
            .collect();
        if uncovered.is_empty() {
            continue; // t's support covers the lattice; try again
        }
        let stray = uncovered[rng.gen_range(0..uncovered.len())];
        let mut assignments = vec![(stray, rng.gen_range(0.3..1.0))];
        if rng.gen_bool(0.5) {
            assignments.push((
                SubsetMask::from_bits(rng.gen_range(1..=full)),
                rng.gen_range(0.05..0.5),
            ));
        }
        let s = MassDistribution::new(frame, assignments, true).unwrap();
        if s.is_focal(stray) {
            return (s, t);
        }
    }
}
