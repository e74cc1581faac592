//! The specialization loop: witness construction, matrix recovery, strong
//! inclusion, and the behavioral reading of the monotonicity check.

mod common;

use common::{
    assert_mass_close, random_frame, random_mass, random_matrix, random_non_specialization_pair,
    random_specialization_pair, rng,
};
use massflow::specialization::{MonotonicityReport, SpecializationError};
use massflow::{
    flow_to_matrix, is_specialization, strong_inclusion, witness_flow, Frame, MassDistribution,
    SubsetMask,
};
use rand::Rng;

#[test]
fn witness_loop_recovers_the_specialized_distribution() {
    let mut rng = rng(31);
    for _ in 0..300 {
        let frame = random_frame(&mut rng, 5);
        let (s, t) = random_specialization_pair(&mut rng, &frame, 5);
        assert!(is_specialization(&s, &t).unwrap());

        let plan = witness_flow(&s, &t).unwrap();
        assert!(plan.consistency() > 0.0 && plan.consistency() <= 1.0);
        // Per-source conservation against t.
        for (source, mass) in t.focal() {
            let routed: f64 = plan
                .flows()
                .filter(|(a, _, _)| *a == source)
                .map(|(_, _, v)| v)
                .sum();
            assert!((routed - mass).abs() < 1e-9);
        }
        let v = flow_to_matrix(&plan, &t).unwrap();
        let out = v.apply(&t).unwrap();
        assert_mass_close(&out.result, &s, 1e-6);
        assert!((out.consistency - plan.consistency()).abs() < 1e-6);
    }
}

#[test]
fn witness_rejects_perturbed_pairs() {
    let mut rng = rng(32);
    for _ in 0..300 {
        let n = rng.gen_range(2..=5usize);
        let frame = Frame::new((0..n).map(|i| format!("e{i}"))).unwrap();
        let (s, t) = random_non_specialization_pair(&mut rng, &frame, 4);
        assert!(!is_specialization(&s, &t).unwrap());
        assert!(matches!(
            witness_flow(&s, &t).unwrap_err(),
            SpecializationError::NotASpecialization
        ));
    }
}

#[test]
fn strong_inclusion_implies_specialization() {
    let mut rng = rng(33);
    let mut strong_count = 0;
    let mut spec_without_strong = 0;
    for _ in 0..1000 {
        let frame = random_frame(&mut rng, 5);
        let (s, t) = random_specialization_pair(&mut rng, &frame, 4);
        let strong = strong_inclusion(&s, &t).unwrap();
        let spec = is_specialization(&s, &t).unwrap();
        if strong {
            strong_count += 1;
            assert!(spec);
        } else if spec {
            spec_without_strong += 1;
        }
    }
    assert!(strong_count > 0, "corpus never produced strong inclusion");
    assert!(
        spec_without_strong > 0,
        "corpus never separated the two relations"
    );
}

#[test]
fn strong_inclusion_needs_a_feasible_flow() {
    // Supports interlock but no lossless flow gets the masses right:
    // t = {a}:0.9, {a,b}:0.1 and s = {a}:0.1, {a,b}:0.9. The {a,b} sink
    // demands 0.9 but only its own source may feed it.
    let frame = Frame::new(["a", "b"]).unwrap();
    let a = frame.subset(&["a"]).unwrap();
    let ab = frame.full_set();
    let t = MassDistribution::new(&frame, [(a, 0.9), (ab, 0.1)], false).unwrap();
    let s = MassDistribution::new(&frame, [(a, 0.1), (ab, 0.9)], false).unwrap();
    assert!(!strong_inclusion(&s, &t).unwrap());
    // The same supports with matching masses do flow.
    assert!(strong_inclusion(&t, &t).unwrap());
}

#[test]
fn monotonicity_counterexamples_are_behavioral() {
    let mut rng = rng(34);
    let mut found = 0;
    while found < 150 {
        let frame = random_frame(&mut rng, 4);
        let v = random_matrix(&mut rng, &frame, 6, 1.0);
        let MonotonicityReport::CounterExample { source, target, superset } =
            v.monotonicity().unwrap()
        else {
            continue;
        };
        found += 1;
        assert!(source.is_subset_of(superset));
        assert!(!target.is_empty());

        // Unit masses on the triple: s ⊑ t, but the images violate it.
        let s = MassDistribution::new(&frame, [(source, 1.0)], false).unwrap();
        let t = MassDistribution::new(&frame, [(superset, 1.0)], false).unwrap();
        assert!(is_specialization(&s, &t).unwrap());
        let s_image = v.apply(&s).expect("row with a surviving target");
        match v.apply(&t) {
            Ok(t_image) => {
                assert!(!is_specialization(&s_image.result, &t_image.result).unwrap());
            }
            Err(SpecializationError::TotalContradiction(_)) => {
                // The superset row drains everything; the violation stands.
            }
            Err(other) => panic!("unexpected apply error: {other}"),
        }
    }
}

#[test]
fn monotonic_matrices_preserve_the_order() {
    let mut rng = rng(35);
    let mut passing = 0;
    while passing < 100 {
        let frame = random_frame(&mut rng, 4);
        let v = random_matrix(&mut rng, &frame, 4, 0.5);
        if !v.monotonicity().unwrap().is_monotonic() {
            continue;
        }
        passing += 1;
        for _ in 0..5 {
            let (s, t) = random_specialization_pair(&mut rng, &frame, 4);
            let (Ok(s_image), Ok(t_image)) = (v.apply(&s), v.apply(&t)) else {
                continue;
            };
            assert!(is_specialization(&s_image.result, &t_image.result).unwrap());
        }
    }
}

#[test]
fn witness_reports_maximal_consistency_for_revisions() {
    // Revising by E realizes consistency Pl(E); the witness search should
    // find a plan at least that consistent.
    let mut rng = rng(36);
    for _ in 0..100 {
        let frame = random_frame(&mut rng, 5);
        let m = random_mass(&mut rng, &frame, 4);
        let event = common::random_nonempty_set(&mut rng, &frame);
        let pl = m.plausibility(event).unwrap();
        if pl <= massflow::EPSILON {
            continue;
        }
        let revised = massflow::revise(&m, event).unwrap().result;
        let plan = witness_flow(&revised, &m).unwrap();
        assert!(plan.consistency() >= pl - 1e-6);
    }
}

#[test]
fn flow_to_matrix_output_is_a_valid_matrix() {
    let mut rng = rng(37);
    for _ in 0..100 {
        let frame = random_frame(&mut rng, 5);
        let (s, t) = random_specialization_pair(&mut rng, &frame, 4);
        let plan = witness_flow(&s, &t).unwrap();
        let v = flow_to_matrix(&plan, &t).unwrap();
        // Re-validating through the public constructor must succeed.
        let rows: Vec<(SubsetMask, Vec<(SubsetMask, f64)>)> = v
            .stored_rows()
            .map(|(source, row)| (source, row.to_vec()))
            .collect();
        let again = massflow::SpecializationMatrix::new(&frame, rows).unwrap();
        assert_eq!(again, v);
    }
}
