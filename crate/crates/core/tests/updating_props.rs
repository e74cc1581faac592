//! Cross-checks between the direct updates, their closed forms, and the
//! matrix route.

mod common;

use common::{assert_mass_close, random_frame, random_mass, random_nonempty_set, rng};
use massflow::specialization::SpecializationMatrix;
use massflow::{
    condition, is_specialization, revise, revised_belief, revised_plausibility, SubsetMask,
    EPSILON,
};

#[test]
fn closed_forms_match_tables_of_revision() {
    let mut rng = rng(21);
    let mut checked = 0;
    while checked < 300 {
        let frame = random_frame(&mut rng, 8);
        let m = random_mass(&mut rng, &frame, 6);
        let event = random_nonempty_set(&mut rng, &frame);
        if m.plausibility(event).unwrap() <= EPSILON {
            continue;
        }
        checked += 1;
        let revised = revise(&m, event).unwrap().result;
        let tables = revised.tables().unwrap();
        for bits in 0..(1usize << frame.len()) {
            let set = SubsetMask::from_bits(bits as u32);
            let bel = revised_belief(&m, event, set).unwrap();
            let pl = revised_plausibility(&m, event, set).unwrap();
            assert!((bel - tables.belief(set)).abs() < 1e-9);
            assert!((pl - tables.plausibility(set)).abs() < 1e-9);
        }
    }
}

#[test]
fn matrices_reproduce_direct_updates() {
    let mut rng = rng(22);
    let mut checked = 0;
    while checked < 300 {
        let frame = random_frame(&mut rng, 8);
        let m = random_mass(&mut rng, &frame, 6);
        let event = random_nonempty_set(&mut rng, &frame);
        let bel = m.belief(event).unwrap();
        let pl = m.plausibility(event).unwrap();
        if pl <= EPSILON {
            continue;
        }
        checked += 1;

        let r = SpecializationMatrix::revision(&frame, event).unwrap();
        let via_matrix = r.apply(&m).unwrap();
        let direct = revise(&m, event).unwrap();
        assert_mass_close(&via_matrix.result, &direct.result, 1e-9);
        assert!((via_matrix.consistency - pl).abs() < 1e-9);

        if bel > EPSILON {
            let c = SpecializationMatrix::conditional(&frame, event).unwrap();
            let via_matrix = c.apply(&m).unwrap();
            let direct = condition(&m, event).unwrap();
            assert_mass_close(&via_matrix.result, &direct.result, 1e-9);
            assert!((via_matrix.consistency - bel).abs() < 1e-9);
        }
    }
}

#[test]
fn updates_are_specializations_of_the_input() {
    let mut rng = rng(23);
    let mut checked = 0;
    while checked < 200 {
        let frame = random_frame(&mut rng, 6);
        let m = random_mass(&mut rng, &frame, 5);
        let event = random_nonempty_set(&mut rng, &frame);
        if m.plausibility(event).unwrap() <= EPSILON {
            continue;
        }
        checked += 1;
        let revised = revise(&m, event).unwrap().result;
        assert!(is_specialization(&revised, &m).unwrap());
        if m.belief(event).unwrap() > EPSILON {
            let conditioned = condition(&m, event).unwrap().result;
            assert!(is_specialization(&conditioned, &m).unwrap());
        }
    }
}

#[test]
fn discarded_mass_reports_the_conflict() {
    let mut rng = rng(24);
    for _ in 0..200 {
        let frame = random_frame(&mut rng, 7);
        let m = random_mass(&mut rng, &frame, 5);
        let event = random_nonempty_set(&mut rng, &frame);
        let pl = m.plausibility(event).unwrap();
        if pl <= EPSILON {
            continue;
        }
        let out = revise(&m, event).unwrap();
        assert!((out.discarded - (1.0 - pl)).abs() < 1e-12);
        assert_eq!(out.belief_vanished, m.belief(event).unwrap() <= EPSILON);
    }
}
