//! One test per acceptance criterion, each printing a single verdict line.
//! Run with `--nocapture` to see the lines alongside the harness output.

use cbeam_core::validation::{run_criterion, Tolerances};

fn criterion(id: usize) {
    let outcome = run_criterion(id, &Tolerances::pinned());
    println!("{outcome}");
    for c in &outcome.checks {
        let mark = if c.passed { "ok" } else { "FAILED" };
        println!("    {mark:<6} {}: {}", c.label, c.detail);
    }
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn criterion_01_straight_convergence_order() {
    criterion(1);
}

#[test]
fn criterion_02_one_element_quality() {
    criterion(2);
}

#[test]
fn criterion_03_arc_convergence_reduced() {
    criterion(3);
}

#[test]
fn criterion_04_locking_with_full_quadrature() {
    criterion(4);
}

#[test]
fn criterion_05_no_straight_locking() {
    criterion(5);
}

#[test]
fn criterion_06_resultant_forms_agree() {
    criterion(6);
}

#[test]
fn criterion_07_geometry_identities() {
    criterion(7);
}

#[test]
fn criterion_08_mechanics_properties() {
    criterion(8);
}

#[test]
fn criterion_09_euler_bernoulli_limit() {
    criterion(9);
}

#[test]
fn criterion_10_coupling_demos() {
    criterion(10);
}
