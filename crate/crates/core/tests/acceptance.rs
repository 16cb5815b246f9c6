//! Acceptance suite: one test per release criterion, each printing a
//! single pass/fail line. All comparisons are exact; the two long-running
//! criteria enforce their own wall-clock budgets.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use dkh::verify::{self, CheckResult};

fn report(criterion: &str, r: CheckResult) {
    println!(
        "ACCEPTANCE {criterion} [{}]: {} — {}",
        r.name,
        if r.passed { "PASS" } else { "FAIL" },
        r.details
    );
    assert!(r.passed, "{criterion} failed: {}", r.details);
}

#[test]
fn criterion_01_d_squared_zero() {
    report("01", verify::check_d_squared());
}

#[test]
fn criterion_02_filtered_ranks() {
    report("02", verify::check_filtered_ranks());
}

#[test]
fn criterion_03_homological_support() {
    report("03", verify::check_homological_support());
}

#[test]
fn criterion_04_s_support_shape() {
    report("04", verify::check_s_support_shape());
}

#[test]
fn criterion_05_two_one_pins() {
    report("05", verify::check_two_one_pins());
}

#[test]
fn criterion_06_four_one_pages() {
    report("06", verify::check_four_one_pages());
}

#[test]
fn criterion_07_spectral_pages() {
    report("07", verify::check_spectral_pages());
}

#[test]
fn criterion_08_local_splitting() {
    report("08", verify::check_local_splitting());
}

#[test]
fn criterion_09_move_invariance() {
    report("09", verify::check_move_invariance());
}

#[test]
fn criterion_10_canonical_generators() {
    report("10", verify::check_canonical_generators());
}

#[test]
fn criterion_11_cobordism_suite() {
    report("11", verify::check_cobordisms());
}

#[test]
fn criterion_12_exact_algebra_oracles() {
    report("12", verify::check_exact_algebra_oracles());
}

#[test]
fn fault_injection_eta_mutation() {
    report("extra", verify::check_eta_mutation_detected());
}
