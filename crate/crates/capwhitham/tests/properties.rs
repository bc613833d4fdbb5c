//! Randomized oracle suites, 1000 cases each.

mod common;

const CASES: usize = 1000;

fn assert_suite(r: common::SuiteResult) {
    match r {
        Ok(n) => assert!(n >= 1),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn interval_enclosures_contain_high_precision_values() {
    assert_suite(common::interval_containment(CASES, 1));
}

#[test]
fn convolution_matches_product_quadrature() {
    assert_suite(common::conv_vs_quadrature(CASES, 2));
}

#[test]
fn spectral_norm_bound_dominates_power_iteration() {
    assert_suite(common::norm_vs_power_iteration(CASES, 3));
}

#[test]
fn parseval_identity_holds() {
    assert_suite(common::parseval(CASES, 4));
}

#[test]
fn cosh_coefficients_match_quadrature() {
    assert_suite(common::cosh_vs_quadrature(CASES, 5));
}

#[test]
fn kernels_stay_below_their_envelopes() {
    assert_suite(common::decay_envelopes());
}
