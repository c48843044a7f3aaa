mod common;

use ruin_core::oracles::{dp_ruin, finite_w_ruin};
use ruin_core::*;

#[test]
fn dp_reaches_reference_value_despite_small_drift() {
    let d = common::poisson_example();
    let out = dp_ruin(&d, 3, 1e-3, 1_000_000).unwrap();
    assert!(out.bound_gap <= 1e-3);
    assert!((out.lower - 0.9900).abs() <= 1e-3 + out.bound_gap);
    let formula = ruin_probability(&d, 3).unwrap().p_ruin;
    assert!(formula >= out.lower && formula <= out.lower + out.bound_gap);
}

#[test]
fn finite_w_and_dp_agree_on_skala() {
    let d = build_distribution(&AnalyticFamily::table([(-2, 0.3), (1, 0.7)]), 0.0).unwrap();
    let fw = finite_w_ruin(&d, 4, 400).unwrap();
    let dp = dp_ruin(&d, 4, 1e-12, 1_000_000).unwrap();
    assert!(fw >= dp.lower - 1e-12 && fw <= dp.lower + dp.bound_gap + 1e-12);
}
