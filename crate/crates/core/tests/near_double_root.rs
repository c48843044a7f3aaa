//! A family `{-3: 0.02, -2: s, +2: 0.98 - s}` whose two negative in-disk
//! roots merge into a double root at one value of `s` and split into a
//! conjugate pair past it. The merge point is located by bisection on the
//! sign of the minimum of `h(x) - x^3` over the negative axis.

use ruin_core::oracles::{dp_ruin_with, DpOptions};
use ruin_core::ruin::FormChoice;
use ruin_core::*;

const A: f64 = 0.02;

fn family(s: f64) -> PayoffDistribution {
    build_distribution(
        &AnalyticFamily::table([(-3, A), (-2, s), (2, 1.0 - A - s)]),
        0.0,
    )
    .unwrap()
}

// g(x) = h(x) - x^3 and its derivative
fn g(s: f64, x: f64) -> (f64, f64) {
    let c = 1.0 - A - s;
    (
        A + s * x + c * x.powi(5) - x.powi(3),
        s + 5.0 * c * x.powi(4) - 3.0 * x * x,
    )
}

// local minimum of g on the negative axis, located by bisection on g'
fn min_g(s: f64) -> f64 {
    let (mut lo, mut hi) = (-0.6, -0.05);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(s, mid).1 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    g(s, 0.5 * (lo + hi)).0
}

fn merge_point() -> f64 {
    let (mut lo, mut hi) = (0.10, 0.15);
    assert!(min_g(lo) > 0.0 && min_g(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if min_g(mid) < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[test]
fn merge_point_matches_reference() {
    // 40-digit bisection with mpmath: 0.1373271451374617028...
    assert!((merge_point() - 0.137_327_145_137_461_7).abs() < 1e-12);
}

#[test]
fn merge_point_is_flagged_as_cluster() {
    let s = merge_point();
    let d = family(s);
    let roots = find_disk_roots(&d, &DiskRootOptions::default()).unwrap();
    assert_eq!(roots.len(), 3);
    assert!(roots.has_cluster(), "{roots:?}");
    assert!(roots.min_pairwise_distance() < 1e-6);
    assert!(!roots.cluster_flags[0], "z* is simple");
    assert!(matches!(
        ruin_probability_lagrange(&roots, 10),
        Err(Error::RootsNotDistinct { .. })
    ));
}

#[test]
fn away_from_merge_roots_are_distinct() {
    let d = family(merge_point() + 0.01);
    let roots = find_disk_roots(&d, &DiskRootOptions::default()).unwrap();
    assert!(!roots.has_cluster());
}

#[test]
fn newton_form_matches_dp_at_merge_point() {
    let d = family(merge_point());
    let solver = RuinSolver::new(
        &d,
        RuinOptions {
            form: FormChoice::Auto,
            ..Default::default()
        },
    )
    .unwrap();
    let opts = DpOptions {
        eps: 1e-11,
        ..Default::default()
    };
    for m in [3, 4, 7, 15, 30] {
        let r = solver.evaluate(m).unwrap();
        assert_eq!(r.method, Method::NewtonForm);
        let dp = dp_ruin_with(&d, m, &opts).unwrap();
        assert!(
            r.p_ruin >= dp.lower - 1e-9 && r.p_ruin <= dp.lower + dp.bound_gap + 1e-9,
            "M={m}: newton {} dp {} + {}",
            r.p_ruin,
            dp.lower,
            dp.bound_gap
        );
        let q = r.q_coeffs.unwrap();
        let absorbed = dp.state.absorbed();
        for k in 0..3 {
            assert!(
                (q[k] - absorbed[k]).abs() <= dp.bound_gap + 1e-9,
                "M={m} k={k}"
            );
        }
    }
}
