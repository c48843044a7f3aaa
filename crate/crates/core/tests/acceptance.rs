//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any failed.
//!
//! Run with `cargo test -p ruin-core --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ruin_core::oracles::{cross_check_with, dp_step, McOptions, OracleOptions, WealthDistribution};
use ruin_core::rootfinder::count_roots_in_disk;
use ruin_core::*;

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn roots_reproduced() -> Outcome {
    let start = Instant::now();
    let d = common::poisson_example();
    let roots = match find_disk_roots(&d, &DiskRootOptions::default()) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("root finder failed: {e}")),
    };
    let elapsed = start.elapsed();
    let expected = [
        Complex64::new(0.993362, 0.0),
        Complex64::new(-0.202699, -0.220049),
        Complex64::new(-0.202699, 0.220049),
    ];
    let mut worst = 0.0f64;
    let mut matched = roots.len() == expected.len();
    for e in expected {
        match roots.roots.iter().map(|r| (r - e).norm()).reduce(f64::min) {
            Some(dist) => worst = worst.max(dist),
            None => matched = false,
        }
    }
    let pass = matched && worst <= 1e-5 && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "max deviation {worst:.2e}, {} roots, {elapsed:?}",
            roots.len()
        ),
    )
}

fn table_reproduced() -> Outcome {
    let start = Instant::now();
    let d = common::poisson_example();
    let solver = match RuinSolver::new(&d, Default::default()) {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("solver failed: {e}")),
    };
    let table = [
        (3, 0.9900),
        (10, 0.9456),
        (50, 0.7245),
        (100, 0.5193),
        (200, 0.2668),
        (500, 0.0361),
    ];
    let mut worst = 0.0f64;
    for (m, expected) in table {
        match solver.evaluate(m) {
            Ok(r) => worst = worst.max((r.p_ruin - expected).abs()),
            Err(e) => return outcome(false, format!("M={m}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 5e-4 && elapsed < Duration::from_secs(1),
        format!("max deviation {worst:.2e}, {elapsed:?}"),
    )
}

fn closed_form_exact() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for _ in 0..200 {
        let mut q: f64 = 0.0;
        while q == 0.0 {
            q = rng.random_range(0.0..0.5);
        }
        let d = build_distribution(&AnalyticFamily::table([(-1, q), (1, 1.0 - q)]), 0.0).unwrap();
        let solver = RuinSolver::new(&d, Default::default()).unwrap();
        for m in [1u64, 5, 20, 100] {
            let exact = (q / (1.0 - q)).powi(m as i32);
            match solver.evaluate(m) {
                Ok(r) => {
                    let err = (r.p_ruin - exact).abs();
                    worst = worst.max(err);
                    if err > 1e-12 {
                        failures.push(format!("q={q} M={m} err={err:.2e}"));
                    }
                }
                Err(e) => failures.push(format!("q={q} M={m}: {e}")),
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "max error {worst:.2e} over 800 cases{}",
            failures
                .first()
                .map(|f| format!("; first failure {f}"))
                .unwrap_or_default()
        ),
    )
}

fn oracle_triangle(suite: &[(PayoffDistribution, u64)]) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let (mut worst_dp, mut worst_fw, mut worst_mc_sigma) = (0.0f64, 0.0f64, 0.0f64);
    for (i, (d, m)) in suite.iter().enumerate() {
        let opts = OracleOptions {
            mc: Some(McOptions {
                n_paths: 1_000_000,
                seed: i as u64,
                ..Default::default()
            }),
            ..Default::default()
        };
        let solver = match RuinSolver::new(d, Default::default()) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("case {i}: {e}"));
                continue;
            }
        };
        match cross_check_with(&solver, *m, &opts) {
            Ok(r) => {
                if let Some(dp) = &r.dp {
                    let excess = (dp.lower - r.formula).max(r.formula - dp.lower - dp.bound_gap);
                    worst_dp = worst_dp.max(excess);
                }
                if let Some(last) = r.finite_w.last() {
                    worst_fw = worst_fw.max((r.formula - last.value).abs());
                }
                if let Some(mc) = &r.mc {
                    if mc.ci_halfwidth > 0.0 {
                        let sigma = (r.formula - mc.estimate).abs() / (mc.ci_halfwidth / 1.96);
                        worst_mc_sigma = worst_mc_sigma.max(sigma);
                    }
                }
                if !r.verdict.all || r.finite_w.is_empty() {
                    failures.push(format!("case {i} M={m}: {:?} {:?}", r.verdict, r.notes));
                }
            }
            Err(e) => failures.push(format!("case {i}: {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} cases; dp excess over bracket {worst_dp:.1e}, finite-W max diff {worst_fw:.1e}, \
             mc max |z| {worst_mc_sigma:.2}, {:.0?}{}",
            suite.len(),
            start.elapsed(),
            failures
                .first()
                .map(|f| format!("; first failure {f}"))
                .unwrap_or_default()
        ),
    )
}

fn forms_agree(suite: &[(PayoffDistribution, u64)]) -> Outcome {
    let mut failures = Vec::new();
    let (mut worst_form, mut worst_perm) = (0.0f64, 0.0f64);
    let mut compared = 0;
    for (i, (d, m)) in suite.iter().enumerate() {
        let roots = match find_disk_roots(d, &DiskRootOptions::default()) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("case {i}: {e}"));
                continue;
            }
        };
        for wealth in [*m, m + 17, 200] {
            let newton = match ruin_probability_newton(&roots, wealth) {
                Ok(r) => r.p_ruin,
                Err(e) => {
                    failures.push(format!("case {i}: newton {e}"));
                    continue;
                }
            };
            if !roots.has_cluster() {
                match ruin_probability_lagrange(&roots, wealth) {
                    Ok(r) => {
                        compared += 1;
                        let diff = (r.p_ruin - newton).abs();
                        worst_form = worst_form.max(diff);
                        if diff > 1e-8 {
                            failures
                                .push(format!("case {i} M={wealth}: forms differ by {diff:.2e}"));
                        }
                    }
                    Err(e) => failures.push(format!("case {i}: lagrange {e}")),
                }
            }
            let n = roots.len();
            for shift in 1..n.max(2) {
                let mut permuted = roots.clone();
                permuted.roots.rotate_left(shift % n);
                permuted.roots.swap(0, n - 1);
                match ruin_probability_newton(&permuted, wealth) {
                    Ok(r) => {
                        let diff = (r.p_ruin - newton).abs();
                        worst_perm = worst_perm.max(diff);
                        if diff > 1e-9 {
                            failures.push(format!(
                                "case {i} M={wealth}: order changes value by {diff:.2e}"
                            ));
                        }
                    }
                    Err(e) => failures.push(format!("case {i}: permuted newton {e}")),
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{compared} form comparisons, max diff {worst_form:.1e}; max permutation diff {worst_perm:.1e}{}",
            failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()
        ),
    )
}

fn winding_counts(suite: &[(PayoffDistribution, u64)]) -> Outcome {
    let mut failures = Vec::new();
    let poisson = common::poisson_example();
    let poisson_degree = find_disk_roots(&poisson, &DiskRootOptions::default())
        .map(|r| r.degree)
        .unwrap_or(0);
    let cases = suite
        .iter()
        .map(|(d, _)| (d, d.realized_degree()))
        .chain(std::iter::once((&poisson, poisson_degree)));
    let mut checked = 0;
    for (i, (d, degree)) in cases.enumerate() {
        checked += 1;
        let radius = match find_z_star(d) {
            Ok(z) => 0.5 * (1.0 + z),
            Err(e) => {
                failures.push(format!("case {i}: {e}"));
                continue;
            }
        };
        match count_roots_in_disk(d, degree, radius) {
            Ok(c) if c == d.nu() as i64 => {}
            Ok(c) => failures.push(format!("case {i}: winding {c}, nu {}", d.nu())),
            Err(e) => failures.push(format!("case {i}: {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} distributions{}",
            failures
                .first()
                .map(|f| format!("; first failure {f}"))
                .unwrap_or_default()
        ),
    )
}

fn structural_invariants(suite: &[(PayoffDistribution, u64)]) -> Outcome {
    let mut failures = Vec::new();
    let (mut worst_q, mut worst_mono, mut worst_mass) = (0.0f64, 0.0f64, 0.0f64);
    let poisson = common::poisson_example();
    let cases = suite
        .iter()
        .map(|(d, _)| d)
        .chain(std::iter::once(&poisson));
    for (i, d) in cases.enumerate() {
        let solver = match RuinSolver::new(d, Default::default()) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("case {i}: {e}"));
                continue;
            }
        };
        let mut prev = 1.0;
        for m in d.nu() as u64..=120 {
            let r = match solver.evaluate(m) {
                Ok(r) => r,
                Err(e) => {
                    failures.push(format!("case {i} M={m}: {e}"));
                    break;
                }
            };
            let q = r.q_coeffs.as_deref().unwrap_or(&[]);
            let gap = (q.iter().sum::<f64>() - r.p_ruin).abs();
            worst_q = worst_q.max(gap);
            if gap > 1e-9 || q.len() != d.nu() {
                failures.push(format!("case {i} M={m}: Q(1) off by {gap:.2e}"));
            }
            if q.iter().any(|&c| c < 0.0) {
                failures.push(format!("case {i} M={m}: negative q {q:?}"));
            }
            let rise = r.p_ruin - prev;
            worst_mono = worst_mono.max(rise);
            if rise > 1e-9 {
                failures.push(format!("case {i} M={m}: rises by {rise:.2e}"));
            }
            prev = r.p_ruin;
        }

        // a tight cap so that spill is exercised
        let m = d.nu() + 5;
        let mut w = WealthDistribution::point_mass(d.nu(), m, m + 12);
        for _ in 0..300 {
            let next = dp_step(&w, d);
            let drift = (next.total() - w.total()).abs();
            worst_mass = worst_mass.max(drift);
            if drift > 1e-14 {
                failures.push(format!("case {i} t={}: mass changes by {drift:.2e}", w.t));
                break;
            }
            w = next;
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "max |Q(1) - p| {worst_q:.1e}, max rise {worst_mono:.1e}, max mass change {worst_mass:.1e}{}",
            failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()
        ),
    )
}

fn main() -> ExitCode {
    // libtest flags such as --nocapture are accepted and ignored
    let suite = common::suite();
    let criteria: [(&str, Criterion); 7] = [
        ("reference roots reproduced", Box::new(roots_reproduced)),
        ("reference table reproduced", Box::new(table_reproduced)),
        ("two-point closed form", Box::new(closed_form_exact)),
        ("oracle triangle", Box::new(|| oracle_triangle(&suite))),
        (
            "newton/lagrange equivalence",
            Box::new(|| forms_agree(&suite)),
        ),
        ("root counting", Box::new(|| winding_counts(&suite))),
        (
            "structural invariants",
            Box::new(|| structural_invariants(&suite)),
        ),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        all &= o.pass;
        println!(
            "criterion {}: {} - {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
