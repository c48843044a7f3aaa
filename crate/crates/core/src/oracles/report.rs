use serde::Serialize;

use crate::error::Result;
use crate::payoff::PayoffDistribution;
use crate::rootfinder::find_z_star;
use crate::ruin::RuinSolver;

use super::dp::{dp_ruin_with, DpOptions};
use super::finite_w::finite_w_profile;
use super::mc::{mc_ruin, McEstimate, McOptions};

/// Slack added to every oracle comparison.
pub const ORACLE_TOL: f64 = 1e-6;
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptions {
    pub dp: Option<DpOptions>,
    pub mc: Option<McOptions>,
    /// Thresholds for the finite-W oracle; empty picks them from the drift.
    pub finite_w: Vec<u64>,
    pub run_finite_w: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            dp: Some(DpOptions::default()),
            mc: Some(McOptions::default()),
            finite_w: Vec::new(),
            run_finite_w: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DpSummary {
    pub lower: f64,
    pub bound_gap: f64,
    pub steps: usize,
    pub k_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteWPoint {
    pub threshold: u64,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Verdicts {
    pub dp: Option<bool>,
    pub mc: Option<bool>,
    pub finite_w: Option<bool>,
    pub all: bool,
}

/// Formula value next to each oracle's value and a pass/fail per oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub wealth: u64,
    pub formula: f64,
    pub dp: Option<DpSummary>,
    pub mc: Option<McEstimate>,
    pub finite_w: Vec<FiniteWPoint>,
    pub verdict: Verdicts,
    /// Why an oracle was skipped or failed to run.
    pub notes: Vec<String>,
}

/// Thresholds `M + 400/drift`, doubled as needed until the truncation
/// error bound `z*^(W - M)` falls below `1e-12`, plus two smaller ones to
/// exhibit monotonicity.
pub fn default_thresholds(d: &PayoffDistribution, wealth: u64) -> Vec<u64> {
    let nu = d.nu() as u64;
    let start = wealth.max(nu);
    let mut span = if d.is_favorable() {
        (400.0 / d.mean()).ceil().min(1e7) as u64
    } else {
        400
    };
    if let Ok(z) = find_z_star(d) {
        let needed = (1e-12f64.ln() / z.ln()).ceil();
        if needed.is_finite() {
            span = span.max((needed as u64).min(10_000_000));
        }
    }
    let span = span.max(4);
    vec![start + span / 4, start + span / 2, start + span]
}

pub fn cross_check(
    d: &PayoffDistribution,
    wealth: u64,
    opts: &OracleOptions,
) -> Result<OracleReport> {
    let solver = RuinSolver::new(d, Default::default())?;
    cross_check_with(&solver, wealth, opts)
}

/// Run the oracles against a solver's formula value.
///
/// Tolerances: the formula must lie in the DP bracket widened by
/// `ORACLE_TOL`; within three 95% half-widths of the simulation (the wider
/// of the normal and Wilson intervals) plus its censored fraction and
/// escape bias; and within `ORACLE_TOL` of the largest finite-W value, with
/// the finite-W values non-decreasing in W.
pub fn cross_check_with(
    solver: &RuinSolver,
    wealth: u64,
    opts: &OracleOptions,
) -> Result<OracleReport> {
    let d = solver.distribution();
    let formula = solver.evaluate(wealth)?.p_ruin;
    let mut notes = Vec::new();
    let mut verdict = Verdicts::default();

    let dp = opts
        .dp
        .as_ref()
        .and_then(|o| match dp_ruin_with(d, wealth, o) {
            Ok(out) => {
                let ok = formula >= out.lower - ORACLE_TOL
                    && formula <= out.lower + out.bound_gap + ORACLE_TOL;
                verdict.dp = Some(ok);
                Some(DpSummary {
                    lower: out.lower,
                    bound_gap: out.bound_gap,
                    steps: out.steps,
                    k_cap: out.k_cap,
                })
            }
            Err(e) => {
                verdict.dp = Some(false);
                notes.push(format!("dp: {e}"));
                None
            }
        });

    let mc = opts.mc.as_ref().and_then(|o| match mc_ruin(d, wealth, o) {
        Ok(est) => {
            let ci = est.ci_halfwidth.max(est.wilson_halfwidth);
            let tol = 3.0 * ci + est.censored_fraction + est.escape_bias_bound;
            verdict.mc = Some((formula - est.estimate).abs() <= tol + ORACLE_TOL);
            Some(est)
        }
        Err(e) => {
            verdict.mc = Some(false);
            notes.push(format!("mc: {e}"));
            None
        }
    });

    let mut finite_w = Vec::new();
    if opts.run_finite_w {
        if d.max_payoff().is_none() {
            notes.push("finite_w: skipped, payoff support is infinite".into());
        } else if (wealth as usize) < d.nu() {
            notes.push("finite_w: skipped, wealth below nu".into());
        } else {
            let mut thresholds = if opts.finite_w.is_empty() {
                default_thresholds(d, wealth)
            } else {
                opts.finite_w
                    .iter()
                    .copied()
                    .filter(|&w| w >= wealth)
                    .collect()
            };
            thresholds.sort_unstable();
            thresholds.dedup();
            let nu = d.nu() as u64;
            for &w in &thresholds {
                match finite_w_profile(d, w) {
                    Ok(u) => finite_w.push(FiniteWPoint {
                        threshold: w,
                        value: u[(wealth - nu) as usize],
                    }),
                    Err(e) => notes.push(format!("finite_w(W={w}): {e}")),
                }
            }
            if finite_w.is_empty() {
                verdict.finite_w = Some(false);
            } else {
                let monotone = finite_w
                    .windows(2)
                    .all(|p| p[1].value >= p[0].value - MONOTONE_SLACK);
                let last = finite_w.last().unwrap().value;
                verdict.finite_w = Some(monotone && (formula - last).abs() <= ORACLE_TOL);
            }
        }
    }

    verdict.all = [verdict.dp, verdict.mc, verdict.finite_w]
        .iter()
        .all(|v| v.unwrap_or(true));
    Ok(OracleReport {
        wealth,
        formula,
        dp,
        mc,
        finite_w,
        verdict,
        notes,
    })
}
