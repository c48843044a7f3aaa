//! Ruin probabilities from the in-disk roots.
//!
//! With `eta_1..eta_nu` the roots of `p(z) = 1` in the unit disk, the
//! polynomial `Q(z)` interpolating `z^M` at the roots has the final-fortune
//! probabilities as coefficients, and `P_ruin(M) = Q(1)`. `Q` is evaluated
//! either in Newton form, where the divided differences of `z^M` are complete
//! homogeneous symmetric polynomials (valid for repeated roots), or in
//! Lagrange form (distinct roots only).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::payoff::PayoffDistribution;
use crate::rootfinder::{find_disk_roots, DiskRootOptions, DiskRoots};

/// Largest tolerated imaginary part before a value is reported as real.
pub const IMAG_TOL: f64 = 1e-6;
/// Final-fortune coefficients below this magnitude are reported as zero.
pub const Q_FLOOR: f64 = 1e-12;
const PHI_GUARD: f64 = 1e15;
const RANGE_SLACK: f64 = 1e-9;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Complete homogeneous symmetric polynomial of degree `r` in `vars`.
pub fn phi(vars: &[Complex64], r: usize) -> Complex64 {
    let mut layer = vec![one(); r + 1];
    for (n, &x) in vars.iter().enumerate() {
        if n == 0 {
            for k in 1..=r {
                layer[k] = layer[k - 1] * x;
            }
        } else {
            for k in 1..=r {
                layer[k] = layer[k] + x * layer[k - 1];
            }
        }
    }
    if vars.is_empty() {
        return if r == 0 { one() } else { zero() };
    }
    layer[r]
}

/// `Phi_{n,r}(eta_1..eta_n)` for `1 <= n <= nu`, `0 <= r <= max_r`.
///
/// Row `n` is built from row `n-1` by
/// `Phi_{n,r} = Phi_{n-1,r} + eta_n Phi_{n,r-1}`.
#[derive(Debug, Clone)]
pub struct SymmetricPolyTable {
    rows: Vec<Vec<Complex64>>,
}

impl SymmetricPolyTable {
    pub fn build(roots: &[Complex64], max_r: usize) -> Self {
        let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(roots.len());
        for (n, &x) in roots.iter().enumerate() {
            let mut row = vec![one(); max_r + 1];
            for r in 1..=max_r {
                let prev = if n == 0 { zero() } else { rows[n - 1][r] };
                row[r] = prev + x * row[r - 1];
            }
            rows.push(row);
        }
        Self { rows }
    }

    /// `Phi_{n,r}` with `n` counted from 1.
    pub fn get(&self, n: usize, r: usize) -> Complex64 {
        self.rows[n - 1][r]
    }

    pub fn max_abs(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NewtonForm,
    LagrangeForm,
    Trivial,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::NewtonForm => "newton_form",
            Method::LagrangeForm => "lagrange_form",
            Method::Trivial => "trivial",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Largest imaginary part discarded when reporting reals.
    pub imag_residue: f64,
    /// |newton - lagrange| when both forms were evaluated.
    pub cross_form_discrepancy: Option<f64>,
    /// |Q(1) - p_ruin| before flooring.
    pub q_at_one_gap: f64,
    pub max_root_abs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuinResult {
    pub wealth: u64,
    pub p_ruin: f64,
    /// Coefficient `k` is the probability that ruin ends with fortune `k`.
    /// `None` for non-favorable games, where only the total is known.
    pub q_coeffs: Option<Vec<f64>>,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

/// Newton basis `prod_{j<n} (z - eta_j)` expanded in monomials, lowest first.
fn newton_basis(roots: &[Complex64]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(roots.len());
    let mut cur = vec![one()];
    for &r in roots {
        out.push(cur.clone());
        cur = mul_linear(&cur, r);
    }
    out
}

/// `poly * (z - root)`.
fn mul_linear(poly: &[Complex64], root: Complex64) -> Vec<Complex64> {
    let mut next = vec![zero(); poly.len() + 1];
    for (k, &c) in poly.iter().enumerate() {
        next[k + 1] += c;
        next[k] -= c * root;
    }
    next
}

fn finish(
    wealth: u64,
    p_complex: Complex64,
    q: Vec<Complex64>,
    method: Method,
    max_root_abs: f64,
) -> Result<RuinResult> {
    let imag_residue = q
        .iter()
        .map(|c| c.im.abs())
        .fold(p_complex.im.abs(), f64::max);
    if imag_residue > IMAG_TOL {
        return Err(Error::ImaginaryResidue {
            residue: imag_residue,
        });
    }
    let p = p_complex.re;
    if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&p) {
        return Err(Error::ProbabilityOutOfRange { value: p });
    }
    let q_at_one: f64 = q.iter().map(|c| c.re).sum();
    let mut coeffs = Vec::with_capacity(q.len());
    for c in &q {
        let v = c.re;
        if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&v) {
            return Err(Error::ProbabilityOutOfRange { value: v });
        }
        coeffs.push(if v.abs() < Q_FLOOR {
            0.0
        } else {
            v.clamp(0.0, 1.0)
        });
    }
    Ok(RuinResult {
        wealth,
        p_ruin: p.clamp(0.0, 1.0),
        q_coeffs: Some(coeffs),
        method,
        diagnostics: Diagnostics {
            imag_residue,
            cross_form_discrepancy: None,
            q_at_one_gap: (q_at_one - p).abs(),
            max_root_abs: Some(max_root_abs),
        },
    })
}

fn check_wealth(roots: &DiskRoots, wealth: u64) -> Result<()> {
    if (wealth as usize) < roots.len() {
        return Err(Error::InvalidParameter(format!(
            "wealth {wealth} is below nu = {}; ruin is immediate",
            roots.len()
        )));
    }
    Ok(())
}

/// Ruin probability as a sum of complete symmetric polynomials in the
/// leading roots times `prod (1 - eta_j)`. Handles repeated roots.
pub fn ruin_probability_newton(roots: &DiskRoots, wealth: u64) -> Result<RuinResult> {
    check_wealth(roots, wealth)?;
    let eta = &roots.roots;
    let nu = eta.len();
    let m = wealth as usize;
    let table = SymmetricPolyTable::build(eta, m);
    let magnitude = table.max_abs();
    if !(magnitude <= PHI_GUARD) {
        return Err(Error::PhiOverflow { magnitude });
    }
    let basis = newton_basis(eta);
    let mut p = zero();
    let mut weight = one();
    let mut q = vec![zero(); nu];
    for n in 1..=nu {
        let coeff = table.get(n, m + 1 - n);
        p += coeff * weight;
        weight *= one() - eta[n - 1];
        for (k, b) in basis[n - 1].iter().enumerate() {
            q[k] += coeff * b;
        }
    }
    finish(wealth, p, q, Method::NewtonForm, roots.max_abs())
}

/// Ruin probability as `sum_j eta_j^M prod_{i != j} (1 - eta_i)/(eta_j - eta_i)`.
/// Requires distinct roots.
pub fn ruin_probability_lagrange(roots: &DiskRoots, wealth: u64) -> Result<RuinResult> {
    check_wealth(roots, wealth)?;
    if roots.has_cluster() {
        return Err(Error::RootsNotDistinct {
            cluster_tol: crate::rootfinder::DEFAULT_CLUSTER_TOL,
        });
    }
    let eta = &roots.roots;
    let nu = eta.len();
    let mut p = zero();
    let mut q = vec![zero(); nu];
    for (j, &ej) in eta.iter().enumerate() {
        let weight = match u32::try_from(wealth) {
            Ok(w) => ej.powu(w),
            Err(_) => ej.powf(wealth as f64),
        };
        let mut at_one = weight;
        let mut numerator = vec![one()];
        let mut denom = one();
        for (i, &ei) in eta.iter().enumerate() {
            if i == j {
                continue;
            }
            at_one *= (one() - ei) / (ej - ei);
            denom *= ej - ei;
            numerator = mul_linear(&numerator, ei);
        }
        p += at_one;
        let scale = weight / denom;
        for (k, c) in numerator.iter().enumerate() {
            q[k] += scale * c;
        }
    }
    finish(wealth, p, q, Method::LagrangeForm, roots.max_abs())
}

/// Which closed form to use for favorable games.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormChoice {
    /// Lagrange for distinct roots, Newton otherwise.
    #[default]
    Auto,
    Newton,
    Lagrange,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RuinOptions {
    pub roots: DiskRootOptions,
    pub form: FormChoice,
    /// Evaluate both forms (when the roots allow) and record the discrepancy.
    pub cross_check: bool,
}

fn trivial(d: &PayoffDistribution, wealth: u64) -> Option<RuinResult> {
    let nu = d.nu();
    if (wealth as usize) < nu {
        let mut q = vec![0.0; nu];
        q[wealth as usize] = 1.0;
        return Some(RuinResult {
            wealth,
            p_ruin: 1.0,
            q_coeffs: Some(q),
            method: Method::Trivial,
            diagnostics: Diagnostics::default(),
        });
    }
    if !d.is_favorable() {
        return Some(RuinResult {
            wealth,
            p_ruin: 1.0,
            q_coeffs: None,
            method: Method::Trivial,
            diagnostics: Diagnostics::default(),
        });
    }
    None
}

/// Evaluates ruin probabilities for one distribution at many wealth levels,
/// sharing a single root computation.
#[derive(Debug, Clone)]
pub struct RuinSolver {
    distribution: PayoffDistribution,
    roots: Option<DiskRoots>,
    options: RuinOptions,
}

impl RuinSolver {
    pub fn new(d: &PayoffDistribution, options: RuinOptions) -> Result<Self> {
        let roots = if d.is_favorable() {
            Some(find_disk_roots(d, &options.roots)?)
        } else {
            None
        };
        Ok(Self {
            distribution: d.clone(),
            roots,
            options,
        })
    }

    /// `None` for non-favorable games.
    pub fn roots(&self) -> Option<&DiskRoots> {
        self.roots.as_ref()
    }

    pub fn distribution(&self) -> &PayoffDistribution {
        &self.distribution
    }

    pub fn evaluate(&self, wealth: u64) -> Result<RuinResult> {
        if let Some(r) = trivial(&self.distribution, wealth) {
            return Ok(r);
        }
        let roots = self.roots.as_ref().expect("favorable games carry roots");
        let distinct = !roots.has_cluster();
        let mut result = match self.options.form {
            FormChoice::Newton => ruin_probability_newton(roots, wealth)?,
            FormChoice::Lagrange => ruin_probability_lagrange(roots, wealth)?,
            FormChoice::Auto if distinct => ruin_probability_lagrange(roots, wealth)?,
            FormChoice::Auto => ruin_probability_newton(roots, wealth)?,
        };
        if self.options.cross_check && distinct {
            let other = match result.method {
                Method::LagrangeForm => ruin_probability_newton(roots, wealth)?,
                _ => ruin_probability_lagrange(roots, wealth)?,
            };
            result.diagnostics.cross_form_discrepancy = Some((other.p_ruin - result.p_ruin).abs());
        }
        Ok(result)
    }

    /// Evaluate several wealth levels in parallel; output order follows input.
    pub fn evaluate_many(&self, wealths: &[u64]) -> Vec<Result<RuinResult>> {
        wealths.par_iter().map(|&m| self.evaluate(m)).collect()
    }
}

/// `P_ruin(M)` with default options.
pub fn ruin_probability(d: &PayoffDistribution, wealth: u64) -> Result<RuinResult> {
    ruin_probability_with(d, wealth, RuinOptions::default())
}

pub fn ruin_probability_with(
    d: &PayoffDistribution,
    wealth: u64,
    options: RuinOptions,
) -> Result<RuinResult> {
    if let Some(r) = trivial(d, wealth) {
        return Ok(r);
    }
    RuinSolver::new(d, options)?.evaluate(wealth)
}

/// Probabilities that ruin ends with final fortune `0..nu-1`.
pub fn final_fortune_distribution(d: &PayoffDistribution, wealth: u64) -> Result<Vec<f64>> {
    ruin_probability(d, wealth)?
        .q_coeffs
        .ok_or(Error::FinalFortuneUndetermined)
}
