//! Roots of `p(z) = 1` inside the unit disk.
//!
//! For a favorable game there are exactly `nu` of them (with multiplicity),
//! all of modulus at most `z*`, the unique real root in `(0, 1)`. They are
//! found as roots of the polynomial `h_D(z) - z^nu` by Aberth iteration,
//! then polished with Newton's method against the untruncated series.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::payoff::PayoffDistribution;
use crate::poly;

/// Roots closer than this are flagged as a possible multiple root.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;

const ABERTH_MAX_ITER: usize = 1000;
const BOUND_SLACK: f64 = 1e-9;
/// Imaginary parts at or below this are treated as real.
const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskRootOptions {
    /// Truncation degree of `h`; `None` uses the realized degree.
    pub degree: Option<usize>,
    pub residual_tol: f64,
    pub cluster_tol: f64,
}

impl Default for DiskRootOptions {
    fn default() -> Self {
        Self {
            degree: None,
            residual_tol: DEFAULT_RESIDUAL_TOL,
            cluster_tol: DEFAULT_CLUSTER_TOL,
        }
    }
}

/// The `nu` in-disk roots, sorted by descending modulus then ascending
/// argument.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskRoots {
    pub roots: Vec<Complex64>,
    pub z_star: f64,
    pub residuals: Vec<f64>,
    pub cluster_flags: Vec<bool>,
    /// Truncation degree the roots were computed from.
    pub degree: usize,
}

impl DiskRoots {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn has_cluster(&self) -> bool {
        self.cluster_flags.iter().any(|&f| f)
    }

    pub fn max_abs(&self) -> f64 {
        self.roots.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.roots.iter().enumerate() {
            for b in &self.roots[i + 1..] {
                best = best.min((a - b).norm());
            }
        }
        best
    }
}

/// The unique `z* in (0, 1)` with `p(z*) = 1`.
///
/// Works on `g(z) = (h(z) - z^nu) / (z - 1)`, which has `g(0) = -p(-nu) < 0`,
/// `g(1) = mean > 0` and `z*` as its only zero in `(0, 1)`. Removing the
/// root at 1 keeps `z*` well conditioned when the drift is small.
/// Bisection on the sign of `g`, then a Newton step.
pub fn find_z_star(d: &PayoffDistribution) -> Result<f64> {
    if !d.is_favorable() {
        return Err(Error::NoInteriorRoot);
    }
    let g = d.deflated_coefficients();
    let eval = |x: f64| {
        let (v, dv) = crate::payoff::horner_with_derivative(&g, Complex64::new(x, 0.0));
        (v.re, dv.re)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if !(eval(hi).0 > 0.0) {
        return Err(Error::NoInteriorRoot);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(mid).0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut z = 0.5 * (lo + hi);
    let (v, dv) = eval(z);
    let refined = z - v / dv;
    if refined >= lo && refined <= hi {
        z = refined;
    }
    if z <= 0.0 || z >= 1.0 {
        return Err(Error::NoInteriorRoot);
    }
    Ok(z)
}

/// `|p(z) - 1|` using the untruncated series where available.
pub fn residual(d: &PayoffDistribution, z: Complex64) -> f64 {
    let (h, _) = d.h_exact(z);
    let zn = z.powu(d.nu() as u32);
    ((h - zn) / zn).norm()
}

fn polish(d: &PayoffDistribution, z0: Complex64) -> Complex64 {
    let nu = d.nu() as u32;
    let f = |z: Complex64| {
        let (h, dh) = d.h_exact(z);
        let zn1 = z.powu(nu - 1);
        (h - zn1 * z, dh - zn1 * nu as f64)
    };
    let mut z = z0;
    let mut best = f(z).0.norm();
    for _ in 0..50 {
        let (value, deriv) = f(z);
        let step = value / deriv;
        if !step.is_finite() {
            break;
        }
        let next = z - step;
        let r = f(next).0.norm();
        if r > best {
            break;
        }
        best = r;
        z = next;
        if step.norm() <= f64::EPSILON * z.norm() {
            break;
        }
    }
    z
}

/// Pair each upper-half-plane root with its nearest lower-half-plane
/// partner and make the pair exactly conjugate; near-real roots become real.
fn symmetrize(roots: Vec<Complex64>) -> Vec<Complex64> {
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    let mut out = Vec::with_capacity(roots.len());
    for z in roots {
        if z.im.abs() <= REAL_TOL {
            out.push(Complex64::new(z.re, 0.0));
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }
    for u in upper {
        let target = u.conj();
        let best = lower
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - target)
                    .norm()
                    .partial_cmp(&(b.1 - target).norm())
                    .unwrap_or(Ordering::Equal)
            })
            .map(|(i, _)| i);
        match best {
            Some(i) => {
                let l = lower.swap_remove(i);
                let avg = 0.5 * (u + l.conj());
                out.push(avg);
                out.push(avg.conj());
            }
            None => out.push(u),
        }
    }
    out.extend(lower);
    out
}

fn order(a: &Complex64, b: &Complex64) -> Ordering {
    let (ra, rb) = (a.norm(), b.norm());
    if (ra - rb).abs() > 1e-12 * ra.max(rb) {
        rb.partial_cmp(&ra).unwrap_or(Ordering::Equal)
    } else {
        a.arg().partial_cmp(&b.arg()).unwrap_or(Ordering::Equal)
    }
}

/// Coefficients of `h_D(z) - z^nu`, lowest degree first.
pub fn root_polynomial(d: &PayoffDistribution, degree: usize) -> Result<Vec<f64>> {
    let nu = d.nu();
    let mut c = d.h_coefficients(degree)?;
    if c.len() <= nu {
        c.resize(nu + 1, 0.0);
    }
    c[nu] -= 1.0;
    Ok(c)
}

/// Locate the `nu` roots of `p(z) = 1` with `|z| < 1`.
pub fn find_disk_roots(d: &PayoffDistribution, opts: &DiskRootOptions) -> Result<DiskRoots> {
    let nu = d.nu();
    let z_star = find_z_star(d)?;
    let degree = opts.degree.unwrap_or_else(|| d.realized_degree().max(nu));
    let poly_coeffs = root_polynomial(d, degree)?;
    let all = poly::aberth(&poly_coeffs, ABERTH_MAX_ITER);

    // In-disk roots have modulus <= z* and the rest modulus >= 1, so the
    // midpoint separates them.
    let split = 0.5 * (1.0 + z_star);
    let inside: Vec<Complex64> = all
        .into_iter()
        .filter(|z| z.norm() < split)
        .map(|z| polish(d, z))
        .collect();
    let mut roots = symmetrize(inside);
    if roots.len() != nu {
        return Err(Error::RootCountMismatch {
            found: roots.len(),
            expected: nu,
        });
    }

    // z* is a simple real root; pin the matching approximation to it.
    let (idx, gap) = roots
        .iter()
        .enumerate()
        .map(|(i, z)| (i, (z - z_star).norm()))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
        .expect("nu >= 1");
    if gap > BOUND_SLACK {
        return Err(Error::RootCountMismatch {
            found: roots.len(),
            expected: nu,
        });
    }
    roots[idx] = Complex64::new(z_star, 0.0);

    roots.sort_by(order);
    for z in &roots {
        if z.norm() > z_star + BOUND_SLACK {
            return Err(Error::RootOutsideBound {
                modulus: z.norm(),
                z_star,
            });
        }
    }
    let residuals: Vec<f64> = roots.iter().map(|&z| residual(d, z)).collect();
    for (z, &r) in roots.iter().zip(&residuals) {
        if !(r <= opts.residual_tol) {
            return Err(Error::ResidualTooLarge {
                root: format!("{z}"),
                residual: r,
                tol: opts.residual_tol,
            });
        }
    }
    let cluster_flags = (0..roots.len())
        .map(|i| {
            roots
                .iter()
                .enumerate()
                .any(|(j, w)| j != i && (roots[i] - w).norm() < opts.cluster_tol)
        })
        .collect();
    Ok(DiskRoots {
        roots,
        z_star,
        residuals,
        cluster_flags,
        degree,
    })
}

/// Number of zeros of `h_D(z) - z^nu` inside `|z| < radius`, by the
/// argument principle.
pub fn count_roots_in_disk(d: &PayoffDistribution, degree: usize, radius: f64) -> Result<i64> {
    let c = root_polynomial(d, degree)?;
    let samples = 64 * c.len();
    Ok(poly::winding_number(
        |z| crate::payoff::horner(&c, z),
        radius,
        samples,
    ))
}
