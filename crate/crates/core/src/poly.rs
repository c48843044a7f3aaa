//! Real-coefficient polynomial utilities: simultaneous root iteration and
//! argument-principle root counting.
//!
//! Coefficients are stored lowest degree first.

use std::f64::consts::PI;

use num_complex::Complex64;

const EPS: f64 = f64::EPSILON;

/// Value, derivative-based Newton correction `p/p'` and a rounding-error
/// bound for `|p(z)|`, all scaled by the same factor.
struct Eval {
    value: Complex64,
    newton: Complex64,
    bound: f64,
}

fn eval(coeffs: &[f64], z: Complex64) -> Eval {
    let n = coeffs.len() - 1;
    if z.norm() <= 1.0 {
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        let mut bound = 0.0;
        let r = z.norm();
        for &c in coeffs.iter().rev() {
            deriv = deriv * z + value;
            value = value * z + c;
            bound = bound * r + c.abs();
        }
        Eval {
            value,
            newton: value / deriv,
            bound,
        }
    } else {
        // p(z) = z^n q(1/z) with q the reversed polynomial
        let y = z.inv();
        let r = y.norm();
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        let mut bound = 0.0;
        for &c in coeffs.iter() {
            deriv = deriv * y + value;
            value = value * y + c;
            bound = bound * r + c.abs();
        }
        let newton = z / (n as f64 - y * deriv / value);
        Eval {
            value,
            newton,
            bound,
        }
    }
}

/// Initial approximations from the upper convex hull of
/// `(k, ln|a_k|)`: each hull edge contributes points on a circle whose
/// radius matches the edge slope.
fn initial_guesses(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let points: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(k, c)| (k, c.abs().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::with_capacity(points.len());
    for &p in &points {
        while hull.len() >= 2 {
            let (k1, l1) = hull[hull.len() - 2];
            let (k2, l2) = hull[hull.len() - 1];
            let cross = (k2 as f64 - k1 as f64) * (p.1 - l1) - (l2 - l1) * (p.0 as f64 - k1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let sigma = 0.7;
    let mut guesses = Vec::with_capacity(n);
    for (i, w) in hull.windows(2).enumerate() {
        let (k0, l0) = w[0];
        let (k1, l1) = w[1];
        let m = k1 - k0;
        let radius = ((l0 - l1) / m as f64).exp();
        for j in 0..m {
            let angle = 2.0 * PI * j as f64 / m as f64 + 2.0 * PI * i as f64 / n as f64 + sigma;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

/// All roots of a real polynomial by Aberth-Ehrlich iteration.
///
/// Trailing zero coefficients are dropped; the constant term must be
/// nonzero. Returns the final approximations even if some did not meet the
/// stopping rule within `max_iter` sweeps.
pub(crate) fn aberth(coeffs: &[f64], max_iter: usize) -> Vec<Complex64> {
    let mut len = coeffs.len();
    while len > 1 && coeffs[len - 1] == 0.0 {
        len -= 1;
    }
    let coeffs = &coeffs[..len];
    if len <= 1 {
        return Vec::new();
    }
    let mut roots = initial_guesses(coeffs);
    let n = roots.len();
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let e = eval(coeffs, roots[i]);
            if e.value.norm() <= 4.0 * EPS * e.bound {
                done[i] = true;
                continue;
            }
            all_done = false;
            let zi = roots[i];
            let sum: Complex64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| (zi - zj).inv())
                .sum();
            let corr = e.newton / (Complex64::new(1.0, 0.0) - e.newton * sum);
            if corr.is_finite() {
                roots[i] = zi - corr;
                if corr.norm() <= EPS * roots[i].norm() {
                    done[i] = true;
                }
            } else {
                done[i] = true;
            }
        }
        if all_done {
            break;
        }
    }
    roots
}

/// Winding number of `f` around the circle `|z| = radius`, sampled finely
/// enough that consecutive phase increments stay below `pi / 4`.
pub fn winding_number<F: Fn(Complex64) -> Complex64>(f: F, radius: f64, min_samples: usize) -> i64 {
    let mut samples = min_samples.max(64);
    loop {
        let mut total = 0.0;
        let mut ok = true;
        let mut prev = f(Complex64::new(radius, 0.0));
        for s in 1..=samples {
            let t = 2.0 * PI * s as f64 / samples as f64;
            let cur = f(Complex64::from_polar(radius, t));
            if cur.norm() == 0.0 {
                ok = false;
                break;
            }
            let step = (cur / prev).arg();
            if step.abs() > PI / 4.0 {
                ok = false;
                break;
            }
            total += step;
            prev = cur;
        }
        if ok || samples > 1 << 24 {
            return (total / (2.0 * PI)).round() as i64;
        }
        samples *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut r: Vec<Complex64>) -> Vec<Complex64> {
        r.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        r
    }

    #[test]
    fn quadratic_roots() {
        // (z - 1)(z - 2) = 2 - 3z + z^2
        let r = sorted(aberth(&[2.0, -3.0, 1.0], 200));
        assert!((r[0] - 1.0).norm() < 1e-14);
        assert!((r[1] - 2.0).norm() < 1e-14);
    }

    #[test]
    fn roots_of_unity_and_trailing_zeros() {
        // z^5 - 1 with padded zeros
        let r = aberth(&[-1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0], 500);
        assert_eq!(r.len(), 5);
        for z in r {
            assert!((z.powu(5) - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn wide_dynamic_range() {
        // roots 1e-3, 1, 1e3
        let a = [-1.0, 1001.001, -1001.001, 1.0];
        let r = sorted(aberth(&a, 500));
        assert!((r[0] - 1e-3).norm() < 1e-15);
        assert!((r[1] - 1.0).norm() < 1e-12);
        assert!((r[2] - 1e3).norm() < 1e-9);
    }

    #[test]
    fn winding_counts_roots() {
        // roots at 0.5, -0.5i, 2
        let f = |z: Complex64| (z - 0.5) * (z + Complex64::new(0.0, 0.5)) * (z - 2.0);
        assert_eq!(winding_number(f, 1.0, 64), 2);
        assert_eq!(winding_number(f, 3.0, 64), 3);
        assert_eq!(winding_number(f, 0.1, 64), 0);
    }
}
