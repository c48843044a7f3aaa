//! Ruin probability with an upper threshold `W`: play also stops once the
//! fortune exceeds `W`. For finite support `-nu..=mu` the values
//! `u(m), nu <= m <= W` solve a banded linear system
//!
//! `u(m) - sum_l p_l u(m + l) = sum_{l : m + l < nu} p_l`,
//!
//! with `u = 0` above `W`. As `W` grows, `u(M)` increases to the
//! infinite-adversary ruin probability.

use crate::error::{Error, Result};
use crate::payoff::PayoffDistribution;

/// Banded matrix stored row-wise over columns `i - lower ..= i + upper`.
struct Banded {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl Banded {
    fn new(n: usize, lower: usize, upper: usize) -> Self {
        Self {
            n,
            lower,
            upper,
            data: vec![0.0; n * (lower + upper + 1)],
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.lower + self.upper + 1) + (j + self.lower - i)
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    /// Gaussian elimination without pivoting; the system matrix is a
    /// nonsingular M-matrix, for which all pivots are positive.
    fn solve(mut self, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
        let n = self.n;
        for k in 0..n {
            let pivot = self.get(k, k);
            if !(pivot.abs() > f64::MIN_POSITIVE) {
                return Err(Error::SingularSystem { row: k });
            }
            for i in k + 1..=(k + self.lower).min(n - 1) {
                let factor = self.get(i, k) / pivot;
                if factor == 0.0 {
                    continue;
                }
                for j in k..=(k + self.upper).min(n - 1) {
                    let v = self.get(k, j);
                    self.add(i, j, -factor * v);
                }
                rhs[i] -= factor * rhs[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for j in i + 1..=(i + self.upper).min(n - 1) {
                s -= self.get(i, j) * x[j];
            }
            x[i] = s / self.get(i, i);
        }
        Ok(x)
    }
}

/// `u(m)` for all `nu <= m <= W`, indexed by `m - nu`.
pub fn finite_w_profile(d: &PayoffDistribution, threshold: u64) -> Result<Vec<f64>> {
    let mu = d.max_payoff().ok_or(Error::InfiniteSupport)?;
    let nu = d.nu();
    let w = threshold as usize;
    if w < nu {
        return Err(Error::InvalidParameter(format!(
            "threshold W = {w} is below nu = {nu}"
        )));
    }
    let n = w - nu + 1;
    let upper = mu.max(0) as usize;
    let mut a = Banded::new(n, nu, upper);
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let m = (i + nu) as i64;
        a.add(i, i, 1.0);
        for (l, p) in d.support() {
            let target = m + l;
            if target < nu as i64 {
                rhs[i] += p;
            } else if target <= w as i64 {
                a.add(i, (target - nu as i64) as usize, -p);
            }
        }
    }
    a.solve(rhs)
}

/// Two-barrier ruin probability from wealth `M` with threshold `W`.
pub fn finite_w_ruin(d: &PayoffDistribution, wealth: u64, threshold: u64) -> Result<f64> {
    let nu = d.nu() as u64;
    if d.max_payoff().is_none() {
        return Err(Error::InfiniteSupport);
    }
    if wealth < nu || wealth > threshold {
        return Err(Error::InvalidParameter(format!(
            "need nu <= M <= W, got nu = {nu}, M = {wealth}, W = {threshold}"
        )));
    }
    let u = finite_w_profile(d, threshold)?;
    Ok(u[(wealth - nu) as usize])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::{build_distribution, AnalyticFamily};

    fn table<I: IntoIterator<Item = (i64, f64)>>(entries: I) -> PayoffDistribution {
        build_distribution(&AnalyticFamily::table(entries), 0.0).unwrap()
    }

    fn two_barrier(r: f64, start: i32, top: i32) -> f64 {
        (r.powi(start) - r.powi(top)) / (1.0 - r.powi(top))
    }

    #[test]
    fn classical_two_barrier() {
        // absorbing at 0 and at W + 1
        let d = table([(-1, 0.4), (1, 0.6)]);
        let u = finite_w_ruin(&d, 5, 10).unwrap();
        assert!((u - two_barrier(2.0 / 3.0, 5, 11)).abs() < 1e-14);
    }

    #[test]
    fn increases_to_infinite_adversary_limit() {
        let d = table([(-1, 0.4), (1, 0.6)]);
        let limit = (2.0f64 / 3.0).powi(5);
        let mut prev_gap = f64::INFINITY;
        for w in [10u64, 20, 40, 80] {
            let u = finite_w_ruin(&d, 5, w).unwrap();
            let gap = limit - u;
            assert!(gap > 0.0);
            assert!(gap <= 0.5 * prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-12);
    }

    #[test]
    fn rejects_infinite_support_and_bad_range() {
        let p = build_distribution(
            &AnalyticFamily::PoissonPrize {
                nu: 3,
                epsilon: 0.01,
            },
            1e-14,
        )
        .unwrap();
        assert_eq!(finite_w_ruin(&p, 5, 10), Err(Error::InfiniteSupport));
        let d = table([(-2, 0.3), (1, 0.7)]);
        assert!(finite_w_ruin(&d, 1, 10).is_err());
        assert!(finite_w_ruin(&d, 11, 10).is_err());
    }

    #[test]
    fn skala_converges_to_formula() {
        let d = table([(-2, 0.3), (1, 0.7)]);
        let f = crate::ruin::ruin_probability(&d, 4).unwrap().p_ruin;
        let u = finite_w_ruin(&d, 4, 200).unwrap();
        assert!((f - u).abs() < 1e-8);
    }
}
