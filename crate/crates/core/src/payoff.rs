//! Integer-valued payoff laws and their generating functions.
//!
//! A payoff law assigns probability `p_k` to a gain of `k` units, with
//! `k >= -nu` and `p_{-nu} > 0`. Everything downstream works with the
//! shifted coefficient vector `c[k] = p_{k - nu}`, i.e. the power series
//! `h(z) = z^nu p(z)`. Infinite-support families are realized up to the
//! smallest degree whose dropped tail mass meets the requested tolerance.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on probability mass dropped when truncating an
/// infinite-support family.
pub const DEFAULT_TAIL_TOL: f64 = 1e-14;

/// Largest accepted `tail_tol`.
pub const MAX_TAIL_TOL: f64 = 1e-6;

/// Coefficient budget for realizing infinite-support families.
pub const MAX_COEFFICIENTS: usize = 100_000;

const MASS_TOL: f64 = 1e-12;

/// Means within this distance of zero are treated as zero drift.
pub const DRIFT_EPS: f64 = 1e-12;

/// Description of a payoff law, either a closed-form family or an explicit
/// table. This is also the on-disk distribution spec format:
///
/// ```json
/// {"type":"table","entries":{"-1":0.4,"1":0.6}}
/// {"type":"poisson_prize","nu":3,"epsilon":0.01}
/// {"type":"two_point","nu":2,"mu":3,"p_loss":0.5}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AnalyticFamily {
    /// Explicit table of payoff -> probability.
    Table {
        #[serde(with = "integer_keys")]
        entries: BTreeMap<i64, f64>,
    },
    /// Entry fee `nu`, Poisson prize with mean `nu + epsilon`.
    PoissonPrize { nu: u32, epsilon: f64 },
    /// Lose `nu` with probability `p_loss`, otherwise win `mu`.
    TwoPoint { nu: u32, mu: i64, p_loss: f64 },
}

impl AnalyticFamily {
    pub fn table<I: IntoIterator<Item = (i64, f64)>>(entries: I) -> Self {
        AnalyticFamily::Table {
            entries: entries.into_iter().collect(),
        }
    }
}

// Internally tagged enums buffer map keys as strings, so integer keys are
// parsed by hand.
mod integer_keys {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(map: &BTreeMap<i64, f64>, s: S) -> Result<S::Ok, S::Error> {
        map.iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect::<BTreeMap<String, f64>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<i64, f64>, D::Error> {
        let raw = BTreeMap::<String, f64>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<i64>()
                    .map(|k| (k, v))
                    .map_err(|_| D::Error::custom(format!("payoff key {k:?} is not an integer")))
            })
            .collect()
    }
}

/// A validated payoff law with its realized (possibly truncated) table.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffDistribution {
    nu: usize,
    /// `coeffs[k] = p_{k - nu}`; the last entry is nonzero.
    coeffs: Vec<f64>,
    mean: f64,
    tail_mass_bound: f64,
    max_payoff: Option<i64>,
    family: AnalyticFamily,
}

/// Value of `p(z)` together with a bound on the truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue {
    pub value: Complex64,
    pub error_bound: f64,
}

/// Realize `family` into a validated distribution whose dropped tail mass is
/// at most `tail_tol`.
pub fn build_distribution(family: &AnalyticFamily, tail_tol: f64) -> Result<PayoffDistribution> {
    if !(0.0..=MAX_TAIL_TOL).contains(&tail_tol) {
        return Err(Error::InvalidParameter(format!(
            "tail_tol {tail_tol} outside [0, {MAX_TAIL_TOL}]"
        )));
    }
    match family {
        AnalyticFamily::Table { entries } => from_table(entries, family.clone()),
        AnalyticFamily::TwoPoint { nu, mu, p_loss } => {
            let nu = *nu as i64;
            if nu < 1 {
                return Err(Error::InvalidParameter("nu must be at least 1".into()));
            }
            if *mu <= -nu {
                return Err(Error::InvalidParameter(format!(
                    "mu = {mu} must exceed -nu = {}",
                    -nu
                )));
            }
            if !(0.0..=1.0).contains(p_loss) {
                return Err(Error::InvalidParameter(format!(
                    "p_loss = {p_loss} outside [0, 1]"
                )));
            }
            let entries = BTreeMap::from([(-nu, *p_loss), (*mu, 1.0 - p_loss)]);
            from_table(&entries, family.clone())
        }
        AnalyticFamily::PoissonPrize { nu, epsilon } => {
            poisson_prize(*nu as usize, *epsilon, tail_tol, family.clone())
        }
    }
}

fn from_table(entries: &BTreeMap<i64, f64>, family: AnalyticFamily) -> Result<PayoffDistribution> {
    if entries.is_empty() {
        return Err(Error::InvalidParameter("empty payoff table".into()));
    }
    let mut sum = 0.0;
    for (&k, &p) in entries {
        if p.is_nan() || p < 0.0 {
            return Err(Error::NegativeProbability {
                payoff: k,
                value: p,
            });
        }
        sum += p;
    }
    if (sum - 1.0).abs() > MASS_TOL {
        return Err(Error::MassNotOne { sum });
    }
    // The table's smallest key defines the floor -nu.
    let (&lowest, &floor_mass) = entries.iter().next().expect("non-empty");
    if lowest >= 0 || floor_mass <= 0.0 {
        return Err(Error::ZeroFloorMass);
    }
    let nu = (-lowest) as usize;
    let top = entries
        .iter()
        .rev()
        .find(|(_, &p)| p > 0.0)
        .map(|(&k, _)| k)
        .expect("floor mass is positive");
    let mut coeffs = vec![0.0; (top + nu as i64) as usize + 1];
    for (&k, &p) in entries {
        if p > 0.0 {
            coeffs[(k + nu as i64) as usize] = p;
        }
    }
    let mean = entries.iter().map(|(&k, &p)| k as f64 * p).sum();
    Ok(PayoffDistribution {
        nu,
        coeffs,
        mean,
        tail_mass_bound: 0.0,
        max_payoff: Some(top),
        family,
    })
}

fn poisson_prize(
    nu: usize,
    epsilon: f64,
    tail_tol: f64,
    family: AnalyticFamily,
) -> Result<PayoffDistribution> {
    if nu < 1 {
        return Err(Error::InvalidParameter("nu must be at least 1".into()));
    }
    let rate = nu as f64 + epsilon;
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "prize mean nu + epsilon = {rate} must be positive"
        )));
    }
    let unreachable = || Error::TailNotAchievable {
        family: "poisson_prize",
        tail_tol,
        budget: MAX_COEFFICIENTS,
    };
    if tail_tol <= 0.0 {
        return Err(unreachable());
    }
    let mut coeffs = Vec::new();
    let mut degree = 0usize;
    loop {
        coeffs.push(poisson_pmf(rate, degree));
        if degree >= nu && degree as f64 + 2.0 > rate {
            let bound = poisson_tail_bound(rate, degree);
            if bound <= tail_tol {
                while coeffs.len() > nu + 1 && *coeffs.last().unwrap() == 0.0 {
                    coeffs.pop();
                }
                let kept: f64 = coeffs.iter().sum();
                if (kept + bound - 1.0).abs() > MASS_TOL + bound {
                    return Err(Error::MassNotOne { sum: kept });
                }
                return Ok(PayoffDistribution {
                    nu,
                    coeffs,
                    mean: epsilon,
                    tail_mass_bound: bound,
                    max_payoff: None,
                    family,
                });
            }
        }
        degree += 1;
        if degree >= MAX_COEFFICIENTS {
            return Err(unreachable());
        }
    }
}

/// `e^{-rate} rate^k / k!`, evaluated in log space.
fn poisson_pmf(rate: f64, k: usize) -> f64 {
    let log_fact: f64 = (1..=k).map(|j| (j as f64).ln()).sum();
    (-rate + k as f64 * rate.ln() - log_fact).exp()
}

/// Upper bound on `sum_{k > degree} pmf(k)` via a geometric majorant;
/// requires `degree + 2 > rate`.
fn poisson_tail_bound(rate: f64, degree: usize) -> f64 {
    let next = poisson_pmf(rate, degree + 1);
    next / (1.0 - rate / (degree as f64 + 2.0))
}

impl PayoffDistribution {
    /// Maximal loss `nu`.
    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn tail_mass_bound(&self) -> f64 {
        self.tail_mass_bound
    }

    /// Largest payoff with positive probability, when the support is finite.
    pub fn max_payoff(&self) -> Option<i64> {
        self.max_payoff
    }

    pub fn family(&self) -> &AnalyticFamily {
        &self.family
    }

    /// Positive expected payoff.
    pub fn is_favorable(&self) -> bool {
        self.mean > DRIFT_EPS
    }

    /// Degree of the realized table `h_D`.
    pub fn realized_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Realized probability of payoff `k` (zero outside the table).
    pub fn probability(&self, k: i64) -> f64 {
        let idx = k + self.nu as i64;
        if idx < 0 {
            return 0.0;
        }
        self.coeffs.get(idx as usize).copied().unwrap_or(0.0)
    }

    /// Payoffs with positive realized probability, ascending.
    pub fn support(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let nu = self.nu as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(move |(i, &p)| (i as i64 - nu, p))
    }

    /// Realized mass `sum p_k`; equals `1 - dropped tail`.
    pub fn realized_mass(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Payoff variance of the realized table.
    pub fn variance(&self) -> f64 {
        let mean: f64 = self.support().map(|(k, p)| k as f64 * p).sum();
        self.support()
            .map(|(k, p)| p * (k as f64 - mean).powi(2))
            .sum()
    }

    /// Coefficients `c[k] = p_{k - nu}` of `h(z) = z^nu p(z)` for
    /// `0 <= k <= degree`.
    pub fn h_coefficients(&self, degree: usize) -> Result<Vec<f64>> {
        let minimum = self.nu.max(self.realized_degree());
        if degree < minimum {
            return Err(Error::DegreeTooSmall {
                requested: degree,
                minimum,
            });
        }
        let mut out = self.coeffs.clone();
        match self.family {
            AnalyticFamily::PoissonPrize { nu, epsilon } => {
                let rate = nu as f64 + epsilon;
                out.extend((out.len()..=degree).map(|k| poisson_pmf(rate, k)));
            }
            _ => out.resize(degree + 1, 0.0),
        }
        Ok(out)
    }

    /// Evaluate the truncated series `p(z) = sum p_k z^k` for `0 < |z| <= 1`.
    pub fn evaluate_p(&self, z: Complex64) -> Result<PValue> {
        if z.norm() == 0.0 {
            return Err(Error::ZeroArgument);
        }
        if z.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "|z| = {} outside the closed unit disk",
                z.norm()
            )));
        }
        let h = horner(&self.coeffs, z);
        Ok(PValue {
            value: h / z.powu(self.nu as u32),
            error_bound: self.tail_mass_bound,
        })
    }

    /// `h(z)` and `h'(z)` of the untruncated law where a closed form exists,
    /// otherwise of the realized table.
    pub fn h_exact(&self, z: Complex64) -> (Complex64, Complex64) {
        match self.family {
            AnalyticFamily::PoissonPrize { nu, epsilon } => {
                let rate = nu as f64 + epsilon;
                let value = (rate * (z - 1.0)).exp();
                (value, value * rate)
            }
            _ => horner_with_derivative(&self.coeffs, z),
        }
    }

    /// `p(x) - 1` and `p'(x)` on the positive real axis.
    /// Coefficients of `(h(z) - z^nu) / (z - 1)` for the realized table.
    ///
    /// Below `nu` they are minus the cumulative probabilities, from `nu` on
    /// the tail probabilities, so every entry is a sum of like-signed terms
    /// and the factor `z - 1` never has to be divided out numerically.
    pub(crate) fn deflated_coefficients(&self) -> Vec<f64> {
        let n = self.coeffs.len();
        let mut g = vec![0.0; n.saturating_sub(1).max(self.nu)];
        let mut below = 0.0;
        for k in 0..self.nu.min(g.len()) {
            below += self.coeffs.get(k).copied().unwrap_or(0.0);
            g[k] = -below;
        }
        let mut tail = 0.0;
        for k in (self.nu..g.len()).rev() {
            tail += self.coeffs[k + 1];
            g[k] = tail;
        }
        g
    }

    #[cfg(test)]
    pub(crate) fn p_minus_one_real(&self, x: f64) -> (f64, f64) {
        let (h, dh) = self.h_exact(Complex64::new(x, 0.0));
        let (h, dh) = (h.re, dh.re);
        let nu = self.nu as i32;
        let xn = x.powi(nu);
        let p = h / xn;
        let dp = dh / xn - nu as f64 * h / (xn * x);
        (p - 1.0, dp)
    }
}

pub(crate) fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub(crate) fn horner_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        deriv = deriv * z + value;
        value = value * z + c;
    }
    (value, deriv)
}
