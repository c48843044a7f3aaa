//! Monte Carlo simulation of the absorbed walk.
//!
//! Paths are simulated in fixed-size batches; batch `i` draws from ChaCha8
//! stream `i` of the given seed, so results do not depend on how rayon
//! schedules the batches.
//!
//! A path stops when it is ruined, when it reaches an escape level `L` from
//! which the ruin probability is at most `escape_tol` (bounded by
//! `z*^(L - nu + 1)`), or when it hits `t_cap` steps (censored). Escaped and
//! censored paths count as not ruined, so the estimate is biased low by at
//! most `censored_fraction + escape_bias_bound`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::payoff::PayoffDistribution;
use crate::rootfinder::find_z_star;

const BATCH_SIZE: u64 = 10_000;
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub n_paths: u64,
    pub seed: u64,
    pub t_cap: u64,
    pub escape_tol: f64,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            seed: 0,
            t_cap: 10_000_000,
            escape_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// Half-width of the normal-approximation 95% interval.
    pub ci_halfwidth: f64,
    /// Largest distance from `estimate` to either end of the 95% Wilson
    /// score interval. Unlike `ci_halfwidth` it does not collapse to zero
    /// when no path, or every path, is ruined.
    pub wilson_halfwidth: f64,
    pub censored_fraction: f64,
    pub escaped_fraction: f64,
    /// Upper bound on the ruin mass missed by stopping escaped paths.
    pub escape_bias_bound: f64,
    pub n_paths: u64,
    pub escape_level: Option<u64>,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    ruined: u64,
    censored: u64,
    escaped: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;
    fn add(self, o: Tally) -> Tally {
        Tally {
            ruined: self.ruined + o.ruined,
            censored: self.censored + o.censored,
            escaped: self.escaped + o.escaped,
        }
    }
}

fn wilson_halfwidth(p: f64, n: f64) -> f64 {
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (p - (center - half)).max(center + half - p)
}

/// Estimate `P_ruin(M)` from `opts.n_paths` simulated paths.
pub fn mc_ruin(d: &PayoffDistribution, wealth: u64, opts: &McOptions) -> Result<McEstimate> {
    if opts.n_paths == 0 {
        return Err(Error::InvalidParameter("n_paths must be at least 1".into()));
    }
    let nu = d.nu() as i64;
    let (payoffs, weights): (Vec<i64>, Vec<f64>) = d.support().unzip();
    let sampler = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidParameter(format!("payoff weights: {e}")))?;

    let escape_level = if d.is_favorable() && opts.escape_tol > 0.0 {
        let z = find_z_star(d)?;
        let steps = (opts.escape_tol.ln() / z.ln()).ceil();
        if steps.is_finite() && steps < 1e15 {
            Some((nu - 1 + steps as i64).max(wealth as i64 + 1) as u64)
        } else {
            None
        }
    } else {
        None
    };
    let ceiling = escape_level.map_or(i64::MAX, |l| l as i64);

    let batches = opts.n_paths.div_ceil(BATCH_SIZE);
    let tally = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(b);
            let count = BATCH_SIZE.min(opts.n_paths - b * BATCH_SIZE);
            let mut t = Tally::default();
            for _ in 0..count {
                let mut s = wealth as i64;
                let mut steps = 0u64;
                loop {
                    if s < nu {
                        t.ruined += 1;
                        break;
                    }
                    if s >= ceiling {
                        t.escaped += 1;
                        break;
                    }
                    if steps >= opts.t_cap {
                        t.censored += 1;
                        break;
                    }
                    s += payoffs[sampler.sample(&mut rng)];
                    steps += 1;
                }
            }
            t
        })
        .reduce(Tally::default, |a, b| a + b);

    let n = opts.n_paths as f64;
    let estimate = tally.ruined as f64 / n;
    let escaped_fraction = tally.escaped as f64 / n;
    Ok(McEstimate {
        estimate,
        ci_halfwidth: Z_95 * (estimate * (1.0 - estimate) / n).sqrt(),
        wilson_halfwidth: wilson_halfwidth(estimate, n),
        censored_fraction: tally.censored as f64 / n,
        escaped_fraction,
        escape_bias_bound: escaped_fraction * opts.escape_tol,
        n_paths: opts.n_paths,
        escape_level,
    })
}
