//! Exact evolution of the wealth distribution with absorbing states
//! `0..nu-1`.
//!
//! One step maps `P(S_t = .)` to `P(S_{t+1} = .)`: live states `k >= nu`
//! are convolved with the payoff law, absorbed states keep their mass.
//! Mass pushed above the state cap is tracked as spill, and mass lost to
//! tail truncation of the payoff table as truncated mass.
//!
//! The ruin probability from wealth `k` satisfies
//! `z*^k <= P_ruin(k) <= z*^(k - nu + 1)` (optional stopping of the
//! martingale `z*^S_t`), which turns the unresolved live mass into a
//! rigorous upper bracket for the limit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::payoff::PayoffDistribution;
use crate::rootfinder::find_z_star;

const STALL_STEPS: usize = 50;

/// `P(S_t = k)` for `0 <= k <= k_cap`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WealthDistribution {
    pub t: usize,
    nu: usize,
    mass: Vec<f64>,
    /// Largest index that may hold live mass.
    hi: usize,
    pub spill_mass: f64,
    pub truncated_mass: f64,
}

impl WealthDistribution {
    /// `f_0(z) = z^M`.
    pub fn point_mass(nu: usize, wealth: usize, k_cap: usize) -> Self {
        assert!(k_cap >= wealth, "state cap below initial wealth");
        let mut mass = vec![0.0; k_cap + 1];
        mass[wealth] = 1.0;
        Self {
            t: 0,
            nu,
            mass,
            hi: wealth,
            spill_mass: 0.0,
            truncated_mass: 0.0,
        }
    }

    pub fn k_cap(&self) -> usize {
        self.mass.len() - 1
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Masses of the absorbing states `0..nu-1`.
    pub fn absorbed(&self) -> &[f64] {
        &self.mass[..self.nu.min(self.mass.len())]
    }

    pub fn absorbed_total(&self) -> f64 {
        self.absorbed().iter().sum()
    }

    pub fn live_mass(&self) -> f64 {
        self.live().iter().sum()
    }

    fn live(&self) -> &[f64] {
        if self.hi < self.nu {
            &[]
        } else {
            &self.mass[self.nu..=self.hi]
        }
    }

    /// Represented mass plus spill plus truncated mass; stays 1.
    pub fn total(&self) -> f64 {
        self.mass.iter().sum::<f64>() + self.spill_mass + self.truncated_mass
    }

    fn step_into(&self, d: &PayoffDistribution, out: &mut WealthDistribution) {
        let nu = self.nu;
        let k_cap = self.k_cap();
        out.mass.iter_mut().for_each(|x| *x = 0.0);
        out.mass[..nu].copy_from_slice(&self.mass[..nu]);
        out.spill_mass = self.spill_mass;
        out.truncated_mass = self.truncated_mass;
        out.t = self.t + 1;
        out.nu = nu;
        let mut new_hi = nu.saturating_sub(1);
        if self.hi >= nu {
            let live = self.live();
            let live_total: f64 = live.iter().sum();
            out.truncated_mass += live_total * (1.0 - d.realized_mass()).max(0.0);
            for (l, p) in d.support() {
                let lo_target = (nu as i64 + l) as usize;
                let hi_target = self.hi as i64 + l;
                let fits = if hi_target as usize <= k_cap {
                    live.len()
                } else {
                    (k_cap + 1).saturating_sub(lo_target).min(live.len())
                };
                if fits > 0 {
                    let dst = &mut out.mass[lo_target..lo_target + fits];
                    for (x, &m) in dst.iter_mut().zip(&live[..fits]) {
                        *x += p * m;
                    }
                }
                if fits < live.len() {
                    out.spill_mass += p * live[fits..].iter().sum::<f64>();
                }
                if fits > 0 {
                    new_hi = new_hi.max(lo_target + fits - 1);
                }
            }
        }
        out.hi = new_hi;
    }

    /// One step of the absorbed walk.
    pub fn step(&self, d: &PayoffDistribution) -> WealthDistribution {
        let mut out = self.clone();
        self.step_into(d, &mut out);
        out
    }
}

/// One exact convolution step.
pub fn dp_step(w: &WealthDistribution, d: &PayoffDistribution) -> WealthDistribution {
    w.step(d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpOptions {
    pub eps: f64,
    pub t_max: usize,
    /// Override the state cap.
    pub k_cap: Option<usize>,
}

impl Default for DpOptions {
    fn default() -> Self {
        Self {
            eps: 1e-10,
            t_max: 1_000_000,
            k_cap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DpOutcome {
    /// Absorbed mass at the stopping time; a lower bound for `P_ruin`.
    pub lower: f64,
    /// `P_ruin <= lower + bound_gap`.
    pub bound_gap: f64,
    pub steps: usize,
    pub k_cap: usize,
    #[serde(skip)]
    pub state: WealthDistribution,
}

fn default_k_cap(
    d: &PayoffDistribution,
    wealth: usize,
    eps: f64,
    t_max: usize,
    z: Option<f64>,
) -> usize {
    let nu = d.nu();
    let sigma = d.variance().sqrt();
    let heuristic = wealth + 50 * nu + 20 * (sigma * (t_max as f64).sqrt()).ceil() as usize;
    let floor = wealth + 50 * nu;
    match z {
        Some(z) => {
            // past this level the remaining ruin chance is below eps / 100
            let comfort = nu as f64 + (eps * 1e-2).ln() / z.ln();
            let comfort = if comfort.is_finite() {
                comfort.ceil() as usize
            } else {
                heuristic
            };
            heuristic.min(comfort).max(floor)
        }
        None => heuristic.max(floor),
    }
}

/// Per-state upper bounds on the eventual ruin probability.
fn ruin_weights(nu: usize, k_cap: usize, z: Option<f64>) -> (Vec<f64>, f64) {
    match z {
        Some(z) => {
            let weights = (0..=k_cap)
                .map(|k| {
                    if k < nu {
                        0.0
                    } else {
                        z.powi((k + 1 - nu) as i32).min(1.0)
                    }
                })
                .collect();
            let spill = z.powi((k_cap + 2 - nu) as i32).min(1.0);
            (weights, spill)
        }
        None => {
            let weights = (0..=k_cap)
                .map(|k| if k < nu { 0.0 } else { 1.0 })
                .collect();
            (weights, 1.0)
        }
    }
}

/// Ruin probability by evolving the wealth distribution until the
/// unresolved mass is below `eps`.
pub fn dp_ruin(d: &PayoffDistribution, wealth: u64, eps: f64, t_max: usize) -> Result<DpOutcome> {
    dp_ruin_with(
        d,
        wealth,
        &DpOptions {
            eps,
            t_max,
            k_cap: None,
        },
    )
}

pub fn dp_ruin_with(d: &PayoffDistribution, wealth: u64, opts: &DpOptions) -> Result<DpOutcome> {
    if !(opts.eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dp eps {} must be positive",
            opts.eps
        )));
    }
    let nu = d.nu();
    let wealth = wealth as usize;
    // round z* up so the bracket stays conservative
    let z = if d.is_favorable() {
        Some((find_z_star(d)? + 1e-12).min(1.0))
    } else {
        None
    };
    let k_cap = opts
        .k_cap
        .unwrap_or_else(|| default_k_cap(d, wealth, opts.eps, opts.t_max, z))
        .max(wealth);
    let (weights, spill_weight) = ruin_weights(nu, k_cap, z);
    let gap_of = |w: &WealthDistribution| {
        let live: f64 = if w.hi >= nu {
            w.mass[nu..=w.hi]
                .iter()
                .zip(&weights[nu..=w.hi])
                .map(|(m, c)| m * c)
                .sum()
        } else {
            0.0
        };
        live + w.spill_mass * spill_weight + w.truncated_mass
    };

    let mut cur = WealthDistribution::point_mass(nu, wealth, k_cap);
    let mut next = cur.clone();
    let mut lower = cur.absorbed_total();
    let mut gap = gap_of(&cur);
    let mut stalled = 0usize;
    while gap > opts.eps {
        if cur.t >= opts.t_max {
            if stalled >= STALL_STEPS {
                break;
            }
            return Err(Error::NotConverged { steps: cur.t, gap });
        }
        cur.step_into(d, &mut next);
        std::mem::swap(&mut cur, &mut next);
        let new_lower = cur.absorbed_total();
        if new_lower - lower < opts.eps * 1e-2 {
            stalled += 1;
        } else {
            stalled = 0;
        }
        lower = new_lower;
        gap = gap_of(&cur);
    }
    Ok(DpOutcome {
        lower,
        bound_gap: gap,
        steps: cur.t,
        k_cap,
        state: cur,
    })
}
