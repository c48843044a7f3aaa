use std::path::PathBuf;

use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Closed-form ruin probabilities only
    Formula,
    /// Closed form plus DP, Monte Carlo and finite-W cross-checks
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Ruin probabilities for integer-valued games against an infinitely rich
/// adversary.
///
/// The spec file is JSON, for example
/// {"type": "table", "entries": {"-1": 0.4, "1": 0.6}} or
/// {"type": "poisson_prize", "nu": 3, "epsilon": 0.01} or
/// {"type": "two_point", "nu": 2, "mu": 1, "p_loss": 0.3}.
#[derive(Debug, Parser)]
#[command(name = "ruin", version)]
pub struct Args {
    /// Payoff distribution spec (JSON)
    #[arg(long)]
    pub spec: PathBuf,

    /// Initial wealth: a comma-separated list and/or inclusive ranges, e.g. 3,10,50 or 1..20
    #[arg(long, value_parser = parse_wealth)]
    pub wealth: Option<WealthList>,

    #[arg(long, value_enum, default_value = "formula")]
    pub mode: Mode,

    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,

    /// List the in-disk roots instead of ruin probabilities
    #[arg(long)]
    pub roots: bool,

    /// Monte Carlo paths per wealth level (verify mode)
    #[arg(long, default_value_t = 100_000)]
    pub mc_paths: u64,

    /// Monte Carlo seed (verify mode)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Target width of the DP bracket (verify mode)
    #[arg(long, default_value_t = 1e-8)]
    pub dp_eps: f64,

    /// Step limit for the DP oracle (verify mode)
    #[arg(long, default_value_t = 1_000_000)]
    pub dp_max_steps: usize,

    /// Tail mass allowed when truncating an infinite-support family, at most 1e-6
    #[arg(long, default_value_t = ruin_core::payoff::DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,

    /// Largest accepted |p(eta) - 1| for a root
    #[arg(long, default_value_t = ruin_core::rootfinder::DEFAULT_RESIDUAL_TOL)]
    pub residual_tol: f64,

    /// Thresholds for the finite-W oracle; chosen from the drift when omitted
    #[arg(long, value_delimiter = ',')]
    pub finite_w: Vec<u64>,

    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WealthList(pub Vec<u64>);

/// Distinct values, in the order first given.
pub fn parse_wealth(s: &str) -> Result<WealthList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = parse_one(a)?;
            let b: u64 = parse_one(b)?;
            if b < a {
                return Err(format!("empty range {part}"));
            }
            if b - a > 10_000_000 {
                return Err(format!("range {part} is too long"));
            }
            out.extend(a..=b);
        } else {
            out.push(parse_one(part)?);
        }
    }
    if out.is_empty() {
        return Err("no wealth values given".into());
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|m| seen.insert(*m));
    Ok(WealthList(out))
}

fn parse_one(s: &str) -> Result<u64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("'{}' is not a nonnegative integer", s.trim()))
}

impl Args {
    /// Range checks clap cannot express.
    pub fn validate(&self) -> Result<(), String> {
        if !self.roots && self.wealth.is_none() {
            return Err("--wealth is required unless --roots is given".into());
        }
        if self.mode == Mode::Verify && self.mc_paths == 0 {
            return Err("--mc-paths must be at least 1".into());
        }
        if !(self.dp_eps > 0.0 && self.dp_eps < 1.0) {
            return Err("--dp-eps must lie in (0, 1)".into());
        }
        if !(self.residual_tol > 0.0) {
            return Err("--residual-tol must be positive".into());
        }
        Ok(())
    }
}
