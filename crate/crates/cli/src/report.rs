//! Report assembly and rendering. Everything printed here is a pure
//! function of the inputs so that identical runs give identical bytes.

use std::fmt::Write as _;

use ruin_core::oracles::OracleReport;
use ruin_core::{AnalyticFamily, DiskRoots, PayoffDistribution, RuinResult};
use serde::Serialize;

use crate::config::Format;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct DistributionInfo {
    pub family: AnalyticFamily,
    pub nu: usize,
    pub max_payoff: Option<i64>,
    pub mean: f64,
    pub tail_mass_bound: f64,
    pub favorable: bool,
}

impl DistributionInfo {
    pub fn new(d: &PayoffDistribution) -> Self {
        Self {
            family: d.family().clone(),
            nu: d.nu(),
            max_payoff: d.max_payoff(),
            mean: d.mean(),
            tail_mass_bound: d.tail_mass_bound(),
            favorable: d.is_favorable(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RootEntry {
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub residual: f64,
    pub cluster: bool,
}

#[derive(Debug, Serialize)]
pub struct RootListing {
    pub z_star: f64,
    pub degree: usize,
    pub roots: Vec<RootEntry>,
}

impl RootListing {
    pub fn new(r: &DiskRoots) -> Self {
        Self {
            z_star: r.z_star,
            degree: r.degree,
            roots: r
                .roots
                .iter()
                .zip(&r.residuals)
                .zip(&r.cluster_flags)
                .map(|((z, &residual), &cluster)| RootEntry {
                    re: z.re,
                    im: z.im,
                    abs: z.norm(),
                    residual,
                    cluster,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Row {
    #[serde(flatten)]
    pub result: RuinResult,
    pub oracle: Option<OracleReport>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub mode: &'static str,
    pub distribution: DistributionInfo,
    pub roots: Option<RootListing>,
    pub results: Vec<Row>,
}

impl Report {
    pub fn all_verified(&self) -> bool {
        self.results
            .iter()
            .all(|r| r.oracle.as_ref().is_none_or(|o| o.verdict.all))
    }
}

#[derive(Debug, Serialize)]
pub struct RootsReport {
    pub schema_version: u32,
    pub distribution: DistributionInfo,
    pub roots: RootListing,
}

fn verdict(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "pass",
        Some(false) => "FAIL",
        None => "skip",
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => json(report),
        Format::Csv => csv(report),
        Format::Table => table(report),
    }
}

pub fn render_roots(report: &RootsReport, format: Format) -> String {
    match format {
        Format::Json => json(report),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["j", "re", "im", "abs", "residual", "cluster"])
                .unwrap();
            for (j, r) in report.roots.roots.iter().enumerate() {
                w.write_record([
                    (j + 1).to_string(),
                    r.re.to_string(),
                    r.im.to_string(),
                    r.abs.to_string(),
                    r.residual.to_string(),
                    r.cluster.to_string(),
                ])
                .unwrap();
            }
            String::from_utf8(w.into_inner().unwrap()).unwrap()
        }
        Format::Table => {
            let l = &report.roots;
            let mut s = String::new();
            writeln!(
                s,
                "nu = {}, z* = {:.6}, degree = {}",
                report.distribution.nu, l.z_star, l.degree
            )
            .unwrap();
            writeln!(
                s,
                "{:>3}  {:>10}  {:>10}  {:>9}  {:>9}  cluster",
                "j", "re", "im", "|eta|", "residual"
            )
            .unwrap();
            for (j, r) in l.roots.iter().enumerate() {
                writeln!(
                    s,
                    "{:>3}  {:>10.6}  {:>10.6}  {:>9.6}  {:>9.1e}  {}",
                    j + 1,
                    r.re,
                    r.im,
                    r.abs,
                    r.residual,
                    if r.cluster { "yes" } else { "no" }
                )
                .unwrap();
            }
            s
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn csv(report: &Report) -> String {
    let verify = report.mode == "verify";
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["M", "p_ruin", "method", "max_root_abs"];
    if verify {
        header.extend([
            "dp_lower",
            "dp_bound_gap",
            "dp_pass",
            "mc_estimate",
            "mc_ci_halfwidth",
            "mc_censored_fraction",
            "mc_pass",
            "finite_w_threshold",
            "finite_w_value",
            "finite_w_pass",
            "verdict",
        ]);
    }
    w.write_record(&header).unwrap();
    for row in &report.results {
        let r = &row.result;
        let mut rec = vec![
            r.wealth.to_string(),
            r.p_ruin.to_string(),
            r.method.as_str().to_string(),
            opt(r.diagnostics.max_root_abs),
        ];
        if verify {
            let o = row.oracle.as_ref();
            let dp = o.and_then(|o| o.dp.as_ref());
            let mc = o.and_then(|o| o.mc.as_ref());
            let fw = o.and_then(|o| o.finite_w.last());
            rec.extend([
                opt(dp.map(|d| d.lower)),
                opt(dp.map(|d| d.bound_gap)),
                verdict(o.and_then(|o| o.verdict.dp)).to_string(),
                opt(mc.map(|m| m.estimate)),
                opt(mc.map(|m| m.ci_halfwidth)),
                opt(mc.map(|m| m.censored_fraction)),
                verdict(o.and_then(|o| o.verdict.mc)).to_string(),
                fw.map(|f| f.threshold.to_string()).unwrap_or_default(),
                opt(fw.map(|f| f.value)),
                verdict(o.and_then(|o| o.verdict.finite_w)).to_string(),
                verdict(o.map(|o| o.verdict.all)).to_string(),
            ]);
        }
        w.write_record(&rec).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn table(report: &Report) -> String {
    let d = &report.distribution;
    let mut s = String::new();
    write!(s, "nu = {}, mean = {:.6}", d.nu, d.mean).unwrap();
    if d.tail_mass_bound > 0.0 {
        write!(s, ", tail mass <= {:.1e}", d.tail_mass_bound).unwrap();
    }
    if !d.favorable {
        write!(s, " (not favorable: ruin is certain)").unwrap();
    }
    s.push('\n');
    if let Some(l) = &report.roots {
        let list: Vec<String> = l
            .roots
            .iter()
            .map(|r| {
                if r.im == 0.0 {
                    format!("{:.6}", r.re)
                } else {
                    format!("{:.6}{:+.6}i", r.re, r.im)
                }
            })
            .collect();
        writeln!(s, "roots: {}", list.join(", ")).unwrap();
    }
    let verify = report.mode == "verify";
    write!(
        s,
        "{:>8}  {:>8}  {:>13}  {:>8}  q",
        "M", "p_ruin", "method", "max|eta|"
    )
    .unwrap();
    if verify {
        write!(
            s,
            "  | {:>21}  {:>17}  {:>8}  verdict",
            "dp [lower, upper]", "mc (95% ci)", "finite_w"
        )
        .unwrap();
    }
    s.push('\n');
    for row in &report.results {
        let r = &row.result;
        let q = r
            .q_coeffs
            .as_ref()
            .map(|q| {
                let parts: Vec<String> = q.iter().map(|c| format!("{c:.6}")).collect();
                format!("[{}]", parts.join(", "))
            })
            .unwrap_or_else(|| "-".into());
        let method = r.method.as_str();
        let eta = r
            .diagnostics
            .max_root_abs
            .map(|x| format!("{x:.6}"))
            .unwrap_or_else(|| "-".into());
        write!(
            s,
            "{:>8}  {:>8.6}  {:>13}  {:>8}  {q}",
            r.wealth, r.p_ruin, method, eta
        )
        .unwrap();
        if let Some(o) = &row.oracle {
            let dp =
                o.dp.as_ref()
                    .map(|d| format!("[{:.6}, {:.6}]", d.lower, d.lower + d.bound_gap))
                    .unwrap_or_else(|| "-".into());
            let mc =
                o.mc.as_ref()
                    .map(|m| format!("{:.6} +- {:.6}", m.estimate, m.ci_halfwidth))
                    .unwrap_or_else(|| "-".into());
            let fw = o
                .finite_w
                .last()
                .map(|f| format!("{:.6}", f.value))
                .unwrap_or_else(|| "-".into());
            let mut checks = Vec::new();
            for (name, v) in [
                ("dp", o.verdict.dp),
                ("mc", o.verdict.mc),
                ("finite_w", o.verdict.finite_w),
            ] {
                checks.push(format!("{name}:{}", verdict(v)));
            }
            write!(s, "  | {dp:>21}  {mc:>17}  {fw:>8}  {}", checks.join(" ")).unwrap();
            for n in &o.notes {
                write!(s, "  [{n}]").unwrap();
            }
        }
        s.push('\n');
    }
    s
}
