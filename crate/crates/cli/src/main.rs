#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ruin_core::oracles::{cross_check_with, DpOptions, McOptions, OracleOptions};
use ruin_core::{
    build_distribution, find_disk_roots, AnalyticFamily, DiskRootOptions, RuinOptions, RuinSolver,
};

use config::{Args, Mode};
use report::{DistributionInfo, Report, RootListing, RootsReport, Row, SCHEMA_VERSION};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_VERIFY_FAILED: u8 = 4;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

impl From<ruin_core::Error> for Failure {
    fn from(e: ruin_core::Error) -> Self {
        Self {
            code: if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_NUMERICAL
            },
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(args: &Args) -> Result<u8, Failure> {
    args.validate().map_err(Failure::validation)?;
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| Failure::validation(format!("cannot read {}: {e}", args.spec.display())))?;
    let family: AnalyticFamily = serde_json::from_str(&text)
        .map_err(|e| Failure::validation(format!("{}: {e}", args.spec.display())))?;
    let d = build_distribution(&family, args.tail_tol)?;
    let root_opts = DiskRootOptions {
        residual_tol: args.residual_tol,
        ..Default::default()
    };

    if args.roots {
        let roots = find_disk_roots(&d, &root_opts)?;
        let out = report::render_roots(
            &RootsReport {
                schema_version: SCHEMA_VERSION,
                distribution: DistributionInfo::new(&d),
                roots: RootListing::new(&roots),
            },
            args.format,
        );
        emit(args, &out)?;
        return Ok(0);
    }

    let wealth = &args.wealth.as_ref().expect("checked by validate").0;
    let solver = RuinSolver::new(
        &d,
        RuinOptions {
            roots: root_opts,
            ..Default::default()
        },
    )?;
    let results = solver
        .evaluate_many(wealth)
        .into_iter()
        .zip(wealth)
        .map(|(r, m)| {
            r.map_err(|e| {
                let mut f = Failure::from(e);
                f.message = format!("M = {m}: {}", f.message);
                f
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let oracle_opts = OracleOptions {
        dp: Some(DpOptions {
            eps: args.dp_eps,
            t_max: args.dp_max_steps,
            k_cap: None,
        }),
        mc: Some(McOptions {
            n_paths: args.mc_paths,
            seed: args.seed,
            ..Default::default()
        }),
        finite_w: args.finite_w.clone(),
        run_finite_w: true,
    };
    let mut rows = Vec::with_capacity(results.len());
    for result in results {
        let oracle = match args.mode {
            Mode::Formula => None,
            Mode::Verify => Some(cross_check_with(&solver, result.wealth, &oracle_opts)?),
        };
        rows.push(Row { result, oracle });
    }

    let report = Report {
        schema_version: SCHEMA_VERSION,
        mode: match args.mode {
            Mode::Formula => "formula",
            Mode::Verify => "verify",
        },
        distribution: DistributionInfo::new(&d),
        roots: solver.roots().map(RootListing::new),
        results: rows,
    };
    emit(args, &report::render(&report, args.format))?;

    if report.all_verified() {
        return Ok(0);
    }
    for row in &report.results {
        if let Some(o) = row.oracle.as_ref().filter(|o| !o.verdict.all) {
            let failed: Vec<&str> = [
                ("dp", o.verdict.dp),
                ("mc", o.verdict.mc),
                ("finite_w", o.verdict.finite_w),
            ]
            .into_iter()
            .filter(|(_, v)| *v == Some(false))
            .map(|(name, _)| name)
            .collect();
            eprintln!(
                "verification failed at M = {}: {}",
                o.wealth,
                failed.join(", ")
            );
            for n in &o.notes {
                eprintln!("  {n}");
            }
        }
    }
    Ok(EXIT_VERIFY_FAILED)
}

fn emit(args: &Args, text: &str) -> Result<(), Failure> {
    let result = match &args.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    result.map_err(|e| Failure {
        code: EXIT_VALIDATION,
        message: format!("cannot write output: {e}"),
    })
}
