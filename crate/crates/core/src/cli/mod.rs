//! Batch driver: JSON specs in, JSON reports out.

pub mod pipeline;
pub mod report;
pub mod spec;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use pipeline::{run_analysis, run_compare, run_curvature, run_mobility, AnalysisOptions};
pub use report::{AnalysisReport, Verdict};
pub use spec::ConnectionSpec;

use crate::error::{Error, Result};
use crate::metricize::geodesic_compare;

/// Exit code for unreadable or invalid input.
pub const EXIT_INPUT: i32 = 2;
/// Exit code for `compare` when the connections are not projectively equivalent.
pub const EXIT_NOT_EQUIVALENT: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "projmetric", version, about = "Decide whether a projective structure is metrizable")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full pipeline with a verdict.
    Analyze {
        spec: PathBuf,
        #[arg(long)]
        max_order: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Degree of mobility and the admissible solution space.
    Mobility {
        spec: PathBuf,
        #[arg(long)]
        max_order: Option<usize>,
    },
    /// Weyl, Schouten, Cotton-York and β tensors of the input connection.
    Curvature { spec: PathBuf },
    /// Projective equivalence and geodesic comparison of two connections.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 4)]
        samples: usize,
        /// Write the traced geodesics as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn load(path: &PathBuf) -> Result<ConnectionSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Spec(format!("{}: {e}", path.display())))?;
    ConnectionSpec::from_json(&text)
}

fn emit<T: Serialize>(value: &T, to: Option<&PathBuf>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    text.push('\n');
    match to {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Spec(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze {
            spec,
            max_order,
            samples,
            tol,
            report,
        } => {
            let s = load(&spec)?;
            let opts = AnalysisOptions::resolve(&s, max_order, samples, tol);
            let r = run_analysis(&s, &opts)?;
            emit(&r, report.as_ref())?;
            Ok(r.verdict.exit_code())
        }
        Command::Mobility { spec, max_order } => {
            let s = load(&spec)?;
            let opts = AnalysisOptions::resolve(&s, max_order, None, None);
            emit(&run_mobility(&s, &opts)?, None)?;
            Ok(0)
        }
        Command::Curvature { spec } => {
            emit(&run_curvature(&load(&spec)?)?, None)?;
            Ok(0)
        }
        Command::Compare { a, b, samples, csv } => {
            let (sa, sb) = (load(&a)?, load(&b)?);
            let r = run_compare(&sa, &sb, samples)?;
            if let Some(path) = csv {
                let center: Vec<f64> = sa.base_point.iter().map(crate::exprcore::q_to_f64).collect();
                let seeds = pipeline::geodesic_seeds(&center, samples.max(1));
                let g = geodesic_compare(&sa.connection, &sb.connection, &seeds, pipeline::GEODESIC_LENGTH, 1e-10)?;
                std::fs::write(&path, g.to_csv()).map_err(|e| Error::Spec(format!("{}: {e}", path.display())))?;
            }
            emit(&r, None)?;
            Ok(if r.equivalent { 0 } else { EXIT_NOT_EQUIVALENT })
        }
    }
}
