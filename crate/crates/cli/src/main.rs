//! `tisp`: command-line front end for translation-invariant star products.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use tisp::ErrorCategory;

use crate::report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "tisp", version, about = "Cochains, star products and Feynman factors")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Residual tolerance; each command has its own default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Lattice as `m,N,dp`.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Prefix for CSV tables.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Record wall-clock seconds in the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cocycle, unitality, commutativity and involution predicates.
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Half-width of the sampling box.
        #[arg(long, default_value_t = 2.0)]
        radius: f64,
    },
    /// Harmonic part, lattice witness, omega table and commutator matrix.
    Hodge {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Star product of two coefficient files (random fields when absent).
    Star {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        left: Option<PathBuf>,
        #[arg(long)]
        right: Option<PathBuf>,
        /// Support radius of generated fields.
        #[arg(long, default_value_t = 3)]
        support: i64,
        /// Binary output field.
        #[arg(long)]
        field_out: Option<PathBuf>,
    },
    /// Cohomology class comparison with witness recovery.
    Equiv {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        spec2: PathBuf,
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Loop amplitudes for one or two generators.
    Loop {
        #[arg(long)]
        spec: PathBuf,
        /// Second generator; the zero generator when absent.
        #[arg(long)]
        spec2: Option<PathBuf>,
        /// Graph file; the non-planar self-energy scan when absent.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        mass2: f64,
        /// External momenta in the scan.
        #[arg(long, default_value_t = 9)]
        points: usize,
        /// Largest |p| in the scan, along the first axis.
        #[arg(long, default_value_t = 2.0)]
        pmax: f64,
    },
    /// Full acceptance suite.
    Demo,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let category = err.chain().find_map(|e| e.downcast_ref::<tisp::Error>()).map(|e| e.category());
    match category {
        Some(ErrorCategory::Check) => 1,
        Some(ErrorCategory::Budget) => 3,
        Some(ErrorCategory::Numeric) => 4,
        Some(ErrorCategory::Input) | None => 2,
    }
}

fn run(cli: &Cli) -> Result<RunReport> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring thread pool")?;
    }
    let c = &cli.common;
    match &cli.command {
        Command::Check { spec, samples, radius } => commands::check(c, spec, *samples, *radius),
        Command::Hodge { spec, samples } => commands::hodge(c, spec, *samples),
        Command::Star { spec, left, right, support, field_out } => {
            commands::star(c, spec, left.as_deref(), right.as_deref(), *support, field_out.as_deref())
        }
        Command::Equiv { spec, spec2, samples } => commands::equiv(c, spec, spec2, *samples),
        Command::Loop { spec, spec2, graph, mass2, points, pmax } => {
            commands::loop_amplitudes(c, spec, spec2.as_deref(), graph.as_deref(), *mass2, *points, *pmax)
        }
        Command::Demo => commands::demo(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = report.to_json();
    match &cli.common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
