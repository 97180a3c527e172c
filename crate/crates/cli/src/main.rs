//! `tropi`: command-line front end for tropi-core.
//!
//! Output is JSON with sorted keys on standard output unless a command says
//! otherwise. Exit codes: 0 on success, 2 when the input fails validation,
//! 64 on usage errors.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "tropi",
    version,
    about = "Tropical and Gromov-Hausdorff boundaries of moduli of curves and abelian varieties"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the result to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rescale {
    Diameter,
    Volume,
    Injrad,
}

#[derive(Debug, Args)]
pub struct GhArgs {
    /// Net spacing.
    #[arg(long, alias = "spacing", default_value_t = 0.05)]
    mesh: f64,
    /// Correspondence search budget (local moves, split across restarts).
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the combinatorial types of S_g.
    ///
    /// Table columns: name, vertices, edges, cell dimension, v1, b1.
    Census {
        #[arg(long)]
        genus: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Rational cellular Betti numbers of S_g.
    Homology {
        #[arg(long)]
        genus: usize,
        /// Highest degree reported (defaults to the top cell dimension).
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Stable and metric-graph limits of a pinching schedule.
    CollapseCurve {
        #[arg(long)]
        input: PathBuf,
        /// `json` or `dot` (the metric limit only).
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Rescaled limit of a degenerating family of abelian varieties.
    CollapseAv {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Rescale::Diameter)]
        rescale: Rescale,
    },
    /// Tropical Jacobian of a metric graph.
    Jacobian {
        #[arg(long)]
        input: PathBuf,
    },
    /// Diameter-1 tropical Jacobian of a diameter-1 graph.
    Torelli {
        #[arg(long, required_unless_present = "witness")]
        input: Option<PathBuf>,
        /// Print two graphs with the same image instead.
        #[arg(long)]
        witness: bool,
    },
    /// Gromov-Hausdorff interval between two spaces (graph, torus or point JSON).
    Ghdist {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        gh: GhArgs,
    },
    /// Best-effort reduction of a period point into the Siegel set.
    Reduce {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3.0)]
        u: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
    },
    /// Evaluate the contracting homotopy (graphs: phi, tori: psi) at time t.
    Homotopy {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// GH intervals between rescaled family members and their limit.
    ///
    /// CSV columns: i, lb, ub (one row per member index, ascending).
    PlotConvergence {
        #[arg(long)]
        input: PathBuf,
        /// Member indices, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        i: Vec<f64>,
        #[command(flatten)]
        gh: GhArgs,
    },
}

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let text = match commands::run(&cli.command) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_VALIDATION);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
