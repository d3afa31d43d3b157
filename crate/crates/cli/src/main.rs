use clap::{Parser, Subcommand, ValueEnum};
use spinpair::{EnsembleKind, Objective};
use spinpair_cli::commands::{self, parse_grid, Curves};
use spinpair_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Mutual information of POVMs on antiparallel and parallel spin pairs.
#[derive(Parser)]
#[command(name = "spinpair", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ensemble {
    Antiparallel,
    Parallel,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    #[value(name = "I")]
    Info,
    #[value(name = "J")]
    Bound,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the mutual information of a catalog measurement or file.
    Eval {
        /// Catalog name or path to a measurement file.
        #[arg(long)]
        measurement: String,
        /// Defaults to the catalog hint, or antiparallel for files.
        #[arg(long, value_enum)]
        ensemble: Option<Ensemble>,
        /// Quadrature orders `T,P`.
        #[arg(long, value_parser = parse_grid, default_value = "128,256")]
        grid: (usize, usize),
        /// Per-outcome CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate I and J over [0, pi].
    Scan {
        #[arg(long, default_value = "I,J")]
        curves: Curves,
        #[arg(long, default_value_t = 181)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_grid, default_value = "128,256")]
        grid: (usize, usize),
    },
    /// Solve the stationarity conditions and cross-check numerically.
    Optimize {
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        /// Number of outcomes.
        #[arg(long = "M", default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = parse_grid, default_value = "128,256")]
        grid: (usize, usize),
    },
    /// Check a measurement file for completeness and structure.
    Verify { path: PathBuf },
    /// Write a measurement to the file format.
    Export {
        #[arg(long)]
        measurement: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Eval {
            measurement,
            ensemble,
            grid,
            out,
        } => {
            let kind = ensemble.map(|e| match e {
                Ensemble::Antiparallel => EnsembleKind::Antiparallel,
                Ensemble::Parallel => EnsembleKind::Parallel,
            });
            let r = commands::eval(&measurement, kind, grid, out.as_deref())?;
            warn(&r.warnings);
            print!("{r}");
        }
        Command::Scan {
            curves,
            steps,
            out,
            grid,
        } => print!("{}", commands::scan(curves, steps, grid, &out)?),
        Command::Optimize {
            objective,
            m,
            seed,
            grid,
        } => {
            let obj = match objective {
                ObjectiveArg::Info => Objective::Info,
                ObjectiveArg::Bound => Objective::Bound,
            };
            print!("{}", commands::optimize(obj, m, seed, grid)?);
        }
        Command::Verify { path } => {
            let r = commands::verify(&path)?;
            warn(&r.warnings);
            print!("{r}");
        }
        Command::Export { measurement, out } => print!("{}", commands::export(&measurement, &out)?),
    }
    Ok(())
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version go to stdout and succeed; usage errors are invalid input
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
