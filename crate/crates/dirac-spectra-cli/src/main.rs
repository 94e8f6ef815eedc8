//! `dirac-spectra`: spectra, eigenfunctions, and basis diagnostics for
//! 2x2 Dirac-type integro-differential systems from JSON run configs.

mod config;
mod runner;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dirac-spectra", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks requested by a JSON config and write artifacts.
    Solve {
        config: PathBuf,
        /// Output directory (overrides the config's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated task override.
        #[arg(long, value_delimiter = ',')]
        tasks: Option<Vec<CliTask>>,
        /// Grid-node override (odd, >= 33).
        #[arg(long)]
        grid_points: Option<usize>,
        /// Debug dump of the fundamental solutions at RE,IM[,ALPHA]
        /// (base point defaults to 0) into fundamental.csv.
        #[arg(long, value_name = "RE,IM[,ALPHA]")]
        dump_fundamental: Option<String>,
    },
    /// Extract two-column plot data from run artifacts.
    Plot {
        /// spectrum | asymptotics | riesz-tail | gram
        kind: String,
        /// spectrum.csv for "spectrum", the JSON report otherwise.
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CliTask {
    CheckConditions,
    Spectrum,
    Eigenfunctions,
    ValidateAsymptotics,
    RieszReport,
}

impl From<CliTask> for config::Task {
    fn from(t: CliTask) -> Self {
        match t {
            CliTask::CheckConditions => config::Task::CheckConditions,
            CliTask::Spectrum => config::Task::Spectrum,
            CliTask::Eigenfunctions => config::Task::Eigenfunctions,
            CliTask::ValidateAsymptotics => config::Task::ValidateAsymptotics,
            CliTask::RieszReport => config::Task::RieszReport,
        }
    }
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("DIRAC_SPECTRA_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // numerical aborts carry a dedicated exit code
            let numerical = e.chain().any(|cause| {
                matches!(
                    cause.downcast_ref::<dirac_spectra::Error>(),
                    Some(dirac_spectra::Error::DynamicRange)
                        | Some(dirac_spectra::Error::ZeroOnContour(_))
                ) || cause.to_string().contains("dynamic range exceeded")
                    || cause.to_string().contains("zero of χ on contour")
            });
            if numerical {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve {
            config,
            out,
            tasks,
            grid_points,
            dump_fundamental,
        } => {
            let parsed = config::load(&config)?;
            let resolved = config::resolve(
                &parsed,
                grid_points,
                tasks.map(|list| list.into_iter().map(Into::into).collect()),
                out.map(|p| p.to_string_lossy().into_owned()),
            )?;
            if let Some(request) = dump_fundamental {
                runner::dump_fundamental(&resolved, &request)?;
            }
            match runner::run(&resolved)? {
                runner::Outcome::Success => Ok(ExitCode::SUCCESS),
                runner::Outcome::ConditionsFailed => Ok(ExitCode::from(2)),
            }
        }
        Command::Plot { kind, report, out } => {
            runner::emit_plotdata(&kind, &report, &out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
