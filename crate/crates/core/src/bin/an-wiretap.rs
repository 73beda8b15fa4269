use std::path::PathBuf;
use std::process::ExitCode;

use an_wiretap::error::{exit, Result};
use an_wiretap::experiment::{self, Figure, ResultTable, RunOptions};
use an_wiretap::scenario::ScenarioFile;
use clap::{Args, Parser, Subcommand};

/// Outage analysis, simulation and design for two-phase AN wiretap links.
#[derive(Parser)]
#[command(name = "an-wiretap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// CSV destination (a directory for `figure`). Without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the timestamp out of the metadata sidecar.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form outage probabilities and throughput.
    Analytic {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo estimates next to the closed forms.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        blocks: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Throughput-optimal design under outage constraints.
    Optimize {
        #[arg(long)]
        scenario: PathBuf,
        /// Final step of the rate grid search (general regime only).
        #[arg(long)]
        grid_step: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Regenerate a figure's data: figure2, figure3a or figure3b.
    Figure {
        name: String,
        #[command(flatten)]
        output: Output,
    },
}

fn emit(table: &ResultTable, output: &Output) -> Result<()> {
    match &output.out {
        Some(path) => {
            let (csv, meta) = table.save(path, output.deterministic)?;
            eprintln!("wrote {} and {}", csv.display(), meta.display());
        }
        None => print!("{}", table.to_csv_string()?),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analytic { scenario, output } => {
            emit(&experiment::cmd_analytic(&ScenarioFile::load(&scenario)?)?, &output)?;
        }
        Command::Simulate {
            scenario,
            seed,
            blocks,
            output,
        } => {
            let opts = RunOptions {
                seed,
                blocks,
                ..Default::default()
            };
            emit(&experiment::cmd_simulate(&ScenarioFile::load(&scenario)?, &opts)?, &output)?;
        }
        Command::Optimize {
            scenario,
            grid_step,
            output,
        } => {
            let opts = RunOptions {
                grid_step,
                ..Default::default()
            };
            let table = experiment::cmd_optimize(&ScenarioFile::load(&scenario)?, &opts)?;
            emit(&table, &output)?;
            if table.all_infeasible() {
                return Ok(exit::INFEASIBLE);
            }
        }
        Command::Figure { name, output } => {
            let fig: Figure = name.parse()?;
            let dir = output.out.unwrap_or_else(|| PathBuf::from("."));
            let (csv, meta) = experiment::cmd_figure(fig, &dir, output.deterministic)?;
            eprintln!("wrote {} and {}", csv.display(), meta.display());
        }
    }
    Ok(exit::OK)
}

fn main() -> ExitCode {
    let code = run(Cli::parse()).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
