use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use chmass::commands::{self, RunOutput};
use chmass::config::ExperimentConfig;
use chmass::exec::{build_pool, Pool};
use chmass::report::table;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chmass", version, about = "Flat connections, Killing spinors and mass on complex hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature of the connection, signature and holonomy.
    Flatness(RunArgs),
    /// Killing spinor families, norms and the Q map.
    Killing(RunArgs),
    /// Mass functional on the model, the example metric and controls.
    Mass(RunArgs),
    /// The compactly supported example: scalar curvature, decay, mass.
    Appendix(RunArgs),
    /// Merge run reports (files or directories holding report.json).
    Report {
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        inputs: Vec<PathBuf>,
    },
}

const USAGE: u8 = 2;

fn load(args: &RunArgs) -> Result<ExperimentConfig, ExitCode> {
    let mut cfg = ExperimentConfig::load(&args.config).map_err(|e| {
        eprintln!("{e}");
        ExitCode::from(USAGE)
    })?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn run(args: &RunArgs, f: impl FnOnce(&ExperimentConfig) -> RunOutput + Send) -> ExitCode {
    let cfg = match load(args) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let start = Instant::now();
    let out = build_pool().install(|| f(&cfg));
    print!("{}", table(&out.report));
    eprintln!("elapsed {:.1} s", start.elapsed().as_secs_f64());
    if let Err(e) = commands::write_outputs(&args.out, &out) {
        eprintln!("cannot write outputs: {e}");
        return ExitCode::from(USAGE);
    }
    ExitCode::from(if out.report.passed { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Flatness(a) => run(&a, commands::flatness),
        Command::Killing(a) => run(&a, commands::killing),
        Command::Mass(a) => run(&a, |c| commands::mass(c, &Pool)),
        Command::Appendix(a) => run(&a, |c| commands::appendix(c, &Pool)),
        Command::Report { out, inputs } => {
            let merged = match commands::merge(&inputs) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(USAGE);
                }
            };
            print!("{}", commands::merged_summary(&merged));
            if let Err(e) = commands::write_merged(&out, &merged) {
                eprintln!("cannot write outputs: {e}");
                return ExitCode::from(USAGE);
            }
            ExitCode::from(if merged.passed { 0 } else { 1 })
        }
    }
}
