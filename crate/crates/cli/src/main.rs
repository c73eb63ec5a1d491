use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use tangleproof::experiment::{self, AnalyzeOptions, ExperimentConfig, ExperimentError};
use tangleproof::io;
use tangleproof::ParentCount;

#[derive(Parser)]
#[command(name = "tangleproof", version, about = "Simulate the tangle and verify forced bottlenecks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate independent runs, one per seed.
    Run(RunArgs),
    /// Simulate, force a bottleneck schedule and verify it.
    Force(RunArgs),
    /// Check a forced trace against its plan.
    Verify {
        trace: PathBuf,
        plan: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Martingale, recurrence, confirmation and metric statistics of a trace.
    Analyze {
        trace: PathBuf,
        #[arg(long, default_value_t = 10)]
        points: u64,
        #[arg(long, default_value_t = 1000)]
        window: u64,
        #[arg(long)]
        b: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-execute a trace and report any difference.
    Replay {
        trace: PathBuf,
        /// Directory for the recomputed trace.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// May be repeated; replaces the configured seeds.
    #[arg(long)]
    seed: Vec<u64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    b: Option<u64>,
    #[arg(long = "k-parents")]
    k_parents: Option<u32>,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig, ExperimentError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if !self.seed.is_empty() {
            cfg.seeds = self.seed.clone();
        }
        if let Some(s) = self.steps {
            cfg.steps = s;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(b) = self.b {
            cfg.b = b;
        }
        if let Some(k) = self.k_parents {
            cfg.k_parents = ParentCount::Fixed(k);
        }
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct Runs {
    runs: Vec<experiment::RunSummary>,
}

fn emit<T: Serialize>(out: Option<&PathBuf>, doc: &T) -> Result<(), ExperimentError> {
    match out {
        Some(path) => io::write_json(path, doc)?,
        None => println!("{}", io::to_json_string(doc)),
    }
    Ok(())
}

fn execute(cmd: Command) -> Result<(), ExperimentError> {
    match cmd {
        Command::Run(args) => {
            let cfg = args.config()?;
            let runs = experiment::run_replicas(&cfg, true)?;
            println!("{}", io::to_json_string(&Runs { runs }));
        }
        Command::Force(args) => {
            let cfg = args.config()?;
            let outcome = experiment::force(&cfg)?;
            experiment::write_force(&cfg.out, &outcome)?;
            println!("{}", io::to_json_string(&outcome.summary));
        }
        Command::Verify { trace, plan, out } => {
            let report = experiment::verify_files(&trace, &plan)?;
            emit(out.as_ref(), &report)?;
        }
        Command::Analyze {
            trace,
            points,
            window,
            b,
            out,
        } => {
            let opts = AnalyzeOptions { points, window, b };
            let summary = experiment::analyze_file(&trace, &opts)?;
            emit(out.as_ref(), &summary)?;
        }
        Command::Replay { trace, out } => {
            let (outcome, rebuilt) = experiment::replay_file(&trace)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|source| io::IoError::Io {
                    path: dir.clone(),
                    source,
                })?;
                io::write_trace(&rebuilt, &dir.join("trace.csv"))?;
            }
            println!("{}", io::to_json_string(&outcome));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
