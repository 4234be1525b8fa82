use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qvdqc::experiment::{
    run_entanglement_sweep, run_error_sweep, run_placement_search, run_predict, run_size_sweep, to_csv,
    ExperimentConfig,
};

/// Quantum-volume benchmarks of single- and two-QPU devices.
#[derive(Parser)]
#[command(name = "qvdqc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate every device over the error-rate grid.
    ErrorSweep(Common),
    /// Simulate every device size at each error rate, with perfect pairs.
    SizeSweep(Common),
    /// Sweep the entanglement error of each two-QPU device against its
    /// single-QPU counterpart. Crossovers go to `<out>.crossover.csv`.
    EntSweep(Common),
    /// Score every memory attachment of each topology and even size.
    Placement(Common),
    /// Analytic predictions only, no simulation.
    Predict(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(short, long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    circuits: Option<usize>,
    #[arg(long)]
    shots: Option<usize>,
    /// Output CSV; stdout when neither this nor the config sets a path.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// 1000 circuits of 10000 shots per point unless overridden.
    #[arg(long)]
    paper_scale: bool,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let text = fs::read_to_string(&self.config).with_context(|| format!("reading {}", self.config.display()))?;
        let mut cfg = ExperimentConfig::from_toml(&text).with_context(|| format!("in {}", self.config.display()))?;
        cfg.resolve_paths(self.config.parent().unwrap_or(Path::new(".")));
        if self.paper_scale {
            cfg.paper_scale();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(c) = self.circuits {
            cfg.circuits = c;
        }
        if let Some(s) = self.shots {
            cfg.shots = s;
        }
        if let Some(o) = &self.out {
            cfg.output = Some(o.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn crossover_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.crossover.csv"))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::ErrorSweep(c) => {
            let cfg = c.load()?;
            emit(cfg.output.as_deref(), &to_csv("error-sweep", &run_error_sweep(&cfg)?)?)
        }
        Command::SizeSweep(c) => {
            let cfg = c.load()?;
            emit(cfg.output.as_deref(), &to_csv("size-sweep", &run_size_sweep(&cfg)?)?)
        }
        Command::EntSweep(c) => {
            let cfg = c.load()?;
            let (records, summary) = run_entanglement_sweep(&cfg)?;
            let records = to_csv("ent-sweep", &records)?;
            let summary = to_csv("crossover", &summary)?;
            match cfg.output.as_deref() {
                Some(p) => {
                    emit(Some(p), &records)?;
                    emit(Some(&crossover_path(p)), &summary)
                }
                None => emit(None, &format!("{records}\n{summary}")),
            }
        }
        Command::Placement(c) => {
            let cfg = c.load()?;
            emit(
                cfg.output.as_deref(),
                &to_csv("placement", &run_placement_search(&cfg)?)?,
            )
        }
        Command::Predict(c) => {
            let cfg = c.load()?;
            emit(cfg.output.as_deref(), &to_csv("predict", &run_predict(&cfg)?)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qvdqc: {e:#}");
            ExitCode::FAILURE
        }
    }
}
