use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use infoflux::engine::{AdiabaticMode, EngineKind};
use infoflux::experiment::{preset, run, ExperimentConfig, Format, Output, PRESETS};

#[derive(Parser)]
#[command(
    name = "infoflux",
    version,
    about = "Information flow and leakage in amplitude amplification"
)]
struct Cli {
    /// Worker threads (defaults to all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured experiment.
    Run {
        #[arg(long, value_parser = parse_engine)]
        engine: EngineKind,
        #[command(flatten)]
        overrides: Overrides,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named figure configuration.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
        name: String,
        #[command(flatten)]
        overrides: Overrides,
        /// Directory receiving one file per dataset.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    target: Option<usize>,
    #[arg(long)]
    ns: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid points for continuous engines.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    energy: Option<f64>,
    /// Continuous integration step for the adiabatic engine.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t1: Option<f64>,
    #[arg(long)]
    t2: Option<f64>,
    /// Comma-separated subset of trajectory, flow, leakage, entanglement.
    #[arg(long, value_delimiter = ',', value_parser = parse_output)]
    outputs: Option<Vec<Output>>,
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
    /// Follow the ideal adiabatic unitary instead of integrating.
    #[arg(long)]
    ideal: bool,
    /// Evaluate p* with the first grid time's maximizing pair throughout.
    #[arg(long)]
    freeze_pair: bool,
}

fn parse_engine(s: &str) -> Result<EngineKind, String> {
    s.parse().map_err(|e: infoflux::Error| e.to_string())
}

fn parse_output(s: &str) -> Result<Output, String> {
    s.parse().map_err(|e: infoflux::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: infoflux::Error| e.to_string())
}

impl Overrides {
    fn apply(&self, c: &mut ExperimentConfig) {
        if let Some(n) = self.n {
            c.engine.qubits = n;
        }
        if let Some(w) = self.target {
            c.engine.target = w;
        }
        if let Some(ns) = self.ns {
            c.n_s = ns;
        }
        if let Some(s) = self.samples {
            c.samples = s;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(g) = self.grid {
            c.grid_points = g;
        }
        if let Some(e) = self.epsilon {
            c.engine.epsilon = e;
        }
        if let Some(e) = self.energy {
            c.engine.energy = e;
        }
        if self.dt.is_some() {
            c.engine.dt = self.dt;
        }
        if self.t1.is_some() {
            c.t1 = self.t1;
        }
        if self.t2.is_some() {
            c.t2 = self.t2;
        }
        if let Some(o) = &self.outputs {
            c.outputs = o.iter().copied().collect();
        }
        if let Some(f) = self.format {
            c.format = f;
        }
        if self.ideal {
            c.engine.adiabatic_mode = AdiabaticMode::Ideal;
        }
        if self.freeze_pair {
            c.freeze_pair = true;
        }
    }
}

fn write_dataset(config: &ExperimentConfig, out: Option<&Path>) -> Result<()> {
    let dataset = run(config)?;
    let text = dataset.render(config.format)?;
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
            eprintln!(
                "{}: {} rows -> {}",
                config.label,
                dataset.rows.len(),
                path.display()
            );
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            bail!("invalid config field `threads`: must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("cannot start worker pool")?;
    }
    match cli.command {
        Command::Run {
            engine,
            overrides,
            out,
        } => {
            let mut config = ExperimentConfig::new(engine, 8);
            overrides.apply(&mut config);
            write_dataset(&config, out.as_deref())?;
        }
        Command::Preset { name, overrides, out } => {
            std::fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
            for mut config in preset(&name)? {
                overrides.apply(&mut config);
                let path = out.join(format!("{}.{}", config.label, config.format.extension()));
                write_dataset(&config, Some(&path))?;
            }
        }
        Command::Selftest => {
            let checks = infoflux::selftest::run_all();
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                println!(
                    "{} {:<32} {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            println!("{} of {} checks passed", checks.len() - failed, checks.len());
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
