//! Argument parsing and command dispatch.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{io_err, Failure};
use crate::formats::{self, MatrixDump};
use crate::report::RunReport;
use crate::run::{self, ObservableKind};
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "gaugeqm", version, about = "Group-algebra-valued wavefunctions in background gauge fields")]
pub struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides the configured or built-in seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by --config.
    Run,
    /// Run built-in checks: algebra, gauge, pde, path, measurement or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Wilson line of the configured field along a path file of "t x" lines.
    Wilson {
        #[arg(long)]
        path: PathBuf,
    },
    /// Outcome distribution of an observable in a stored state.
    Measure {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum)]
        observable: ObservableKind,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// Also write the expansion coefficients per outcome as JSON.
        #[arg(long)]
        coefficients: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct OutcomeDump {
    value: f64,
    probability: f64,
    coefficients: Vec<MatrixDump>,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let path = cli.config.as_deref().ok_or_else(|| Failure::invalid("this command needs --config <FILE>"))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

fn save(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, text).map_err(io_err(path))
}

/// Exit status for a finished report: numeric failure first, then checks.
fn finish(report: &RunReport) -> ExitCode {
    print!("{}", report.summary());
    if report.failure.is_some() {
        ExitCode::from(2)
    } else if !report.all_passed() {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::invalid("--threads must be at least 1"));
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Run => {
            let cfg = load_config(cli)?;
            let report = run::run(&cfg, &cfg.output_dir)?;
            println!("wrote {}", cfg.output_dir.display());
            Ok(finish(&report))
        }
        Command::Verify { suite } => {
            let report = verify::verify(suite, cli.seed.unwrap_or(0))?;
            if let Some(o) = &cli.out {
                save(&o.join("verify.json"), &report.to_json())?;
            }
            Ok(finish(&report))
        }
        Command::Wilson { path } => {
            let cfg = load_config(cli)?;
            cfg.validate()?;
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let w = run::wilson(&cfg, &formats::parse_path(&text)?)?;
            let json = formats::matrix_to_json(w.matrix());
            if let Some(o) = &cli.out {
                save(&o.join("wilson.json"), &json)?;
            }
            println!("{json}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Measure { state, observable, mass, hbar, coefficients } => {
            if !(*mass > 0.0 && *hbar > 0.0) {
                return Err(Failure::invalid("--mass and --hbar must be positive"));
            }
            let text = fs::read_to_string(state).map_err(io_err(state))?;
            let psi = formats::state_from_json(&text)?;
            let dist = run::measure_state(&psi, *observable, *mass, *hbar)?;
            let csv = formats::measurement_csv(&dist);
            if let Some(o) = &cli.out {
                save(&o.join("measurement.csv"), &csv)?;
            }
            if let Some(p) = coefficients {
                let dump: Vec<OutcomeDump> = dist
                    .outcomes
                    .iter()
                    .map(|o| OutcomeDump {
                        value: o.value,
                        probability: o.probability,
                        coefficients: o.coefficients.iter().map(|g| MatrixDump::from_matrix(g.matrix())).collect(),
                    })
                    .collect();
                save(p, &serde_json::to_string_pretty(&dump).expect("dump serialises"))?;
            }
            print!("{csv}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

pub fn main_with(cli: Cli) -> ExitCode {
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
