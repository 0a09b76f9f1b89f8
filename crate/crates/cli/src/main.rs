//! `probe`: run sensing scenarios, parameter sweeps and the oracle suite.

mod error;
mod run;
mod scenario;
mod svg;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qprobe::BecReservoirModel;

use crate::error::{CliError, CliResult};
use crate::scenario::{load_model, Grid, Scenario, Spacing, SweepParam, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "probe", version, about = "Impurity-qubit sensing of a condensate reservoir")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario config.
    Run {
        config: PathBuf,
        /// Output directory, overriding the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Quadrature relative tolerance, overriding the config's `rel_tol`.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the randomized oracle suite and write `oracle_report.json`.
    OracleSuite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Sweep the scattering length or χ and write a sensing report.
    Sweep {
        /// `aB` (values in m) or `chi`.
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        points: usize,
        /// `linear` or `log`.
        #[arg(long, default_value = "linear")]
        spacing: String,
        /// Model object file; defaults to the Na-23 in Rb-87 reference set.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Sample times in seconds, comma separated.
        #[arg(long = "t-s", value_delimiter = ',', default_value = "1e-3")]
        t_s: Vec<f64>,
        /// Rebalance a0/a1 to this χ before sweeping.
        #[arg(long)]
        chi: Option<f64>,
        #[arg(long, default_value_t = 1)]
        nu: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn configure_threads(jobs: Option<usize>) -> CliResult<()> {
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::Config("--jobs must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn apply_tol(scenario: &mut Scenario, tol: Option<f64>) -> CliResult<()> {
    if let Some(t) = tol {
        scenario.quadrature.rel_tol = t;
        scenario.quadrature.validate().map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn build(command: Command) -> CliResult<Scenario> {
    match command {
        Command::Run { config, out, jobs, tol } => {
            configure_threads(jobs)?;
            let mut s = Scenario::from_file(&config)?;
            if let Some(out) = out {
                s.output_dir = out;
            }
            apply_tol(&mut s, tol)?;
            Ok(s)
        }
        Command::OracleSuite { seed, out, jobs } => {
            configure_threads(jobs)?;
            Ok(Scenario::for_oracle_suite(seed, out))
        }
        Command::Sweep {
            param,
            from,
            to,
            points,
            spacing,
            config,
            t_s,
            chi,
            nu,
            out,
            jobs,
            tol,
        } => {
            configure_threads(jobs)?;
            let params = match config {
                Some(path) => load_model(&path)?,
                None => qprobe::BecParameters::na_in_rb(),
            };
            let mut model = BecReservoirModel::new(params)?;
            if let Some(c) = chi {
                model = model.with_chi(c)?;
            }
            if t_s.is_empty() || t_s.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
                return Err(CliError::Config("--t-s must hold positive times".into()));
            }
            let spec = SweepSpec {
                param: SweepParam::parse(&param)?,
                grid: Grid {
                    from,
                    to,
                    points,
                    spacing: Spacing::parse(&spacing)?,
                },
                times: t_s,
            };
            let mut s = Scenario::for_sweep(model, spec, nu, out)?;
            apply_tol(&mut s, tol)?;
            Ok(s)
        }
    }
}

fn real_main(cli: Cli) -> CliResult<()> {
    let scenario = build(cli.command)?;
    let echo = serde_json::to_string_pretty(&scenario.effective_config()).expect("json values serialize");
    // A closed stdout must not abort the run.
    let _ = writeln!(std::io::stdout(), "{echo}");
    let outcome = run::execute(&scenario)?;
    for f in &outcome.files {
        eprintln!("wrote {}", scenario.output_dir.join(f).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("probe: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
