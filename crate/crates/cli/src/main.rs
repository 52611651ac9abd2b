//! Batch front door. Exit codes: 0 for success (including gated skips),
//! 1 when any identity or statistical check fails, 2 for input errors.
//! `GSAW_THREADS` caps the worker pool.

mod commands;
mod model_file;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use gsaw_core::RealScalar;
use model_file::{load_model, parse_arithmetic, AnyModel, Arithmetic};

#[derive(Parser)]
#[command(
    name = "gsaw",
    about = "Exact Gaussian-integral and random-walk representation toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Sites are 1-based on the command line.
#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Model file (JSON; see the schema in the README)
    #[arg(long)]
    model: PathBuf,
    /// Source site (1-based)
    #[arg(long, default_value_t = 1)]
    a: usize,
    /// Target site (1-based)
    #[arg(long, default_value_t = 1)]
    b: usize,
    /// Self-intersection strength, as a rational or decimal (e.g. 1/2)
    #[arg(long, value_parser = parse_ratio_f64, default_value = "1/2")]
    g: f64,
    /// Killing-rate shift, as a rational or decimal
    #[arg(long, value_parser = parse_ratio_f64, default_value = "0")]
    lambda: f64,
    /// Per-site potential, comma-separated rationals (defaults to zero)
    #[arg(long, value_parser = parse_ratio_list)]
    v: Option<PotentialList>,
    /// Monte Carlo sample count (accepts 1e6 notation)
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    samples: u64,
    /// RNG seed; every estimate records it
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Walk-length truncation for series and walk sums
    #[arg(long, default_value_t = 18)]
    maxlen: usize,
    /// Arithmetic override: exact | float (defaults to the model file)
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Arithmetic>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full identity-verification suite against the model
    Verify(RunConfig),
    /// Two-point function by every applicable representation and method
    Twopoint {
        #[command(flatten)]
        config: RunConfig,
        /// Emit the table as CSV instead of JSON
        #[arg(long)]
        csv: bool,
        /// Include the raw walk and loop enumerations in the report
        #[arg(long)]
        list: bool,
    },
    /// Sample the killed chain and report local-time statistics
    Simulate(RunConfig),
    /// Exact local-time moments for a power multiset
    Moments {
        #[command(flatten)]
        config: RunConfig,
        /// Comma-separated per-site powers, e.g. 2,0,1
        #[arg(long, value_parser = parse_powers)]
        powers: Powers,
    },
    /// Run the supersymmetry identity corpus
    Susy(RunConfig),
}

#[derive(Debug, Clone)]
struct Powers(Vec<u32>);

#[derive(Debug, Clone)]
struct PotentialList(Vec<f64>);

fn parse_mode(s: &str) -> Result<Arithmetic, String> {
    parse_arithmetic(s).map_err(|e| e.to_string())
}

fn parse_ratio_f64(s: &str) -> Result<f64, String> {
    if let Ok(v) = s.parse::<f64>() {
        if v.is_finite() {
            return Ok(v);
        }
    }
    s.parse::<gsaw_core::BigRational>()
        .map(|r| RealScalar::to_f64(&r))
        .map_err(|_| format!("{s:?} is neither a decimal nor a rational p/q"))
}

fn parse_ratio_list(s: &str) -> Result<PotentialList, String> {
    s.split(',')
        .map(|p| parse_ratio_f64(p.trim()))
        .collect::<Result<Vec<f64>, String>>()
        .map(PotentialList)
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(f) if f.is_finite() && f >= 1.0 && f <= 1e15 => Ok(f.round() as u64),
        _ => Err(format!("{s:?} is not a sample count")),
    }
}

fn parse_powers(s: &str) -> Result<Powers, String> {
    s.split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<u32>, String>>()
        .map(Powers)
}

fn configure_threads() {
    if let Ok(value) = std::env::var("GSAW_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn check_sites(config: &RunConfig, size: usize) -> Result<(usize, usize)> {
    let (a, b) = (config.a, config.b);
    if a < 1 || a > size || b < 1 || b > size {
        bail!("sites must lie in 1..={size}, got a={a} b={b}");
    }
    if config.samples < 1 {
        bail!("sample count must be at least 1");
    }
    Ok((a - 1, b - 1))
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Verify(config) => {
            let model = load_model(&config.model, config.mode)?;
            let name = config.model.display().to_string();
            let report = match &model {
                AnyModel::Exact(m) => {
                    commands::verify::run(m, &name, model.arithmetic_name(), config.seed, config.samples)
                }
                AnyModel::Float(m) => {
                    commands::verify::run(m, &name, model.arithmetic_name(), config.seed, config.samples)
                }
            };
            report::emit(&report, config.out.as_deref())?;
            Ok(commands::verify::exit_status(&report.items))
        }
        Command::Twopoint { config, csv, list } => {
            let model = load_model(&config.model, config.mode)?;
            let (a, b) = check_sites(&config, model.size())?;
            let name = config.model.display().to_string();
            let v = config.v.as_ref().map(|p| p.0.as_slice());
            let report = match &model {
                AnyModel::Exact(m) => commands::twopoint::run(
                    m, &name, a, b, config.g, config.lambda, v, config.maxlen,
                    config.samples, config.seed, list,
                ),
                AnyModel::Float(m) => commands::twopoint::run(
                    m, &name, a, b, config.g, config.lambda, v, config.maxlen,
                    config.samples, config.seed, list,
                ),
            };
            if csv {
                let text = commands::twopoint::to_csv(&report);
                match config.out.as_deref() {
                    Some(path) => std::fs::write(path, text)
                        .with_context(|| format!("cannot write {}", path.display()))?,
                    None => print!("{text}"),
                }
            } else {
                report::emit(&report, config.out.as_deref())?;
            }
            Ok(0)
        }
        Command::Simulate(config) => {
            let model = load_model(&config.model, config.mode)?;
            let (a, _) = check_sites(&config, model.size())?;
            let name = config.model.display().to_string();
            let report = match &model {
                AnyModel::Exact(m) => {
                    commands::simulate::run(m, &name, a, config.samples, config.seed)?
                }
                AnyModel::Float(m) => {
                    commands::simulate::run(m, &name, a, config.samples, config.seed)?
                }
            };
            report::emit(&report, config.out.as_deref())?;
            Ok(0)
        }
        Command::Moments { config, powers } => {
            let model = load_model(&config.model, config.mode)?;
            let (a, b) = check_sites(&config, model.size())?;
            if powers.0.len() != model.size() {
                bail!(
                    "--powers needs {} comma-separated entries, got {}",
                    model.size(),
                    powers.0.len()
                );
            }
            let name = config.model.display().to_string();
            let report = match &model {
                AnyModel::Exact(m) => commands::moments::run(m, &name, a, b, powers.0.clone())?,
                AnyModel::Float(m) => commands::moments::run(m, &name, a, b, powers.0.clone())?,
            };
            report::emit(&report, config.out.as_deref())?;
            Ok(if report.agree { 0 } else { 1 })
        }
        Command::Susy(config) => {
            let model = load_model(&config.model, config.mode)?;
            let name = config.model.display().to_string();
            let rounds = config.samples.min(200).max(10);
            let report = match &model {
                AnyModel::Exact(m) => commands::susy::run(m, &name, config.seed, rounds),
                AnyModel::Float(m) => commands::susy::run(m, &name, config.seed, rounds),
            };
            report::emit(&report, config.out.as_deref())?;
            Ok(commands::verify::exit_status(&report.items))
        }
    }
}
