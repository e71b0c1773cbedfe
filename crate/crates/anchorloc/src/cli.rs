//! Command-line front end.
//!
//! Three subcommands: `run` executes a scenario's Monte-Carlo experiment and
//! writes the results CSV (plus optional histogram sidecars), `sweep` is
//! `run` with an explicit RSSI-noise list, and `crlb` evaluates the RMSE
//! lower bound. All randomness flows from `--seed`; identical invocations
//! produce byte-identical outputs.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{self, ConfigError};
use crate::crlb::CrlbError;
use crate::estimator::WeightModel;
use crate::report;
use crate::simulator::{self, PlacementSpec, PointSpec, Scenario, SimError, SummaryStats};

#[derive(Debug, Parser)]
#[command(
    name = "anchorloc",
    version,
    about = "RSSI self-localization with noisy anchor positions: Monte-Carlo benchmarks and error bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenario's experiment (one cell per sigma_p in its noise
    /// section) and emit the results CSV.
    Run(RunArgs),
    /// Run with an explicit sigma_p list, overriding the scenario file.
    Sweep(SweepArgs),
    /// Evaluate the RMSE lower bound per sigma_p.
    Crlb(CrlbArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario document (TOML).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Monte-Carlo trials per cell.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Master seed; every random draw derives from it.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write the results CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for per-cell histogram sidecars (created if missing).
    #[arg(long)]
    pub histograms: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated sigma_p values in dBm.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sigma_p: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct CrlbArgs {
    /// Scenario document (TOML).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Comma-separated sigma_p values in dBm; defaults to the scenario's
    /// noise section.
    #[arg(long, value_delimiter = ',')]
    pub sigma_p: Option<Vec<f64>>,
    /// For random-placement scenarios: average the bound over sampled
    /// layouts instead of refusing.
    #[arg(long)]
    pub per_trial: bool,
    /// Layout samples per cell when --per-trial is in effect.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also write the table to this CSV file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Sim(SimError),
    Bound(CrlbError),
    /// The request itself is unserviceable (e.g. zero noise for a bound).
    InvalidRequest {
        message: String,
    },
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Sim(_) => "simulation",
            CliError::Bound(_) => "bound",
            CliError::InvalidRequest { .. } => "invalid-request",
            CliError::Io { .. } => "io",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Sim(e) => write!(f, "{e}"),
            CliError::Bound(e) => write!(f, "{e}"),
            CliError::InvalidRequest { message } => write!(f, "{message}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Sim(e)
    }
}

impl From<CrlbError> for CliError {
    fn from(e: CrlbError) -> Self {
        CliError::Bound(e)
    }
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })
}

fn run_cells(
    scenario: &Scenario,
    sigma_p_values: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<SummaryStats>, CliError> {
    Ok(simulator::sweep(scenario, sigma_p_values, trials, seed)?)
}

fn emit_results(
    scenario: &Scenario,
    cells: &[SummaryStats],
    args: &RunArgs,
) -> Result<(), CliError> {
    let csv = report::results_csv(&scenario.id, cells, args.seed);
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(dir) = &args.histograms {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        for cell in cells {
            for model in [WeightModel::AnchorAware, WeightModel::RssiOnly] {
                let stats = match model {
                    WeightModel::AnchorAware => &cell.anchor_aware,
                    WeightModel::RssiOnly => &cell.rssi_only,
                };
                let path = dir.join(report::histogram_filename(
                    &scenario.id,
                    cell.sigma_p_dbm,
                    model,
                ));
                write_file(&path, &report::histogram_csv(&stats.histogram))?;
            }
        }
    }
    Ok(())
}

/// `run`: execute the scenario's sweep (or single cell) and write results.
pub fn cmd_run(args: &RunArgs, sigma_p_override: Option<&[f64]>) -> Result<(), CliError> {
    let loaded = config::load(&args.scenario)?;
    let cells: Vec<f64> = match sigma_p_override {
        Some(values) => values.to_vec(),
        None => loaded
            .sigma_p_sweep
            .clone()
            .unwrap_or_else(|| vec![loaded.scenario.noise.sigma_p]),
    };
    let stats = run_cells(&loaded.scenario, &cells, args.trials, args.seed)?;
    emit_results(&loaded.scenario, &stats, args)
}

/// `crlb`: print the bound per sigma_p, optionally also as CSV.
pub fn cmd_crlb(args: &CrlbArgs) -> Result<(), CliError> {
    let loaded = config::load(&args.scenario)?;
    let scenario = &loaded.scenario;
    let sigma_p_values: Vec<f64> = args
        .sigma_p
        .clone()
        .or(loaded.sigma_p_sweep.clone())
        .unwrap_or_else(|| vec![scenario.noise.sigma_p]);
    for &sp in &sigma_p_values {
        if sp.is_nan() || sp <= 0.0 {
            return Err(CliError::InvalidRequest {
                message: format!(
                    "sigma_p = {sp} has no defined bound: the Fisher information \
                     requires strictly positive RSSI noise"
                ),
            });
        }
    }

    let fixed_layout = matches!(scenario.anchors, PlacementSpec::Fixed(_))
        && matches!(scenario.blind_truth, PointSpec::At(_));
    if !fixed_layout && !args.per_trial {
        return Err(CliError::InvalidRequest {
            message: "scenario uses random placement; pass --per-trial to average \
                      the bound over sampled layouts"
                .to_string(),
        });
    }

    let mut rows = Vec::with_capacity(sigma_p_values.len());
    for (k, &sp) in sigma_p_values.iter().enumerate() {
        let cell = scenario.with_sigma_p(sp);
        let bound = if fixed_layout {
            let setup = simulator::instantiate(&cell, 0, args.seed)?;
            simulator::layout_bound(&setup, sp, scenario.pathloss()).ok_or_else(|| {
                CliError::InvalidRequest {
                    message: "bound undefined for this layout: every sigma_a must be \
                              strictly positive (use a small value to approximate \
                              exactly known anchors) and the geometry non-collinear"
                        .to_string(),
                }
            })?
        } else {
            // mirror the sweep's per-cell seeding so these values match the
            // crlb column a `run` would produce
            let cell_seed = args.seed.wrapping_add(k as u64);
            let mut sum = 0.0;
            let mut n = 0u64;
            for trial in 0..args.trials {
                let setup = simulator::instantiate(&cell, trial, cell_seed)?;
                if let Some(b) = simulator::layout_bound(&setup, sp, scenario.pathloss()) {
                    sum += b;
                    n += 1;
                }
            }
            if n == 0 {
                return Err(CliError::InvalidRequest {
                    message: "bound undefined for every sampled layout; check that \
                              all sigma_a values are strictly positive"
                        .to_string(),
                });
            }
            sum / n as f64
        };
        rows.push((sp, bound));
    }

    let mut table = String::from("sigma_p_dbm,crlb_m\n");
    for (sp, bound) in &rows {
        table.push_str(&format!(
            "{},{}\n",
            report::format_significant(*sp, 6),
            report::format_significant(*bound, 6)
        ));
    }
    print!("{table}");
    if let Some(path) = &args.out {
        write_file(path, &table)?;
    }
    Ok(())
}

/// Dispatch a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => cmd_run(args, None),
        Command::Sweep(args) => cmd_run(&args.run, Some(&args.sigma_p)),
        Command::Crlb(args) => cmd_crlb(args),
    }
}

/// Parse the process arguments, run, and return the exit code. Failures
/// print a human-readable line and a machine-readable JSON summary to
/// standard error.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!(
                "{}",
                serde_json::json!({
                    "status": "error",
                    "kind": e.kind(),
                    "message": e.to_string(),
                })
            );
            1
        }
    }
}
