//! `coordline`: run coordination experiments and rate checks from the shell.
//!
//! Every subcommand prints a JSON report. Exit status is 0 on success,
//! 2 for usage or configuration errors, 3 when a check fails and 4 when a
//! resource cap would be exceeded.

mod commands;
mod config;
mod error;

use clap::{Args, Parser, Subcommand};
use commands::{Outcome, RunParams};
use config::{ExperimentConfig, Overrides};
use coordline::line::Mode;
use coordline::rates::{RatePoint, Transfer};
use error::CliError;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "coordline", version, about = "Strong coordination over multi-hop line networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the auxiliary Markov chains and mode restrictions.
    Validate(Common),
    /// Evaluate the codebook-rate constraints and the resource map.
    Rates(Common),
    /// Test a rate point against a closed-form region.
    Region {
        #[command(flatten)]
        common: Common,
        /// functional, markov, large-cr, deterministic or zero-local.
        #[arg(long)]
        theorem: String,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Apply a rate transfer to a point.
    Transfer {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: PointArgs,
        /// to-common or forward.
        #[arg(long)]
        kind: Option<TransferKind>,
        #[arg(long)]
        node: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Monte Carlo estimate of the coordination TV.
    Simulate(Common),
    /// Exact coordination TV by enumeration.
    Exact(Common),
    /// Project a linear system with Fourier-Motzkin elimination.
    Fme(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset, used when no config is given.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated block lengths, e.g. 1,2,3.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<u64>,
    /// Number of codebook seeds (0..K).
    #[arg(long)]
    codebooks: Option<u64>,
    #[arg(long)]
    mode: Option<Mode>,
    /// Rate margin in bits above every codebook constraint.
    #[arg(long)]
    margin: Option<f64>,
    /// Enumeration cap, an integer or 2^k.
    #[arg(long)]
    cap: Option<String>,
    /// Directory for report.json and series.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum TransferKind {
    ToCommon,
    Forward,
}

impl From<TransferKind> for Transfer {
    fn from(k: TransferKind) -> Self {
        match k {
            TransferKind::ToCommon => Transfer::ToCommon,
            TransferKind::Forward => Transfer::Forward,
        }
    }
}

#[derive(Args, Clone, Default)]
struct PointArgs {
    /// Rate point as comma-separated Rc,R_1..R_{h-1},rho_1..rho_h.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    point: Option<Vec<f64>>,
}

fn load(common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match (&common.config, &common.preset) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give --config or --preset, not both".into())),
        (Some(path), None) => ExperimentConfig::load(path)?,
        (None, Some(name)) => ExperimentConfig::from_preset(name),
        (None, None) => return Err(CliError::Usage("one of --config or --preset is required".into())),
    };
    if let Some(s) = common.seed {
        cfg.seed = Some(s);
    }
    if let Some(n) = &common.n {
        cfg.n = Some(n.clone());
    }
    if let Some(t) = common.trials {
        cfg.trials = Some(t);
    }
    if let Some(k) = common.codebooks {
        cfg.codebooks = Some(k);
        cfg.seeds = None;
    }
    if let Some(c) = &common.cap {
        cfg.cap = Some(c.clone());
    }
    if let Some(c) = &cfg.cap {
        if coordline::caps::parse_cap(c).is_none() {
            return Err(CliError::Usage(format!("cap {c:?} is not an integer or 2^k")));
        }
        // A flag beats the environment; a config value only fills it in.
        if common.cap.is_some() || std::env::var_os("COORDLINE_CAP").is_none() {
            std::env::set_var("COORDLINE_CAP", c);
        }
    }
    if let Some(n) = cfg.n.as_ref() {
        if n.is_empty() || n.contains(&0) {
            return Err(CliError::Usage("block lengths must be positive".into()));
        }
    }
    Ok(cfg)
}

fn point_from(args: &PointArgs, cfg: &ExperimentConfig) -> Result<Option<RatePoint>, CliError> {
    match &args.point {
        Some(c) => {
            if c.len() % 2 != 0 || c.len() < 4 {
                return Err(CliError::Usage(format!("--point needs 2h coordinates, got {}", c.len())));
            }
            Ok(Some(RatePoint::from_coords(c.len() / 2, c)))
        }
        None => Ok(cfg.point.clone()),
    }
}

fn write_outputs(dir: &Path, outcome: &Outcome, text: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join("report.json"), text).map_err(io)?;
    if !outcome.series.is_empty() {
        let mut w = csv::Writer::from_path(dir.join("series.csv")).map_err(|e| CliError::Io(e.to_string()))?;
        for row in &outcome.series {
            w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush().map_err(io)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Validate(c) | Command::Rates(c) | Command::Simulate(c) | Command::Exact(c) | Command::Fme(c) => c,
        Command::Region { common, .. } | Command::Transfer { common, .. } => common,
    };
    if let Some(t) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("threads: {e}")))?;
    }
    let cfg = load(common)?;
    let overrides = Overrides { mode: common.mode, margin: common.margin };
    let outcome = match &cli.command {
        Command::Fme(_) => commands::fme(&cfg)?,
        cmd => {
            let exp = config::resolve(&cfg, &overrides)?;
            match cmd {
                Command::Validate(_) => commands::validate(&exp)?,
                Command::Rates(_) => commands::rates(&exp)?,
                Command::Simulate(_) => commands::simulate(&exp, &RunParams::from_config(&cfg))?,
                Command::Exact(_) => commands::exact(&exp, &RunParams::from_config(&cfg))?,
                Command::Region { theorem, point, tol, .. } => {
                    commands::region(&exp, theorem, point_from(point, &cfg)?, *tol)?
                }
                Command::Transfer { point, kind, node, delta, .. } => {
                    let t = cfg.transfer.as_ref();
                    let kind = kind.map(Transfer::from).or(t.map(|t| t.kind)).ok_or_else(|| CliError::Usage("transfer needs --kind".into()))?;
                    let node = node.or(t.map(|t| t.node)).ok_or_else(|| CliError::Usage("transfer needs --node".into()))?;
                    let delta = delta.or(t.map(|t| t.delta)).ok_or_else(|| CliError::Usage("transfer needs --delta".into()))?;
                    commands::transfer(&exp, point_from(point, &cfg)?, kind, node, delta)?
                }
                Command::Fme(_) => unreachable!(),
            }
        }
    };
    let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes") + "\n";
    print!("{text}");
    let out = common.out.clone().or_else(|| cfg.out.as_ref().map(PathBuf::from));
    if let Some(dir) = out {
        write_outputs(&dir, &outcome, &text)?;
    }
    if outcome.pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed(1))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("coordline: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
