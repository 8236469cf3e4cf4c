use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ringtraffic::{load_config, run_scenario, ConfigSources, Error, ExperimentKind};

/// Ring-road traffic experiments.
///
/// Settings are resolved from built-in defaults for the experiment, then the
/// config file, then RINGTRAFFIC_* environment variables (`__` separates
/// table keys, e.g. RINGTRAFFIC_PARAMS__V_MAX=30), then --set, then the
/// dedicated flags.
#[derive(Parser)]
#[command(name = "ringtraffic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Equilibrium velocity and flow against density.
    FundamentalDiagram(RunArgs),
    /// Perturbed single-lane ring with an optional reaction delay.
    SingleLane(RunArgs),
    /// Largest linear growth rate over a list of delays.
    Stability(RunArgs),
    /// Critical reaction time against the number of vehicles.
    TauCurve(RunArgs),
    /// Two lanes, all cars starting in one of them.
    LoadBalance(RunArgs),
    /// Two staggered lanes with one aggressive driver.
    Aggressive(RunArgs),
    /// Two-lane run with an explicit vehicle layout.
    Custom(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one setting, e.g. --set params.v_max=30 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Base RNG seed; replica i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
    /// Worker threads for replicas (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        use Command::*;
        match self {
            FundamentalDiagram(a) => (ExperimentKind::FundamentalDiagram, a),
            SingleLane(a) => (ExperimentKind::SingleLane, a),
            Stability(a) => (ExperimentKind::Stability, a),
            TauCurve(a) => (ExperimentKind::TauCurve, a),
            LoadBalance(a) => (ExperimentKind::LoadBalance, a),
            Aggressive(a) => (ExperimentKind::Aggressive, a),
            Custom(a) => (ExperimentKind::Custom, a),
        }
    }
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<i32, Error> {
    let mut src = match &args.config {
        Some(path) => ConfigSources::from_file(path)?,
        None => ConfigSources::default(),
    }
    .with_process_env();
    src.overrides = args.set;
    if let Some(s) = args.seed {
        src.overrides.push(format!("base_seed={s}"));
    }
    if let Some(r) = args.replicas {
        src.overrides.push(format!("replicas={r}"));
    }
    let cfg = load_config(&src, Some(kind))?;
    let manifest = run_scenario(&cfg, &args.out, args.workers)?;
    let results = serde_json::to_string_pretty(&manifest.results).expect("json value");
    // a closed pipe downstream is not a failure of the run
    let _ = writeln!(std::io::stdout().lock(), "{results}");
    for t in manifest
        .terminations
        .iter()
        .filter(|t| t.reason == "collision")
    {
        eprintln!(
            "replica {} stopped by a collision at t = {} s",
            t.replica, t.time
        );
    }
    Ok(manifest.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let (kind, args) = Cli::parse().command.split();
    let code = match run(kind, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
