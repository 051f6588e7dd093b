use clap::{Args, Parser, Subcommand};
use spikefield::harness::{analyze, simulate_dataset, ConfigFile, ExperimentConfig, ExperimentKind};
use spikefield::io::{parse_json, read_signals, read_spikes, write_signals, write_spikes};
use spikefield::{run_experiment, Error, PhaseSpec, Result, SignalMatrix};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Spike-field coupling: simulation, analysis and Monte Carlo experiments.
#[derive(Parser, Debug)]
#[command(name = "spikefield", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one dataset and write spikes.json and signals.csv.
    Simulate(Common),
    /// Estimate coupling from spike and signal files and write analysis.json.
    Analyze(AnalyzeArgs),
    /// Run a Monte Carlo experiment and write report.json plus CSV tables.
    Experiment(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON configuration file; unset fields take the preset values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset to start from when the configuration does not name one.
    #[arg(long)]
    experiment: Option<ExperimentKind>,
    /// Master seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long)]
    spikes: PathBuf,
    /// Signal CSV; its metadata sidecar is read alongside.
    #[arg(long)]
    signals: Option<PathBuf>,
    /// Reference phase for univariate coupling, `linear:<frequency>`.
    #[arg(long, value_parser = parse_phase)]
    phase: Option<f64>,
    /// Spectrum threshold margin above the Marchenko-Pastur edge.
    #[arg(long, default_value_t = 0.0)]
    margin: f64,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_phase(s: &str) -> std::result::Result<f64, String> {
    let f = s
        .strip_prefix("linear:")
        .ok_or_else(|| format!("expected linear:<frequency>, got {s:?}"))?;
    f.parse::<f64>().map_err(|e| format!("bad frequency {f:?}: {e}"))
}

fn load_config(args: &Common) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            parse_json::<ConfigFile>(&text, &path.display().to_string())?.resolve(args.experiment)?
        }
        None => ExperimentConfig::preset(args.experiment.ok_or_else(|| {
            Error::Config("pass --config or --experiment to choose an experiment".into())
        })?),
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn out_dir(flag: &Option<PathBuf>, config: Option<&ExperimentConfig>) -> Result<PathBuf> {
    let dir = flag
        .clone()
        .or_else(|| config.and_then(|c| c.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Samples `e^{i phi(t)}` at `t = k dt`, `k < T / dt`, as a one-channel signal.
fn phase_signal(phase: &PhaseSpec, dt: f64) -> Result<SignalMatrix> {
    let n = (phase.window() / dt).round() as usize;
    let samples = (0..n).map(|k| phase.phasor_at(k as f64 * dt)).collect();
    SignalMatrix::from_time_major(dt, 1, samples, false)
}

fn simulate(args: &Common) -> Result<()> {
    let config = load_config(args)?;
    let data = simulate_dataset(&config)?;
    let dir = out_dir(&args.out, Some(&config))?;
    write_spikes(&dir.join("spikes.json"), &data.spikes)?;
    let signals = match (&data.signals, &data.phase) {
        (Some(s), _) => Some(s.clone()),
        (None, Some(phase)) => Some(phase_signal(phase, config.dt)?),
        (None, None) => None,
    };
    if let Some(s) = signals {
        write_signals(&dir.join("signals.csv"), &s)?;
    }
    eprintln!(
        "simulated {} unit(s) x {} trial(s) into {}",
        data.spikes.unit_count(),
        config.trials,
        dir.display()
    );
    Ok(())
}

fn analyze_files(args: &AnalyzeArgs) -> Result<()> {
    let spikes = read_spikes(&args.spikes)?;
    let signals = args.signals.as_deref().map(read_signals).transpose()?;
    let phase = args.phase.map(|f| PhaseSpec::linear(f, spikes.window)).transpose()?;
    let report = analyze(&spikes, signals.as_ref(), phase.as_ref(), args.margin)?;
    let dir = out_dir(&args.out, None)?;
    write_json(&dir.join("analysis.json"), &report)?;
    if let Some(s) = &report.spectrum {
        eprintln!(
            "{} significant eigenvalue(s) above the edge {:.4}",
            s.n_significant,
            s.mp.upper_edge * (1.0 + s.margin)
        );
    }
    Ok(())
}

fn experiment(args: &Common) -> Result<()> {
    let config = load_config(args)?;
    let dir = out_dir(&args.out, Some(&config))?;
    let report = run_experiment(&config)?;
    report.write(&dir)?;
    for v in &report.body.verdicts {
        eprintln!("{} {}", if v.pass { "PASS" } else { "FAIL" }, v.check);
    }
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.into()))?;
    std::fs::write(path, text)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Analyze(a) => {
            if a.config.is_some() || a.seed.is_some() {
                eprintln!("note: --config and --seed do not affect analyze");
            }
            analyze_files(a)
        }
        Command::Experiment(a) => experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
