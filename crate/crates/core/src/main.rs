//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 usage (bad flags or unknown case label),
//! 2 configuration problems, 3 I/O failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use coffee_abm::batch::{aggregate, collect_frames};
use coffee_abm::output::{
    write_ensemble_csv, write_metadata, write_raw_csv, write_sweep_index, OutputBundle,
};
use coffee_abm::scenario::{
    builtin_cases, case_by_label, demand_sweep, full_sweep, weight_sweep, ScenarioConfig,
};

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "COFFEE_ABM_OUT";

#[derive(Parser)]
#[command(
    name = "coffee-abm",
    version,
    about = "Seeded Monte Carlo simulator of a smallholder coffee value chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in cases.
    Cases,
    /// Run one case or config file as a replication ensemble.
    Run {
        /// Case label (case1..case5) or path to a TOML config file.
        case_or_config: String,
        /// Number of replications (defaults to the scenario's setting).
        #[arg(long)]
        runs: Option<u32>,
        /// Base seed; replication i uses base_seed + i.
        #[arg(long)]
        seed: Option<u64>,
        /// Ticks to simulate.
        #[arg(long)]
        horizon: Option<u32>,
        /// Ensemble CSV path; defaults to <label>_ensemble.csv in the
        /// output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Additionally write one wide-format CSV per run.
        #[arg(long)]
        raw: bool,
    },
    /// Enumerate a scenario grid and run every member.
    Sweep {
        /// Base case label or config file.
        base: String,
        /// Which grid to enumerate.
        #[arg(long, value_parser = ["demand", "weight", "full"])]
        kind: String,
        #[arg(long)]
        runs: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        horizon: Option<u32>,
        /// Directory for the per-scenario bundles and the index CSV.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Config(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Config(m) | CliError::Io(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Cases => {
            for case in builtin_cases() {
                println!("{:7} {}", case.case_label, case.description);
            }
            Ok(())
        }
        Command::Run {
            case_or_config,
            runs,
            seed,
            horizon,
            out,
            raw,
        } => {
            let config = load_scenario(&case_or_config, runs, seed, horizon)?;
            let out_dir = default_out_dir();
            let bundle = run_bundle(&config, &out_dir, out, raw)?;
            println!(
                "wrote {} ({} runs, horizon {})",
                bundle.ensemble_path.display(),
                config.replications,
                config.horizon
            );
            Ok(())
        }
        Command::Sweep {
            base,
            kind,
            runs,
            seed,
            horizon,
            out_dir,
        } => {
            let base_config = load_scenario(&base, runs, seed, horizon)?;
            let configs = match kind.as_str() {
                "demand" => demand_sweep(&base_config).map_err(|e| CliError::Config(e.to_string()))?,
                "weight" => weight_sweep(&base_config),
                "full" => full_sweep(&base_config),
                other => return Err(CliError::Usage(format!("unknown sweep kind '{other}'"))),
            };
            let dir = out_dir.unwrap_or_else(default_out_dir);
            std::fs::create_dir_all(&dir)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
            let mut bundles = Vec::with_capacity(configs.len());
            for config in &configs {
                let bundle = run_bundle(config, &dir, None, false)?;
                println!("wrote {}", bundle.ensemble_path.display());
                bundles.push(bundle);
            }
            let index_path = dir.join(format!("{}_{}_index.csv", base_config.case_label, kind));
            write_sweep_index(&configs, &index_path)
                .map_err(|e| CliError::Io(e.to_string()))?;
            println!("wrote {} ({} scenarios)", index_path.display(), bundles.len());
            Ok(())
        }
    }
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Resolve a case label or TOML path into a validated scenario, applying the
/// command-line overrides.
fn load_scenario(
    case_or_config: &str,
    runs: Option<u32>,
    seed: Option<u64>,
    horizon: Option<u32>,
) -> Result<ScenarioConfig, CliError> {
    let mut config = if case_or_config.starts_with("case") && !Path::new(case_or_config).exists() {
        case_by_label(case_or_config).map_err(|e| CliError::Usage(e.to_string()))?
    } else {
        let path = Path::new(case_or_config);
        if !path.exists() {
            return Err(CliError::Usage(format!(
                "'{case_or_config}' is neither a case label nor a readable config file"
            )));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        ScenarioConfig::from_toml_str(&text).map_err(|e| CliError::Config(e.to_string()))?
    };
    if let Some(runs) = runs {
        config.replications = runs;
    }
    if let Some(seed) = seed {
        config.base_seed = seed;
    }
    if let Some(horizon) = horizon {
        config.horizon = horizon;
    }
    config
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(config)
}

/// Run an ensemble and write its bundle (ensemble CSV, metadata, optional
/// raw per-run CSVs).
fn run_bundle(
    config: &ScenarioConfig,
    out_dir: &Path,
    explicit_out: Option<PathBuf>,
    raw: bool,
) -> Result<OutputBundle, CliError> {
    let frames = collect_frames(config).map_err(|e| CliError::Config(e.to_string()))?;
    let stats = aggregate(&frames, config.base_seed).map_err(|e| CliError::Config(e.to_string()))?;

    let ensemble_path =
        explicit_out.unwrap_or_else(|| out_dir.join(format!("{}_ensemble.csv", config.case_label)));
    if let Some(parent) = ensemble_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    write_ensemble_csv(&stats, &ensemble_path).map_err(|e| CliError::Io(e.to_string()))?;

    let metadata_path = ensemble_path.with_extension("meta.toml");
    write_metadata(config, &metadata_path).map_err(|e| CliError::Io(e.to_string()))?;

    let mut raw_paths = Vec::new();
    if raw {
        let stem = ensemble_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| config.case_label.clone());
        let dir = ensemble_path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        for (i, frame) in frames.iter().enumerate() {
            let path = dir.join(format!("{stem}_run{i:04}.csv"));
            write_raw_csv(frame, &path).map_err(|e| CliError::Io(e.to_string()))?;
            raw_paths.push(path);
        }
    }

    Ok(OutputBundle {
        label: config.case_label.clone(),
        ensemble_path,
        metadata_path,
        raw_paths,
    })
}
