//! CSV and metadata serialization.
//!
//! All numeric output uses `.` as the decimal separator, fixed six-decimal
//! formatting, and LF line endings, so re-running the same configuration
//! overwrites files byte-identically.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::batch::EnsembleStats;
use crate::engine::TimeSeriesFrame;
use crate::scenario::ScenarioConfig;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("i/o failure on '{path}': {source}")]
    Io { path: PathBuf, source: io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Everything one batch invocation wrote to disk.
#[derive(Debug, Clone)]
pub struct OutputBundle {
    pub label: String,
    pub ensemble_path: PathBuf,
    pub metadata_path: PathBuf,
    pub raw_paths: Vec<PathBuf>,
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// Long-format ensemble CSV: one row per tick and series.
pub fn write_ensemble_csv(stats: &EnsembleStats, path: &Path) -> Result<(), OutputError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<fs::File>, line: &str| -> io::Result<()> {
        w.write_all(line.as_bytes())?;
        w.write_all(b"\n")
    };
    write(&mut w, "tick,series,mean,std,min,max").map_err(io_err(path))?;
    for t in 0..stats.tick_count() {
        for (s, name) in stats.series_names.iter().enumerate() {
            let line = format!(
                "{t},{name},{},{},{},{}",
                fmt(stats.mean[s][t]),
                fmt(stats.std[s][t]),
                fmt(stats.min[s][t]),
                fmt(stats.max[s][t]),
            );
            write(&mut w, &line).map_err(io_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

/// Wide-format raw CSV for a single run: one row per tick.
pub fn write_raw_csv(frame: &TimeSeriesFrame, path: &Path) -> Result<(), OutputError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut header = String::from("tick");
    for name in &frame.series_names {
        header.push(',');
        header.push_str(name);
    }
    header.push('\n');
    w.write_all(header.as_bytes()).map_err(io_err(path))?;
    for (t, row) in frame.rows.iter().enumerate() {
        let mut line = t.to_string();
        for v in row {
            line.push(',');
            line.push_str(&fmt(*v));
        }
        line.push('\n');
        w.write_all(line.as_bytes()).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Config echo plus provenance: enough to reproduce the ensemble exactly.
pub fn write_metadata(config: &ScenarioConfig, path: &Path) -> Result<(), OutputError> {
    let mut text = String::new();
    text.push_str(&format!(
        "artifact_version = \"{}\"\n",
        env!("CARGO_PKG_VERSION")
    ));
    text.push_str(&format!("base_seed = {}\n", config.base_seed));
    text.push_str(&format!("replications = {}\n", config.replications));
    text.push_str(&format!("horizon = {}\n", config.horizon));
    text.push_str("\n[config]\n");
    text.push_str(&config.to_toml_string());
    fs::write(path, text).map_err(io_err(path))
}

/// Index CSV mapping sweep labels to their defining parameters.
pub fn write_sweep_index(configs: &[ScenarioConfig], path: &Path) -> Result<(), OutputError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    w.write_all(b"label,description,weight_trust,weight_risk,weight_cost,threshold,demand_split\n")
        .map_err(io_err(path))?;
    for cfg in configs {
        let split = cfg
            .demand_split
            .iter()
            .map(|s| format!("{s:.0}"))
            .collect::<Vec<_>>()
            .join("/");
        let line = format!(
            "{},{},{},{},{},{},{}\n",
            cfg.case_label,
            cfg.description.replace(',', ";"),
            fmt(cfg.weight_mix.trust()),
            fmt(cfg.weight_mix.risk()),
            fmt(cfg.weight_mix.cost()),
            fmt(cfg.threshold.value()),
            split
        );
        w.write_all(line.as_bytes()).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}
