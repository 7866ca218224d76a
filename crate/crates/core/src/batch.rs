//! Seeded Monte Carlo replication runner and ensemble aggregation.
//!
//! Replication `i` runs with seed `base_seed + i`, so a batch of `n` runs is
//! a prefix of any larger batch with the same base seed. Runs execute in
//! parallel; aggregation folds the frames in run-index order with a one-pass
//! mean/variance update, so the result does not depend on which run finished
//! first.

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{run, EngineError, TimeSeriesFrame};
use crate::scenario::ScenarioConfig;

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("replication {index} (seed {seed}) failed: {source}")]
    RunFailed {
        index: u32,
        seed: u64,
        source: EngineError,
    },
    #[error("convergence window {window} must be positive and smaller than the {ticks} recorded ticks")]
    WindowTooLarge { window: usize, ticks: usize },
    #[error("replication frames disagree in shape")]
    ShapeMismatch,
}

/// Per-tick, per-series statistics across the replication ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub series_names: Vec<String>,
    /// `mean[series][tick]`, likewise for the other statistics.
    pub mean: Vec<Vec<f64>>,
    pub std: Vec<Vec<f64>>,
    pub min: Vec<Vec<f64>>,
    pub max: Vec<Vec<f64>>,
    pub replications: u32,
    pub base_seed: u64,
}

impl EnsembleStats {
    pub fn tick_count(&self) -> usize {
        self.mean.first().map_or(0, |s| s.len())
    }

    pub fn series_index(&self, name: &str) -> Option<usize> {
        self.series_names.iter().position(|n| n == name)
    }

    pub fn mean_series(&self, name: &str) -> Option<&[f64]> {
        self.series_index(name).map(|i| self.mean[i].as_slice())
    }
}

/// Run every replication of the configured ensemble.
pub fn run_batch(config: &ScenarioConfig) -> Result<EnsembleStats, BatchError> {
    let frames = collect_frames(config)?;
    aggregate(&frames, config.base_seed)
}

/// Run the replications and keep the raw per-run frames.
///
/// Frames come back ordered by replication index. The first failure (by
/// index) is reported with its index and seed.
pub fn collect_frames(config: &ScenarioConfig) -> Result<Vec<TimeSeriesFrame>, BatchError> {
    let results: Vec<(u32, Result<TimeSeriesFrame, EngineError>)> = (0..config.replications)
        .into_par_iter()
        .map(|i| (i, run(config, config.base_seed.wrapping_add(i as u64))))
        .collect();
    let mut frames = Vec::with_capacity(results.len());
    for (index, result) in results {
        match result {
            Ok(frame) => frames.push(frame),
            Err(source) => {
                return Err(BatchError::RunFailed {
                    index,
                    seed: config.base_seed.wrapping_add(index as u64),
                    source,
                })
            }
        }
    }
    Ok(frames)
}

/// Fold frames into per-tick ensemble statistics, in run-index order.
pub fn aggregate(frames: &[TimeSeriesFrame], base_seed: u64) -> Result<EnsembleStats, BatchError> {
    let first = frames.first().ok_or(BatchError::ShapeMismatch)?;
    let series = first.series_names.len();
    let ticks = first.tick_count();
    for frame in frames {
        if frame.series_names != first.series_names || frame.tick_count() != ticks {
            return Err(BatchError::ShapeMismatch);
        }
    }

    let mut mean = vec![vec![0.0; ticks]; series];
    let mut m2 = vec![vec![0.0; ticks]; series];
    let mut min = vec![vec![f64::INFINITY; ticks]; series];
    let mut max = vec![vec![f64::NEG_INFINITY; ticks]; series];

    for (n, frame) in frames.iter().enumerate() {
        let count = (n + 1) as f64;
        for t in 0..ticks {
            let row = &frame.rows[t];
            for s in 0..series {
                let x = row[s];
                let delta = x - mean[s][t];
                mean[s][t] += delta / count;
                m2[s][t] += delta * (x - mean[s][t]);
                if x < min[s][t] {
                    min[s][t] = x;
                }
                if x > max[s][t] {
                    max[s][t] = x;
                }
            }
        }
    }

    let n = frames.len() as f64;
    let std = m2
        .into_iter()
        .map(|series_m2| {
            series_m2
                .into_iter()
                .map(|v| if n > 1.0 { (v / (n - 1.0)).sqrt() } else { 0.0 })
                .collect()
        })
        .collect();

    Ok(EnsembleStats {
        series_names: first.series_names.clone(),
        mean,
        std,
        min,
        max,
        replications: frames.len() as u32,
        base_seed,
    })
}

/// Stability verdict for one series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesStability {
    pub name: String,
    pub stabilized: bool,
    /// Least-squares slope of the ensemble mean over the trailing window.
    pub slope: f64,
    /// Standard deviation of the ensemble mean over the trailing window.
    pub wobble: f64,
}

/// Default slope tolerance per tick.
pub const DEFAULT_SLOPE_EPS: f64 = 1e-4;
/// Default tolerance on the trailing standard deviation of the mean.
pub const DEFAULT_STD_EPS: f64 = 0.01;

/// Judge per-series stability over the trailing `window` ticks: the mean
/// series must be nearly flat (small least-squares slope) and quiet (small
/// standard deviation around its window average).
pub fn convergence_report(
    stats: &EnsembleStats,
    window: usize,
    slope_eps: f64,
    std_eps: f64,
) -> Result<Vec<SeriesStability>, BatchError> {
    let ticks = stats.tick_count();
    if window == 0 || window >= ticks {
        return Err(BatchError::WindowTooLarge { window, ticks });
    }
    let mut out = Vec::with_capacity(stats.series_names.len());
    for (s, name) in stats.series_names.iter().enumerate() {
        let tail = &stats.mean[s][ticks - window..];
        let slope = least_squares_slope(tail);
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        let var = tail.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / tail.len() as f64;
        let wobble = var.sqrt();
        out.push(SeriesStability {
            name: name.clone(),
            stabilized: slope.abs() < slope_eps && wobble < std_eps,
            slope,
            wobble,
        });
    }
    Ok(out)
}

fn least_squares_slope(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let t_mean = (n - 1.0) / 2.0;
    let v_mean = values.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, v) in values.iter().enumerate() {
        let dt = t as f64 - t_mean;
        num += dt * (v - v_mean);
        den += dt * dt;
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::case_by_label;

    fn tiny(case: &str, reps: u32, horizon: u32) -> ScenarioConfig {
        let mut cfg = case_by_label(case).unwrap();
        cfg.producer_count = 10;
        cfg.horizon = horizon;
        cfg.replications = reps;
        cfg
    }

    #[test]
    fn single_replication_has_zero_std() {
        let stats = run_batch(&tiny("case3", 1, 10)).unwrap();
        for series in &stats.std {
            for v in series {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn collapsed_randomness_has_zero_std() {
        let mut cfg = tiny("case3", 4, 10);
        cfg.farm_area_range = (2.0, 2.0);
        cfg.proxy_params.trust_init_lo = 0.3;
        cfg.proxy_params.trust_init_hi = 0.3;
        cfg.proxy_params.risk_init_lo = 0.3;
        cfg.proxy_params.risk_init_hi = 0.3;
        cfg.proxy_params.income_lo = 1000.0;
        cfg.proxy_params.income_hi = 1000.0;
        // Supply-demand pricing with a degenerate initial draw: each price
        // band collapses to a point, so runs differ only in producer order,
        // which cannot change any aggregate.
        for buyer in &mut cfg.buyers {
            let mid = 0.5 * (buyer.gcb_price_range.0 + buyer.gcb_price_range.1);
            buyer.gcb_price_range = (mid, mid);
            if let Some((lo, hi)) = buyer.fresh_price_range {
                let fmid = 0.5 * (lo + hi);
                buyer.fresh_price_range = Some((fmid, fmid));
            }
        }
        let stats = run_batch(&cfg).unwrap();
        for (s, series) in stats.std.iter().enumerate() {
            for (t, v) in series.iter().enumerate() {
                assert!(
                    *v < 1e-12,
                    "series {} tick {t} has std {v}",
                    stats.series_names[s]
                );
            }
        }
    }

    #[test]
    fn ensemble_mean_matches_bruteforce_average() {
        let cfg = tiny("case2", 5, 8);
        let frames = collect_frames(&cfg).unwrap();
        let stats = aggregate(&frames, cfg.base_seed).unwrap();
        for s in 0..stats.series_names.len() {
            for t in 0..stats.tick_count() {
                let brute: f64 =
                    frames.iter().map(|f| f.rows[t][s]).sum::<f64>() / frames.len() as f64;
                assert!(
                    (stats.mean[s][t] - brute).abs() < 1e-10,
                    "series {s} tick {t}"
                );
                let lo = frames.iter().map(|f| f.rows[t][s]).fold(f64::INFINITY, f64::min);
                assert_eq!(stats.min[s][t], lo);
            }
        }
    }

    #[test]
    fn batch_prefix_property() {
        let cfg_small = tiny("case3", 3, 6);
        let mut cfg_large = cfg_small.clone();
        cfg_large.replications = 9;
        let small = collect_frames(&cfg_small).unwrap();
        let large = collect_frames(&cfg_large).unwrap();
        assert_eq!(&large[..3], &small[..]);
        let direct = run_batch(&cfg_small).unwrap();
        let truncated = aggregate(&large[..3], cfg_small.base_seed).unwrap();
        assert_eq!(direct, truncated);
    }

    #[test]
    fn aggregation_is_permutation_invariant() {
        let cfg = tiny("case2", 6, 5);
        let mut frames = collect_frames(&cfg).unwrap();
        let forward = aggregate(&frames, 0).unwrap();
        frames.reverse();
        let backward = aggregate(&frames, 0).unwrap();
        for s in 0..forward.series_names.len() {
            for t in 0..forward.tick_count() {
                assert!((forward.mean[s][t] - backward.mean[s][t]).abs() < 1e-10);
                assert!((forward.std[s][t] - backward.std[s][t]).abs() < 1e-10);
                assert_eq!(forward.min[s][t], backward.min[s][t]);
                assert_eq!(forward.max[s][t], backward.max[s][t]);
            }
        }
    }

    #[test]
    fn convergence_flags_flat_but_not_trending_series() {
        let constant = vec![0.4; 300];
        let drifting: Vec<f64> = (0..300).map(|t| 0.001 * t as f64).collect();
        let stats = EnsembleStats {
            series_names: vec!["flat".into(), "trend".into()],
            mean: vec![constant, drifting],
            std: vec![vec![0.0; 300]; 2],
            min: vec![vec![0.0; 300]; 2],
            max: vec![vec![1.0; 300]; 2],
            replications: 1,
            base_seed: 0,
        };
        let report = convergence_report(&stats, 200, DEFAULT_SLOPE_EPS, DEFAULT_STD_EPS).unwrap();
        assert!(report[0].stabilized);
        assert!(!report[1].stabilized);
        assert!(matches!(
            convergence_report(&stats, 300, DEFAULT_SLOPE_EPS, DEFAULT_STD_EPS),
            Err(BatchError::WindowTooLarge { .. })
        ));
    }

    #[test]
    fn failures_carry_the_first_run_index() {
        let mut cfg = tiny("case3", 3, 5);
        cfg.horizon = 5;
        // Drive a config invalid only at run time by zeroing the buyers
        // after validation would normally happen: simplest is an invalid
        // config that `run` rejects immediately.
        cfg.demand_split = vec![50.0, 49.0];
        let err = run_batch(&cfg).unwrap_err();
        match err {
            BatchError::RunFailed { index, .. } => assert_eq!(index, 0),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
