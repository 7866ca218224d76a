//! Discrete-time agent-based simulator of a smallholder coffee value chain.
//!
//! Producers, a cooperative, markets, and a loan provider trade under
//! decisions governed by trust, risk attitude, and transaction costs. A
//! seeded Monte Carlo batch runner reproduces five scenario cases and the
//! demand/weight/threshold parameter sweeps, writing long-format CSV
//! ensembles.
//!
//! The crate splits into:
//! - [`eval`]: the trust/risk/cost evaluation mathematics and the evidence
//!   ledger;
//! - [`proxy`]: the simplified producer-side trust, risk, and funds
//!   recursions plus buyer scoring;
//! - [`agents`]: agent state and per-role rules (production, processing,
//!   pricing, demand caps, the loan book);
//! - [`scenario`]: the scenario catalog, sweep enumeration, and the TOML
//!   configuration schema;
//! - [`engine`]: the tick loop and the eight monitored series;
//! - [`batch`]: seeded replication, ensemble statistics, convergence checks;
//! - [`output`]: CSV and metadata writers.

pub mod agents;
pub mod batch;
pub mod engine;
pub mod eval;
pub mod output;
pub mod proxy;
pub mod scenario;

pub use batch::{collect_frames, convergence_report, run_batch, EnsembleStats};
pub use engine::{run, TimeSeriesFrame, World};
pub use scenario::{builtin_cases, case_by_label, demand_sweep, full_sweep, weight_sweep, ScenarioConfig};
