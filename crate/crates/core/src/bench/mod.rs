//! Incremental two-route experiments, bound audits and timing sweeps.

pub mod config;
pub mod run;
pub mod timing;

pub use config::{ExperimentConfig, DEFAULT_FIM_ROUTE_CAP};
pub use run::{audit_bounds, incremental_run, IncrementalRun, RouteGaps, RowViolation};
pub use timing::{timing_sweep, BenchSummary, TimingPoint};
