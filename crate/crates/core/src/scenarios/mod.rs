//! Event-scripted closed-loop experiments, their traces and summary metrics.

mod config;
mod metrics;
mod oracle;
mod run;
mod trace;

pub use config::{Action, Event, ScenarioConfig};
pub use metrics::{
    compare, damping_metric, damping_metric_series, peak_deviation, relative_error_at,
    settling_time, settling_time_until, ColumnStats, Comparison, PEAK_FLOOR,
};
pub use oracle::{run_oracle_loop, OracleRun};
pub use run::{neural_controller, run_scenario, run_scenario_with_model, simulate_file};
pub use trace::{Trace, TraceRow, TRACE_HEADER};
