//! Experiment orchestration: configs, multi-trial runs, results and checks.

pub mod checks;
pub mod config;
pub mod experiment;
pub mod plot;
pub mod rate;
pub mod results;

pub use checks::{assumption_suite, CheckOptions, CheckOutcome};
pub use config::{ExperimentConfig, GameFile, GameSource, InitPolicy, OutputConfig, TopologyConfig};
pub use experiment::{aggregate_trials, compare, run_experiment, CompareOutput, Experiment, ExperimentOutcome};
pub use plot::emit_plot_script;
pub use rate::{fit_rate_slope, loglog_slope};
pub use results::{read_results, write_results, AggregateResult, AggregateRow, CSV_HEADER};
