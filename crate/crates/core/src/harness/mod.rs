//! Experiment configuration, seeded execution, artifacts, the socket
//! transport and the command-line interface.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod output;
pub mod transport;

pub use config::{ExperimentConfig, Format, Transport};
pub use experiments::{run_experiment, ExperimentResult, StrategyInfo, TrialStats, STRATEGIES};
pub use output::{report_rows, reports_csv, CsvRow};
pub use transport::{
    connect, read_frame, run_remote, serve_stream, write_frame, RemoteResult, Server, MAX_FRAME,
};
