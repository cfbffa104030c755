//! The deterministic global-clock simulator.

pub mod cost;
pub mod instance;
pub mod metrics;
pub mod run;

pub use cost::CostModel;
pub use instance::{Block, TopologyInstance};
pub use metrics::{
    csv_header, merge_runs, samples_to_csv, Band, CheckpointSample, MetricRecorder, MetricSample,
    BUCKET_CYCLES, OVERFLOW_INDEX_NAMES,
};
pub use run::{
    deploy, program_schedule, run, RunOptions, RunResult, SinkTuple, DEFAULT_CYCLE_CAP,
};
