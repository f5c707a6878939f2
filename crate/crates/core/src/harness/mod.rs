//! Run configuration, reproducible Monte-Carlo orchestration and persisted results.

mod config;
mod result;
mod runs;

pub use config::{
    BesovConfig, BlockSource, EquivalenceConfig, ExperimentKind, GridConfig, InitialData,
    IntegrationConfig, NormsConfig, PathSource, RunConfig, ScatterConfig, SweepConfig,
    TailExperimentConfig, ThresholdConfig, TimeConfig, VariationConfig, VpExperimentConfig,
};
pub use result::{num, RunOutput, RunResult, Table};
pub use runs::{
    aggregate_paths, aggregate_scatter, ground_state_table, initial_state, proportion,
    read_path_csv, run, EquivalenceLevel, GroundStateTable, MeasureRecord, MonteCarloAggregates,
    NormRecord, Overrides, PathRecord, ScatterRecord, ScatterRow,
};
