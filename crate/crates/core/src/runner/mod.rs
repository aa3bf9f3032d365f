//! Experiment orchestration: configuration, single-child and cohort runs,
//! summaries and result files.

pub mod config;
pub mod output;
pub mod sim;
pub mod summary;

pub use config::{parse_registry, DomainSource, ExperimentConfig, CONFIG_KEYS};
pub use output::{write_children_csv, write_summary_csv, write_svg, write_trajectories_csv};
pub use sim::{
    run_cohort, run_echild, run_echild_traced, run_profiles, ChildRun, CohortRun, Execution,
    RunContext, Sample, Trajectory,
};
pub use summary::{summarize, Summary};
