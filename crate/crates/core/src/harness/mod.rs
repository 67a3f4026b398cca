//! Reproducible experiments: configuration, seeding, the experiment drivers
//! and their on-disk reports.

pub mod classify;
pub mod config;
pub mod report;
pub mod scaling;
pub mod search;
pub mod seed;
pub mod stats;

pub use classify::{run_classify_experiment, run_classify_with_banks, ClassifyArm, ClassifyResult};
pub use config::{Experiment, ExperimentConfig, DEFAULT_MASTER_SEED};
pub use search::{run_search_experiment, Arm, SearchResult};
pub use seed::{derive_seed, stream, ExperimentRng, Role};
pub use report::{Report, SCHEMA_VERSION};
pub use scaling::{run_bias_experiment, run_scaling_experiment, BiasPoint, BiasResult, ScalingPoint, ScalingResult};
