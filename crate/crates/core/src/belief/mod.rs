//! Bayesian belief over candidate states and the greedy
//! information-gain measurement loop.

mod gain;
mod run;
mod state;
mod table;

pub use gain::{expected_class_info_gain, expected_info_gain, outcome_probability};
pub use run::{
    run_classification, run_identification, select_observable, GainTarget, RunConfig, RunTrace, Selector,
    ShotRecord, ShotSource, Strategy,
};
pub use state::{BeliefState, ClassLabels, EVIDENCE_FLOOR};
pub use table::ObservableTable;
