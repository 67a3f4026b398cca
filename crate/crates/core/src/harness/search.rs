//! Three-strategy race to identify one of N Haar-random candidates.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Experiment, ExperimentConfig};
use super::seed::{stream, Role};
use super::stats::{median_shots, QuantileSeries};
use crate::belief::{run_identification, ObservableTable, RunTrace};
use crate::error::{Error, Result};
use crate::kernel::{haar_random_state, random_pauli_string};
use rand::Rng;

/// All traces of one strategy (or observable-set arm), indexed by trial.
#[derive(Clone, Debug, Serialize)]
pub struct Arm {
    pub label: String,
    #[serde(skip)]
    pub traces: Vec<RunTrace>,
    pub series: QuantileSeries,
    /// Median shots-to-threshold; `None` when more than half the trials
    /// never reached it.
    pub median_shots: Option<f64>,
    pub n_converged: usize,
    pub n_failed: usize,
}

impl Arm {
    pub fn new(label: impl Into<String>, traces: Vec<RunTrace>, max_shots: usize) -> Self {
        let shots: Vec<Option<usize>> = traces.iter().map(RunTrace::shots_to_threshold).collect();
        Self {
            label: label.into(),
            series: QuantileSeries::from_traces(&traces, max_shots),
            median_shots: median_shots(&shots),
            n_converged: traces.iter().filter(|t| t.converged).count(),
            n_failed: traces.iter().filter(|t| t.failure.is_some()).count(),
            traces,
        }
    }

    pub fn final_median_p_value(&self) -> Option<f64> {
        self.series.median.last().copied()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub config: ExperimentConfig,
    pub true_indices: Vec<usize>,
    pub arms: Vec<Arm>,
}

impl SearchResult {
    pub fn arm(&self, label: &str) -> Option<&Arm> {
        self.arms.iter().find(|a| a.label == label)
    }
}

/// Per trial: fresh candidates, fresh observables, one hidden candidate; every
/// strategy runs on the same table and hidden state with its own shot stream.
pub fn run_search_experiment(config: &ExperimentConfig) -> Result<SearchResult> {
    if config.experiment != Experiment::Search {
        return Err(Error::Config(format!("expected a search config, got {}", config.experiment)));
    }
    config.validate()?;
    let run_configs = config
        .strategies
        .iter()
        .map(|&s| config.run_config(s))
        .collect::<Result<Vec<_>>>()?;
    let seed = config.master_seed;

    let per_trial = (0..config.n_trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream(seed, trial, Role::States);
            let states = (0..config.n_candidates)
                .map(|_| haar_random_state(config.n_qubits, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let mut rng = stream(seed, trial, Role::Observables);
            let observables = (0..config.n_observables)
                .map(|_| random_pauli_string(config.n_qubits, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let table = ObservableTable::from_states(&states, observables)?;
            let truth = stream(seed, trial, Role::Truth).random_range(0..config.n_candidates);
            let traces = run_configs
                .iter()
                .map(|rc| run_identification(&table, truth, rc, &mut stream(seed, trial, Role::shots_for(rc.strategy))))
                .collect::<Result<Vec<_>>>()?;
            Ok((truth, traces))
        })
        .collect::<Result<Vec<_>>>()?;

    let true_indices = per_trial.iter().map(|(t, _)| *t).collect();
    let mut by_strategy: Vec<Vec<RunTrace>> = vec![Vec::with_capacity(config.n_trials); config.strategies.len()];
    for (_, traces) in per_trial {
        for (slot, trace) in by_strategy.iter_mut().zip(traces) {
            slot.push(trace);
        }
    }
    let arms = config
        .strategies
        .iter()
        .zip(by_strategy)
        .map(|(s, traces)| Arm::new(s.name(), traces, config.max_shots))
        .collect();
    Ok(SearchResult {
        config: config.clone(),
        true_indices,
        arms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::Strategy;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n_qubits: 3,
            n_candidates: 4,
            n_observables: 6,
            n_trials: 6,
            max_shots: 60,
            ..ExperimentConfig::defaults(Experiment::Search)
        }
    }

    #[test]
    fn single_candidate_converges_at_zero() {
        let cfg = ExperimentConfig {
            n_candidates: 1,
            n_trials: 1,
            ..small()
        };
        let r = run_search_experiment(&cfg).unwrap();
        for arm in &r.arms {
            assert_eq!(arm.median_shots, Some(0.0));
            assert_eq!(arm.series.median[0], 0.0);
        }
    }

    #[test]
    fn strategies_share_the_hidden_state() {
        let r = run_search_experiment(&small()).unwrap();
        assert_eq!(r.arms.len(), 3);
        assert_eq!(r.true_indices.len(), 6);
        for arm in &r.arms {
            assert_eq!(arm.traces.len(), 6);
            assert_eq!(arm.series.len(), 61);
            assert!(arm.series.is_ordered());
        }
        assert!(r.arm(Strategy::Random.name()).is_some());
    }

    #[test]
    fn reruns_are_identical() {
        let a = run_search_experiment(&small()).unwrap();
        let b = run_search_experiment(&small()).unwrap();
        assert_eq!(a.true_indices, b.true_indices);
        for (x, y) in a.arms.iter().zip(&b.arms) {
            assert_eq!(x.traces, y.traces);
        }
    }

    #[test]
    fn wrong_experiment_kind() {
        assert!(run_search_experiment(&ExperimentConfig::defaults(Experiment::Bias)).is_err());
    }
}
