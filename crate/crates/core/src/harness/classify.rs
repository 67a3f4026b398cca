//! Ground-state classification across Hamiltonian families, comparing the
//! Hamiltonian observable pool against an equally sized random Pauli set.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Experiment, ExperimentConfig};
use super::search::Arm;
use super::seed::{stream, Role};
use super::stats::binomial_upper_tail;
use crate::belief::{run_classification, ClassLabels, ObservableTable};
use crate::error::{Error, Result};
use crate::kernel::{perturb_expectations, perturb_values, random_pauli_string, PauliString, Statevector};
use crate::zoo::{grid_description, ground_state_bank, observable_pool, Family, GroundStateBank};

pub const HAMILTONIAN_SET: &str = "hamiltonian";
pub const RANDOM_SET: &str = "random";

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyArm {
    pub observable_set: &'static str,
    pub sigma: f64,
    #[serde(flatten)]
    pub arm: Arm,
    /// Predicted family index per test state.
    pub predictions: Vec<usize>,
    pub correct: usize,
    pub accuracy: f64,
    /// One-sided binomial p-value of `correct` against chance (1 / classes).
    pub chance_p_value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyResult {
    pub config: ExperimentConfig,
    pub families: Vec<Family>,
    pub grids: Vec<String>,
    pub n_train: usize,
    /// True family index per test state.
    pub test_labels: Vec<usize>,
    pub hamiltonian_observables: Vec<PauliString>,
    pub random_observables: Vec<PauliString>,
    /// Ordered (hamiltonian, 0), (random, 0), then the same at `noise_sigma`
    /// when it is positive.
    pub arms: Vec<ClassifyArm>,
}

impl ClassifyResult {
    pub fn arm(&self, observable_set: &str, sigma: f64) -> Option<&ClassifyArm> {
        self.arms
            .iter()
            .find(|a| a.observable_set == observable_set && a.sigma == sigma)
    }
}

/// Builds the four ground-state banks and classifies.
pub fn run_classify_experiment(config: &ExperimentConfig) -> Result<ClassifyResult> {
    config.validate()?;
    let banks = Family::ALL
        .iter()
        .map(|&f| ground_state_bank(f, config.n_qubits))
        .collect::<Result<Vec<_>>>()?;
    run_classify_with_banks(config, &banks)
}

/// Classification against precomputed banks, one per class in label order.
/// Each bank's first `train_per_class` entries are candidates; the rest are
/// held-out test states.
pub fn run_classify_with_banks(config: &ExperimentConfig, banks: &[GroundStateBank]) -> Result<ClassifyResult> {
    if config.experiment != Experiment::Classify {
        return Err(Error::Config(format!("expected a classify config, got {}", config.experiment)));
    }
    config.validate()?;
    if banks.len() < 2 {
        return Err(Error::Input("classification needs at least two banks".into()));
    }
    let n = config.n_qubits;
    let mut train: Vec<Statevector> = Vec::new();
    let mut train_labels = Vec::new();
    let mut test: Vec<Statevector> = Vec::new();
    let mut test_labels = Vec::new();
    for (label, bank) in banks.iter().enumerate() {
        if bank.n_qubits != n {
            return Err(Error::Dimension {
                expected: n,
                got: bank.n_qubits,
            });
        }
        if bank.entries.len() <= config.train_per_class {
            return Err(Error::Input(format!(
                "{} bank has {} entries, need more than {} to leave a test split",
                bank.family,
                bank.entries.len(),
                config.train_per_class
            )));
        }
        for (k, entry) in bank.entries.iter().enumerate() {
            if k < config.train_per_class {
                train.push(entry.state.clone());
                train_labels.push(label);
            } else {
                test.push(entry.state.clone());
                test_labels.push(label);
            }
        }
    }
    let labels = ClassLabels::new(train_labels)?;
    let n_classes = banks.len();

    let hamiltonian_observables = observable_pool(n)?;
    let mut rng = stream(config.master_seed, 0, Role::Observables);
    let random_observables = (0..hamiltonian_observables.len())
        .map(|_| random_pauli_string(n, &mut rng))
        .collect::<Result<Vec<_>>>()?;

    let strategy = config.strategies[0];
    let run_cfg = config.run_config(strategy)?;
    let mut sigmas = vec![0.0];
    if config.noise_sigma > 0.0 {
        sigmas.push(config.noise_sigma);
    }
    let sets = [
        (HAMILTONIAN_SET, &hamiltonian_observables),
        (RANDOM_SET, &random_observables),
    ];

    let mut arms = Vec::new();
    for &sigma in &sigmas {
        for (set_index, (set_name, observables)) in sets.iter().enumerate() {
            let set_index = set_index as u64;
            let exact = ObservableTable::from_states(&train, (*observables).clone())?;
            let test_table = ObservableTable::from_states(&test, (*observables).clone())?;
            let table = perturb_expectations(&exact, sigma, &mut stream(config.master_seed, set_index, Role::Noise))?;
            let traces = (0..test.len())
                .into_par_iter()
                .map(|t| {
                    let mut source = test_table.row(t);
                    let noise_index = ((set_index + 1) << 32) | t as u64;
                    perturb_values(&mut source, sigma, &mut stream(config.master_seed, noise_index, Role::Noise))?;
                    // both noise levels share a shot stream per test state
                    let mut shots = stream(config.master_seed, t as u64, Role::Shots(set_index as u32));
                    run_classification(&table, &labels, &source, &run_cfg, &mut shots)
                })
                .collect::<Result<Vec<_>>>()?;
            let predictions: Vec<usize> = traces.iter().map(|t| t.prediction).collect();
            let correct = predictions.iter().zip(&test_labels).filter(|(p, l)| p == l).count();
            let label = if sigma == 0.0 {
                set_name.to_string()
            } else {
                format!("{set_name}-noisy")
            };
            arms.push(ClassifyArm {
                observable_set: set_name,
                sigma,
                arm: Arm::new(label, traces, config.max_shots),
                predictions,
                correct,
                accuracy: correct as f64 / test.len() as f64,
                chance_p_value: binomial_upper_tail(correct, test.len(), 1.0 / n_classes as f64),
            });
        }
    }

    Ok(ClassifyResult {
        config: config.clone(),
        families: banks.iter().map(|b| b.family).collect(),
        grids: banks.iter().map(|b| grid_description(b.family).to_string()).collect(),
        n_train: train.len(),
        test_labels,
        hamiltonian_observables,
        random_observables,
        arms,
    })
}
