use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::belief::{RunConfig, Strategy};
use crate::error::{Error, Result};
use crate::kernel::hamiltonian::MAX_DENSE_SOLVE_QUBITS;
use crate::kernel::MAX_DENSE_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Search,
    Scaling,
    Bias,
    Classify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Search => "search",
            Experiment::Scaling => "scaling",
            Experiment::Bias => "bias",
            Experiment::Classify => "classify",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Experiment::Search, Experiment::Scaling, Experiment::Bias, Experiment::Classify]
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

pub const DEFAULT_MASTER_SEED: u64 = 20_240_917;

/// Full description of one experiment run. Every output is a pure function
/// of this value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Register size (search, bias, classify).
    pub n_qubits: usize,
    /// Inclusive register range (scaling).
    pub qubit_range: [usize; 2],
    /// Candidate count N (search, scaling).
    pub n_candidates: usize,
    /// Inclusive candidate-count range (bias).
    pub candidate_range: [usize; 2],
    /// Observable count J (search, scaling, bias). The classification
    /// experiment sizes its random set to match the Hamiltonian pool.
    pub n_observables: usize,
    /// Trials (search), candidate-set repeats per N (bias). Classification
    /// uses every held-out state.
    pub n_trials: usize,
    pub p_threshold: f64,
    pub max_shots: usize,
    pub strategies: Vec<Strategy>,
    /// Gaussian noise on expectation values; classification runs sigma = 0
    /// and, when positive, this sigma as a second arm.
    pub noise_sigma: f64,
    pub prob_floor: f64,
    /// Auxiliary Haar states for the bias plateau estimate.
    pub plateau_states: usize,
    /// Training states per class (classification); the rest of each grid is test.
    pub train_per_class: usize,
    pub master_seed: u64,
    pub out_dir: Option<PathBuf>,
    pub svg: bool,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            n_qubits: 10,
            qubit_range: [2, 8],
            n_candidates: 20,
            candidate_range: [2, 40],
            n_observables: 20,
            n_trials: 100,
            p_threshold: 0.99,
            max_shots: 300,
            strategies: Strategy::ALL.to_vec(),
            noise_sigma: 0.0,
            prob_floor: 0.0,
            plateau_states: 2000,
            train_per_class: 75,
            master_seed: DEFAULT_MASTER_SEED,
            out_dir: None,
            svg: false,
        };
        match experiment {
            Experiment::Search => base,
            Experiment::Scaling => Self {
                n_candidates: 100,
                n_observables: 100,
                n_trials: 1,
                ..base
            },
            Experiment::Bias => Self {
                n_qubits: 5,
                n_observables: 200,
                n_trials: 20,
                ..base
            },
            Experiment::Classify => Self {
                n_qubits: 8,
                strategies: vec![Strategy::InfoOptimized],
                noise_sigma: 0.05,
                ..base
            },
        }
    }

    /// Defaults for `experiment` overlaid with the keys present in `json`.
    pub fn from_json(experiment: Experiment, json: &str) -> Result<Self> {
        let overrides: Value =
            serde_json::from_str(json).map_err(|e| Error::Config(format!("invalid config JSON: {e}")))?;
        let Value::Object(overrides) = overrides else {
            return Err(Error::Config("config must be a JSON object".into()));
        };
        if let Some(v) = overrides.get("experiment") {
            if v.as_str() != Some(experiment.name()) {
                return Err(Error::Config(format!(
                    "config is for experiment {v}, but {experiment} was requested"
                )));
            }
        }
        let mut merged = serde_json::to_value(Self::defaults(experiment)).expect("config serializes");
        let obj = merged.as_object_mut().expect("config is an object");
        for (k, v) in overrides {
            obj.insert(k, v);
        }
        let cfg: Self =
            serde_json::from_value(merged).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(experiment: Experiment, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(experiment, &text)
    }

    pub fn run_config(&self, strategy: Strategy) -> Result<RunConfig> {
        let cfg = RunConfig {
            p_threshold: self.p_threshold,
            max_shots: self.max_shots,
            strategy,
            prob_floor: self.prob_floor,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        for (name, v) in [
            ("n_candidates", self.n_candidates),
            ("n_observables", self.n_observables),
            ("n_trials", self.n_trials),
            ("max_shots", self.max_shots),
        ] {
            if v == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if !(self.p_threshold > 0.5 && self.p_threshold < 1.0) {
            return bad(format!("p_threshold must lie in (0.5, 1), got {}", self.p_threshold));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise_sigma must be >= 0, got {}", self.noise_sigma));
        }
        if !(self.prob_floor >= 0.0 && self.prob_floor < 1.0) {
            return bad(format!("prob_floor must lie in [0, 1), got {}", self.prob_floor));
        }
        match self.experiment {
            Experiment::Search => {
                check_qubits(self.n_qubits, MAX_DENSE_QUBITS)?;
                if self.strategies.is_empty() {
                    return bad("at least one strategy is required".into());
                }
            }
            Experiment::Scaling => {
                let [lo, hi] = self.qubit_range;
                if lo == 0 || lo > hi || hi > MAX_DENSE_QUBITS {
                    return bad(format!("qubit_range {lo}..={hi} outside 1..={MAX_DENSE_QUBITS}"));
                }
                if self.n_candidates < 2 {
                    return bad("scaling needs at least 2 candidates".into());
                }
            }
            Experiment::Bias => {
                check_qubits(self.n_qubits, MAX_DENSE_QUBITS)?;
                let [lo, hi] = self.candidate_range;
                if lo < 2 || lo > hi {
                    return bad(format!("candidate_range {lo}..={hi} must start at 2 or more"));
                }
                if self.plateau_states < 2 {
                    return bad("plateau_states must be at least 2".into());
                }
            }
            Experiment::Classify => {
                if self.n_qubits < 3 {
                    return bad("classification chains need at least 3 qubits".into());
                }
                check_qubits(self.n_qubits, MAX_DENSE_SOLVE_QUBITS)?;
                if self.train_per_class == 0 || self.train_per_class >= 100 {
                    return bad(format!("train_per_class must lie in 1..100, got {}", self.train_per_class));
                }
                if self.strategies.len() != 1 {
                    return bad("classification takes exactly one strategy".into());
                }
            }
        }
        Ok(())
    }
}

fn check_qubits(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::Config(format!("n_qubits = {n} outside 1..={max}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for e in [Experiment::Search, Experiment::Scaling, Experiment::Bias, Experiment::Classify] {
            ExperimentConfig::defaults(e).validate().unwrap();
        }
        let s = ExperimentConfig::defaults(Experiment::Search);
        assert_eq!((s.n_qubits, s.n_candidates, s.n_observables, s.n_trials), (10, 20, 20, 100));
        assert_eq!((s.p_threshold, s.max_shots), (0.99, 300));
    }

    #[test]
    fn json_overrides_merge_onto_defaults() {
        let cfg = ExperimentConfig::from_json(Experiment::Search, r#"{"n_qubits": 4, "strategies": ["random"]}"#).unwrap();
        assert_eq!(cfg.n_qubits, 4);
        assert_eq!(cfg.strategies, vec![Strategy::Random]);
        assert_eq!(cfg.n_candidates, 20);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_json(Experiment::Search, r#"{"p_threshold": 0.4}"#).is_err());
        assert!(ExperimentConfig::from_json(Experiment::Search, r#"{"noise_sigma": -1}"#).is_err());
        assert!(ExperimentConfig::from_json(Experiment::Search, r#"{"n_trials": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(Experiment::Search, r#"{"bogus": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(Experiment::Search, r#"{"experiment": "bias"}"#).is_err());
        assert!(ExperimentConfig::from_json(Experiment::Scaling, r#"{"qubit_range": [5, 3]}"#).is_err());
        assert!(ExperimentConfig::from_json(Experiment::Scaling, r#"{"qubit_range": [2, 15]}"#).is_err());
        assert!(ExperimentConfig::from_json(Experiment::Bias, r#"{"candidate_range": [1, 3]}"#).is_err());
        assert!(ExperimentConfig::from_json(Experiment::Search, "[1]").is_err());
    }
}
