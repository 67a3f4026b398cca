//! First-shot information gain over Haar candidates: its decay with register
//! size and its small-sample bias with candidate count.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Experiment, ExperimentConfig};
use super::seed::{stream, Role};
use crate::analysis::{
    approx_info_gain, expected_sample_info_gain, haar_moments, sample_moments,
};
use crate::belief::{expected_info_gain, BeliefState, ObservableTable};
use crate::error::{Error, Result};
use crate::kernel::{haar_random_state, random_pauli_string, Statevector};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n_qubits: usize,
    /// Exact gain under the uniform prior, averaged over observables.
    pub mean_exact_gain: f64,
    /// Second-order estimate from each column's sample moments, averaged.
    pub mean_approx_gain: f64,
    /// Haar prediction including the `1 - 1/N` sampling factor.
    pub predicted_gain: f64,
}

impl ScalingPoint {
    pub fn relative_error(&self) -> f64 {
        (self.mean_exact_gain - self.predicted_gain).abs() / self.predicted_gain
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingResult {
    pub config: ExperimentConfig,
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of `log2(mean_exact_gain)` against `n`.
    pub slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiasPoint {
    pub n_candidates: usize,
    pub mean_exact_gain: f64,
    /// `mean_exact_gain / plateau_gain`.
    pub ratio_to_plateau: f64,
    /// `1 - 1/N`.
    pub expected_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BiasResult {
    pub config: ExperimentConfig,
    /// Mean unbiased variance of each observable over the auxiliary states.
    pub plateau_variance: f64,
    /// `plateau_variance / (2 ln 2)`, the large-N limit of the mean gain.
    pub plateau_gain: f64,
    /// Same limit from the analytic Haar variance.
    pub analytic_plateau_gain: f64,
    pub points: Vec<BiasPoint>,
}

fn haar_states(n_qubits: usize, count: usize, seed: u64, index: u64) -> Result<Vec<Statevector>> {
    let mut rng = stream(seed, index, Role::States);
    (0..count).map(|_| haar_random_state(n_qubits, &mut rng)).collect()
}

fn mean_uniform_gain(table: &ObservableTable) -> Result<f64> {
    let prior = BeliefState::uniform(table.n_candidates())?;
    let total = table
        .columns()
        .map(|c| expected_info_gain(&prior, c))
        .sum::<Result<f64>>()?;
    Ok(total / table.n_observables() as f64)
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// For each register size: `N` Haar candidates, `J` random Pauli strings,
/// uniform prior.
pub fn run_scaling_experiment(config: &ExperimentConfig) -> Result<ScalingResult> {
    if config.experiment != Experiment::Scaling {
        return Err(Error::Config(format!("expected a scaling config, got {}", config.experiment)));
    }
    config.validate()?;
    let [lo, hi] = config.qubit_range;
    let seed = config.master_seed;
    let points = (lo..=hi)
        .into_par_iter()
        .map(|n| {
            let states = haar_states(n, config.n_candidates, seed, n as u64)?;
            let mut rng = stream(seed, n as u64, Role::Observables);
            let observables = (0..config.n_observables)
                .map(|_| random_pauli_string(n, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let table = ObservableTable::from_states(&states, observables)?;
            let mut approx = 0.0;
            for column in table.columns() {
                approx += approx_info_gain(&sample_moments(column)?, config.n_candidates)?;
            }
            let d = (n as f64).exp2();
            Ok(ScalingPoint {
                n_qubits: n,
                mean_exact_gain: mean_uniform_gain(&table)?,
                mean_approx_gain: approx / table.n_observables() as f64,
                predicted_gain: expected_sample_info_gain(haar_moments(0.0, d, n)?.variance, config.n_candidates)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let log_points: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.n_qubits as f64, p.mean_exact_gain.log2()))
        .collect();
    let slope = if log_points.len() >= 2 { slope(&log_points) } else { f64::NAN };
    Ok(ScalingResult {
        config: config.clone(),
        points,
        slope,
    })
}

/// Fixed register and observables; for each candidate count the mean gain is
/// averaged over `n_trials` independent candidate sets and compared with the
/// large-N plateau estimated from `plateau_states` auxiliary states.
pub fn run_bias_experiment(config: &ExperimentConfig) -> Result<BiasResult> {
    if config.experiment != Experiment::Bias {
        return Err(Error::Config(format!("expected a bias config, got {}", config.experiment)));
    }
    config.validate()?;
    let n = config.n_qubits;
    let seed = config.master_seed;
    let mut rng = stream(seed, 0, Role::Observables);
    let observables = (0..config.n_observables)
        .map(|_| random_pauli_string(n, &mut rng))
        .collect::<Result<Vec<_>>>()?;

    let aux = haar_states(n, config.plateau_states, seed, u64::MAX)?;
    let aux_table = ObservableTable::from_states(&aux, observables.clone())?;
    let mut var_sum = 0.0;
    for column in aux_table.columns() {
        var_sum += sample_moments(column)?.var_unbiased;
    }
    let plateau_variance = var_sum / aux_table.n_observables() as f64;
    let plateau_gain = plateau_variance / (2.0 * std::f64::consts::LN_2);
    let d = (n as f64).exp2();
    let analytic_plateau_gain = haar_moments(0.0, d, n)?.variance / (2.0 * std::f64::consts::LN_2);

    let [lo, hi] = config.candidate_range;
    let points = (lo..=hi)
        .into_par_iter()
        .map(|count| {
            let mut total = 0.0;
            for r in 0..config.n_trials as u64 {
                let states = haar_states(n, count, seed, ((count as u64) << 32) | r)?;
                total += mean_uniform_gain(&ObservableTable::from_states(&states, observables.clone())?)?;
            }
            let mean_exact_gain = total / config.n_trials as f64;
            Ok(BiasPoint {
                n_candidates: count,
                mean_exact_gain,
                ratio_to_plateau: mean_exact_gain / plateau_gain,
                expected_ratio: 1.0 - 1.0 / count as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BiasResult {
        config: config.clone(),
        plateau_variance,
        plateau_gain,
        analytic_plateau_gain,
        points,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|x| (x as f64, 3.0 - 1.5 * x as f64)).collect();
        assert_abs_diff_eq!(slope(&pts), -1.5, epsilon = 1e-12);
    }

    #[test]
    fn small_scaling_run_decays() {
        let cfg = ExperimentConfig {
            qubit_range: [2, 5],
            n_candidates: 30,
            n_observables: 30,
            ..ExperimentConfig::defaults(Experiment::Scaling)
        };
        let r = run_scaling_experiment(&cfg).unwrap();
        assert_eq!(r.points.len(), 4);
        assert!(r.points.windows(2).all(|w| w[1].mean_exact_gain < w[0].mean_exact_gain));
        assert!(r.slope < -0.5);
        for p in &r.points {
            assert!(p.mean_exact_gain > 0.0 && p.mean_approx_gain > 0.0);
        }
    }

    #[test]
    fn small_bias_run() {
        let cfg = ExperimentConfig {
            n_qubits: 3,
            n_observables: 20,
            n_trials: 4,
            candidate_range: [2, 5],
            plateau_states: 200,
            ..ExperimentConfig::defaults(Experiment::Bias)
        };
        let r = run_bias_experiment(&cfg).unwrap();
        assert_eq!(r.points.len(), 4);
        assert_eq!(r.points[0].expected_ratio, 0.5);
        assert!(r.plateau_gain > 0.0);
        // second-order estimate 2^n / (4^n - 1) at n = 3
        assert_abs_diff_eq!(r.analytic_plateau_gain, 8.0 / 63.0 / (2.0 * std::f64::consts::LN_2), epsilon = 1e-15);
    }
}
