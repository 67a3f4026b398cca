//! Second-order approximations of the expected per-shot information gain
//! and the Haar moments that feed them.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{PauliString, MAX_DENSE_QUBITS};

/// Biased (divisor `N`) and unbiased (divisor `N - 1`) moments of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub mean_biased: f64,
    pub var_biased: f64,
    pub mean_unbiased: f64,
    pub var_unbiased: f64,
    pub count: usize,
}

pub fn sample_moments(values: &[f64]) -> Result<SampleStats> {
    let count = values.len();
    if count < 2 {
        return Err(Error::Size(format!("need at least 2 values for sample moments, got {count}")));
    }
    let n = count as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    Ok(SampleStats {
        mean_biased: mean,
        var_biased: ss / n,
        mean_unbiased: mean,
        var_unbiased: ss / (n - 1.0),
        count,
    })
}

/// `I ≈ V / (2 ln 2) + E^2 / (2 ln 2) (1 - 2/N)` for a uniform prior over
/// `n_candidates` states whose expectations have biased moments `stats`.
pub fn approx_info_gain(stats: &SampleStats, n_candidates: usize) -> Result<f64> {
    if n_candidates < 2 {
        return Err(Error::Size("approximation needs at least 2 candidates".into()));
    }
    let n = n_candidates as f64;
    Ok((stats.var_biased + stats.mean_biased.powi(2) * (1.0 - 2.0 / n)) / (2.0 * LN_2))
}

/// Mean and variance of `<O>` over Haar-random states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarMoments {
    pub mean: f64,
    pub variance: f64,
}

/// `E = Tr(O) / 2^n`, `V = Tr(O^2) / (2^{2n} - 1) - Tr(O)^2 / 2^{2n}`.
///
/// This is the second-order estimate used throughout; it is exact only to
/// leading order in `2^-n`.
pub fn haar_moments(trace: f64, trace_sq: f64, n_qubits: usize) -> Result<HaarMoments> {
    if n_qubits == 0 || n_qubits > 26 {
        return Err(Error::Size(format!("n_qubits = {n_qubits} unsupported")));
    }
    let d = (n_qubits as f64).exp2();
    let d2 = d * d;
    Ok(HaarMoments {
        mean: trace / d,
        variance: (trace_sq / (d2 - 1.0) - trace * trace / d2).max(0.0),
    })
}

/// Specialization to a non-identity Pauli string: traces are `0` and `2^n`.
pub fn haar_moments_pauli(observable: &PauliString) -> Result<HaarMoments> {
    if observable.is_identity() {
        return Err(Error::Domain("identity string is not a valid measurement".into()));
    }
    let n = observable.n_qubits();
    haar_moments(observable.trace(), (n as f64).exp2(), n)
}

/// `E[I_s] ≈ V_Haar / (2 ln 2) (1 - 1/N)`.
pub fn expected_sample_info_gain(haar_variance: f64, n_candidates: usize) -> Result<f64> {
    if n_candidates < 2 {
        return Err(Error::Size("expected sample gain needs at least 2 candidates".into()));
    }
    if haar_variance.is_nan() || haar_variance < 0.0 {
        return Err(Error::Domain(format!("variance must be >= 0, got {haar_variance}")));
    }
    Ok(haar_variance / (2.0 * LN_2) * (1.0 - 1.0 / n_candidates as f64))
}

/// Predicted mean first-shot gain of a non-identity Pauli string over
/// `n_candidates` Haar states, for each register size in `n_min..=n_max`.
pub fn predicted_scaling(n_min: usize, n_max: usize, n_candidates: usize) -> Result<Vec<(usize, f64)>> {
    if n_min == 0 || n_min > n_max || n_max > MAX_DENSE_QUBITS {
        return Err(Error::Size(format!(
            "qubit range {n_min}..={n_max} outside 1..={MAX_DENSE_QUBITS}"
        )));
    }
    (n_min..=n_max)
        .map(|n| {
            let d = (n as f64).exp2();
            let v = haar_moments(0.0, d, n)?.variance;
            Ok((n, expected_sample_info_gain(v, n_candidates)?))
        })
        .collect()
}
