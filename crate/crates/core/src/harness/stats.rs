use serde::{Deserialize, Serialize};

use crate::belief::RunTrace;

/// Linear-interpolation quantile of sorted data (`q` in `[0, 1]`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Median/interquartile band of p-values at every shot index.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuantileSeries {
    pub median: Vec<f64>,
    pub q25: Vec<f64>,
    pub q75: Vec<f64>,
}

impl QuantileSeries {
    /// Quantiles across traces, each padded to `max_shots + 1` points.
    pub fn from_traces<'a>(traces: impl IntoIterator<Item = &'a RunTrace>, max_shots: usize) -> Self {
        let padded: Vec<Vec<f64>> = traces.into_iter().map(|t| t.padded_p_values(max_shots)).collect();
        let mut out = Self::default();
        if padded.is_empty() {
            return out;
        }
        let mut column = Vec::with_capacity(padded.len());
        for k in 0..=max_shots {
            column.clear();
            column.extend(padded.iter().map(|s| s[k]));
            column.sort_by(f64::total_cmp);
            out.q25.push(quantile_sorted(&column, 0.25));
            out.median.push(quantile_sorted(&column, 0.5));
            out.q75.push(quantile_sorted(&column, 0.75));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.median.len()
    }

    pub fn is_empty(&self) -> bool {
        self.median.is_empty()
    }

    pub fn is_ordered(&self) -> bool {
        (0..self.len()).all(|k| self.q25[k] <= self.median[k] && self.median[k] <= self.q75[k])
    }

    /// First shot index at which the median p-value is at or below `level`.
    pub fn first_median_at_or_below(&self, level: f64) -> Option<usize> {
        self.median.iter().position(|&p| p <= level)
    }
}

/// Median of shots-to-threshold where non-converged runs count as infinite.
/// `None` means the median itself is infinite.
pub fn median_shots(shots: &[Option<usize>]) -> Option<f64> {
    if shots.is_empty() {
        return None;
    }
    let mut v: Vec<f64> = shots
        .iter()
        .map(|s| s.map_or(f64::INFINITY, |x| x as f64))
        .collect();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let m = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    m.is_finite().then_some(m)
}

/// Orders medians with `None` (infinite) above every finite value.
pub fn median_lt(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x < y,
        (Some(_), None) => true,
        _ => false,
    }
}

/// One-sided exact binomial p-value `P(X >= successes)` for `X ~ Bin(n, p)`.
pub fn binomial_upper_tail(successes: usize, n: usize, p: f64) -> f64 {
    if successes == 0 {
        return 1.0;
    }
    let ln_choose = |k: usize| -> f64 {
        (1..=k).map(|i| ((n - k + i) as f64).ln() - (i as f64).ln()).sum()
    };
    (successes..=n)
        .map(|k| (ln_choose(k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp())
        .sum::<f64>()
        .min(1.0)
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::belief::ShotRecord;

    fn trace(p: &[f64], converged: bool) -> RunTrace {
        RunTrace {
            initial_p_value: 0.5,
            records: p
                .iter()
                .enumerate()
                .map(|(i, &pv)| ShotRecord {
                    shot: i + 1,
                    observable: 0,
                    outcome: 1,
                    max_prob: 1.0 - pv,
                    p_value: pv,
                })
                .collect(),
            prediction: 0,
            converged,
            failure: None,
        }
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_abs_diff_eq!(quantile_sorted(&v, 0.5), 2.5);
        assert_abs_diff_eq!(quantile_sorted(&v, 0.25), 1.75);
        assert_abs_diff_eq!(quantile_sorted(&v, 1.0), 4.0);
    }

    #[test]
    fn series_pads_converged_runs() {
        let traces = [trace(&[0.1, 0.005], true), trace(&[0.3, 0.2, 0.1], false)];
        let s = QuantileSeries::from_traces(&traces, 4);
        assert_eq!(s.len(), 5);
        assert!(s.is_ordered());
        // index 4: 0.005 (held) and 0.1 (held)
        assert_abs_diff_eq!(s.median[4], 0.0525, epsilon = 1e-15);
        assert!(QuantileSeries::from_traces(&[], 4).is_empty());
    }

    #[test]
    fn censored_medians() {
        assert_eq!(median_shots(&[Some(3), Some(5), None]), Some(5.0));
        assert_eq!(median_shots(&[Some(3), None, None]), None);
        assert_eq!(median_shots(&[Some(2), Some(4)]), Some(3.0));
        assert!(median_lt(Some(10.0), None));
        assert!(!median_lt(None, None));
        assert!(!median_lt(Some(4.0), Some(4.0)));
    }

    #[test]
    fn binomial_tail() {
        assert_abs_diff_eq!(binomial_upper_tail(0, 10, 0.3), 1.0);
        // P(X >= 2) for Bin(2, 0.5)
        assert_abs_diff_eq!(binomial_upper_tail(2, 2, 0.5), 0.25, epsilon = 1e-12);
        // P(X >= 1) for Bin(3, 0.25) = 1 - 0.75^3
        assert_abs_diff_eq!(binomial_upper_tail(1, 3, 0.25), 1.0 - 0.421875, epsilon = 1e-12);
        assert!(binomial_upper_tail(40, 100, 0.25) < 0.05);
        assert!(binomial_upper_tail(28, 100, 0.25) > 0.05);
    }
}
