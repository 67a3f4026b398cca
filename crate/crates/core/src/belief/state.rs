use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::ShotOutcome;

const NORM_TOL: f64 = 1e-9;
/// Below this outcome probability an update is treated as impossible evidence.
pub const EVIDENCE_FLOOR: f64 = 1e-300;

/// Class label for every candidate, `0..n_classes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassLabels {
    of: Vec<usize>,
    n_classes: usize,
}

impl ClassLabels {
    pub fn new(of: Vec<usize>) -> Result<Self> {
        if of.is_empty() {
            return Err(Error::Config("class label vector is empty".into()));
        }
        let n_classes = of.iter().max().map_or(0, |&m| m + 1);
        Ok(Self { of, n_classes })
    }

    pub fn class_of(&self, candidate: usize) -> usize {
        self.of[candidate]
    }

    pub fn labels(&self) -> &[usize] {
        &self.of
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn len(&self) -> usize {
        self.of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.of.is_empty()
    }
}

/// Probability distribution over candidate states, optionally grouped into
/// classes. Immutable: updates return a new belief.
#[derive(Clone, Debug, PartialEq)]
pub struct BeliefState {
    probs: Vec<f64>,
    classes: Option<Arc<ClassLabels>>,
}

impl BeliefState {
    pub fn uniform(n_candidates: usize) -> Result<Self> {
        if n_candidates == 0 {
            return Err(Error::Input("belief needs at least one candidate".into()));
        }
        Ok(Self {
            probs: vec![1.0 / n_candidates as f64; n_candidates],
            classes: None,
        })
    }

    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Input("belief needs at least one candidate".into()));
        }
        if let Some(bad) = probs.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::Domain(format!("invalid probability {bad}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!("probabilities sum to {total}, expected 1")));
        }
        Ok(Self { probs, classes: None })
    }

    pub fn with_classes(mut self, labels: ClassLabels) -> Result<Self> {
        if labels.len() != self.probs.len() {
            return Err(Error::Dimension {
                expected: self.probs.len(),
                got: labels.len(),
            });
        }
        self.classes = Some(Arc::new(labels));
        Ok(self)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn classes(&self) -> Option<&ClassLabels> {
        self.classes.as_deref()
    }

    /// Most probable candidate, lowest index on ties.
    pub fn argmax(&self) -> usize {
        argmax(&self.probs)
    }

    pub fn max_prob(&self) -> f64 {
        self.probs[self.argmax()]
    }

    /// Shannon entropy in bits, with `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    /// Posterior after observing `outcome` on an observable whose candidate
    /// expectations are `column`: `p(i|s) ∝ p(i) (1 + s <O>_i)`.
    pub fn update(&self, column: &[f64], outcome: ShotOutcome) -> Result<Self> {
        self.update_with_floor(column, outcome, 0.0)
    }

    /// As [`update`](Self::update), then lifts every probability to at least
    /// `floor` and renormalizes. `floor = 0` disables the floor.
    pub fn update_with_floor(&self, column: &[f64], outcome: ShotOutcome, floor: f64) -> Result<Self> {
        self.check_column(column)?;
        let s = outcome.sign();
        let mut post: Vec<f64> = self
            .probs
            .iter()
            .zip(column)
            .map(|(p, e)| p * 0.5 * (1.0 + s * e))
            .collect();
        let mass: f64 = post.iter().sum();
        if mass.is_nan() || mass < EVIDENCE_FLOOR {
            return Err(Error::DegenerateEvidence {
                outcome: outcome.value(),
                probability: mass,
            });
        }
        post.iter_mut().for_each(|p| *p /= mass);
        if floor > 0.0 {
            post.iter_mut().for_each(|p| *p = p.max(floor));
            let total: f64 = post.iter().sum();
            post.iter_mut().for_each(|p| *p /= total);
        }
        Ok(Self {
            probs: post,
            classes: self.classes.clone(),
        })
    }

    /// `p_class(c) = sum over candidates i in class c of p(i)`.
    pub fn class_probabilities(&self) -> Result<Vec<f64>> {
        let labels = self.require_classes()?;
        let mut out = vec![0.0; labels.n_classes()];
        for (p, &c) in self.probs.iter().zip(labels.labels()) {
            out[c] += p;
        }
        Ok(out)
    }

    pub fn class_entropy(&self) -> Result<f64> {
        Ok(entropy_bits(&self.class_probabilities()?))
    }

    pub(crate) fn require_classes(&self) -> Result<&ClassLabels> {
        self.classes
            .as_deref()
            .ok_or_else(|| Error::Config("belief has no class labels".into()))
    }

    pub(crate) fn check_column(&self, column: &[f64]) -> Result<()> {
        if column.len() != self.probs.len() {
            return Err(Error::Dimension {
                expected: self.probs.len(),
                got: column.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn entropy_bits(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn belief(p: &[f64]) -> BeliefState {
        BeliefState::from_probs(p.to_vec()).unwrap()
    }

    #[test]
    fn eigenstate_exclusion() {
        let post = belief(&[0.5, 0.5]).update(&[1.0, -1.0], ShotOutcome::Plus).unwrap();
        assert_eq!(post.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn common_expectation_carries_no_evidence() {
        for c in [-0.7, 0.0, 0.4] {
            for o in [ShotOutcome::Plus, ShotOutcome::Minus] {
                let post = belief(&[0.5, 0.5]).update(&[c, c], o).unwrap();
                assert_abs_diff_eq!(post.probs()[0], 0.5, epsilon = 1e-15);
                assert_abs_diff_eq!(post.probs()[1], 0.5, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn direct_update_value() {
        // 0.5 * 0.75 / (0.5 * 0.75 + 0.5 * 0.25)
        let post = belief(&[0.5, 0.5]).update(&[0.5, -0.5], ShotOutcome::Plus).unwrap();
        assert_abs_diff_eq!(post.probs()[0], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(post.probs()[1], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn impossible_outcome_is_degenerate_evidence() {
        let err = belief(&[1.0, 0.0]).update(&[1.0, -1.0], ShotOutcome::Minus).unwrap_err();
        assert!(matches!(err, Error::DegenerateEvidence { outcome: -1, .. }));
    }

    #[test]
    fn floor_keeps_candidates_recoverable() {
        let post = belief(&[0.5, 0.5])
            .update_with_floor(&[1.0, -1.0], ShotOutcome::Plus, 1e-12)
            .unwrap();
        assert!(post.probs()[1] > 0.0);
        assert_abs_diff_eq!(post.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn entropy_values() {
        assert_abs_diff_eq!(BeliefState::uniform(20).unwrap().entropy(), 20f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(belief(&[0.0, 1.0, 0.0]).entropy(), 0.0);
        // -(0.75 log2 0.75 + 0.25 log2 0.25)
        assert_abs_diff_eq!(belief(&[0.75, 0.25]).entropy(), 0.811_278_124_459_132_8, epsilon = 1e-12);
    }

    #[test]
    fn class_aggregation() {
        let b = belief(&[0.1, 0.2, 0.3, 0.4]).with_classes(ClassLabels::new(vec![0, 0, 1, 1]).unwrap()).unwrap();
        let pc = b.class_probabilities().unwrap();
        assert_abs_diff_eq!(pc[0], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(pc[1], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(b.class_entropy().unwrap(), 0.881_290_899_230_282, epsilon = 1e-12);
    }

    #[test]
    fn uniform_four_classes() {
        let labels: Vec<usize> = (0..300).map(|i| i / 75).collect();
        let b = BeliefState::uniform(300).unwrap().with_classes(ClassLabels::new(labels).unwrap()).unwrap();
        for p in b.class_probabilities().unwrap() {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(b.class_entropy().unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn point_mass_gives_one_hot_classes() {
        let b = belief(&[0.0, 0.0, 1.0]).with_classes(ClassLabels::new(vec![0, 1, 1]).unwrap()).unwrap();
        assert_eq!(b.class_probabilities().unwrap(), vec![0.0, 1.0]);
        assert_eq!(b.class_entropy().unwrap(), 0.0);
    }

    #[test]
    fn missing_classes_is_config_error() {
        assert!(matches!(
            BeliefState::uniform(2).unwrap().class_probabilities(),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax(&[0.3, 0.3, 0.1]), 0);
        assert_eq!(argmax(&[0.1, 0.3, 0.3]), 1);
    }
}
