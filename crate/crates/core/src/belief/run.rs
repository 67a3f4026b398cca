//! Observable selection and the sequential measure-update loop.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gain::{expected_class_info_gain, expected_info_gain};
use super::state::{argmax, BeliefState, ClassLabels};
use super::table::ObservableTable;
use crate::error::{Error, Result};
use crate::kernel::{sample_shot, ShotOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Measure the observable that is best under the initial belief, every shot.
    FixedBest,
    /// Uniformly random observable each shot.
    Random,
    /// Greedy maximum expected information gain each shot.
    InfoOptimized,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::InfoOptimized, Strategy::Random, Strategy::FixedBest];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::FixedBest => "fixed-best",
            Strategy::Random => "random",
            Strategy::InfoOptimized => "info-optimized",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown strategy {s:?}")))
    }
}

/// Which entropy the gain is measured on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GainTarget {
    Candidates,
    Classes,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub p_threshold: f64,
    pub max_shots: usize,
    pub strategy: Strategy,
    /// Probability floor applied after each update; 0 disables it.
    #[serde(default)]
    pub prob_floor: f64,
}

impl RunConfig {
    pub fn new(p_threshold: f64, max_shots: usize, strategy: Strategy) -> Result<Self> {
        let cfg = Self {
            p_threshold,
            max_shots,
            strategy,
            prob_floor: 0.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_threshold > 0.5 && self.p_threshold < 1.0) {
            return Err(Error::Config(format!(
                "p_threshold must lie in (0.5, 1), got {}",
                self.p_threshold
            )));
        }
        if self.max_shots == 0 {
            return Err(Error::Config("max_shots must be positive".into()));
        }
        if !(self.prob_floor >= 0.0 && self.prob_floor < 1.0) {
            return Err(Error::Config(format!("prob_floor must lie in [0, 1), got {}", self.prob_floor)));
        }
        Ok(())
    }
}

fn gains(belief: &BeliefState, table: &ObservableTable, target: GainTarget) -> Result<Vec<f64>> {
    table
        .columns()
        .map(|col| match target {
            GainTarget::Candidates => expected_info_gain(belief, col),
            GainTarget::Classes => expected_class_info_gain(belief, col),
        })
        .collect()
}

/// Picks the next observable for a candidate-level search.
///
/// `FixedBest` ignores `belief` and returns the argmax under the uniform prior.
pub fn select_observable<R: Rng + ?Sized>(
    belief: &BeliefState,
    table: &ObservableTable,
    strategy: Strategy,
    rng: &mut R,
) -> Result<usize> {
    let initial = BeliefState::uniform(table.n_candidates())?;
    Selector::new(strategy, GainTarget::Candidates, &initial, table)?.select(belief, table, rng)
}

/// Stateful selector; caches the frozen choice of `FixedBest`.
#[derive(Clone, Debug)]
pub struct Selector {
    strategy: Strategy,
    target: GainTarget,
    frozen: Option<usize>,
}

impl Selector {
    pub fn new(strategy: Strategy, target: GainTarget, initial: &BeliefState, table: &ObservableTable) -> Result<Self> {
        let frozen = match strategy {
            Strategy::FixedBest => Some(argmax(&gains(initial, table, target)?)),
            _ => None,
        };
        Ok(Self {
            strategy,
            target,
            frozen,
        })
    }

    pub fn select<R: Rng + ?Sized>(&mut self, belief: &BeliefState, table: &ObservableTable, rng: &mut R) -> Result<usize> {
        Ok(match self.strategy {
            Strategy::FixedBest => self.frozen.expect("fixed strategy is frozen at construction"),
            Strategy::Random => rng.random_range(0..table.n_observables()),
            Strategy::InfoOptimized => argmax(&gains(belief, table, self.target)?),
        })
    }
}

/// Provides the true expectation of observable `j` for the state being
/// measured; shots are drawn from it.
pub trait ShotSource {
    fn expectation(&self, observable: usize) -> f64;
}

impl ShotSource for [f64] {
    fn expectation(&self, observable: usize) -> f64 {
        self[observable]
    }
}

impl ShotSource for Vec<f64> {
    fn expectation(&self, observable: usize) -> f64 {
        self[observable]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    /// 1-based shot number.
    pub shot: usize,
    pub observable: usize,
    pub outcome: i8,
    /// Largest candidate (or class) probability after the update.
    pub max_prob: f64,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    /// p-value before any shot.
    pub initial_p_value: f64,
    pub records: Vec<ShotRecord>,
    /// Candidate index (identification) or class label (classification).
    pub prediction: usize,
    pub converged: bool,
    /// Set when the run stopped on degenerate evidence.
    pub failure: Option<String>,
}

impl RunTrace {
    /// Shots taken when the threshold was reached, `None` if it never was.
    pub fn shots_to_threshold(&self) -> Option<usize> {
        self.converged.then_some(self.records.len())
    }

    /// p-value before shot 0 through shot `max_shots`, held at its final
    /// value after the run stops.
    pub fn padded_p_values(&self, max_shots: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(max_shots + 1);
        out.push(self.initial_p_value);
        out.extend(self.records.iter().take(max_shots).map(|r| r.p_value));
        let last = *out.last().expect("series starts with the prior");
        out.resize(max_shots + 1, last);
        out
    }
}

/// Greedy loop that identifies which candidate the hidden state is.
pub fn run_identification<R: Rng + ?Sized>(
    table: &ObservableTable,
    true_index: usize,
    config: &RunConfig,
    rng: &mut R,
) -> Result<RunTrace> {
    if true_index >= table.n_candidates() {
        return Err(Error::Input(format!(
            "true index {true_index} out of range for {} candidates",
            table.n_candidates()
        )));
    }
    let truth = table.row(true_index);
    let belief = BeliefState::uniform(table.n_candidates())?;
    run_loop(table, belief, truth.as_slice(), config, GainTarget::Candidates, rng)
}

/// Greedy loop that assigns a class to a state measured through `source`.
pub fn run_classification<R: Rng + ?Sized, S: ShotSource + ?Sized>(
    table: &ObservableTable,
    labels: &ClassLabels,
    source: &S,
    config: &RunConfig,
    rng: &mut R,
) -> Result<RunTrace> {
    let belief = BeliefState::uniform(table.n_candidates())?.with_classes(labels.clone())?;
    run_loop(table, belief, source, config, GainTarget::Classes, rng)
}

fn confidence(belief: &BeliefState, target: GainTarget) -> Result<(usize, f64)> {
    Ok(match target {
        GainTarget::Candidates => (belief.argmax(), belief.max_prob()),
        GainTarget::Classes => {
            let pc = belief.class_probabilities()?;
            let best = argmax(&pc);
            (best, pc[best])
        }
    })
}

fn run_loop<R: Rng + ?Sized, S: ShotSource + ?Sized>(
    table: &ObservableTable,
    mut belief: BeliefState,
    source: &S,
    config: &RunConfig,
    target: GainTarget,
    rng: &mut R,
) -> Result<RunTrace> {
    config.validate()?;
    let mut selector = Selector::new(config.strategy, target, &belief, table)?;
    let (mut prediction, mut max_prob) = confidence(&belief, target)?;
    let mut trace = RunTrace {
        initial_p_value: 1.0 - max_prob,
        records: Vec::new(),
        prediction,
        converged: max_prob >= config.p_threshold,
        failure: None,
    };

    while max_prob < config.p_threshold && trace.records.len() < config.max_shots {
        let j = selector.select(&belief, table, rng)?;
        let outcome: ShotOutcome = sample_shot(source.expectation(j), rng)?;
        belief = match belief.update_with_floor(table.column(j), outcome, config.prob_floor) {
            Ok(b) => b,
            Err(e @ Error::DegenerateEvidence { .. }) => {
                trace.failure = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        (prediction, max_prob) = confidence(&belief, target)?;
        trace.records.push(ShotRecord {
            shot: trace.records.len() + 1,
            observable: j,
            outcome: outcome.value(),
            max_prob,
            p_value: 1.0 - max_prob,
        });
    }
    trace.prediction = prediction;
    trace.converged = trace.failure.is_none() && max_prob >= config.p_threshold;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn table(cols: &[&[f64]]) -> ObservableTable {
        ObservableTable::from_columns(cols.iter().map(|c| c.to_vec()).collect(), vec![]).unwrap()
    }

    fn cfg(strategy: Strategy) -> RunConfig {
        RunConfig::new(0.99, 300, strategy).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::new(0.5, 10, Strategy::Random).is_err());
        assert!(RunConfig::new(1.0, 10, Strategy::Random).is_err());
        assert!(RunConfig::new(0.9, 0, Strategy::Random).is_err());
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("greedy".parse::<Strategy>().is_err());
    }

    #[test]
    fn single_observable_always_chosen() {
        let t = table(&[&[0.3, -0.2, 0.1]]);
        let b = BeliefState::uniform(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for s in Strategy::ALL {
            assert_eq!(select_observable(&b, &t, s, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let t = table(&[&[0.5, -0.5], &[0.5, -0.5]]);
        let b = BeliefState::uniform(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_observable(&b, &t, Strategy::InfoOptimized, &mut rng).unwrap(), 0);
    }

    #[test]
    fn informative_column_wins() {
        let t = table(&[&[0.1, -0.1], &[1.0, -1.0]]);
        let b = BeliefState::uniform(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_observable(&b, &t, Strategy::InfoOptimized, &mut rng).unwrap(), 1);
        assert_eq!(select_observable(&b, &t, Strategy::FixedBest, &mut rng).unwrap(), 1);
    }

    #[test]
    fn fixed_best_ignores_current_belief() {
        // Under the uniform prior column 0 is best; once candidate 2 is ruled
        // out column 1 would be, but the fixed strategy keeps column 0.
        let t = table(&[&[1.0, -1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let b = BeliefState::from_probs(vec![0.5, 0.0, 0.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_observable(&b, &t, Strategy::FixedBest, &mut rng).unwrap(), 0);
    }

    #[test]
    fn random_strategy_covers_all_observables() {
        let t = table(&[&[0.1, 0.2], &[0.3, 0.4], &[0.5, 0.6]]);
        let b = BeliefState::uniform(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut seen = [false; 3];
        for _ in 0..100 {
            seen[select_observable(&b, &t, Strategy::Random, &mut rng).unwrap()] = true;
        }
        assert_eq!(seen, [true; 3]);
    }

    #[test]
    fn eigenstate_identification_takes_one_shot() {
        let t = table(&[&[1.0, -1.0]]);
        for truth in 0..2 {
            let mut rng = ChaCha8Rng::seed_from_u64(truth as u64);
            let trace = run_identification(&t, truth, &cfg(Strategy::InfoOptimized), &mut rng).unwrap();
            assert!(trace.converged);
            assert_eq!(trace.records.len(), 1);
            assert_eq!(trace.prediction, truth);
            assert_eq!(trace.shots_to_threshold(), Some(1));
        }
    }

    #[test]
    fn single_candidate_needs_no_shots() {
        let t = table(&[&[0.2]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let trace = run_identification(&t, 0, &cfg(Strategy::Random), &mut rng).unwrap();
        assert!(trace.converged);
        assert!(trace.records.is_empty());
        assert_eq!(trace.shots_to_threshold(), Some(0));
        assert_eq!(trace.padded_p_values(3), vec![0.0; 4]);
    }

    #[test]
    fn true_index_out_of_range() {
        let t = table(&[&[0.2, 0.1]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(run_identification(&t, 2, &cfg(Strategy::Random), &mut rng).is_err());
    }

    #[test]
    fn uninformative_table_exhausts_budget() {
        let t = table(&[&[0.0, 0.0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = RunConfig::new(0.9, 25, Strategy::InfoOptimized).unwrap();
        let trace = run_identification(&t, 0, &c, &mut rng).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.records.len(), 25);
        assert_eq!(trace.shots_to_threshold(), None);
        let padded = trace.padded_p_values(25);
        assert_eq!(padded.len(), 26);
        assert!(padded.iter().all(|&p| (p - 0.5).abs() < 1e-12));
    }

    #[test]
    fn degenerate_evidence_ends_run_without_error() {
        // The hidden state's shots contradict every candidate's eigenvalue.
        let t = table(&[&[1.0, 1.0]]);
        let labels = ClassLabels::new(vec![0, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let trace = run_classification(&t, &labels, &[-1.0][..], &cfg(Strategy::FixedBest), &mut rng).unwrap();
        assert!(!trace.converged);
        assert!(trace.failure.is_some());
        assert!(trace.records.is_empty());
    }

    #[test]
    fn classification_of_a_known_candidate() {
        let t = table(&[&[1.0, 1.0, -1.0, -1.0], &[1.0, -1.0, 1.0, -1.0]]);
        let labels = ClassLabels::new(vec![0, 0, 1, 1]).unwrap();
        for truth in 0..4 {
            let mut rng = ChaCha8Rng::seed_from_u64(truth as u64);
            let source = t.row(truth);
            let trace = run_classification(&t, &labels, &source, &cfg(Strategy::InfoOptimized), &mut rng).unwrap();
            assert!(trace.converged);
            assert_eq!(trace.prediction, labels.class_of(truth));
            // class-level gain picks the class-separating column
            assert_eq!(trace.records[0].observable, 0);
        }
    }

    #[test]
    fn single_class_converges_immediately() {
        let t = table(&[&[0.3, -0.3]]);
        let labels = ClassLabels::new(vec![0, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let trace = run_classification(&t, &labels, &[0.3][..], &cfg(Strategy::InfoOptimized), &mut rng).unwrap();
        assert!(trace.converged);
        assert!(trace.records.is_empty());
        assert_eq!(trace.prediction, 0);
    }

    #[test]
    fn runs_are_seed_deterministic() {
        let t = table(&[&[0.3, -0.1, 0.2], &[0.0, 0.4, -0.4]]);
        let c = RunConfig::new(0.9, 200, Strategy::Random).unwrap();
        let a = run_identification(&t, 1, &c, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = run_identification(&t, 1, &c, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
