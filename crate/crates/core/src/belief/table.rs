use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{pauli_expectation, PauliString, Statevector};

/// Expectation values `<O_j>_i` of `J` observables over `N` candidates.
///
/// Stored column-major: the column for observable `j` is contiguous, since
/// every gain evaluation and update walks one column.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableTable {
    n_candidates: usize,
    values: Vec<f64>,
    observables: Vec<PauliString>,
}

impl ObservableTable {
    /// Builds a table from raw columns. `observables` may be empty when the
    /// columns are not tied to concrete Pauli strings.
    pub fn from_columns(columns: Vec<Vec<f64>>, observables: Vec<PauliString>) -> Result<Self> {
        let n_candidates = columns.first().map_or(0, Vec::len);
        if columns.is_empty() || n_candidates == 0 {
            return Err(Error::Input("observable table must be non-empty".into()));
        }
        if !observables.is_empty() && observables.len() != columns.len() {
            return Err(Error::Dimension {
                expected: columns.len(),
                got: observables.len(),
            });
        }
        let mut values = Vec::with_capacity(n_candidates * columns.len());
        for col in &columns {
            if col.len() != n_candidates {
                return Err(Error::Dimension {
                    expected: n_candidates,
                    got: col.len(),
                });
            }
            if let Some(bad) = col.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
                return Err(Error::Domain(format!("expectation {bad} outside [-1, 1]")));
            }
            values.extend_from_slice(col);
        }
        Ok(Self {
            n_candidates,
            values,
            observables,
        })
    }

    /// Exact expectations of every observable in every state.
    pub fn from_states(states: &[Statevector], observables: Vec<PauliString>) -> Result<Self> {
        if states.is_empty() || observables.is_empty() {
            return Err(Error::Input("need at least one state and one observable".into()));
        }
        let columns = observables
            .par_iter()
            .map(|obs| states.iter().map(|s| pauli_expectation(s, obs)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_columns(columns, observables)
    }

    pub fn n_candidates(&self) -> usize {
        self.n_candidates
    }

    pub fn n_observables(&self) -> usize {
        self.values.len() / self.n_candidates
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.n_candidates..(j + 1) * self.n_candidates]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_candidates)
    }

    pub fn value(&self, candidate: usize, observable: usize) -> f64 {
        self.values[observable * self.n_candidates + candidate]
    }

    /// All expectations of one candidate, indexed by observable.
    pub fn row(&self, candidate: usize) -> Vec<f64> {
        (0..self.n_observables()).map(|j| self.value(candidate, j)).collect()
    }

    pub fn observables(&self) -> &[PauliString] {
        &self.observables
    }

    /// Keeps only the listed candidates, in the given order.
    pub fn select_candidates(&self, keep: &[usize]) -> Result<Self> {
        if let Some(&bad) = keep.iter().find(|&&i| i >= self.n_candidates) {
            return Err(Error::Size(format!("candidate {bad} out of range")));
        }
        let columns = self
            .columns()
            .map(|col| keep.iter().map(|&i| col[i]).collect())
            .collect();
        Self::from_columns(columns, self.observables.clone())
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}
