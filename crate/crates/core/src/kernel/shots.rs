use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::belief::ObservableTable;
use crate::error::{Error, Result};

/// A single-shot measurement result of a ±1-valued observable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShotOutcome {
    Plus,
    Minus,
}

impl ShotOutcome {
    pub fn value(self) -> i8 {
        match self {
            ShotOutcome::Plus => 1,
            ShotOutcome::Minus => -1,
        }
    }

    pub fn sign(self) -> f64 {
        f64::from(self.value())
    }

    pub fn from_value(v: i8) -> Result<Self> {
        match v {
            1 => Ok(ShotOutcome::Plus),
            -1 => Ok(ShotOutcome::Minus),
            other => Err(Error::Domain(format!("shot outcome must be +1 or -1, got {other}"))),
        }
    }
}

impl fmt::Display for ShotOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Draws one outcome with `P(+1) = (1 + expectation) / 2`.
pub fn sample_shot<R: Rng + ?Sized>(expectation: f64, rng: &mut R) -> Result<ShotOutcome> {
    if !(-1.0..=1.0).contains(&expectation) {
        return Err(Error::Domain(format!("expectation {expectation} outside [-1, 1]")));
    }
    let p_plus = 0.5 * (1.0 + expectation);
    // random::<f64>() is in [0, 1), so p_plus = 1 always gives +1 and 0 never does.
    if rng.random::<f64>() < p_plus {
        Ok(ShotOutcome::Plus)
    } else {
        Ok(ShotOutcome::Minus)
    }
}

/// Adds `N(0, sigma)` to each value and clamps back into `[-1, 1]`.
pub fn perturb_values<R: Rng + ?Sized>(values: &mut [f64], sigma: f64, rng: &mut R) -> Result<()> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("noise sigma must be finite and >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Domain(e.to_string()))?;
    for v in values.iter_mut() {
        *v = (*v + normal.sample(rng)).clamp(-1.0, 1.0);
    }
    Ok(())
}

/// Gaussian noise stand-in for hardware-estimated expectation values.
pub fn perturb_expectations<R: Rng + ?Sized>(
    table: &ObservableTable,
    sigma: f64,
    rng: &mut R,
) -> Result<ObservableTable> {
    let mut out = table.clone();
    perturb_values(out.values_mut(), sigma, rng)?;
    Ok(out)
}
