use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::pauli::{PauliMasks, PauliString};
use crate::error::{Error, Result};

/// Largest register the dense kernel will allocate.
pub const MAX_DENSE_QUBITS: usize = 14;

const NORM_TOL: f64 = 1e-10;

/// A normalized pure state on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// Wraps `amplitudes` after checking length and unit norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Size(format!(
                "amplitude vector length {len} is not 2^n with n >= 1"
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!("state norm^2 is {norm_sq}, expected 1")));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` and wraps them.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("cannot normalize a zero or non-finite vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amplitudes)
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_budget(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Size(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

pub(crate) fn check_budget(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::Size(format!(
            "n_qubits = {n_qubits} outside the dense budget 1..={MAX_DENSE_QUBITS}"
        )));
    }
    Ok(())
}

/// Haar-random pure state: i.i.d. standard complex Gaussians, normalized.
pub fn haar_random_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Statevector> {
    check_budget(n_qubits)?;
    let dim = 1usize << n_qubits;
    let amplitudes = (0..dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    Statevector::normalized(amplitudes)
}

#[inline]
fn parity_sign(k: usize, mask: usize) -> f64 {
    if (k & mask).count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[inline]
fn i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `out += coeff * P * input`, without materializing `P`.
pub(crate) fn accumulate_pauli(
    masks: PauliMasks,
    coeff: f64,
    input: &[Complex64],
    out: &mut [Complex64],
) {
    let global = i_pow(masks.n_y) * coeff;
    for (k, &amp) in input.iter().enumerate() {
        out[k ^ masks.flip] += global * parity_sign(k, masks.phase) * amp;
    }
}

/// `<psi|P|psi>` computed in O(2^n), clamped to `[-1, 1]`.
pub fn pauli_expectation(state: &Statevector, observable: &PauliString) -> Result<f64> {
    if observable.n_qubits() != state.n_qubits() {
        return Err(Error::Dimension {
            expected: state.n_qubits(),
            got: observable.n_qubits(),
        });
    }
    let masks = observable.masks();
    let amps = state.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &amp) in amps.iter().enumerate() {
        acc += amps[k ^ masks.flip].conj() * amp * parity_sign(k, masks.phase);
    }
    acc *= i_pow(masks.n_y);
    debug_assert!(acc.im.abs() < 1e-10, "imaginary residue {}", acc.im);
    Ok(acc.re.clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::kernel::pauli::random_pauli_string;

    fn bell() -> Statevector {
        let z = Complex64::new(0.0, 0.0);
        let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Statevector::from_amplitudes(vec![a, z, z, a]).unwrap()
    }

    fn expect(state: &Statevector, p: &str) -> f64 {
        pauli_expectation(state, &p.parse().unwrap()).unwrap()
    }

    #[test]
    fn computational_zero() {
        let zero = Statevector::basis(1, 0).unwrap();
        assert_abs_diff_eq!(expect(&zero, "Z"), 1.0);
        assert_abs_diff_eq!(expect(&zero, "X"), 0.0);
        assert_abs_diff_eq!(expect(&zero, "Y"), 0.0);
        let one = Statevector::basis(1, 1).unwrap();
        assert_abs_diff_eq!(expect(&one, "Z"), -1.0);
    }

    #[test]
    fn bell_state_stabilizers() {
        let b = bell();
        assert_abs_diff_eq!(expect(&b, "ZZ"), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(expect(&b, "XX"), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(expect(&b, "YY"), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(expect(&b, "ZI"), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn y_eigenstate_sign() {
        // (|0> + i|1>)/sqrt2 is the +1 eigenstate of Y.
        let s = Statevector::from_amplitudes(vec![
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, FRAC_1_SQRT_2),
        ])
        .unwrap();
        assert_abs_diff_eq!(expect(&s, "Y"), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn qubit_zero_is_lowest_bit() {
        // |01> in little-endian: qubit 0 set.
        let s = Statevector::basis(2, 0b01).unwrap();
        assert_abs_diff_eq!(expect(&s, "ZI"), -1.0);
        assert_abs_diff_eq!(expect(&s, "IZ"), 1.0);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let s = Statevector::basis(2, 0).unwrap();
        assert!(matches!(
            pauli_expectation(&s, &"Z".parse().unwrap()),
            Err(Error::Dimension { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn haar_states_are_normalized_and_seeded() {
        for n in 1..=6 {
            let mut a = ChaCha8Rng::seed_from_u64(n as u64);
            let mut b = ChaCha8Rng::seed_from_u64(n as u64);
            let s = haar_random_state(n, &mut a).unwrap();
            assert_eq!(s.dim(), 1 << n);
            assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-10);
            assert_eq!(s, haar_random_state(n, &mut b).unwrap());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(haar_random_state(0, &mut rng).is_err());
        assert!(haar_random_state(15, &mut rng).is_err());
    }

    // Exact second moment for a traceless involution on Haar states is
    // E[<P>^2] = Tr(P^2) / (d (d + 1)) = 1 / (d + 1).
    #[test]
    fn haar_single_qubit_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let z: PauliString = "Z".parse().unwrap();
        let samples: Vec<f64> = (0..10_000)
            .map(|_| pauli_expectation(&haar_random_state(1, &mut rng).unwrap(), &z).unwrap())
            .collect();
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 3.0 * var.sqrt() / 100.0, "mean {mean}");
        assert!((var - 1.0 / 3.0).abs() / (1.0 / 3.0) < 0.05, "var {var}");
    }

    #[test]
    fn expectation_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let s = haar_random_state(4, &mut rng).unwrap();
            let p = random_pauli_string(4, &mut rng).unwrap();
            let e = pauli_expectation(&s, &p).unwrap();
            assert!((-1.0..=1.0).contains(&e));
        }
    }
}
