//! Pauli strings over `{I, X, Y, Z}`.
//!
//! Letter `j` of a string acts on qubit `j`, which is bit `j` of a
//! computational-basis index (little-endian).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A tensor product of single-qubit Paulis.
///
/// Ordering (derived) is lexicographic over letters with `I < X < Y < Z`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliString {
    letters: Vec<Pauli>,
}

/// Bit masks describing how a string acts on basis states:
/// `P|k> = i^{n_y} (-1)^{popcount(k & phase_mask)} |k ^ flip_mask>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct PauliMasks {
    pub flip: usize,
    pub phase: usize,
    pub n_y: u32,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Size("Pauli string must have at least one letter".into()));
        }
        Ok(Self { letters })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; n_qubits])
    }

    /// Identity everywhere except the listed `(qubit, letter)` sites.
    pub fn from_sites(n_qubits: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut letters = vec![Pauli::I; n_qubits];
        for &(q, p) in sites {
            if q >= n_qubits {
                return Err(Error::Size(format!(
                    "site {q} out of range for {n_qubits} qubits"
                )));
            }
            letters[q] = p;
        }
        Self::new(letters)
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Analytic trace of the operator: `2^n` for the identity, zero otherwise.
    pub fn trace(&self) -> f64 {
        if self.is_identity() {
            (self.n_qubits() as f64).exp2()
        } else {
            0.0
        }
    }

    pub(crate) fn masks(&self) -> PauliMasks {
        let mut m = PauliMasks {
            flip: 0,
            phase: 0,
            n_y: 0,
        };
        for (q, &p) in self.letters.iter().enumerate() {
            let bit = 1usize << q;
            match p {
                Pauli::I => {}
                Pauli::X => m.flip |= bit,
                Pauli::Y => {
                    m.flip |= bit;
                    m.phase |= bit;
                    m.n_y += 1;
                }
                Pauli::Z => m.phase |= bit,
            }
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::Input(format!("invalid Pauli letter {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }
}

impl TryFrom<String> for PauliString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> String {
        p.to_string()
    }
}

/// Uniform draw over the `4^n - 1` non-identity words.
///
/// Letters are drawn independently and the all-identity word is rejected,
/// which is exactly uniform on the remaining words for any `n`.
pub fn random_pauli_string<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<PauliString> {
    if n_qubits == 0 {
        return Err(Error::Size("n_qubits must be at least 1".into()));
    }
    loop {
        let letters: Vec<Pauli> = (0..n_qubits)
            .map(|_| Pauli::ALL[rng.random_range(0..4)])
            .collect();
        if letters.iter().any(|&p| p != Pauli::I) {
            return PauliString::new(letters);
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn parse_and_display() {
        let p: PauliString = "XIZy".parse().unwrap();
        assert_eq!(p.to_string(), "XIZY");
        assert_eq!(p.weight(), 3);
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }

    #[test]
    fn masks_follow_qubit_order() {
        let p: PauliString = "XYZI".parse().unwrap();
        let m = p.masks();
        assert_eq!(m.flip, 0b0011);
        assert_eq!(m.phase, 0b0110);
        assert_eq!(m.n_y, 1);
    }

    #[test]
    fn single_qubit_draws_never_identity() {
        for seed in 0..500 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_pauli_string(1, &mut rng).unwrap();
            assert!(!p.is_identity());
        }
    }

    #[test]
    fn two_qubit_draws_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = 100_000;
        let mut counts: HashMap<String, usize> = HashMap::new();
        for _ in 0..draws {
            *counts.entry(random_pauli_string(2, &mut rng).unwrap().to_string()).or_default() += 1;
        }
        assert_eq!(counts.len(), 15);
        assert!(!counts.contains_key("II"));
        for (word, c) in counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 1.0 / 15.0).abs() < 0.005, "{word}: {freq}");
        }
    }

    #[test]
    fn draw_has_requested_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(random_pauli_string(3, &mut rng).unwrap().n_qubits(), 3);
        assert!(random_pauli_string(0, &mut rng).is_err());
    }

    #[test]
    fn serde_uses_letter_form() {
        let p: PauliString = "ZXZ".parse().unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "\"ZXZ\"");
        let back: PauliString = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}
