//! Pauli-sum Hamiltonians and their ground states.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::pauli::PauliString;
use super::state::{accumulate_pauli, Statevector};
use crate::error::{Error, Result};

/// Largest register solved by dense diagonalization.
pub const MAX_DENSE_SOLVE_QUBITS: usize = 12;
/// Largest register the iterative solver accepts.
pub const MAX_ITERATIVE_SOLVE_QUBITS: usize = 16;

const LANCZOS_TOL: f64 = 1e-10;
const RESIDUAL_BOUND: f64 = 1e-8;
const KRYLOV_DIM: usize = 60;
const MAX_RESTARTS: usize = 400;
const LANCZOS_START_SEED: u64 = 0x5eed_1a2c_0de5_7a27;

/// A real-weighted sum of Pauli strings, `H = sum_k c_k P_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TermList {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl TermList {
    pub fn new(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Input("Hamiltonian has no terms".into()));
        }
        for (c, p) in &terms {
            if p.n_qubits() != n_qubits {
                return Err(Error::Dimension {
                    expected: n_qubits,
                    got: p.n_qubits(),
                });
            }
            if !c.is_finite() {
                return Err(Error::Input(format!("non-finite coefficient on {p}")));
            }
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `H |input>`.
    pub fn apply(&self, input: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); input.len()];
        for (c, p) in &self.terms {
            accumulate_pauli(p.masks(), *c, input, &mut out);
        }
        out
    }

    /// `<psi|H|psi>`.
    pub fn energy(&self, state: &Statevector) -> f64 {
        let h_psi = self.apply(state.amplitudes());
        inner(state.amplitudes(), &h_psi).re
    }

    /// Dense matrix in the computational basis.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        let mut column = vec![Complex64::new(0.0, 0.0); dim];
        for k in 0..dim {
            column[k] = Complex64::new(1.0, 0.0);
            let image = self.apply(&column);
            column[k] = Complex64::new(0.0, 0.0);
            for (row, v) in image.into_iter().enumerate() {
                m[(row, k)] = v;
            }
        }
        m
    }

    /// `||H psi - E psi||`.
    pub fn residual(&self, state: &[Complex64], energy: f64) -> f64 {
        self.apply(state)
            .iter()
            .zip(state)
            .map(|(h, s)| (h - s * energy).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenSolver {
    /// Dense up to [`MAX_DENSE_SOLVE_QUBITS`], iterative beyond.
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: Statevector,
}

/// Lowest eigenpair of `terms`, with the phase fixed so that the first
/// amplitude of modulus above `1e-8` is real and positive.
pub fn ground_state(terms: &TermList) -> Result<GroundState> {
    ground_state_with(terms, EigenSolver::Auto)
}

pub fn ground_state_with(terms: &TermList, solver: EigenSolver) -> Result<GroundState> {
    let n = terms.n_qubits();
    if n == 0 || n > MAX_ITERATIVE_SOLVE_QUBITS {
        return Err(Error::Size(format!(
            "n_qubits = {n} outside the solver budget 1..={MAX_ITERATIVE_SOLVE_QUBITS}"
        )));
    }
    let solver = match solver {
        EigenSolver::Auto if n <= MAX_DENSE_SOLVE_QUBITS => EigenSolver::Dense,
        EigenSolver::Auto => EigenSolver::Lanczos,
        other => other,
    };
    if solver == EigenSolver::Dense && n > MAX_DENSE_SOLVE_QUBITS {
        return Err(Error::Size(format!(
            "dense solve requested for {n} qubits (limit {MAX_DENSE_SOLVE_QUBITS})"
        )));
    }

    let (mut vector, iterations) = match solver {
        EigenSolver::Dense => (dense_ground(terms), 1),
        _ => lanczos_ground(terms)?,
    };
    fix_phase(&mut vector);
    let state = Statevector::normalized(vector)?;
    let energy = terms.energy(&state);
    let residual = terms.residual(state.amplitudes(), energy);
    if residual.is_nan() || residual >= RESIDUAL_BOUND {
        return Err(Error::Solver {
            iterations,
            residual,
        });
    }
    Ok(GroundState { energy, state })
}

fn dense_ground(terms: &TermList) -> Vec<Complex64> {
    let eig = SymmetricEigen::new(terms.to_dense());
    let (lowest, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &e)| if e < best.1 { (i, e) } else { best });
    eig.eigenvectors.column(lowest).iter().copied().collect()
}

fn fix_phase(v: &mut [Complex64]) {
    if let Some(first) = v.iter().find(|a| a.norm() > 1e-8).copied() {
        let rot = first.conj() / first.norm();
        v.iter_mut().for_each(|a| *a *= rot);
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Explicitly restarted Lanczos with full reorthogonalization.
///
/// The start vector is a fixed-seed Gaussian vector so results do not depend
/// on anything but the Hamiltonian. Returns the Ritz vector and the total
/// number of matrix-vector products.
fn lanczos_ground(terms: &TermList) -> Result<(Vec<Complex64>, usize)> {
    let dim = 1usize << terms.n_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_START_SEED);
    let mut start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let s = norm(&start);
    start.iter_mut().for_each(|a| *a /= s);

    let krylov = KRYLOV_DIM.min(dim);
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_RESTARTS {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alphas: Vec<f64> = Vec::with_capacity(krylov);
        let mut betas: Vec<f64> = Vec::with_capacity(krylov);
        for j in 0..krylov {
            let mut w = terms.apply(&basis[j]);
            iterations += 1;
            let alpha = inner(&basis[j], &w).re;
            alphas.push(alpha);
            // two passes of Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for v in &basis {
                    let overlap = inner(v, &w);
                    w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= overlap * vi);
                }
            }
            let beta = norm(&w);
            if j + 1 == krylov || beta < 1e-12 {
                break;
            }
            betas.push(beta);
            w.iter_mut().for_each(|a| *a /= beta);
            basis.push(w);
        }

        let m = alphas.len();
        let tri = DMatrix::<f64>::from_fn(m, m, |r, c| {
            if r == c {
                alphas[r]
            } else if r + 1 == c {
                betas[r]
            } else if c + 1 == r {
                betas[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(tri);
        let (lowest, theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, &e)| if e < best.1 { (i, e) } else { best });
        let coeffs = eig.eigenvectors.column(lowest);
        let mut ritz = vec![Complex64::new(0.0, 0.0); dim];
        for (v, &y) in basis.iter().zip(coeffs.iter()) {
            ritz.iter_mut().zip(v).for_each(|(r, vi)| *r += vi * y);
        }
        let rn = norm(&ritz);
        ritz.iter_mut().for_each(|a| *a /= rn);
        residual = terms.residual(&ritz, theta);
        if residual < LANCZOS_TOL {
            return Ok((ritz, iterations));
        }
        start = ritz;
    }
    Err(Error::Solver {
        iterations,
        residual,
    })
}
