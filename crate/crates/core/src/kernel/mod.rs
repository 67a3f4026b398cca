//! Dense statevector kernel: Haar sampling, Pauli expectations, shot
//! sampling and exact ground states.

pub mod hamiltonian;
pub mod pauli;
pub mod shots;
pub mod state;

pub use hamiltonian::{ground_state, ground_state_with, EigenSolver, GroundState, TermList};
pub use pauli::{random_pauli_string, Pauli, PauliString};
pub use shots::{perturb_expectations, perturb_values, sample_shot, ShotOutcome};
pub use state::{haar_random_state, pauli_expectation, Statevector, MAX_DENSE_QUBITS};
