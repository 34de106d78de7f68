//! Pauli-string operator algebra and the Jordan–Wigner mapping.

mod jordan_wigner;
mod operator;
mod sparse;
mod string;

pub use jordan_wigner::{
    jw_annihilation, jw_creation, jw_hamiltonian, qubit_annihilation,
    qubit_excitation_generator, FermionTerm,
};
pub use operator::{QubitOperator, PRUNE_TOL};
pub use sparse::SparseOperator;
pub use string::PauliString;
