//! Determinant-space solvers: exact diagonalization in the Hartree–Fock
//! sector and CIPSI selection.

mod cipsi;
mod determinant;
mod fci;
mod slater_condon;

pub use cipsi::{cipsi_iterate, run_cipsi, CipsiState, CipsiStop, INTRUDER_TOL};
pub use determinant::{annihilate, connected, create, Determinant};
pub use fci::{
    dense_hamiltonian, export_statevector, fci_ground_state, DeterminantWavefunction, Sector,
    DENSE_LIMIT, FCI_DIM_CAP,
};
pub use slater_condon::{diagonal, matrix_element};
