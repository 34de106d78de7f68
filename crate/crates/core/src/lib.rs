//! Statevector simulation of adaptive variational ansätze built from
//! qubit-excitation evolutions.
//!
//! The crate reads molecular Hamiltonians from FCIDUMP files, maps them to
//! qubits with the Jordan–Wigner transformation, and grows ansätze either by
//! energy gradients (QEB-ADAPT-VQE) or by maximizing overlap with a target
//! wavefunction (Overlap-ADAPT-VQE). Exact and selected CI solvers provide
//! the targets.
//!
//! ```
//! use oadapt::ham_io::{to_spin_orbital, FcidumpData};
//! use oadapt::ci::fci_ground_state;
//!
//! let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/h2.fcidump");
//! let data = FcidumpData::read(path)?;
//! let h = to_spin_orbital(&data);
//! let fci = fci_ground_state(&h)?;
//! assert!((fci.energy.unwrap() - data.references.fci.unwrap()).abs() < 1e-9);
//! # Ok::<(), oadapt::Error>(())
//! ```

pub mod adapt;
pub mod ansatz;
pub mod ci;
pub mod error;
pub mod excitation;
pub mod ham_io;
pub mod optimizer;
pub mod overlap_adapt;
pub mod pauli;
pub mod pool;
pub mod statevector;

pub use ansatz::{Ansatz, ResourceCount};
pub use error::{Error, Result};
pub use excitation::Excitation;
pub use ham_io::{FcidumpData, MolecularHamiltonian};
pub use pool::{build_pool, Pool, PoolOperator};
pub use statevector::Statevector;
