#![allow(dead_code)]

use num_complex::Complex64;
use oadapt::ham_io::{to_spin_orbital, FcidumpData, MolecularHamiltonian};
use oadapt::pauli::{jw_hamiltonian, SparseOperator};
use oadapt::{build_pool, Ansatz, Statevector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct System {
    pub data: FcidumpData,
    pub mol: MolecularHamiltonian,
    pub h: SparseOperator,
}

impl System {
    pub fn fci(&self) -> f64 {
        self.data.references.fci.expect("fixture carries REF_FCI")
    }

    pub fn n_qubits(&self) -> usize {
        self.mol.n_spin_orbitals
    }

    pub fn n_electrons(&self) -> usize {
        self.mol.n_electrons
    }
}

pub fn fixture_path(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn load(name: &str) -> System {
    let data = FcidumpData::read(fixture_path(name)).expect("fixture parses");
    let mol = to_spin_orbital(&data);
    let h = SparseOperator::from_qubit_operator(&jw_hamiltonian(&mol));
    System { data, mol, h }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m` operators drawn from the standard pool with angles in [-π, π].
pub fn random_ansatz(rng: &mut ChaCha8Rng, n_qubits: usize, n_electrons: usize, m: usize) -> Ansatz {
    let pool = build_pool(n_qubits, n_electrons);
    let mut a = Ansatz::hartree_fock(n_qubits, n_electrons);
    for _ in 0..m {
        let op = pool.get(rng.random_range(0..pool.len())).unwrap();
        a.push(op.kind, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI));
    }
    a
}

/// Normalized real state with random amplitudes on every basis state.
pub fn random_real_state(rng: &mut ChaCha8Rng, n_qubits: usize) -> Statevector {
    let amps = (0..1usize << n_qubits)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
        .collect();
    let mut s = Statevector::from_amplitudes(n_qubits, amps).unwrap();
    s.normalize().unwrap();
    s
}
