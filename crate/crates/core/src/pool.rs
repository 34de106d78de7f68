//! Restricted, non-spin-complemented pool of single and double qubit
//! excitations: occupied → virtual with respect to the Hartree–Fock
//! determinant, conserving S_z.

use std::fmt::Write as _;

use crate::excitation::Excitation;

/// Interleaved ordering: even spin-orbitals are α, odd are β.
#[inline]
pub fn spin_of(p: usize) -> usize {
    p % 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoolOperator {
    pub id: usize,
    pub kind: Excitation,
    pub cnot_cost: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pool {
    n_qubits: usize,
    ops: Vec<PoolOperator>,
}

/// Whether singles may change spin. Such singles violate S_z and are
/// excluded from the standard pool.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PoolOptions {
    pub allow_spin_flip_singles: bool,
}

/// CNOT count of the evolution circuit: 3 per single, 13 per double.
pub fn cnot_count(kind: &Excitation) -> usize {
    kind.cnot_count()
}

/// Pool for `n_electrons` in `n_qubits` spin-orbitals.
///
/// Singles first, then doubles; each group sorted lexicographically on its
/// index tuple. Doubles are stored with `p < q` and `r < s`.
pub fn build_pool(n_qubits: usize, n_electrons: usize) -> Pool {
    build_pool_with(n_qubits, n_electrons, PoolOptions::default())
}

pub fn build_pool_with(n_qubits: usize, n_electrons: usize, opts: PoolOptions) -> Pool {
    let n_electrons = n_electrons.min(n_qubits);
    let occ: Vec<usize> = (0..n_electrons).collect();
    let virt: Vec<usize> = (n_electrons..n_qubits).collect();

    let mut singles = Vec::new();
    for &p in &virt {
        for &q in &occ {
            if opts.allow_spin_flip_singles || spin_of(p) == spin_of(q) {
                singles.push(Excitation::Single { p, q });
            }
        }
    }

    let mut doubles = Vec::new();
    for (i, &p) in virt.iter().enumerate() {
        for &q in &virt[i + 1..] {
            for (j, &r) in occ.iter().enumerate() {
                for &s in &occ[j + 1..] {
                    if spin_of(p) + spin_of(q) == spin_of(r) + spin_of(s) {
                        doubles.push(Excitation::Double { p, q, r, s });
                    }
                }
            }
        }
    }

    singles.sort();
    doubles.sort();
    let ops = singles
        .into_iter()
        .chain(doubles)
        .enumerate()
        .map(|(id, kind)| PoolOperator {
            id,
            kind,
            cnot_cost: cnot_count(&kind),
        })
        .collect();
    Pool { n_qubits, ops }
}

impl Pool {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&PoolOperator> {
        self.ops.get(id)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PoolOperator> {
        self.ops.iter()
    }

    pub fn id_of(&self, kind: &Excitation) -> Option<usize> {
        self.ops.iter().position(|o| o.kind == *kind)
    }

    /// `id kind p q [r s] cnot_cost` per operator.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            let _ = writeln!(out, "{} {} {}", op.id, op.kind, op.cnot_cost);
        }
        out
    }
}
