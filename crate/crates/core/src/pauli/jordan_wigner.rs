//! Jordan–Wigner mapping of fermionic ladder operators onto Pauli strings,
//! and the qubit-excitation generators that drop the parity strings.

use std::collections::HashMap;

use num_complex::Complex64;

use super::{PauliString, QubitOperator};
use crate::error::{Error, Result};
use crate::excitation::Excitation;
use crate::ham_io::MolecularHamiltonian;

const HALF: Complex64 = Complex64::new(0.5, 0.0);
const HALF_I: Complex64 = Complex64::new(0.0, 0.5);

fn check_index(p: usize, n: usize) -> Result<()> {
    if p >= n {
        return Err(Error::IndexOutOfRange {
            what: "spin-orbital register",
            index: p,
            size: n,
        });
    }
    Ok(())
}

/// `a_p = (Z_0 ⊗ … ⊗ Z_{p−1}) ⊗ (X_p + iY_p)/2`.
pub fn jw_annihilation(p: usize, n: usize) -> Result<QubitOperator> {
    check_index(p, n)?;
    let prefix = (1u64 << p) - 1;
    let bit = 1u64 << p;
    Ok(QubitOperator::from_terms(
        n,
        [
            (PauliString::new(bit, prefix), HALF),
            (PauliString::new(bit, prefix | bit), HALF_I),
        ],
    ))
}

/// `a†_p`, the adjoint of [`jw_annihilation`].
pub fn jw_creation(p: usize, n: usize) -> Result<QubitOperator> {
    Ok(jw_annihilation(p, n)?.adjoint())
}

/// Qubit annihilator `Q_p = (X_p + iY_p)/2`, without the parity prefix.
pub fn qubit_annihilation(p: usize, n: usize) -> Result<QubitOperator> {
    check_index(p, n)?;
    let bit = 1u64 << p;
    Ok(QubitOperator::from_terms(
        n,
        [
            (PauliString::new(bit, 0), HALF),
            (PauliString::new(bit, bit), HALF_I),
        ],
    ))
}

/// A product of fermionic ladder operators with a scalar weight.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm {
    /// `(spin-orbital, is_creation)`, leftmost factor first.
    pub ops: Vec<(usize, bool)>,
    pub coeff: Complex64,
}

impl FermionTerm {
    pub fn new(ops: Vec<(usize, bool)>, coeff: Complex64) -> Self {
        Self { ops, coeff }
    }

    /// Jordan–Wigner image on `n` qubits.
    pub fn to_qubit_operator(&self, n: usize) -> Result<QubitOperator> {
        let mut acc = QubitOperator::identity(n, 1.0);
        for &(p, dagger) in &self.ops {
            let f = if dagger {
                jw_creation(p, n)?
            } else {
                jw_annihilation(p, n)?
            };
            acc = acc.multiply(&f)?;
        }
        Ok(acc.scale(self.coeff))
    }
}

/// Jordan–Wigner image of the full molecular Hamiltonian, including
/// `core_energy · I`.
#[allow(clippy::needless_range_loop)]
pub fn jw_hamiltonian(h: &MolecularHamiltonian) -> QubitOperator {
    let n = h.n_spin_orbitals;
    let create: Vec<QubitOperator> = (0..n).map(|p| jw_creation(p, n).unwrap()).collect();
    let annihilate: Vec<QubitOperator> =
        (0..n).map(|p| jw_annihilation(p, n).unwrap()).collect();

    let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
    let mut add = |op: &QubitOperator, w: f64| {
        for (s, c) in op.iter() {
            *acc.entry(*s).or_default() += c * w;
        }
    };
    add(&QubitOperator::identity(n, 1.0), h.core_energy);

    for p in 0..n {
        for q in 0..n {
            let w = h.h1(p, q);
            if w != 0.0 {
                add(&(&create[p] * &annihilate[q]), w);
            }
        }
    }

    // a†_p a†_r a_s a_q
    for p in 0..n {
        for r in (0..n).filter(|&r| r != p) {
            let pr = &create[p] * &create[r];
            for s in 0..n {
                for q in (0..n).filter(|&q| q != s) {
                    let w = h.h2(p, q, r, s);
                    if w == 0.0 {
                        continue;
                    }
                    let sq = &annihilate[s] * &annihilate[q];
                    add(&(&pr * &sq), w);
                }
            }
        }
    }

    QubitOperator::from_terms(n, acc)
}

/// Anti-hermitian generator `T` of the qubit-excitation evolution `exp(θT)`.
///
/// * single `{p, q}`: `Q†_p Q_q − Q†_q Q_p = −(i/2)(X_q Y_p − Y_q X_p)`
/// * double `{p, q, r, s}`: `Q†_p Q†_q Q_r Q_s − Q†_r Q†_s Q_p Q_q`, eight
///   strings of weight `±i/8`.
pub fn qubit_excitation_generator(kind: &Excitation, n: usize) -> Result<QubitOperator> {
    let q = |p: usize| qubit_annihilation(p, n);
    let qd = |p: usize| qubit_annihilation(p, n).map(|o| o.adjoint());
    let raising = match *kind {
        Excitation::Single { p, q: src } => qd(p)?.multiply(&q(src)?)?,
        Excitation::Double { p, q: q2, r, s } => qd(p)?
            .multiply(&qd(q2)?)?
            .multiply(&q(r)?)?
            .multiply(&q(s)?)?,
    };
    Ok(&raising - &raising.adjoint())
}
