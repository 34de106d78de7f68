//! Dense statevector simulation of qubit-excitation circuits.
//!
//! Basis index bit `p` is the occupation of spin-orbital `p`. Qubit-excitation
//! evolutions are applied as exact Givens rotations on amplitude pairs; the
//! generator satisfies `T|src⟩ = |dst⟩`, `T|dst⟩ = −|src⟩`, so
//!
//! ```text
//! exp(θT)|src⟩ = cos θ |src⟩ + sin θ |dst⟩
//! ```
//!
//! No fermionic parity signs appear: qubit excitations carry no Z strings.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::excitation::Excitation;
use crate::pauli::{QubitOperator, SparseOperator};

/// Register size guard.
pub const MAX_QUBITS: usize = 24;

/// Anything that can act linearly on a statevector.
pub trait Observable: Sync {
    fn n_qubits(&self) -> usize;
    fn apply(&self, psi: &[Complex64]) -> Vec<Complex64>;
}

impl Observable for QubitOperator {
    fn n_qubits(&self) -> usize {
        QubitOperator::n_qubits(self)
    }
    fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        QubitOperator::apply(self, psi)
    }
}

impl Observable for SparseOperator {
    fn n_qubits(&self) -> usize {
        SparseOperator::n_qubits(self)
    }
    fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        SparseOperator::apply(self, psi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    Ok(())
}

/// `⟨a|b⟩` over raw amplitude slices, summed in index order.
#[inline]
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// In-place `exp(θT)` on raw amplitudes.
#[inline]
pub(crate) fn rotate(amps: &mut [Complex64], n_qubits: usize, exc: &Excitation, theta: f64) {
    if theta == 0.0 {
        return;
    }
    let (sin, cos) = theta.sin_cos();
    exc.for_each_pair(n_qubits, |src, dst| {
        let a = amps[src];
        let b = amps[dst];
        amps[src] = a * cos - b * sin;
        amps[dst] = b * cos + a * sin;
    });
}

/// `⟨λ|T φ⟩` without materializing `T φ`.
#[inline]
pub(crate) fn generator_matrix_element(
    lambda: &[Complex64],
    phi: &[Complex64],
    n_qubits: usize,
    exc: &Excitation,
) -> Complex64 {
    let mut acc = Complex64::default();
    exc.for_each_pair(n_qubits, |src, dst| {
        acc += lambda[dst].conj() * phi[src] - lambda[src].conj() * phi[dst];
    });
    acc
}

impl Statevector {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                what: "basis",
                index,
                size: dim,
            });
        }
        let mut amps = vec![Complex64::default(); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Hartree–Fock determinant: the lowest `n_electrons` qubits occupied.
    pub fn prepare_hf(n_qubits: usize, n_electrons: usize) -> Result<Self> {
        if n_electrons > n_qubits {
            return Err(Error::TooManyElectrons {
                n_electrons,
                n_qubits,
            });
        }
        Self::basis(n_qubits, (1usize << n_electrons) - 1)
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::Invalid(format!(
                "{} amplitudes do not form a {n_qubits}-qubit state",
                amps.len()
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Invalid("cannot normalize the zero vector".into()));
        }
        self.amps.iter_mut().for_each(|a| *a /= n);
        Ok(())
    }

    fn check_same(&self, other_qubits: usize) -> Result<()> {
        if self.n_qubits != other_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other_qubits,
            });
        }
        Ok(())
    }

    /// In-place `exp(θT)|ψ⟩`.
    pub fn apply_excitation(&mut self, exc: &Excitation, theta: f64) -> Result<()> {
        exc.check_range(self.n_qubits)?;
        rotate(&mut self.amps, self.n_qubits, exc, theta);
        Ok(())
    }

    /// `T|ψ⟩`.
    pub fn apply_generator(&self, exc: &Excitation) -> Result<Self> {
        exc.check_range(self.n_qubits)?;
        let mut out = vec![Complex64::default(); self.amps.len()];
        exc.for_each_pair(self.n_qubits, |src, dst| {
            out[dst] = self.amps[src];
            out[src] = -self.amps[dst];
        });
        Ok(Self {
            n_qubits: self.n_qubits,
            amps: out,
        })
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other.n_qubits)?;
        Ok(inner(&self.amps, &other.amps))
    }

    /// `⟨ψ|H|ψ⟩`. An imaginary part above `1e-10` is reported as an error,
    /// since it can only come from a non-hermitian operator.
    pub fn expectation(&self, h: &dyn Observable) -> Result<f64> {
        self.check_same(h.n_qubits())?;
        let e = inner(&self.amps, &h.apply(&self.amps));
        if e.im.abs() > 1e-10 {
            return Err(Error::NonHermitian(e.im));
        }
        Ok(e.re)
    }

    /// Number of set bits of every basis state carrying weight above `tol`.
    pub fn particle_numbers(&self, tol: f64) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > tol)
            .map(|(i, _)| i.count_ones())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `index amplitude_re amplitude_im` per nonzero amplitude.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() > 0.0 {
                let _ = writeln!(out, "{i} {:e} {:e}", a.re, a.im);
            }
        }
        out
    }
}

/// `E(θ) = ⟨ψ(θ)|H|ψ(θ)⟩` and `∂E/∂θ_k` for every ansatz angle.
///
/// Adjoint sweep: the forward pass keeps only the final state. Walking
/// backward, `λ = H|ψ⟩` and `|ψ⟩` are both un-rotated one operator at a time and
/// `∂E/∂θ_k = 2·Re⟨λ_k|T_k|ψ_k⟩`.
pub fn energy_and_gradient(ansatz: &Ansatz, h: &dyn Observable) -> Result<(f64, Vec<f64>)> {
    let n = ansatz.n_qubits();
    if h.n_qubits() != n {
        return Err(Error::QubitMismatch {
            left: n,
            right: h.n_qubits(),
        });
    }
    let mut psi = ansatz.prepare()?.amps;
    let mut lambda = h.apply(&psi);
    let e = inner(&psi, &lambda);
    if e.im.abs() > 1e-10 {
        return Err(Error::NonHermitian(e.im));
    }
    let mut grad = vec![0.0; ansatz.len()];
    for (k, (exc, theta)) in ansatz.iter().enumerate().rev() {
        grad[k] = 2.0 * generator_matrix_element(&lambda, &psi, n, exc).re;
        rotate(&mut psi, n, exc, -theta);
        rotate(&mut lambda, n, exc, -theta);
    }
    Ok((e.re, grad))
}

/// `F(θ) = |⟨target|ψ(θ)⟩|²` and its gradient
/// `∂F/∂θ_k = 2·Re(⟨target|ψ⟩* ⟨target|∂_k ψ⟩)`, by the same adjoint sweep
/// with the target playing the role of `λ`.
pub fn overlap_and_gradient(ansatz: &Ansatz, target: &Statevector) -> Result<(f64, Vec<f64>)> {
    let n = ansatz.n_qubits();
    if target.n_qubits != n {
        return Err(Error::QubitMismatch {
            left: n,
            right: target.n_qubits,
        });
    }
    let mut psi = ansatz.prepare()?.amps;
    let mut lambda = target.amps.clone();
    let ov = inner(&lambda, &psi);
    let mut grad = vec![0.0; ansatz.len()];
    for (k, (exc, theta)) in ansatz.iter().enumerate().rev() {
        let d = generator_matrix_element(&lambda, &psi, n, exc);
        grad[k] = 2.0 * (ov.conj() * d).re;
        rotate(&mut psi, n, exc, -theta);
        rotate(&mut lambda, n, exc, -theta);
    }
    Ok((ov.norm_sqr(), grad))
}
