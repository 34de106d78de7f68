use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::string::PauliString;
use crate::error::{Error, Result};

/// Terms whose coefficient magnitude falls below this are dropped.
pub const PRUNE_TOL: f64 = 1e-14;

/// Weighted sum of Pauli strings on a fixed number of qubits.
///
/// Terms iterate in `(z_mask, x_mask)` lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitOperator {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl QubitOperator {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Self {
        Self::from_terms(n_qubits, [(PauliString::IDENTITY, Complex64::new(coeff, 0.0))])
    }

    /// Sums duplicate strings and prunes negligible coefficients.
    pub fn from_terms(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (PauliString, Complex64)>,
    ) -> Self {
        let mut out = Self::zero(n_qubits);
        for (s, c) in terms {
            debug_assert!(s.support_len() <= n_qubits);
            *out.terms.entry(s).or_default() += c;
        }
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Operator product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (phase, s) = a.mul(b);
                *acc.entry(s).or_default() += ca * cb * phase;
            }
        }
        let mut out = Self {
            n_qubits: self.n_qubits,
            terms: acc,
        };
        out.prune();
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_terms(
            self.n_qubits,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(s, c)| (*s, *c)),
        ))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_terms(
            self.n_qubits,
            self.terms.iter().map(|(s, c)| (*s, c * factor)),
        )
    }

    /// Hermitian conjugate. Pauli strings are hermitian, so only the
    /// coefficients are conjugated.
    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(s, c)| (*s, c.conj())).collect(),
        }
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.multiply(other)?;
        let ba = other.multiply(self)?;
        ab.try_add(&ba.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest coefficient deviation between `self` and its adjoint.
    pub fn hermiticity_error(&self) -> f64 {
        self.terms
            .values()
            .map(|c| 2.0 * c.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Dense `2^N × 2^N` matrix; basis index bit `k` is the state of qubit `k`.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (s, c) in &self.terms {
            for v in 0..dim as u64 {
                let (phase, w) = s.apply_to_basis(v);
                m[(w as usize, v as usize)] += c * phase;
            }
        }
        m
    }

    /// `out = self |psi⟩`, straight from the Pauli terms.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); psi.len()];
        for (s, c) in &self.terms {
            for (v, amp) in psi.iter().enumerate() {
                if amp.re == 0.0 && amp.im == 0.0 {
                    continue;
                }
                let (phase, w) = s.apply_to_basis(v as u64);
                out[w as usize] += c * phase * amp;
            }
        }
        out
    }

    /// One term per line: `coeff_re coeff_im pauli-word`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (s, c) in &self.terms {
            let _ = writeln!(out, "{:e} {:e} {}", c.re, c.im, s);
        }
        out
    }

    /// Inverse of [`QubitOperator::dump`].
    pub fn parse_dump(n_qubits: usize, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let mut it = line.splitn(3, char::is_whitespace);
            let re: f64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("bad real part"))?;
            let im: f64 = it
                .next()
                .and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| bad("bad imaginary part"))?;
            let word = it.next().unwrap_or("I");
            let s = PauliString::parse(word).ok_or_else(|| bad("bad pauli word"))?;
            if s.support_len() > n_qubits {
                return Err(bad("pauli word exceeds qubit count"));
            }
            terms.push((s, Complex64::new(re, im)));
        }
        Ok(Self::from_terms(n_qubits, terms))
    }
}

impl Add for &QubitOperator {
    type Output = QubitOperator;

    /// Panics on a qubit-count mismatch; use [`QubitOperator::try_add`] to handle it.
    fn add(self, rhs: Self) -> QubitOperator {
        self.try_add(rhs).expect("qubit count mismatch in operator sum")
    }
}

impl Sub for &QubitOperator {
    type Output = QubitOperator;

    fn sub(self, rhs: Self) -> QubitOperator {
        self + &(-rhs)
    }
}

impl Neg for &QubitOperator {
    type Output = QubitOperator;

    fn neg(self) -> QubitOperator {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &QubitOperator {
    type Output = QubitOperator;

    /// Panics on a qubit-count mismatch; use [`QubitOperator::multiply`] to handle it.
    fn mul(self, rhs: Self) -> QubitOperator {
        self.multiply(rhs)
            .expect("qubit count mismatch in operator product")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(n: usize, terms: &[(&str, f64, f64)]) -> QubitOperator {
        QubitOperator::from_terms(
            n,
            terms
                .iter()
                .map(|(w, re, im)| (PauliString::parse(w).unwrap(), Complex64::new(*re, *im))),
        )
    }

    #[test]
    fn x_times_y_is_i_z() {
        let p = &op(1, &[("X0", 1.0, 0.0)]) * &op(1, &[("Y0", 1.0, 0.0)]);
        assert_eq!(p, op(1, &[("Z0", 0.0, 1.0)]));
    }

    #[test]
    fn identity_is_neutral() {
        let a = op(2, &[("X0 Z1", 0.3, -0.2), ("Y1", 1.5, 0.0)]);
        let i = QubitOperator::identity(2, 1.0);
        assert_eq!(&i * &a, a);
        assert_eq!(&a * &i, a);
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = QubitOperator::identity(2, 1.0);
        let b = QubitOperator::identity(3, 1.0);
        assert!(matches!(
            a.multiply(&b),
            Err(Error::QubitMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn pruning_drops_cancelled_terms() {
        let a = op(1, &[("X0", 1.0, 0.0), ("Z0", 1e-15, 0.0)]);
        assert_eq!(a.len(), 1);
        assert!((&a - &a).is_empty());
    }

    #[test]
    fn iteration_order_is_z_then_x() {
        let a = op(2, &[("Z0", 1.0, 0.0), ("X1", 1.0, 0.0), ("X0", 1.0, 0.0)]);
        let words: Vec<String> = a.iter().map(|(s, _)| s.to_string()).collect();
        assert_eq!(words, ["X0", "X1", "Z0"]);
    }

    #[test]
    fn dump_round_trip() {
        let a = op(4, &[("X0 Z1 Y3", 0.125, -0.5), ("I", -1.25, 0.0)]);
        let text = a.dump();
        assert!(text.contains("X0 Z1 Y3"));
        assert_eq!(QubitOperator::parse_dump(4, &text).unwrap(), a);
    }

    #[test]
    fn apply_matches_dense() {
        let a = op(3, &[("X0 Y2", 0.7, 0.1), ("Z1", -0.4, 0.0), ("Y0 Y1", 0.0, 0.3)]);
        let psi: Vec<Complex64> = (0..8)
            .map(|k| Complex64::new(k as f64 * 0.1, 1.0 - k as f64 * 0.05))
            .collect();
        let dense = a.to_dense();
        let direct = a.apply(&psi);
        for r in 0..8 {
            let expect: Complex64 = (0..8).map(|c| dense[(r, c)] * psi[c]).sum();
            assert!((expect - direct[r]).norm() < 1e-14);
        }
    }
}
