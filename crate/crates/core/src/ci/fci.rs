use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use super::determinant::{connected, Determinant};
use super::slater_condon::{diagonal, matrix_element};
use crate::error::{Error, Result};
use crate::ham_io::MolecularHamiltonian;
use crate::statevector::Statevector;

/// Largest sector the exact solver accepts.
pub const FCI_DIM_CAP: usize = 2_000_000;
/// Below this dimension the subspace matrix is diagonalized densely.
pub const DENSE_LIMIT: usize = 2000;

const DAVIDSON_TOL: f64 = 1e-9;
const DAVIDSON_MAX_SUBSPACE: usize = 20;
const DAVIDSON_MAX_ITER: usize = 5000;

/// Fixed (N_α, N_β) sector over `n_orb` spatial orbitals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sector {
    pub n_orb: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
}

impl Sector {
    /// Sector of the Hartree–Fock determinant of `h`.
    pub fn of(h: &MolecularHamiltonian) -> Self {
        let n = h.n_electrons;
        Self {
            n_orb: h.n_spin_orbitals / 2,
            n_alpha: n.div_ceil(2),
            n_beta: n / 2,
        }
    }

    pub fn dimension(&self) -> usize {
        binomial(self.n_orb, self.n_alpha).saturating_mul(binomial(self.n_orb, self.n_beta))
    }

    /// All determinants of the sector, ascending by bitstring.
    pub fn determinants(&self) -> Vec<Determinant> {
        let alphas = combinations(self.n_orb, self.n_alpha);
        let betas = combinations(self.n_orb, self.n_beta);
        let mut out: Vec<Determinant> = alphas
            .iter()
            .flat_map(|&a| betas.iter().map(move |&b| Determinant::from_alpha_beta(a, b)))
            .collect();
        out.sort_unstable();
        out
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn combinations(n: usize, k: usize) -> Vec<u64> {
    if k == 0 {
        return vec![0];
    }
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut v: u64 = (1 << k) - 1;
    let limit = 1u64 << n;
    while v < limit {
        out.push(v);
        // next mask with the same popcount
        let t = v | (v - 1);
        v = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
    }
    out
}

/// Sparse symmetric Hamiltonian restricted to a determinant list.
pub(crate) struct CiMatrix {
    pub diag: Vec<f64>,
    rows: Vec<Vec<(u32, f64)>>,
}

impl CiMatrix {
    pub fn build(h: &MolecularHamiltonian, dets: &[Determinant]) -> Self {
        let index: HashMap<Determinant, u32> =
            dets.iter().enumerate().map(|(i, d)| (*d, i as u32)).collect();
        let n = h.n_spin_orbitals;
        let (diag, rows) = dets
            .par_iter()
            .map(|&d| {
                let mut row: Vec<(u32, f64)> = connected(d, n)
                    .into_iter()
                    .filter_map(|k| {
                        let j = *index.get(&k)?;
                        let v = matrix_element(h, k, d);
                        (v != 0.0).then_some((j, v))
                    })
                    .collect();
                row.sort_unstable_by_key(|e| e.0);
                (diagonal(h, d), row)
            })
            .unzip();
        Self { diag, rows }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let mut acc = self.diag[i] * x[i];
            for &(j, v) in &self.rows[i] {
                acc += v * x[j as usize];
            }
            *yi = acc;
        });
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for &(j, v) in &self.rows[i] {
                m[(i, j as usize)] = v;
            }
        }
        m
    }
}

/// Dense Hamiltonian matrix over `dets`.
pub fn dense_hamiltonian(h: &MolecularHamiltonian, dets: &[Determinant]) -> DMatrix<f64> {
    CiMatrix::build(h, dets).to_dense()
}

fn lowest_dense(m: DMatrix<f64>) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(m);
    let (k, e) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, e)| (k, *e))
        .expect("non-empty matrix");
    (e, eig.eigenvectors.column(k).iter().copied().collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn davidson(m: &CiMatrix) -> (f64, Vec<f64>) {
    let n = m.dim();
    let start = (0..n)
        .min_by(|&a, &b| m.diag[a].total_cmp(&m.diag[b]))
        .unwrap_or(0);
    let mut guess = vec![0.0; n];
    guess[start] = 1.0;
    let mut basis: Vec<Vec<f64>> = vec![guess];
    let mut images: Vec<Vec<f64>> = Vec::new();
    let mut best = (f64::INFINITY, Vec::new());

    for _ in 0..DAVIDSON_MAX_ITER {
        while images.len() < basis.len() {
            let mut y = vec![0.0; n];
            m.apply(&basis[images.len()], &mut y);
            images.push(y);
        }
        let k = basis.len();
        let sub = DMatrix::from_fn(k, k, |i, j| dot(&basis[i], &images[j]));
        let sub = (&sub + sub.transpose()) * 0.5;
        let (theta, y) = lowest_dense(sub);

        let mut x = vec![0.0; n];
        let mut ax = vec![0.0; n];
        for (c, (v, av)) in y.iter().zip(basis.iter().zip(&images)) {
            for i in 0..n {
                x[i] += c * v[i];
                ax[i] += c * av[i];
            }
        }
        let resid: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a - theta * b).collect();
        let rnorm = dot(&resid, &resid).sqrt();
        best = (theta, x.clone());
        if rnorm < DAVIDSON_TOL {
            break;
        }
        if k >= DAVIDSON_MAX_SUBSPACE {
            basis = vec![x];
            images = vec![ax];
        }
        let mut t: Vec<f64> = resid
            .iter()
            .zip(&m.diag)
            .map(|(r, d)| {
                let denom = theta - d;
                let denom = if denom.abs() < 1e-12 { 1e-12f64.copysign(denom) } else { denom };
                r / denom
            })
            .collect();
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &t);
                t.iter_mut().zip(v).for_each(|(ti, vi)| *ti -= c * vi);
            }
        }
        let tn = dot(&t, &t).sqrt();
        if tn < 1e-14 {
            break;
        }
        t.iter_mut().for_each(|v| *v /= tn);
        basis.push(t);
    }
    best
}

/// Lowest eigenpair of `H` projected on `dets`.
pub(crate) fn lowest_eigenpair(h: &MolecularHamiltonian, dets: &[Determinant]) -> (f64, Vec<f64>) {
    let m = CiMatrix::build(h, dets);
    if m.dim() <= DENSE_LIMIT {
        lowest_dense(m.to_dense())
    } else {
        davidson(&m)
    }
}

/// Exact ground state of `H` in the Hartree–Fock sector.
pub fn fci_ground_state(h: &MolecularHamiltonian) -> Result<DeterminantWavefunction> {
    let sector = Sector::of(h);
    let dim = sector.dimension();
    if dim > FCI_DIM_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: FCI_DIM_CAP,
        });
    }
    let dets = sector.determinants();
    let (e, c) = lowest_eigenpair(h, &dets);
    let mut wf = DeterminantWavefunction::new(sector.n_orb, h.n_electrons, dets, c)?;
    wf.energy = Some(e);
    Ok(wf)
}

/// Real expansion over determinants with an optional variational energy.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminantWavefunction {
    pub n_orb: usize,
    pub n_electrons: usize,
    dets: Vec<Determinant>,
    coeffs: Vec<f64>,
    pub energy: Option<f64>,
}

impl DeterminantWavefunction {
    /// Normalizes and fixes the sign so the largest coefficient is positive.
    pub fn new(
        n_orb: usize,
        n_electrons: usize,
        dets: Vec<Determinant>,
        coeffs: Vec<f64>,
    ) -> Result<Self> {
        if dets.len() != coeffs.len() {
            return Err(Error::Invalid(format!(
                "{} determinants but {} coefficients",
                dets.len(),
                coeffs.len()
            )));
        }
        let limit = if 2 * n_orb >= 64 { u64::MAX } else { (1u64 << (2 * n_orb)) - 1 };
        if let Some(d) = dets.iter().find(|d| d.0 & !limit != 0 || d.n_electrons() as usize != n_electrons) {
            return Err(Error::Invalid(format!("determinant {d} outside the sector")));
        }
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Invalid("wavefunction has zero norm".into()));
        }
        let lead = coeffs
            .iter()
            .copied()
            .fold(0.0f64, |m, c| if c.abs() > m.abs() { c } else { m });
        let scale = lead.signum() / norm;
        let coeffs = coeffs.into_iter().map(|c| c * scale).collect();
        Ok(Self {
            n_orb,
            n_electrons,
            dets,
            coeffs,
            energy: None,
        })
    }

    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    pub fn determinants(&self) -> &[Determinant] {
        &self.dets
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (Determinant, f64)> + '_ {
        self.dets.iter().copied().zip(self.coeffs.iter().copied())
    }

    /// `⟨ψ|H|ψ⟩` evaluated with Slater–Condon rules.
    pub fn energy_with(&self, h: &MolecularHamiltonian) -> f64 {
        let m = CiMatrix::build(h, &self.dets);
        let mut y = vec![0.0; self.len()];
        m.apply(&self.coeffs, &mut y);
        dot(&self.coeffs, &y)
    }

    /// Jordan–Wigner statevector with the same amplitudes.
    pub fn to_statevector(&self) -> Result<Statevector> {
        let n = 2 * self.n_orb;
        if n > crate::statevector::MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (d, c) in self.iter() {
            amps[d.0 as usize] += c;
        }
        Statevector::from_amplitudes(n, amps)
    }

    /// Header then `coeff alpha_hex beta_hex` per determinant.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# determinant wavefunction\nnorb={} nelec={} ndets={}",
            self.n_orb,
            self.n_electrons,
            self.len()
        );
        if let Some(e) = self.energy {
            let _ = write!(out, " energy={e:e}");
        }
        out.push('\n');
        for (d, c) in self.iter() {
            let _ = writeln!(out, "{c:e} {:x} {:x}", d.alpha(), d.beta());
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Invalid("empty determinant file".into()))?;
        let field = |key: &str| {
            header
                .split_whitespace()
                .find_map(|t| t.strip_prefix(key))
                .ok_or_else(|| Error::Invalid(format!("determinant header lacks {key}")))
        };
        let n_orb: usize = field("norb=")?
            .parse()
            .map_err(|_| Error::Invalid("bad norb".into()))?;
        let n_electrons: usize = field("nelec=")?
            .parse()
            .map_err(|_| Error::Invalid("bad nelec".into()))?;
        let energy = match field("energy=") {
            Ok(v) => Some(v.parse().map_err(|_| Error::Invalid("bad energy".into()))?),
            Err(_) => None,
        };
        let mut dets = Vec::new();
        let mut coeffs = Vec::new();
        for (no, line) in lines {
            let bad = |msg: &str| Error::Parse {
                line: no + 1,
                msg: msg.to_string(),
            };
            let mut tok = line.split_whitespace();
            let c: f64 = tok
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("bad coefficient"))?;
            let mut mask = || {
                tok.next()
                    .and_then(|t| u64::from_str_radix(t.trim_start_matches("0x"), 16).ok())
                    .ok_or_else(|| bad("bad occupation mask"))
            };
            let a = mask()?;
            let b = mask()?;
            dets.push(Determinant::from_alpha_beta(a, b));
            coeffs.push(c);
        }
        if let Ok(n) = field("ndets=") {
            if n.parse::<usize>().ok() != Some(dets.len()) {
                return Err(Error::Invalid(format!(
                    "header promises {n} determinants, found {}",
                    dets.len()
                )));
            }
        }
        let mut wf = Self::new(n_orb, n_electrons, dets, coeffs)?;
        wf.energy = energy;
        Ok(wf)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Amplitudes of a determinant expansion as a statevector.
pub fn export_statevector(wf: &DeterminantWavefunction) -> Result<Statevector> {
    wf.to_statevector()
}
