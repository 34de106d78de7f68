//! Selected CI with second-order perturbative selection.

use std::collections::{HashMap, HashSet};

use super::determinant::{connected, Determinant};
use super::fci::{lowest_eigenpair, DeterminantWavefunction, Sector};
use super::slater_condon::{diagonal, matrix_element};
use crate::error::{Error, Result};
use crate::ham_io::MolecularHamiltonian;

/// Denominators smaller than this mark an intruder determinant.
pub const INTRUDER_TOL: f64 = 1e-10;

/// When to stop growing the variational space. Either criterion suffices.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CipsiStop {
    /// Stop once `|E2| <= target_e2`.
    pub target_e2: Option<f64>,
    /// Stop once the space holds this many determinants; growth is capped here.
    pub max_dets: Option<usize>,
}

/// One CIPSI iteration: variational space, its ground state and the
/// perturbative correction from every external determinant.
#[derive(Clone, Debug)]
pub struct CipsiState {
    pub iteration: usize,
    pub dets: Vec<Determinant>,
    pub coeffs: Vec<f64>,
    pub e_var: f64,
    pub e2: f64,
    /// External determinants forced in at the last growth step.
    pub n_intruders: usize,
    /// `(κ, e_κ)` for every external determinant, `e_κ = NaN` for intruders.
    contributions: Vec<(Determinant, f64)>,
}

impl CipsiState {
    /// `R = {HF}`.
    pub fn initial(h: &MolecularHamiltonian) -> Self {
        let hf = Determinant(h.hf_mask());
        Self::from_space(h, vec![hf], 0, 0)
    }

    fn from_space(
        h: &MolecularHamiltonian,
        mut dets: Vec<Determinant>,
        iteration: usize,
        n_intruders: usize,
    ) -> Self {
        dets.sort_unstable();
        let (e_var, coeffs) = lowest_eigenpair(h, &dets);
        let contributions = pt2_contributions(h, &dets, &coeffs, e_var);
        let e2 = contributions.iter().map(|c| c.1).filter(|e| e.is_finite()).sum();
        Self {
            iteration,
            dets,
            coeffs,
            e_var,
            e2,
            n_intruders,
            contributions,
        }
    }

    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    /// `E_var + E2`.
    pub fn total_energy(&self) -> f64 {
        self.e_var + self.e2
    }

    pub fn n_external(&self) -> usize {
        self.contributions.len()
    }

    pub fn wavefunction(&self, h: &MolecularHamiltonian) -> Result<DeterminantWavefunction> {
        let mut wf = DeterminantWavefunction::new(
            h.n_spin_orbitals / 2,
            h.n_electrons,
            self.dets.clone(),
            self.coeffs.clone(),
        )?;
        wf.energy = Some(self.e_var);
        Ok(wf)
    }
}

/// `e_κ = (Σ_I c_I ⟨κ|H|I⟩)² / (E_var − ⟨κ|H|κ⟩)` for every determinant
/// connected to the space, ascending by bitstring.
fn pt2_contributions(
    h: &MolecularHamiltonian,
    dets: &[Determinant],
    coeffs: &[f64],
    e_var: f64,
) -> Vec<(Determinant, f64)> {
    let inside: HashSet<Determinant> = dets.iter().copied().collect();
    let mut num: HashMap<Determinant, f64> = HashMap::new();
    for (&d, &c) in dets.iter().zip(coeffs) {
        for k in connected(d, h.n_spin_orbitals) {
            if inside.contains(&k) {
                continue;
            }
            *num.entry(k).or_insert(0.0) += c * matrix_element(h, k, d);
        }
    }
    let mut out: Vec<(Determinant, f64)> = num
        .into_iter()
        .filter(|(_, v)| *v != 0.0)
        .map(|(k, v)| {
            let denom = e_var - diagonal(h, k);
            let e = if denom.abs() < INTRUDER_TOL {
                f64::NAN
            } else {
                v * v / denom
            };
            (k, e)
        })
        .collect();
    out.sort_unstable_by_key(|c| c.0);
    out
}

/// Doubles the space (capped at `max_dets`) with the largest `|e_κ|`,
/// rediagonalizes and recomputes E2. Intruders are taken first.
pub fn cipsi_iterate(
    h: &MolecularHamiltonian,
    state: &CipsiState,
    max_dets: Option<usize>,
) -> CipsiState {
    let target = max_dets.map_or(2 * state.len(), |m| (2 * state.len()).min(m));
    let quota = target.saturating_sub(state.len());
    let mut ranked: Vec<&(Determinant, f64)> = state.contributions.iter().collect();
    ranked.sort_by(|a, b| match (a.1.is_nan(), b.1.is_nan()) {
        (true, false) => std::cmp::Ordering::Less,
        (false, true) => std::cmp::Ordering::Greater,
        _ => b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)),
    });
    let chosen: Vec<&(Determinant, f64)> = ranked.into_iter().take(quota).collect();
    let n_intruders = chosen.iter().filter(|c| c.1.is_nan()).count();
    if n_intruders > 0 {
        log::warn!("CIPSI: {n_intruders} intruder determinant(s) added to the space");
    }
    let mut dets = state.dets.clone();
    dets.extend(chosen.into_iter().map(|c| c.0));
    CipsiState::from_space(h, dets, state.iteration + 1, n_intruders)
}

/// Grows from `{HF}` until a stop criterion holds or the space is complete.
/// Returns every iterate, the last one being the result.
pub fn run_cipsi(h: &MolecularHamiltonian, stop: CipsiStop) -> Result<Vec<CipsiState>> {
    if stop.target_e2.is_none() && stop.max_dets.is_none() {
        return Err(Error::Invalid(
            "CIPSI needs a target E2 or a determinant budget".into(),
        ));
    }
    if stop.max_dets == Some(0) {
        return Err(Error::Invalid("CIPSI determinant budget must be positive".into()));
    }
    let full = Sector::of(h).dimension();
    let mut history = vec![CipsiState::initial(h)];
    loop {
        let s = history.last().expect("non-empty history");
        log::info!(
            "CIPSI iter {} ndets={} E_var={:.12} E2={:.3e}",
            s.iteration,
            s.len(),
            s.e_var,
            s.e2
        );
        let done = stop.target_e2.is_some_and(|t| s.e2.abs() <= t)
            || stop.max_dets.is_some_and(|m| s.len() >= m)
            || s.len() >= full
            || s.n_external() == 0;
        if done {
            break;
        }
        let next = cipsi_iterate(h, s, stop.max_dets);
        history.push(next);
    }
    Ok(history)
}
