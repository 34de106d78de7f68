//! Overlap-ADAPT-VQE: grow a compact ansatz by maximizing its overlap with a
//! target wavefunction, then hand it to ADAPT-VQE as the initial state.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::adapt::{argmax_abs, run_adapt, AdaptOptions, AdaptTrace};
use crate::ansatz::Ansatz;
use crate::ci::{fci_ground_state, run_cipsi, CipsiStop, DeterminantWavefunction};
use crate::error::{Error, Result};
use crate::excitation::Excitation;
use crate::ham_io::MolecularHamiltonian;
use crate::optimizer::{minimize_with_restarts, BfgsOptions};
use crate::pool::Pool;
use crate::statevector::{
    generator_matrix_element, inner, overlap_and_gradient, rotate, Observable, Statevector,
};

/// Overlaps below this make the four-angle formula singular.
pub const MIN_OVERLAP: f64 = 1e-12;

/// Normalized target state `|Ψ_ref⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetWavefunction {
    state: Statevector,
}

impl TargetWavefunction {
    pub fn from_statevector(mut state: Statevector) -> Result<Self> {
        state.normalize()?;
        Ok(Self { state })
    }

    /// Embeds each determinant coefficient at its bitstring index.
    pub fn from_determinants(wf: &DeterminantWavefunction) -> Result<Self> {
        Self::from_statevector(wf.to_statevector()?)
    }

    /// The state prepared by `ansatz`.
    pub fn from_ansatz(ansatz: &Ansatz) -> Result<Self> {
        Self::from_statevector(ansatz.prepare()?)
    }

    pub fn hartree_fock(n_qubits: usize, n_electrons: usize) -> Result<Self> {
        Self::from_statevector(Statevector::prepare_hf(n_qubits, n_electrons)?)
    }

    pub fn state(&self) -> &Statevector {
        &self.state
    }

    pub fn n_qubits(&self) -> usize {
        self.state.n_qubits()
    }

    /// `1 − |⟨ref|ψ⟩|²`.
    pub fn infidelity(&self, psi: &Statevector) -> Result<f64> {
        Ok(1.0 - self.state.overlap(psi)?.norm_sqr())
    }
}

fn check_qubits(target: &TargetWavefunction, n: usize) -> Result<()> {
    if target.n_qubits() != n {
        return Err(Error::QubitMismatch {
            left: target.n_qubits(),
            right: n,
        });
    }
    Ok(())
}

/// `|⟨ref|iB ψ⟩| = |⟨ref|Tψ⟩|` for every pool operator, in pool order.
pub fn screen_overlap_gradients(
    target: &TargetWavefunction,
    state: &Statevector,
    pool: &Pool,
) -> Result<Vec<f64>> {
    let n = state.n_qubits();
    check_qubits(target, n)?;
    if pool.n_qubits() != n {
        return Err(Error::QubitMismatch {
            left: pool.n_qubits(),
            right: n,
        });
    }
    let r = target.state.amplitudes();
    let psi = state.amplitudes();
    Ok((0..pool.len())
        .into_par_iter()
        .map(|i| {
            let exc = &pool.get(i).expect("index in range").kind;
            generator_matrix_element(r, psi, n, exc).norm()
        })
        .collect())
}

/// `|⟨ref|iBψ⟩|` from overlaps at four angles, `f(θ) = ⟨ref|exp(θT)ψ⟩`:
///
/// ```text
/// |½|f(−π/2)|² − ½|f(π/2)|² + (2/√3)|f(π/3)|² − (2/√3)|f(−π/3)|²| / (2|f(0)|)
/// ```
///
/// Exact when `⟨ref|ψ⟩` and `⟨ref|Tψ⟩` are real; a warning is logged
/// otherwise.
pub fn four_angle_gradient(
    target: &TargetWavefunction,
    state: &Statevector,
    exc: &Excitation,
) -> Result<f64> {
    let n = state.n_qubits();
    check_qubits(target, n)?;
    exc.check_range(n)?;
    let r = target.state.amplitudes();
    let o = inner(r, state.amplitudes());
    if o.norm() <= MIN_OVERLAP {
        return Err(Error::VanishingOverlap(o.norm()));
    }
    let f2 = |theta: f64| {
        let mut amps = state.amplitudes().to_vec();
        rotate(&mut amps, n, exc, theta);
        inner(r, &amps).norm_sqr()
    };
    let k = 2.0 / 3f64.sqrt();
    let combo = 0.5 * f2(-FRAC_PI_2) - 0.5 * f2(FRAC_PI_2) + k * f2(FRAC_PI_3)
        - k * f2(-FRAC_PI_3);

    let g = generator_matrix_element(r, state.amplitudes(), n, exc);
    let cross: Complex64 = o.conj() * g;
    if cross.im.abs() > 1e-10 * (1.0 + cross.norm()) {
        log::warn!(
            "four-angle gradient: ⟨ref|ψ⟩* ⟨ref|iBψ⟩ has imaginary part {:.3e}; \
             the formula returns only the real part",
            cross.im
        );
    }
    Ok(combo.abs() / (2.0 * o.norm()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapOptions {
    /// Stop at this many operators (including the initial ones).
    pub p_max: usize,
    /// Stop when the largest overlap gradient falls below this.
    pub gtol_overlap: f64,
    pub bfgs: BfgsOptions,
    pub restarts: usize,
    pub seed: u64,
    pub restart_scale: f64,
    /// Stop once the ansatz energy reaches this value (needs a Hamiltonian).
    pub stop_energy: Option<f64>,
}

impl Default for OverlapOptions {
    fn default() -> Self {
        Self {
            p_max: usize::MAX,
            gtol_overlap: 1e-7,
            bfgs: BfgsOptions::default(),
            restarts: 0,
            seed: 0,
            restart_scale: 0.1,
            stop_energy: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapStep {
    pub iter: usize,
    pub op_id: usize,
    pub kind: Excitation,
    pub grad: f64,
    /// `1 − |⟨ref|ψ⟩|²` after optimization.
    pub infidelity: f64,
    pub energy: Option<f64>,
    pub params: usize,
    pub evals: usize,
    pub thetas: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OverlapTrace {
    pub initial_infidelity: f64,
    pub steps: Vec<OverlapStep>,
}

pub const OVERLAP_CSV_HEADER: &str = "iter,op_id,kind,grad,infidelity,energy,params";

impl OverlapTrace {
    pub fn final_infidelity(&self) -> f64 {
        self.steps
            .last()
            .map_or(self.initial_infidelity, |s| s.infidelity)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(OVERLAP_CSV_HEADER);
        out.push('\n');
        for s in &self.steps {
            let energy = s.energy.map(|e| format!("{e:.12}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{:.12e},{:.12e},{},{}",
                s.iter,
                s.op_id,
                s.kind.to_string().replace(' ', ":"),
                s.grad,
                s.infidelity,
                energy,
                s.params
            );
        }
        out
    }
}

/// Grow `init` towards `target`: append the operator with the largest
/// overlap gradient, then maximize `|⟨ref|ψ⟩|²` over all angles (warm start,
/// new angle at zero). With `h` given, the energy of each iterate is
/// recorded and `stop_energy` is honored.
pub fn run_overlap_adapt(
    target: &TargetWavefunction,
    pool: &Pool,
    init: Ansatz,
    opts: &OverlapOptions,
    h: Option<&dyn Observable>,
) -> Result<(Ansatz, OverlapTrace)> {
    check_qubits(target, init.n_qubits())?;
    if opts.stop_energy.is_some() && h.is_none() {
        return Err(Error::Invalid(
            "an energy stop rule needs a Hamiltonian".into(),
        ));
    }
    let mut ansatz = init;
    let mut state = ansatz.prepare()?;
    let mut trace = OverlapTrace {
        initial_infidelity: target.infidelity(&state)?,
        steps: Vec::new(),
    };
    let mut iter = 0;
    while ansatz.len() < opts.p_max {
        if let (Some(stop), Some(h)) = (opts.stop_energy, h) {
            if state.expectation(h)? <= stop {
                break;
            }
        }
        let grads = screen_overlap_gradients(target, &state, pool)?;
        let Some((id, grad)) = argmax_abs(&grads) else {
            break;
        };
        if grad < opts.gtol_overlap {
            log::info!("Overlap-ADAPT: max gradient {grad:.3e} below tolerance");
            break;
        }
        iter += 1;
        let kind = pool.get(id).expect("argmax in range").kind;
        ansatz.push(kind, 0.0);

        let template = ansatz.clone();
        let objective = |theta: &[f64]| {
            let (f, g) = overlap_and_gradient(&template.with_thetas(theta), &target.state)?;
            Ok((1.0 - f, g.into_iter().map(|x| -x).collect()))
        };
        let (infidelity, evals) = match minimize_with_restarts(
            objective,
            &ansatz.thetas(),
            &opts.bfgs,
            opts.restarts,
            opts.seed.wrapping_add(iter as u64),
            opts.restart_scale,
        ) {
            Ok(r) => {
                ansatz.set_thetas(&r.theta_opt);
                (r.objective_value, r.n_evaluations)
            }
            Err(e) => {
                log::warn!("Overlap-ADAPT iteration {iter}: optimizer failed ({e})");
                (target.infidelity(&ansatz.prepare()?)?, 0)
            }
        };
        state = ansatz.prepare()?;
        let energy = h.map(|h| state.expectation(h)).transpose()?;
        log::info!(
            "Overlap-ADAPT iter {iter}: op {id} ({kind}) |g|={grad:.3e} 1-F={infidelity:.3e} params={}",
            ansatz.len()
        );
        trace.steps.push(OverlapStep {
            iter,
            op_id: id,
            kind,
            grad,
            infidelity,
            energy,
            params: ansatz.len(),
            evals,
            thetas: ansatz.thetas(),
        });
    }
    Ok((ansatz, trace))
}

/// Where the overlap target comes from.
#[derive(Clone, Debug)]
pub enum TargetSource {
    /// Exact ground state.
    Fci,
    /// CIPSI wavefunction grown until the stop rule holds.
    Cipsi(CipsiStop),
    /// A stored determinant expansion.
    Determinants(DeterminantWavefunction),
    /// The state prepared by a stored ansatz, e.g. a long ADAPT-VQE run.
    Ansatz(Ansatz),
}

/// Default Overlap-ADAPT budget: 45% of the total operator budget.
pub fn default_p_overlap(p_total: usize) -> usize {
    (p_total as f64 * 0.45).round() as usize
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub target: TargetWavefunction,
    /// Variational energy of the target when known.
    pub target_energy: Option<f64>,
    pub overlap_ansatz: Ansatz,
    pub overlap_trace: OverlapTrace,
    pub ansatz: Ansatz,
    pub adapt_trace: AdaptTrace,
}

/// Build the target, compress it into `p_overlap` operators with
/// Overlap-ADAPT, then continue with ADAPT-VQE up to `p_total` operators.
///
/// Repeated compression is a second call with
/// `TargetSource::Ansatz(result.ansatz)`.
#[allow(clippy::too_many_arguments)]
pub fn pipeline(
    mol: &MolecularHamiltonian,
    h: &dyn Observable,
    pool: &Pool,
    source: TargetSource,
    p_overlap: usize,
    p_total: usize,
    overlap_opts: &OverlapOptions,
    adapt_opts: &AdaptOptions,
) -> Result<PipelineResult> {
    if p_overlap > p_total {
        return Err(Error::Invalid(format!(
            "overlap budget {p_overlap} exceeds total budget {p_total}"
        )));
    }
    let (target, target_energy) = match source {
        TargetSource::Fci => {
            let wf = fci_ground_state(mol)?;
            (TargetWavefunction::from_determinants(&wf)?, wf.energy)
        }
        TargetSource::Cipsi(stop) => {
            let last = run_cipsi(mol, stop)?.pop().expect("at least one iterate");
            let wf = last.wavefunction(mol)?;
            (TargetWavefunction::from_determinants(&wf)?, wf.energy)
        }
        TargetSource::Determinants(wf) => (TargetWavefunction::from_determinants(&wf)?, wf.energy),
        TargetSource::Ansatz(a) => {
            let t = TargetWavefunction::from_ansatz(&a)?;
            let e = t.state().expectation(h)?;
            (t, Some(e))
        }
    };
    let init = Ansatz::hartree_fock(mol.n_spin_orbitals, mol.n_electrons);
    let o_opts = OverlapOptions {
        p_max: p_overlap,
        ..*overlap_opts
    };
    let (overlap_ansatz, overlap_trace) = run_overlap_adapt(&target, pool, init, &o_opts, Some(h))?;
    let a_opts = AdaptOptions {
        max_ops: p_total,
        ..*adapt_opts
    };
    let (ansatz, adapt_trace) = run_adapt(h, pool, overlap_ansatz.clone(), &a_opts)?;
    Ok(PipelineResult {
        target,
        target_energy,
        overlap_ansatz,
        overlap_trace,
        ansatz,
        adapt_trace,
    })
}
