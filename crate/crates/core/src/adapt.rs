//! QEB-ADAPT-VQE: grow the ansatz one qubit excitation at a time, choosing
//! the pool operator with the largest energy gradient and re-optimizing every
//! angle after each append.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::excitation::Excitation;
use crate::optimizer::{minimize_with_restarts, BfgsOptions};
use crate::pool::Pool;
use crate::statevector::{energy_and_gradient, generator_matrix_element, Observable, Statevector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptOptions {
    /// Stop when the largest screening gradient magnitude falls below this.
    pub eps: f64,
    /// Stop when the ansatz holds this many operators (including the initial ones).
    pub max_ops: usize,
    pub bfgs: BfgsOptions,
    /// Extra seeded optimizer runs per iteration.
    pub restarts: usize,
    pub seed: u64,
    pub restart_scale: f64,
    /// Exact energy for the `error_vs_fci` column.
    pub e_fci: Option<f64>,
}

impl Default for AdaptOptions {
    fn default() -> Self {
        Self {
            eps: 1e-3,
            max_ops: usize::MAX,
            bfgs: BfgsOptions::default(),
            restarts: 0,
            seed: 0,
            restart_scale: 0.1,
            e_fci: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptStep {
    pub iter: usize,
    pub op_id: usize,
    pub kind: Excitation,
    /// Screening gradient of the chosen operator.
    pub grad: f64,
    pub energy: f64,
    /// Ansatz length after the append.
    pub params: usize,
    pub cnots: usize,
    pub evals: usize,
    pub converged: bool,
    /// Optimized angles after this iteration.
    pub thetas: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdaptTrace {
    /// Energy of the initial ansatz at its given angles.
    pub initial_energy: f64,
    pub steps: Vec<AdaptStep>,
    pub e_fci: Option<f64>,
}

pub const ADAPT_CSV_HEADER: &str = "iter,op_id,kind,grad,energy,error_vs_fci,params,cnots,evals";

impl AdaptTrace {
    pub fn final_energy(&self) -> f64 {
        self.steps.last().map_or(self.initial_energy, |s| s.energy)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(ADAPT_CSV_HEADER);
        out.push('\n');
        for s in &self.steps {
            let err = self
                .e_fci
                .map(|e| format!("{:.12e}", s.energy - e))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{:.12e},{:.12},{},{},{},{}",
                s.iter,
                s.op_id,
                s.kind.to_string().replace(' ', ":"),
                s.grad,
                s.energy,
                err,
                s.params,
                s.cnots,
                s.evals
            );
        }
        out
    }
}

/// `∂E/∂θ` at `θ = 0` for every pool operator appended to `state`:
/// `g = ⟨ψ|[H, T]|ψ⟩ = 2·Re⟨Hψ|Tψ⟩`, in pool order.
pub fn screen_energy_gradients(
    state: &Statevector,
    h: &dyn Observable,
    pool: &Pool,
) -> Result<Vec<f64>> {
    let n = state.n_qubits();
    if h.n_qubits() != n || pool.n_qubits() != n {
        return Err(Error::QubitMismatch {
            left: n,
            right: if h.n_qubits() != n {
                h.n_qubits()
            } else {
                pool.n_qubits()
            },
        });
    }
    let psi = state.amplitudes();
    let hpsi = h.apply(psi);
    Ok((0..pool.len())
        .into_par_iter()
        .map(|i| {
            let exc = &pool.get(i).expect("index in range").kind;
            2.0 * generator_matrix_element(&hpsi, psi, n, exc).re
        })
        .collect())
}

/// Index and value of the largest `|g|`; the lowest index wins ties.
pub fn argmax_abs(grads: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &g) in grads.iter().enumerate() {
        if best.is_none_or(|(_, b)| g.abs() > b.abs()) {
            best = Some((i, g));
        }
    }
    best
}

/// Minimize `⟨ψ(θ)|H|ψ(θ)⟩` over all angles of `ansatz`, starting from its
/// current angles. On optimizer failure the starting angles are kept.
pub(crate) fn optimize_energy(
    ansatz: &mut Ansatz,
    h: &dyn Observable,
    opts: &AdaptOptions,
    iter: usize,
) -> Result<(f64, usize, bool)> {
    let template = ansatz.clone();
    let objective = |theta: &[f64]| energy_and_gradient(&template.with_thetas(theta), h);
    let seed = opts.seed.wrapping_add(iter as u64);
    match minimize_with_restarts(
        objective,
        &ansatz.thetas(),
        &opts.bfgs,
        opts.restarts,
        seed,
        opts.restart_scale,
    ) {
        Ok(r) => {
            ansatz.set_thetas(&r.theta_opt);
            Ok((r.objective_value, r.n_evaluations, r.converged))
        }
        Err(e) => {
            log::warn!("ADAPT iteration {iter}: optimizer failed ({e}); keeping previous angles");
            let (energy, _) = energy_and_gradient(ansatz, h)?;
            Ok((energy, 0, false))
        }
    }
}

/// ADAPT-VQE from `init` (empty = Hartree–Fock). Angles are warm-started
/// from the previous optimum with the new angle at zero. Pool operators may
/// be selected more than once.
pub fn run_adapt(
    h: &dyn Observable,
    pool: &Pool,
    init: Ansatz,
    opts: &AdaptOptions,
) -> Result<(Ansatz, AdaptTrace)> {
    let mut ansatz = init;
    let mut state = ansatz.prepare()?;
    let mut trace = AdaptTrace {
        initial_energy: state.expectation(h)?,
        steps: Vec::new(),
        e_fci: opts.e_fci,
    };
    let mut iter = 0;
    while ansatz.len() < opts.max_ops {
        let grads = screen_energy_gradients(&state, h, pool)?;
        let Some((id, grad)) = argmax_abs(&grads) else {
            break;
        };
        if grad.abs() < opts.eps {
            log::info!("ADAPT: max gradient {:.3e} below eps", grad.abs());
            break;
        }
        iter += 1;
        let kind = pool.get(id).expect("argmax in range").kind;
        ansatz.push(kind, 0.0);
        let (energy, evals, converged) = optimize_energy(&mut ansatz, h, opts, iter)?;
        state = ansatz.prepare()?;
        let res = ansatz.resources();
        log::info!(
            "ADAPT iter {iter}: op {id} ({kind}) |g|={:.3e} E={energy:.12} params={}",
            grad.abs(),
            ansatz.len()
        );
        trace.steps.push(AdaptStep {
            iter,
            op_id: id,
            kind,
            grad: grad.abs(),
            energy,
            params: ansatz.len(),
            cnots: res.cnots,
            evals,
            converged,
            thetas: ansatz.thetas(),
        });
    }
    Ok((ansatz, trace))
}
