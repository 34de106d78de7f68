use anyhow::Result;
use num_complex::Complex64;
use oadapt::ci::{dense_hamiltonian, fci_ground_state, Sector, DENSE_LIMIT};
use oadapt::overlap_adapt::{four_angle_gradient, screen_overlap_gradients, TargetWavefunction};
use oadapt::pauli::{jw_hamiltonian, qubit_excitation_generator, QubitOperator};
use oadapt::statevector::{energy_and_gradient, overlap_and_gradient};
use oadapt::Ansatz;

use crate::run::Problem;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, err: f64, tol: f64) -> Self {
        Self {
            name,
            passed: err <= tol,
            detail: format!("max deviation {err:.2e} (tol {tol:.0e})"),
        }
    }

    fn skipped(name: &'static str, why: &str) -> Self {
        Self {
            name,
            passed: true,
            detail: format!("skipped: {why}"),
        }
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {:<24} {}", self.name, self.detail)
    }
}

fn max_coeff(op: &QubitOperator) -> f64 {
    op.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
}

fn op_distance(a: &QubitOperator, b: &QubitOperator) -> Result<f64> {
    Ok(max_coeff(&a.try_add(&b.scale(Complex64::new(-1.0, 0.0)))?))
}

/// Small deterministic ansatz over a spread of pool operators.
fn probe_ansatz(problem: &Problem, len: usize) -> Ansatz {
    let pool = problem.pool();
    let mut a = Ansatz::hartree_fock(problem.n_qubits(), problem.mol.n_electrons);
    let stride = (pool.len() / len.max(1)).max(1);
    for (k, op) in pool.iter().step_by(stride).take(len).enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        a.push(op.kind, sign * 0.15 * (k + 1) as f64);
    }
    a
}

fn fd_error(f: impl Fn(&[f64]) -> f64, theta: &[f64], grad: &[f64]) -> f64 {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for k in 0..theta.len() {
        let mut p = theta.to_vec();
        let mut m = theta.to_vec();
        p[k] += h;
        m[k] -= h;
        let fd = (f(&p) - f(&m)) / (2.0 * h);
        worst = worst.max((fd - grad[k]).abs());
    }
    worst
}

/// Invariants that must hold for any valid Hamiltonian file.
pub fn run_checks(problem: &Problem) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let n = problem.n_qubits();
    let ne = problem.mol.n_electrons;
    let jw = jw_hamiltonian(&problem.mol);
    out.push(Check::new("hamiltonian-hermitian", jw.hermiticity_error(), 1e-12));

    let pool = problem.pool();
    let mut worst_adj: f64 = 0.0;
    let mut worst_cube: f64 = 0.0;
    for op in pool.iter() {
        let t = qubit_excitation_generator(&op.kind, n)?;
        worst_adj = worst_adj.max(op_distance(&t.adjoint(), &t.scale(Complex64::new(-1.0, 0.0)))?);
        let t3 = t.multiply(&t)?.multiply(&t)?;
        worst_cube = worst_cube.max(op_distance(&t3, &t.scale(Complex64::new(-1.0, 0.0)))?);
    }
    out.push(Check::new("generator-antihermitian", worst_adj, 1e-12));
    out.push(Check::new("generator-cube", worst_cube, 1e-12));

    if n > oadapt::statevector::MAX_QUBITS {
        out.push(Check::skipped("slater-condon-vs-jw", "too many qubits"));
        out.push(Check::skipped("energy-gradient", "too many qubits"));
        out.push(Check::skipped("overlap-gradient", "too many qubits"));
        return Ok(out);
    }
    let h = problem.sparse_hamiltonian()?;

    let sector = Sector::of(&problem.mol);
    if sector.dimension() <= DENSE_LIMIT {
        let dets = sector.determinants();
        let dense = dense_hamiltonian(&problem.mol, &dets);
        let mut worst: f64 = 0.0;
        for (i, a) in dets.iter().enumerate() {
            for (j, b) in dets.iter().enumerate() {
                let q = h.get(a.0 as usize, b.0 as usize);
                worst = worst.max((q - Complex64::new(dense[(i, j)], 0.0)).norm());
            }
        }
        out.push(Check::new("slater-condon-vs-jw", worst, 1e-10));
    } else {
        out.push(Check::skipped("slater-condon-vs-jw", "sector too large"));
    }

    let ansatz = probe_ansatz(problem, 6);
    let theta = ansatz.thetas();
    let (_, grad) = energy_and_gradient(&ansatz, &h)?;
    let energy = |t: &[f64]| {
        ansatz
            .with_thetas(t)
            .prepare()
            .and_then(|s| s.expectation(&h))
            .unwrap_or(f64::NAN)
    };
    out.push(Check::new("energy-gradient", fd_error(energy, &theta, &grad), 1e-6));

    let psi = ansatz.prepare()?;
    out.push(Check {
        name: "particle-number",
        passed: psi.particle_numbers(1e-12) == [ne as u32],
        detail: format!("{:?}", psi.particle_numbers(1e-12)),
    });

    let target = match fci_ground_state(&problem.mol) {
        Ok(wf) => {
            if let Some(r) = problem.data.references.fci {
                out.push(Check::new("fci-reference", (wf.energy.unwrap_or(f64::NAN) - r).abs(), 1e-8));
            }
            TargetWavefunction::from_determinants(&wf)?
        }
        Err(_) => TargetWavefunction::from_statevector(probe_ansatz(problem, 3).prepare()?)?,
    };
    let (_, ograd) = overlap_and_gradient(&ansatz, target.state())?;
    let fidelity = |t: &[f64]| {
        ansatz
            .with_thetas(t)
            .prepare()
            .and_then(|s| target.state().overlap(&s))
            .map_or(f64::NAN, |o| o.norm_sqr())
    };
    out.push(Check::new("overlap-gradient", fd_error(fidelity, &theta, &ograd), 1e-6));

    let direct = screen_overlap_gradients(&target, &psi, &pool)?;
    let mut worst: f64 = 0.0;
    for (op, d) in pool.iter().zip(&direct) {
        worst = worst.max((four_angle_gradient(&target, &psi, &op.kind)? - d).abs());
    }
    out.push(Check::new("four-angle-gradient", worst, 1e-10));
    Ok(out)
}
