//! End-to-end behavior of the adaptive loops.

mod common;

use oadapt::adapt::{run_adapt, AdaptOptions, AdaptTrace};
use oadapt::ci::fci_ground_state;
use oadapt::overlap_adapt::{
    pipeline, run_overlap_adapt, OverlapOptions, OverlapTrace, TargetSource, TargetWavefunction,
};
use oadapt::{build_pool, Ansatz};

fn adapt_opts(max_ops: usize, e_fci: f64) -> AdaptOptions {
    AdaptOptions {
        max_ops,
        eps: 0.0,
        e_fci: Some(e_fci),
        ..Default::default()
    }
}

fn assert_adapt_invariants(trace: &AdaptTrace, e_fci: f64, start_params: usize) {
    let mut prev = trace.initial_energy;
    for (i, s) in trace.steps.iter().enumerate() {
        assert_eq!(s.params, start_params + i + 1);
        assert!(s.energy <= prev + 1e-12, "energy rose at step {}", s.iter);
        assert!(s.energy >= e_fci - 1e-10, "below FCI at step {}", s.iter);
        prev = s.energy;
    }
}

fn assert_overlap_monotone(trace: &OverlapTrace) {
    let mut prev = trace.initial_infidelity;
    for s in &trace.steps {
        assert!(s.infidelity <= prev + 1e-12, "infidelity rose at step {}", s.iter);
        prev = s.infidelity;
    }
}

#[test]
fn h2_adapt_is_exact_within_three_operators() {
    let sys = common::load("h2.fcidump");
    let pool = build_pool(4, 2);
    let (a, trace) = run_adapt(&sys.h, &pool, Ansatz::hartree_fock(4, 2), &adapt_opts(3, sys.fci()))
        .unwrap();
    assert!(a.len() <= 3);
    assert!((trace.final_energy() - sys.fci()).abs() < 1e-8);
}

#[test]
fn h4_adapt_is_monotone_and_variational() {
    let sys = common::load("h4_chain.fcidump");
    let pool = build_pool(8, 4);
    let (_, trace) = run_adapt(&sys.h, &pool, Ansatz::hartree_fock(8, 4), &adapt_opts(15, sys.fci()))
        .unwrap();
    assert_eq!(trace.steps.len(), 15);
    assert_adapt_invariants(&trace, sys.fci(), 0);
    for s in &trace.steps {
        assert_eq!(s.cnots, {
            let singles = trace.steps[..s.iter].iter().filter(|t| t.kind.is_single()).count();
            3 * singles + 13 * (s.params - singles)
        });
    }
}

#[test]
fn adapt_traces_are_reproducible() {
    let sys = common::load("h4_chain.fcidump");
    let pool = build_pool(8, 4);
    let opts = AdaptOptions {
        restarts: 1,
        seed: 42,
        ..adapt_opts(8, sys.fci())
    };
    let run = || {
        run_adapt(&sys.h, &pool, Ansatz::hartree_fock(8, 4), &opts)
            .unwrap()
            .1
            .to_csv()
    };
    assert_eq!(run(), run());
}

#[test]
fn overlap_adapt_reaches_h2_fci() {
    let sys = common::load("h2.fcidump");
    let target =
        TargetWavefunction::from_determinants(&fci_ground_state(&sys.mol).unwrap()).unwrap();
    let opts = OverlapOptions {
        p_max: 3,
        ..Default::default()
    };
    let (_, trace) =
        run_overlap_adapt(&target, &build_pool(4, 2), Ansatz::hartree_fock(4, 2), &opts, Some(&sys.h))
            .unwrap();
    assert!(trace.final_infidelity() < 1e-10);
    assert!((trace.steps.last().unwrap().energy.unwrap() - sys.fci()).abs() < 1e-8);
}

#[test]
fn overlap_adapt_is_monotone_on_h6() {
    let sys = common::load("h6_3.0.fcidump");
    let target =
        TargetWavefunction::from_determinants(&fci_ground_state(&sys.mol).unwrap()).unwrap();
    let opts = OverlapOptions {
        p_max: 20,
        ..Default::default()
    };
    let (a, trace) =
        run_overlap_adapt(&target, &build_pool(12, 6), Ansatz::hartree_fock(12, 6), &opts, Some(&sys.h))
            .unwrap();
    assert_eq!(a.len(), 20);
    assert_overlap_monotone(&trace);
    for s in &trace.steps {
        assert!(s.energy.unwrap() >= sys.fci() - 1e-10);
    }
}

#[test]
fn overlap_energy_stop_rule() {
    let sys = common::load("h4_chain.fcidump");
    let target =
        TargetWavefunction::from_determinants(&fci_ground_state(&sys.mol).unwrap()).unwrap();
    let stop = sys.fci() + 1e-2;
    let opts = OverlapOptions {
        stop_energy: Some(stop),
        p_max: 40,
        ..Default::default()
    };
    let (_, trace) =
        run_overlap_adapt(&target, &build_pool(8, 4), Ansatz::hartree_fock(8, 4), &opts, Some(&sys.h))
            .unwrap();
    let energies: Vec<f64> = trace.steps.iter().map(|s| s.energy.unwrap()).collect();
    assert!(*energies.last().unwrap() <= stop);
    assert!(energies[..energies.len() - 1].iter().all(|&e| e > stop));
    assert!(run_overlap_adapt(&target, &build_pool(8, 4), Ansatz::hartree_fock(8, 4), &opts, None)
        .is_err());
}

#[test]
fn hartree_fock_target_reduces_to_plain_adapt() {
    let sys = common::load("h4_chain.fcidump");
    let pool = build_pool(8, 4);
    let opts = adapt_opts(6, sys.fci());
    let plain = run_adapt(&sys.h, &pool, Ansatz::hartree_fock(8, 4), &opts).unwrap().1;
    let hf = Ansatz::hartree_fock(8, 4);
    let res = pipeline(
        &sys.mol,
        &sys.h,
        &pool,
        TargetSource::Ansatz(hf),
        3,
        6,
        &OverlapOptions::default(),
        &opts,
    )
    .unwrap();
    assert!(res.overlap_ansatz.is_empty());
    assert_eq!(res.adapt_trace.to_csv(), plain.to_csv());
}

#[test]
fn pipeline_rejects_inverted_budgets() {
    let sys = common::load("h2.fcidump");
    let r = pipeline(
        &sys.mol,
        &sys.h,
        &build_pool(4, 2),
        TargetSource::Fci,
        5,
        3,
        &OverlapOptions::default(),
        &AdaptOptions::default(),
    );
    assert!(r.is_err());
}

/// Stretched BeH2: 50 ADAPT operators stay above chemical accuracy, and
/// compressing that ansatz with Overlap-ADAPT before regrowing beats it.
#[test]
fn stretched_beh2_compression_beats_plain_adapt() {
    let sys = common::load("beh2_3.0.fcidump");
    let (n, ne) = (sys.n_qubits(), sys.n_electrons());
    let pool = build_pool(n, ne);
    let opts = adapt_opts(50, sys.fci());
    let (a50, plain) = run_adapt(&sys.h, &pool, Ansatz::hartree_fock(n, ne), &opts).unwrap();
    assert_adapt_invariants(&plain, sys.fci(), 0);
    let plain_err = plain.final_energy() - sys.fci();
    assert!(plain_err > 1e-3, "plain ADAPT error {plain_err}");

    let res = pipeline(
        &sys.mol,
        &sys.h,
        &pool,
        TargetSource::Ansatz(a50),
        20,
        50,
        &OverlapOptions::default(),
        &opts,
    )
    .unwrap();
    assert_overlap_monotone(&res.overlap_trace);
    assert_adapt_invariants(&res.adapt_trace, sys.fci(), 20);
    let err = res.adapt_trace.final_energy() - sys.fci();
    assert!(err < 1e-3 && err < plain_err, "pipeline error {err}");
    let r = res.ansatz.resources();
    assert_eq!(r.cnots, 3 * r.singles + 13 * r.doubles);
}
