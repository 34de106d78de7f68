use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use oadapt::adapt::{run_adapt, AdaptOptions, AdaptTrace};
use oadapt::ci::{fci_ground_state, run_cipsi, CipsiStop, DeterminantWavefunction, Sector, FCI_DIM_CAP};
use oadapt::ham_io::{to_spin_orbital, FcidumpData, MolecularHamiltonian};
use oadapt::optimizer::BfgsOptions;
use oadapt::overlap_adapt::{
    default_p_overlap, pipeline, OverlapOptions, OverlapTrace, TargetSource,
};
use oadapt::pauli::{jw_hamiltonian, SparseOperator};
use oadapt::{build_pool, Ansatz, Pool};

use crate::config::{merge, ConfigFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Adapt,
    OverlapAdaptFci,
    OverlapAdaptCipsi,
    OverlapAdaptAnsatz,
    Cipsi,
    Fci,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Self::Adapt => "adapt",
            Self::OverlapAdaptFci => "overlap-adapt-fci",
            Self::OverlapAdaptCipsi => "overlap-adapt-cipsi",
            Self::OverlapAdaptAnsatz => "overlap-adapt-ansatz",
            Self::Cipsi => "cipsi",
            Self::Fci => "fci",
        }
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct RunArgs {
    /// Experiment to run
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// FCIDUMP file with the molecular integrals
    #[arg(long)]
    pub fcidump: Option<PathBuf>,
    /// key=value file; explicit flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Operator budget for plain ADAPT-VQE
    #[arg(long)]
    pub max_ops: Option<usize>,
    /// Operators grown by Overlap-ADAPT before handing over to ADAPT-VQE
    #[arg(long)]
    pub p_overlap: Option<usize>,
    /// Total operator budget of the pipeline
    #[arg(long)]
    pub p_total: Option<usize>,
    /// ADAPT stops when the largest gradient magnitude is below this
    #[arg(long)]
    pub eps: Option<f64>,
    /// BFGS gradient tolerance (infinity norm)
    #[arg(long)]
    pub gtol: Option<f64>,
    /// Overlap-ADAPT stops when the largest overlap gradient is below this
    #[arg(long)]
    pub gtol_overlap: Option<f64>,
    /// BFGS iteration cap per re-optimization
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Stop Overlap-ADAPT once the ansatz energy reaches the target's energy
    #[arg(long)]
    pub stop_at_target_energy: bool,

    /// CIPSI determinant budget
    #[arg(long)]
    pub cipsi_max_dets: Option<usize>,
    /// CIPSI stops once |E2| falls below this
    #[arg(long)]
    pub cipsi_target_e2: Option<f64>,
    /// Determinant file to use as the overlap target
    #[arg(long)]
    pub target_dets: Option<PathBuf>,
    /// Ansatz file whose state is the overlap target
    #[arg(long)]
    pub target_ansatz: Option<PathBuf>,

    /// Write the final ansatz
    #[arg(long)]
    pub save_ansatz: Option<PathBuf>,
    /// Write the determinant wavefunction (cipsi and fci methods)
    #[arg(long)]
    pub save_dets: Option<PathBuf>,
    /// ADAPT-VQE trace CSV
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Overlap-ADAPT trace CSV
    #[arg(long)]
    pub overlap_trace: Option<PathBuf>,
    /// Final statevector, one nonzero amplitude per line
    #[arg(long)]
    pub dump_state: Option<PathBuf>,
    #[arg(long)]
    pub dump_pool: Option<PathBuf>,
    #[arg(long)]
    pub dump_hamiltonian: Option<PathBuf>,
    /// Gnuplot script plotting the traces
    #[arg(long)]
    pub gnuplot: Option<PathBuf>,

    /// Seed for restart perturbations
    #[arg(long)]
    pub seed: Option<u64>,
    /// Extra perturbed optimizer runs per iteration
    #[arg(long)]
    pub restarts: Option<usize>,
}

const KNOWN_KEYS: &[&str] = &[
    "method",
    "fcidump",
    "max-ops",
    "p-overlap",
    "p-total",
    "eps",
    "gtol",
    "gtol-overlap",
    "max-iter",
    "stop-at-target-energy",
    "cipsi-max-dets",
    "cipsi-target-e2",
    "target-dets",
    "target-ansatz",
    "save-ansatz",
    "save-dets",
    "trace",
    "overlap-trace",
    "dump-state",
    "dump-pool",
    "dump-hamiltonian",
    "gnuplot",
    "seed",
    "restarts",
];

/// Validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub method: Method,
    pub fcidump: PathBuf,
    pub p_overlap: usize,
    pub p_total: usize,
    pub adapt: AdaptOptions,
    pub overlap: OverlapOptions,
    pub stop_at_target_energy: bool,
    pub cipsi: CipsiStop,
    pub target_dets: Option<PathBuf>,
    pub target_ansatz: Option<PathBuf>,
    pub outputs: RunArgs,
}

const DEFAULT_P_TOTAL: usize = 50;
const DEFAULT_CIPSI_DETS: usize = 100;

impl ExperimentConfig {
    pub fn from_args(mut a: RunArgs) -> Result<Self> {
        if let Some(path) = a.config.clone() {
            let cfg = ConfigFile::read(&path)?;
            if let Some(k) = cfg.keys().find(|k| !KNOWN_KEYS.contains(k)) {
                bail!("config {}: unknown key {k}", path.display());
            }
            merge(&mut a.method, &cfg, "method")?;
            merge(&mut a.fcidump, &cfg, "fcidump")?;
            merge(&mut a.max_ops, &cfg, "max-ops")?;
            merge(&mut a.p_overlap, &cfg, "p-overlap")?;
            merge(&mut a.p_total, &cfg, "p-total")?;
            merge(&mut a.eps, &cfg, "eps")?;
            merge(&mut a.gtol, &cfg, "gtol")?;
            merge(&mut a.gtol_overlap, &cfg, "gtol-overlap")?;
            merge(&mut a.max_iter, &cfg, "max-iter")?;
            merge(&mut a.cipsi_max_dets, &cfg, "cipsi-max-dets")?;
            merge(&mut a.cipsi_target_e2, &cfg, "cipsi-target-e2")?;
            merge(&mut a.target_dets, &cfg, "target-dets")?;
            merge(&mut a.target_ansatz, &cfg, "target-ansatz")?;
            merge(&mut a.save_ansatz, &cfg, "save-ansatz")?;
            merge(&mut a.save_dets, &cfg, "save-dets")?;
            merge(&mut a.trace, &cfg, "trace")?;
            merge(&mut a.overlap_trace, &cfg, "overlap-trace")?;
            merge(&mut a.dump_state, &cfg, "dump-state")?;
            merge(&mut a.dump_pool, &cfg, "dump-pool")?;
            merge(&mut a.dump_hamiltonian, &cfg, "dump-hamiltonian")?;
            merge(&mut a.gnuplot, &cfg, "gnuplot")?;
            merge(&mut a.seed, &cfg, "seed")?;
            merge(&mut a.restarts, &cfg, "restarts")?;
            if !a.stop_at_target_energy {
                a.stop_at_target_energy = cfg.get("stop-at-target-energy")?.unwrap_or(false);
            }
        }
        let method = a.method.context("missing --method")?;
        let fcidump = a.fcidump.clone().context("missing --fcidump")?;

        for (name, v) in [
            ("max-ops", a.max_ops),
            ("p-total", a.p_total),
            ("cipsi-max-dets", a.cipsi_max_dets),
            ("max-iter", a.max_iter),
        ] {
            if v == Some(0) {
                bail!("--{name} must be positive");
            }
        }
        for (name, v) in [
            ("eps", a.eps),
            ("gtol", a.gtol),
            ("gtol-overlap", a.gtol_overlap),
            ("cipsi-target-e2", a.cipsi_target_e2),
        ] {
            if v.is_some_and(|x| x.is_nan() || x < 0.0) {
                bail!("--{name} must be non-negative");
            }
        }

        let p_total = a.p_total.or(a.max_ops).unwrap_or(DEFAULT_P_TOTAL);
        let p_overlap = a.p_overlap.unwrap_or_else(|| default_p_overlap(p_total));
        if p_overlap > p_total {
            bail!("--p-overlap {p_overlap} exceeds --p-total {p_total}");
        }
        match method {
            Method::OverlapAdaptAnsatz if a.target_ansatz.is_none() => {
                bail!("method overlap-adapt-ansatz needs --target-ansatz")
            }
            Method::OverlapAdaptCipsi | Method::Cipsi if a.target_ansatz.is_some() => {
                bail!("--target-ansatz only applies to overlap-adapt-ansatz")
            }
            _ => {}
        }
        if a.target_dets.is_some() && method != Method::OverlapAdaptCipsi {
            bail!("--target-dets only applies to overlap-adapt-cipsi");
        }

        let mut bfgs = BfgsOptions::default();
        if let Some(g) = a.gtol {
            bfgs.gtol = g;
        }
        if let Some(m) = a.max_iter {
            bfgs.max_iter = m;
        }
        let seed = a.seed.unwrap_or(0);
        let restarts = a.restarts.unwrap_or(0);
        let adapt = AdaptOptions {
            eps: a.eps.unwrap_or(AdaptOptions::default().eps),
            max_ops: if method == Method::Adapt {
                a.max_ops.or(a.p_total).unwrap_or(usize::MAX)
            } else {
                p_total
            },
            bfgs,
            restarts,
            seed,
            ..Default::default()
        };
        let overlap = OverlapOptions {
            p_max: p_overlap,
            gtol_overlap: a.gtol_overlap.unwrap_or(OverlapOptions::default().gtol_overlap),
            bfgs,
            restarts,
            seed,
            ..Default::default()
        };
        let cipsi = CipsiStop {
            target_e2: a.cipsi_target_e2,
            max_dets: match (a.cipsi_max_dets, a.cipsi_target_e2) {
                (None, None) => Some(DEFAULT_CIPSI_DETS),
                (m, _) => m,
            },
        };
        Ok(Self {
            method,
            fcidump,
            p_overlap,
            p_total,
            adapt,
            overlap,
            stop_at_target_energy: a.stop_at_target_energy,
            cipsi,
            target_dets: a.target_dets.clone(),
            target_ansatz: a.target_ansatz.clone(),
            outputs: a,
        })
    }
}

pub struct Problem {
    pub data: FcidumpData,
    pub mol: MolecularHamiltonian,
}

impl Problem {
    pub fn load(path: &Path) -> Result<Self> {
        let data = FcidumpData::read(path).with_context(|| format!("{}", path.display()))?;
        let mol = to_spin_orbital(&data);
        Ok(Self { data, mol })
    }

    pub fn n_qubits(&self) -> usize {
        self.mol.n_spin_orbitals
    }

    pub fn pool(&self) -> Pool {
        build_pool(self.mol.n_spin_orbitals, self.mol.n_electrons)
    }

    pub fn sparse_hamiltonian(&self) -> Result<SparseOperator> {
        if self.n_qubits() > oadapt::statevector::MAX_QUBITS {
            return Err(oadapt::Error::TooManyQubits(self.n_qubits()).into());
        }
        Ok(SparseOperator::from_qubit_operator(&jw_hamiltonian(&self.mol)))
    }

    /// REF_FCI from the file, otherwise exact diagonalization when affordable.
    pub fn exact_energy(&self) -> Option<f64> {
        if let Some(e) = self.data.references.fci {
            return Some(e);
        }
        if Sector::of(&self.mol).dimension() > FCI_DIM_CAP {
            return None;
        }
        fci_ground_state(&self.mol).ok().and_then(|w| w.energy)
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn fmt_err(e: Option<f64>) -> String {
    e.map_or_else(|| "n/a".into(), |v| format!("{v:.3e}"))
}

/// One-line summary per method.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<String> {
    let problem = Problem::load(&cfg.fcidump)?;
    let out = &cfg.outputs;
    if let Some(p) = &out.dump_pool {
        write(p, &problem.pool().dump())?;
    }
    if let Some(p) = &out.dump_hamiltonian {
        write(p, &jw_hamiltonian(&problem.mol).dump())?;
    }

    match cfg.method {
        Method::Fci => {
            let wf = fci_ground_state(&problem.mol)?;
            let e = wf.energy.expect("solver sets the energy");
            if let Some(p) = &out.save_dets {
                write(p, &wf.to_text())?;
            }
            if let Some(p) = &out.dump_state {
                write(p, &wf.to_statevector()?.dump())?;
            }
            let diff = problem.data.references.fci.map(|r| e - r);
            return Ok(format!(
                "method=fci energy={e:.12} ndets={} ref_diff={}",
                wf.len(),
                fmt_err(diff)
            ));
        }
        Method::Cipsi => {
            let hist = run_cipsi(&problem.mol, cfg.cipsi)?;
            let last = hist.last().expect("at least one iterate");
            let wf = last.wavefunction(&problem.mol)?;
            if let Some(p) = &out.save_dets {
                write(p, &wf.to_text())?;
            }
            if let Some(p) = &out.dump_state {
                write(p, &wf.to_statevector()?.dump())?;
            }
            let err = problem.exact_energy().map(|f| last.e_var - f);
            return Ok(format!(
                "method=cipsi ndets={} e_var={:.12} e2={:.6e} e_cipsi={:.12} error={}",
                last.len(),
                last.e_var,
                last.e2,
                last.total_energy(),
                fmt_err(err)
            ));
        }
        _ => {}
    }

    let h = problem.sparse_hamiltonian()?;
    let pool = problem.pool();
    let e_fci = problem.exact_energy();
    let adapt_opts = AdaptOptions {
        e_fci,
        ..cfg.adapt
    };
    let n = problem.n_qubits();
    let ne = problem.mol.n_electrons;

    let (ansatz, adapt_trace, overlap_trace): (Ansatz, AdaptTrace, Option<OverlapTrace>) =
        if cfg.method == Method::Adapt {
            let (a, t) = run_adapt(&h, &pool, Ansatz::hartree_fock(n, ne), &adapt_opts)?;
            (a, t, None)
        } else {
            let source = match cfg.method {
                Method::OverlapAdaptFci => TargetSource::Fci,
                Method::OverlapAdaptCipsi => match &cfg.target_dets {
                    Some(p) => TargetSource::Determinants(DeterminantWavefunction::read(p)?),
                    None => TargetSource::Cipsi(cfg.cipsi),
                },
                Method::OverlapAdaptAnsatz => {
                    let path = cfg.target_ansatz.as_ref().expect("validated");
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("cannot read {}", path.display()))?;
                    let a = Ansatz::from_text(&text)?;
                    if a.n_qubits() != n || a.n_electrons() != ne {
                        bail!(
                            "target ansatz has {} qubits / {} electrons, Hamiltonian has {n} / {ne}",
                            a.n_qubits(),
                            a.n_electrons()
                        );
                    }
                    TargetSource::Ansatz(a)
                }
                _ => unreachable!("handled above"),
            };
            let mut overlap_opts = cfg.overlap;
            if cfg.stop_at_target_energy {
                overlap_opts.stop_energy = target_energy_hint(&source, &problem)?;
            }
            let res = pipeline(
                &problem.mol,
                &h,
                &pool,
                source,
                cfg.p_overlap,
                cfg.p_total,
                &overlap_opts,
                &adapt_opts,
            )?;
            (res.ansatz, res.adapt_trace, Some(res.overlap_trace))
        };

    if let Some(p) = &out.trace {
        write(p, &adapt_trace.to_csv())?;
    }
    if let (Some(p), Some(t)) = (&out.overlap_trace, &overlap_trace) {
        write(p, &t.to_csv())?;
    }
    if let Some(p) = &out.save_ansatz {
        write(p, &ansatz.to_text())?;
    }
    if let Some(p) = &out.dump_state {
        write(p, &ansatz.prepare()?.dump())?;
    }
    if let Some(p) = &out.gnuplot {
        write(p, &gnuplot_script(cfg, e_fci))?;
    }

    let energy = adapt_trace.final_energy();
    let r = ansatz.resources();
    let mut line = format!("method={} energy={energy:.12}", cfg.method.name());
    let _ = write!(
        line,
        " error={} params={} SQ={} DQ={} CNOTs={}",
        fmt_err(e_fci.map(|f| energy - f)),
        ansatz.len(),
        r.singles,
        r.doubles,
        r.cnots
    );
    if let Some(t) = overlap_trace {
        let _ = write!(
            line,
            " overlap_params={} infidelity={:.3e}",
            t.steps.last().map_or(0, |s| s.params),
            t.final_infidelity()
        );
    }
    Ok(line)
}

/// Variational energy of the target for the energy stop rule.
fn target_energy_hint(source: &TargetSource, problem: &Problem) -> Result<Option<f64>> {
    Ok(match source {
        TargetSource::Fci => problem.exact_energy(),
        TargetSource::Cipsi(stop) => run_cipsi(&problem.mol, *stop)?.last().map(|s| s.e_var),
        TargetSource::Determinants(wf) => Some(wf.energy_with(&problem.mol)),
        TargetSource::Ansatz(a) => {
            let h = problem.sparse_hamiltonian()?;
            Some(a.prepare()?.expectation(&h)?)
        }
    })
}

fn gnuplot_script(cfg: &ExperimentConfig, e_fci: Option<f64>) -> String {
    let out = &cfg.outputs;
    let e_fci = e_fci.unwrap_or(0.0);
    let mut s = String::new();
    let _ = writeln!(s, "# energy error against operator count");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set logscale y");
    let _ = writeln!(s, "set format y '10^{{%L}}'");
    let _ = writeln!(s, "set xlabel 'parameters'");
    let _ = writeln!(s, "set ylabel 'E - E_{{FCI}} (Ha)'");
    let _ = writeln!(s, "set key top right");
    let _ = writeln!(s, "e_fci = {e_fci:.12}");
    let _ = writeln!(
        s,
        "set object 1 rect from graph 0, first 1e-12 to graph 1, first 1e-3 fc rgb '#f6d5e5' fs solid 0.6 noborder behind"
    );
    let mut plots = Vec::new();
    if let Some(p) = &out.overlap_trace {
        plots.push(format!(
            "'{}' every ::1 using 7:($6 - e_fci) with linespoints title 'Overlap-ADAPT'",
            p.display()
        ));
    }
    if let Some(p) = &out.trace {
        plots.push(format!(
            "'{}' every ::1 using 7:($5 - e_fci) with linespoints title '{}'",
            p.display(),
            cfg.method.name()
        ));
    }
    if plots.is_empty() {
        let _ = writeln!(s, "# no trace files were requested");
    } else {
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    }
    s
}
