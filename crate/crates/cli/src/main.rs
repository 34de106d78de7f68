use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use oadapt::ci::{fci_ground_state, run_cipsi, CipsiStop};
use oadapt::pauli::jw_hamiltonian;

mod config;
mod run;
mod verify;

use run::{ExperimentConfig, Problem, RunArgs};

/// Adaptive VQE convergence experiments on a statevector simulator.
#[derive(Parser, Debug)]
#[command(name = "oadapt", version)]
struct Cli {
    /// Worker threads; defaults to all cores
    #[arg(long, global = true, env = "OADA_THREADS")]
    threads: Option<usize>,
    /// -v info, -vv debug
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an experiment and print a one-line summary
    Run(Box<RunArgs>),
    /// Exact ground state in the determinant basis
    Fci(FciArgs),
    /// Grow a CIPSI wavefunction and write it to a determinant file
    RunCipsi(CipsiArgs),
    /// Print the operator pool
    DumpPool(InputArgs),
    /// Print the qubit Hamiltonian
    DumpHamiltonian(InputArgs),
    /// Check invariants of the Hamiltonian, pool and gradients
    Verify(InputArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long)]
    fcidump: PathBuf,
}

#[derive(Args, Debug)]
struct FciArgs {
    #[arg(long)]
    fcidump: PathBuf,
    /// Write the ground state as a determinant file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CipsiArgs {
    #[arg(long)]
    fcidump: PathBuf,
    #[arg(long)]
    max_dets: Option<usize>,
    #[arg(long)]
    target_e2: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use oadapt::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Parse { .. } | E::MissingKey(_) | E::Io(_) => 2,
                E::DimensionCap { .. } | E::TooManyQubits(_) => 3,
                E::NanObjective(_) => 4,
                _ => 1,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some()
            || cause.downcast_ref::<clap::Error>().is_some()
        {
            return 2;
        }
    }
    let text = err.to_string();
    if text.starts_with("config") || text.starts_with("missing --") || text.starts_with("--") {
        return 2;
    }
    1
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => {
            let cfg = ExperimentConfig::from_args(*args)?;
            println!("{}", run::run_experiment(&cfg)?);
        }
        Command::Fci(a) => {
            let problem = Problem::load(&a.fcidump)?;
            let wf = fci_ground_state(&problem.mol)?;
            if let Some(p) = &a.out {
                std::fs::write(p, wf.to_text())
                    .with_context(|| format!("cannot write {}", p.display()))?;
            }
            println!("E_FCI = {:.12}", wf.energy.expect("solver sets the energy"));
        }
        Command::RunCipsi(a) => {
            let problem = Problem::load(&a.fcidump)?;
            let stop = CipsiStop {
                target_e2: a.target_e2,
                max_dets: a.max_dets,
            };
            let hist = run_cipsi(&problem.mol, stop)?;
            for s in &hist {
                log::info!(
                    "cipsi iter {} ndets {} e_var {:.12} e2 {:.3e}",
                    s.iteration,
                    s.len(),
                    s.e_var,
                    s.e2
                );
            }
            let last = hist.last().expect("at least one iterate");
            let wf = last.wavefunction(&problem.mol)?;
            std::fs::write(&a.out, wf.to_text())
                .with_context(|| format!("cannot write {}", a.out.display()))?;
            println!(
                "ndets={} e_var={:.12} e2={:.6e} e_cipsi={:.12}",
                last.len(),
                last.e_var,
                last.e2,
                last.total_energy()
            );
        }
        Command::DumpPool(a) => print!("{}", Problem::load(&a.fcidump)?.pool().dump()),
        Command::DumpHamiltonian(a) => {
            print!("{}", jw_hamiltonian(&Problem::load(&a.fcidump)?.mol).dump())
        }
        Command::Verify(a) => {
            let checks = verify::run_checks(&Problem::load(&a.fcidump)?)?;
            for c in &checks {
                println!("{}", c.line());
            }
            if checks.iter().any(|c| !c.passed) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", first.trim_start_matches("error: ").trim());
            return ExitCode::from(2);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: thread count must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            let msg: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            eprintln!("error: {}", msg.join(": "));
            ExitCode::from(exit_code(&e))
        }
    }
}
