use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn oadapt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oadapt"))
        .args(args)
        .env("OADA_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(line: &str, key: &str) -> f64 {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing in {line}"))
        .parse()
        .unwrap()
}

#[test]
fn h2_adapt_reaches_fci() {
    let o = oadapt(&["run", "--method", "adapt", "--fcidump", &fixture("h2.fcidump")]);
    assert!(o.status.success(), "{o:?}");
    let line = stdout(&o);
    assert!(field(&line, "error").abs() < 1e-8, "{line}");
    assert!(line.contains("SQ=0 DQ=1 CNOTs=13"), "{line}");
}

#[test]
fn fci_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gs.dets");
    let o = oadapt(&[
        "fci",
        "--fcidump",
        &fixture("h4_chain.fcidump"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let e: f64 = stdout(&o).trim().trim_start_matches("E_FCI = ").parse().unwrap();
    assert!((e - -1.9961503255).abs() < 1e-8);
    assert!(std::fs::read_to_string(out).unwrap().starts_with("# determinant wavefunction"));
}

#[test]
fn traces_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let t = dir.path().join(format!("{tag}.csv"));
        let ot = dir.path().join(format!("{tag}-overlap.csv"));
        let o = oadapt(&[
            "run",
            "--method",
            "overlap-adapt-fci",
            "--fcidump",
            &fixture("h4_chain.fcidump"),
            "--p-total",
            "6",
            "--trace",
            t.to_str().unwrap(),
            "--overlap-trace",
            ot.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        (std::fs::read(t).unwrap(), std::fs::read(ot).unwrap())
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    assert_eq!(String::from_utf8_lossy(&a.1).lines().count(), 1 + 3);
}

#[test]
fn cipsi_file_feeds_overlap_run() {
    let dir = tempfile::tempdir().unwrap();
    let dets = dir.path().join("wf.dets");
    let h4 = fixture("h4_chain.fcidump");
    let o = oadapt(&["run-cipsi", "--fcidump", &h4, "--max-dets", "8", "--out", dets.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("ndets=8 "));
    let o = oadapt(&[
        "run",
        "--method",
        "overlap-adapt-cipsi",
        "--fcidump",
        &h4,
        "--target-dets",
        dets.to_str().unwrap(),
        "--p-total",
        "4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(field(&stdout(&o), "params"), 4.0);
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!("# h4\nmethod = adapt\nfcidump = {}\nmax_ops = 3\n", fixture("h4_chain.fcidump")),
    )
    .unwrap();
    let from_file = oadapt(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(field(&stdout(&from_file), "params"), 3.0);
    let flag_wins = oadapt(&["run", "--config", cfg.to_str().unwrap(), "--max-ops", "2"]);
    assert_eq!(field(&stdout(&flag_wins), "params"), 2.0);

    std::fs::write(&cfg, "bogus-key = 1\n").unwrap();
    let bad = oadapt(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn diagnostics_and_exit_codes() {
    let missing = oadapt(&["run", "--method", "adapt", "--fcidump", "/no/such/file"]);
    assert_eq!(missing.status.code(), Some(2));
    let err = String::from_utf8_lossy(&missing.stderr);
    assert_eq!(err.lines().count(), 1, "{err}");

    let no_method = oadapt(&["run", "--fcidump", &fixture("h2.fcidump")]);
    assert_eq!(no_method.status.code(), Some(2));

    let budgets = oadapt(&[
        "run",
        "--method",
        "overlap-adapt-fci",
        "--fcidump",
        &fixture("h2.fcidump"),
        "--p-overlap",
        "5",
        "--p-total",
        "3",
    ]);
    assert_eq!(budgets.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&budgets.stderr).contains("exceeds"));

    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.fcidump");
    std::fs::write(&broken, "&FCI NORB=2,\n&END\n").unwrap();
    let parse = oadapt(&["fci", "--fcidump", broken.to_str().unwrap()]);
    assert_eq!(parse.status.code(), Some(2));
}

#[test]
fn dump_pool_lists_h2_operators() {
    let o = oadapt(&["dump-pool", "--fcidump", &fixture("h2.fcidump")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0 single 2 0 3\n1 single 3 1 3\n2 double 2 3 0 1 13\n");
}

#[test]
fn dump_hamiltonian_is_nonempty() {
    let o = oadapt(&["dump-hamiltonian", "--fcidump", &fixture("h2.fcidump")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 15);
}

#[test]
fn verify_passes_on_fixtures() {
    for name in ["h2.fcidump", "h4_chain.fcidump"] {
        let o = oadapt(&["verify", "--fcidump", &fixture(name)]);
        assert!(o.status.success(), "{}", stdout(&o));
        assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
    }
}
