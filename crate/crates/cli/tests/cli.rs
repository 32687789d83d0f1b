//! Exit-code and output contract tests for every subcommand: 0 when the
//! condition holds, 1 on a violation, 2 on usage or input errors.

use std::path::PathBuf;
use std::process::{Command, Output};

use spacelike_core::report::ProtocolFile;
use spacelike_core::signal::cnot_bell_benchmark;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spacelike"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal termination")
}

fn write_identity4(dir: &tempfile::TempDir) -> PathBuf {
    let path = dir.path().join("id4.txt");
    std::fs::write(
        &path,
        "dim 4\n1 0 0 0 0 0 0 0\n0 0 1 0 0 0 0 0\n0 0 0 0 1 0 0 0\n0 0 0 0 0 0 1 0\n",
    )
    .unwrap();
    path
}

fn write_cnot(dir: &tempfile::TempDir) -> PathBuf {
    let path = dir.path().join("cnot.txt");
    std::fs::write(
        &path,
        "dim 4\n1 0 0 0 0 0 0 0\n0 0 1 0 0 0 0 0\n0 0 0 0 0 0 1 0\n0 0 0 0 1 0 0 0\n",
    )
    .unwrap();
    path
}

#[test]
fn factorize_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let id4 = write_identity4(&dir);
    let cnot = write_cnot(&dir);

    let ok = run(&[
        "factorize",
        id4.to_str().unwrap(),
        "--d1",
        "2",
        "--d2",
        "2",
    ]);
    assert_eq!(code(&ok), 0);
    let stdout = String::from_utf8(ok.stdout).unwrap();
    assert!(stdout.contains("\"verdict\": \"Product\""));
    assert!(stdout.contains("# factor U1"));

    let not = run(&[
        "factorize",
        cnot.to_str().unwrap(),
        "--d1",
        "2",
        "--d2",
        "2",
    ]);
    assert_eq!(code(&not), 1);
    let stdout = String::from_utf8(not.stdout).unwrap();
    assert!(stdout.contains("\"verdict\": \"NotProduct\""));
    assert!(stdout.contains("lambda residual"));

    let malformed = dir.path().join("bad.txt");
    std::fs::write(&malformed, "dim 4\n1 0 junk\n").unwrap();
    let bad = run(&[
        "factorize",
        malformed.to_str().unwrap(),
        "--d1",
        "2",
        "--d2",
        "2",
    ]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8(bad.stderr).unwrap().contains("error:"));

    let missing = run(&["factorize", "/nonexistent", "--d1", "2", "--d2", "2"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let id4 = write_identity4(&dir);
    let cnot = write_cnot(&dir);
    let id = id4.to_str().unwrap();
    let cx = cnot.to_str().unwrap();

    for mode in ["mc-analytic", "mc-sampled", "c-sampled"] {
        let holds = run(&["check", id, "--d1", "2", "--d2", "2", "--mode", mode]);
        assert_eq!(code(&holds), 0, "identity should hold in mode {mode}");
        let violated = run(&["check", cx, "--d1", "2", "--d2", "2", "--mode", mode]);
        assert_eq!(code(&violated), 1, "CNOT should violate in mode {mode}");
    }

    // CNOT's analytic residual is the documented 1/sqrt(2).
    let violated = run(&["check", cx, "--d1", "2", "--d2", "2", "--mode", "mc-analytic"]);
    let stdout = String::from_utf8(violated.stdout).unwrap();
    assert!(stdout.contains("\"residual\": 0.7071067811865476"));

    // Zero samples in a sampled mode is a usage error.
    for mode in ["mc-sampled", "c-sampled"] {
        let zero = run(&[
            "check", id, "--d1", "2", "--d2", "2", "--mode", mode, "--n-samples", "0",
        ]);
        assert_eq!(code(&zero), 2, "nSamples = 0 must fail in mode {mode}");
    }
}

#[test]
fn signal_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let proto = dir.path().join("protocol.toml");
    let text = ProtocolFile::from_spec(&cnot_bell_benchmark(1_000, 3)).to_toml();
    std::fs::write(&proto, &text).unwrap();

    let signalling = run(&["signal", proto.to_str().unwrap()]);
    assert_eq!(code(&signalling), 1);
    assert!(String::from_utf8(signalling.stdout)
        .unwrap()
        .contains("\"tv_exact\": 0.5"));

    // Identity dynamics cannot signal.
    let mut quiet = ProtocolFile::parse(&text).unwrap();
    let mut entries = vec![0.0; 32];
    for i in 0..4 {
        entries[2 * (4 * i + i)] = 1.0;
    }
    quiet.joint_unitary.entries = entries;
    let quiet_path = dir.path().join("quiet.toml");
    std::fs::write(&quiet_path, quiet.to_toml()).unwrap();
    let no_signal = run(&["signal", quiet_path.to_str().unwrap()]);
    assert_eq!(code(&no_signal), 0);

    // A protocol file missing a required field is a usage error.
    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, text.replace("seed = 3\n", "")).unwrap();
    assert_eq!(code(&run(&["signal", broken.to_str().unwrap()])), 2);
}

#[test]
fn field_scan_exit_codes() {
    let matched = run(&["field-scan", "--n-max", "100", "--points", "4"]);
    assert_eq!(code(&matched), 0);
    assert!(String::from_utf8(matched.stdout)
        .unwrap()
        .contains("microcausality holds"));

    let mismatched = run(&[
        "field-scan",
        "--n-max",
        "100",
        "--points",
        "4",
        "--statistics",
        "fermi",
    ]);
    assert_eq!(code(&mismatched), 1);
    assert!(String::from_utf8(mismatched.stdout)
        .unwrap()
        .contains("microcausality violated"));

    // Operator-level scans are defined for the scalar-like field only.
    let unsupported = run(&[
        "field-scan",
        "--n-max",
        "2",
        "--points",
        "2",
        "--field-class",
        "dirac-like",
        "--operator",
    ]);
    assert_eq!(code(&unsupported), 2);

    // A grid with no spacelike separation admits no verdict.
    let timelike = run(&[
        "field-scan",
        "--n-max",
        "10",
        "--points",
        "2",
        "--t",
        "5.0",
        "--x-min",
        "0.1",
        "--x-max",
        "0.2",
    ]);
    assert_eq!(code(&timelike), 2);
}

#[test]
fn fermion_demo_exit_codes() {
    let ok = run(&["fermion-demo", "--n-max", "4"]);
    assert_eq!(code(&ok), 0);
    assert!(String::from_utf8(ok.stdout)
        .unwrap()
        .contains("\"verdict\": \"NotMeasurable\""));

    // Oversized mode cutoffs fail loudly against the budget.
    let budget = run(&["fermion-demo", "--n-max", "100"]);
    assert_eq!(code(&budget), 2);
    assert!(String::from_utf8(budget.stderr)
        .unwrap()
        .contains("exceeds the configured budget"));
}

#[test]
fn pauli_jordan_prints_table() {
    let out = run(&["pauli-jordan"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 5);
    assert!(stdout.contains("ScalarLike,Bose,commutator,-1,true"));
    assert!(stdout.contains("DiracLike,Bose,commutator,1,false"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["pauli-jordan", "--threads", "0"])), 2);
}

#[test]
fn out_flag_writes_report_copy() {
    let dir = tempfile::tempdir().unwrap();
    let id4 = write_identity4(&dir);
    let out = dir.path().join("report.json");
    let result = run(&[
        "factorize",
        id4.to_str().unwrap(),
        "--d1",
        "2",
        "--d2",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&result), 0);
    assert_eq!(std::fs::read(&out).unwrap(), result.stdout);
}
