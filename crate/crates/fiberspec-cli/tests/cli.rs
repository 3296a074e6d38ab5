use std::process::Command;

use fiberspec::atlas::{sweep, SweepSpec};
use fiberspec::integrals::CalibrationTable;
use fiberspec::lattice::TorusPoint;
use fiberspec_cli::output::{emit_csv, parse_csv, parse_list, row_fields, HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fiberspec"))
}

#[test]
fn csv_round_trip() {
    let table = CalibrationTable::build(&[1.0]).unwrap();
    let mut spec = SweepSpec::new(1.0, (-6.0, 6.0), (-6.0, 6.0), 3.0);
    spec.k_list = vec![TorusPoint::origin(), TorusPoint::new(0.5, -1.0)];
    let rows = sweep(&spec, &table, 2).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    emit_csv(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with(&HEADER.join(",")));
    let parsed = parse_csv(&text).unwrap();
    assert_eq!(parsed.len(), rows.len());
    for (rec, row) in parsed.iter().zip(&rows) {
        assert_eq!(rec, &row_fields(row));
        let eigs = parse_list(&rec[13]).unwrap();
        assert_eq!(eigs.len(), row.eigs_below.len());
        for (a, b) in eigs.iter().zip(&row.eigs_below) {
            assert!((a - b).abs() <= 1e-11 * b.abs().max(1.0));
        }
    }
}

#[test]
fn zero_coupling_row() {
    let out = bin().args(["sweep", "--lambda-range", "0,0", "--mu-range", "0,0"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(1), Some("0,0,1,0,0,S0,D0,C0+b,C0-b,0,0,0,0,,,true,"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# reference point\ngamma = 1\nlambda = 1\nmu = 10\n").unwrap();
    let out = bin().arg("--config").arg(&cfg).arg("spectrum").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("n_above 4"));
    let out = bin().arg("--config").arg(&cfg).args(["--lambda", "10", "spectrum"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("n_above 5"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["--gamma", "-2", "edges"]), Some(2));
    assert_eq!(code(&["--N", "15", "oracle"]), Some(2));
    assert_eq!(code(&["--source", "nonsense", "classify"]), Some(2));
    assert_eq!(code(&["--tol", "1e-20", "integrals", "--z", "-1"]), Some(2));
    assert_eq!(code(&["integrals", "--z", "3"]), Some(3));
    assert_eq!(code(&["--out", "/nonexistent/dir/x.csv", "sweep", "--lambda-range", "0,0", "--mu-range", "0,0"]), Some(1));
    assert_eq!(code(&["verify"]), Some(0));
}
