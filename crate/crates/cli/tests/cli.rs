use std::path::Path;
use std::process::{Command, Output};

fn volnet(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_volnet"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).display().to_string()
}

#[test]
fn experiment_one_writes_the_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = volnet(&["experiment", "--config", &config("exp1.cfg"), "--out", "e1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("e1/trials.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 54);
    for f in ["tables.md", "config.txt", "regression_mlff.svg", "regression_cffn.csv", "test_mse.svg", "overlay_indiavix_niftysdr.svg"] {
        assert!(dir.path().join("e1").join(f).is_file(), "{f}");
    }
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = volnet(&["forecast"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("Usage:"), "{err}");
    assert_eq!(err.lines().filter(|l| l.starts_with("error kind=usage code=1 ")).count(), 1, "{err}");
}

#[test]
fn missing_instrument_names_the_symbol() {
    let dir = tempfile::tempdir().unwrap();
    let o = volnet(&["synth", "--out", "fx", "--seed", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    std::fs::remove_file(dir.path().join("fx/DAX.csv")).unwrap();
    let o = volnet(&["ingest", "--data-dir", "fx", "--out", "ing"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error kind=data code=2 message=") && err.contains("DAX"), "{err}");
}

#[test]
fn ingest_then_plot_from_the_export() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(volnet(&["synth", "--out", "fx"], dir.path()).status.code(), Some(0));
    let o = volnet(&["ingest", "--data-dir", "fx", "--out", "ing"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ds = std::fs::read_to_string(dir.path().join("ing/dataset.csv")).unwrap();
    assert!(ds.starts_with("date,INDIAVIX,CBOEVIX,CRUDESDR,DJIASDR,DAXSDR,HANGSDR,NIKKEISDR,NIFTYSDR,GOLDSDR\n"));
    let o = volnet(&["plot", "overlay", "--dataset", "ing/dataset.csv", "--out", "fig/overlay.svg"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sidecar = std::fs::read_to_string(dir.path().join("fig/overlay.csv")).unwrap();
    assert_eq!(sidecar.lines().count(), ds.lines().count());
}

#[test]
fn train_then_replot_regression() {
    let dir = tempfile::tempdir().unwrap();
    let o = volnet(
        &["train", "--config", &config("exp2.cfg"), "--algorithm", "rprop", "--hidden", "8", "--out", "t"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let points = std::fs::read_to_string(dir.path().join("t/regression.csv")).unwrap();
    let o = volnet(&["plot", "regression", "--points", "t/regression.csv", "--out", "again.svg"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(dir.path().join("again.csv")).unwrap(), points);
    assert!(std::fs::read_to_string(dir.path().join("t/network.txt")).unwrap().len() > 100);
}

#[test]
fn failed_experiment_writes_error_report() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("empty.cfg"),
        "name=empty\nfixture=in-regime\ntrain_start=1999-01-01\ntrain_end=1999-12-31\n",
    )
    .unwrap();
    let o = volnet(&["experiment", "--config", "empty.cfg", "--out", "x"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("x/trials.csv").exists());
    let text = std::fs::read_to_string(dir.path().join("x/error.txt")).unwrap();
    assert!(text.contains("no training rows"), "{text}");
}

#[test]
fn config_errors_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("typo.cfg"), "name=x\nhiden_sizes=3\n").unwrap();
    let o = volnet(&["experiment", "--config", "typo.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("hiden_sizes"));
}
