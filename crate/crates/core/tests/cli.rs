use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bbgrad(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bbgrad"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn manifest_value(dir: &Path, key: &str) -> Option<String> {
    fs::read_to_string(dir.join("manifest.txt"))
        .unwrap()
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")).map(str::to_string))
}

#[test]
fn table_then_spread_and_sandwich() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bbgrad(
        &["table", "--problem", "poisson", "--beta", "0.2", "--level", "3,4,5", "--rule", "BB1", "--out", "t"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = tmp.path().join("t");
    let table = fs::read_to_string(t.join("table.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 4 * 3);
    assert_eq!(manifest_value(&t, "status").as_deref(), Some("ok"));
    assert_eq!(manifest_value(&t, "levels").as_deref(), Some("3,4,5"));

    let out = bbgrad(&["spread", "t/table.csv", "--out", "s"], tmp.path());
    assert!(out.status.success());
    let spread = fs::read_to_string(tmp.path().join("s/spread.csv")).unwrap();
    assert!(spread.starts_with("problem,rule,beta,eps,levels,ell\n"));
    assert_eq!(spread.lines().count(), 5);

    let out = bbgrad(&["sandwich", "t/table.csv", "--out", "w", "--slack", "1"], tmp.path());
    assert!(out.status.success());
    assert_eq!(manifest_value(&tmp.path().join("w"), "comparisons").as_deref(), Some("8"));
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("exp.cfg"),
        "problem = burgers\nrules = ABB\nbetas = 0.5\nepsilons = 1e-2, 1e-4\ndt_pairs = 4:0.125\nout_dir = from_file\n",
    )
    .unwrap();
    let out = bbgrad(&["table", "--config", "exp.cfg", "--beta", "0.05"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("from_file");
    assert_eq!(manifest_value(&dir, "betas").as_deref(), Some("0.05"));
    assert_eq!(manifest_value(&dir, "dts").as_deref(), Some("0.125"));
    let table = fs::read_to_string(dir.join("table.csv")).unwrap();
    assert!(table.lines().skip(1).all(|l| l.starts_with("burgers,ABB,5.0000000000000003e-2,")));
}

#[test]
fn run_writes_trace_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bbgrad(
        &["run", "--problem", "wave", "--beta", "0.5", "--rule", "BB2", "--level", "3", "--dt", "0.05", "--eps", "1e-6"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = fs::read_to_string(tmp.path().join("out/trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("k,grad_norm,alpha,objective"));
    let last: Vec<&str> = lines.last().unwrap().split(',').collect();
    assert!(last[1].parse::<f64>().unwrap() < 1e-6);
    assert_eq!(manifest_value(&tmp.path().join("out"), "termination").as_deref(), Some("converged"));
}

#[test]
fn spectral_sweep_defaults_to_spectral_problem() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bbgrad(&["spectral-sweep", "--beta", "2", "--level", "10", "--seed", "3"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sweep = fs::read_to_string(tmp.path().join("out/sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 4);
    assert_eq!(manifest_value(&tmp.path().join("out"), "seed").as_deref(), Some("3"));
}

#[test]
fn bad_input_exits_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        &["table", "--problem", "heat"][..],
        &["table", "--problem", "poisson", "--eps", "1e-4,1e-2"],
        &["run", "--problem", "poisson", "--level", "3,4"],
        &["spread", "missing.csv"],
        &["table", "--config", "missing.cfg"],
    ] {
        let out = bbgrad(args, tmp.path());
        assert!(!out.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
}

#[test]
fn iteration_cap_is_not_a_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bbgrad(
        &["table", "--problem", "spectral", "--beta", "0.01", "--level", "30,40", "--max-iter", "2", "--eps", "1e-12"],
        tmp.path(),
    );
    assert!(out.status.success());
    let table = fs::read_to_string(tmp.path().join("out/table.csv")).unwrap();
    assert!(table.lines().skip(1).all(|l| l.ends_with(",,max_iter")));
}

#[test]
fn solver_failure_is_recorded_and_exits_nonzero() {
    // with a vanishing control cost the BB steps drive the control far
    // enough for Newton to stall in the first time step
    let tmp = tempfile::tempdir().unwrap();
    let out = bbgrad(
        &["table", "--problem", "burgers", "--beta", "1e-9", "--level", "5", "--rule", "BB1", "--eps", "1e-12"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonlinear solver failed"));
    let dir = tmp.path().join("out");
    assert_eq!(manifest_value(&dir, "status").as_deref(), Some("solver_failure"));
    let table = fs::read_to_string(dir.join("table.csv")).unwrap();
    assert!(table.lines().skip(1).all(|l| l.ends_with(",,solver_failure")));
}
