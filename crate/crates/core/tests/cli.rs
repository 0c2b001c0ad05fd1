use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gentropy")).args(args).output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_entropy_rates_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.json");
    let series = dir.path().join("series.csv");
    let rates = dir.path().join("rates.csv");
    let out = run(&["construct", "--primes", "2,29", "--out", arg(&sys)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(&sys).unwrap().contains("\"29/3\""));

    let out = run(&["entropy", "--system", arg(&sys), "--g", "eta", "--k", "1..8", "--out", arg(&series)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&series).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,H_lower,H_upper,method,residual_upper"));
    assert_eq!(lines.count(), 8);

    let out = run(&["rates", "--series", arg(&series), "--seq", "log2n", "--csv", arg(&rates)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(&rates).unwrap().starts_with("n,ratio_lower,ratio_upper,threshold_index\n"));

    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 3, "{names:?}");
}

#[test]
fn classify_reports_class() {
    let out = run(&["classify", "--g", "g0:a=2", "--depth", "50"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("G00"), "{text}");
}

#[test]
fn failures_set_exit_codes() {
    let out = run(&["entropy", "--system", "/nonexistent/sys.json", "--k", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["classify", "--g", "eta", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}
