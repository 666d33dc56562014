//! The command-line tool end to end through `cli::run`.

use std::fs;
use std::path::PathBuf;

use zeroline::cli::{run, EXIT_BAD_INPUT, EXIT_INVARIANT};

fn dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("zeroline-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    d
}

fn zl(args: &[&str]) -> i32 {
    run(std::iter::once("zeroline").chain(args.iter().copied()).map(String::from).collect())
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn forward_on_zero_potential() {
    let d = dir("forward");
    assert_eq!(zl(&["forward", "--potential", "zero", "--n", "1..2", "--out", d.to_str().unwrap()]), 0);
    let phases = fs::read_to_string(d.join("phase_shifts.csv")).unwrap();
    assert!(phases.starts_with("# tool=zeroline-"));
    assert!(phases.contains("# command=forward"));
    for row in data_rows(&phases) {
        assert!(row[1].parse::<f64>().unwrap().abs() < 1e-12);
    }
    let zeros = data_rows(&fs::read_to_string(d.join("zeros.csv")).unwrap());
    assert_eq!(zeros.len(), 8);
    for row in zeros {
        let (e, n, r): (f64, f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap(), row[2].parse().unwrap());
        assert!((r - n * std::f64::consts::PI / e.sqrt()).abs() < 1e-10);
    }
}

#[test]
fn trace_then_invert_rebuilds_the_two_step_well() {
    let d = dir("invert");
    let out = d.to_str().unwrap();
    assert_eq!(zl(&["trace", "--potential", "type=piecewise;breakpoints=2,3;values=-2,-1", "--r-range", "0.3:4.6", "--out", out]), 0);
    let line = d.join("line_n1.csv");
    assert!(d.join("trace.gp").exists());
    assert_eq!(zl(&["invert-piecewise", "--line", line.to_str().unwrap(), "--out", out]), 0);
    let p: zeroline::potentials::Potential = fs::read_to_string(d.join("potential.txt")).unwrap().parse().unwrap();
    let p = p.to_piecewise().unwrap();
    assert_eq!(p.breakpoints().len(), 2);
    for (got, want) in p.values().iter().zip([-2.0, -1.0]) {
        assert!((got - want).abs() < 0.02);
    }
}

#[test]
fn mixed_trace_and_born_inversion() {
    let d = dir("mixed");
    let out = d.to_str().unwrap();
    assert_eq!(zl(&["trace", "--potential", "two-step", "--e0", "2.5", "--e-max", "30", "--points", "20", "--out", out]), 0);
    let text = fs::read_to_string(d.join("mixed_n1.csv")).unwrap();
    assert!(text.contains("lambda,"));
    assert_eq!(zl(&["invert-born", "--potential", "exponential", "--out", out]), 0);
    let report = fs::read_to_string(d.join("report.txt")).unwrap();
    let l2: f64 = report
        .split_whitespace()
        .find_map(|t| t.strip_prefix("l2_error="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(l2 < 0.02);
    let data = d.join("dataset.csv");
    assert_eq!(zl(&["invert-born", "--data", data.to_str().unwrap(), "--out", d.join("again").to_str().unwrap()]), 0);
}

#[test]
fn same_arguments_give_identical_files() {
    let d = dir("determinism");
    let out = d.to_str().unwrap();
    let args = ["fig2", "--potential", "two-step", "--out", out];
    assert_eq!(zl(&args), 0);
    let first = fs::read(d.join("fig2.csv")).unwrap();
    let jumps = fs::read(d.join("jumps.csv")).unwrap();
    assert_eq!(zl(&args), 0);
    assert_eq!(first, fs::read(d.join("fig2.csv")).unwrap());
    assert_eq!(jumps, fs::read(d.join("jumps.csv")).unwrap());
}

#[test]
fn exit_codes() {
    let d = dir("codes");
    let out = d.to_str().unwrap();
    assert_eq!(zl(&["forward", "--potential", "no-such-thing", "--out", out]), EXIT_BAD_INPUT);
    assert_eq!(zl(&["forward", "--tol", "-1", "--out", out]), EXIT_BAD_INPUT);
    assert_eq!(zl(&["bogus"]), EXIT_BAD_INPUT);
    fs::create_dir_all(&d).unwrap();
    let bad = d.join("bad.csv");
    fs::write(&bad, "# n=1 ell0=0.5 E0=none\nparam_kind,param_value,r\nE,5,1.0\nE,4,0.9\n").unwrap();
    assert_eq!(zl(&["invert-piecewise", "--line", bad.to_str().unwrap(), "--out", out]), EXIT_INVARIANT);
    assert_eq!(zl(&["verify", "--suite", "monotonicity", "--count", "3", "--seed", "7", "--out", out]), 0);
    assert!(fs::read_to_string(d.join("verify.txt")).unwrap().contains("status=PASS"));
}
