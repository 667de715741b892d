use std::process::Command;

use lambdamax::curve::{read_csv, CurveRecord};
use lambdamax::{EnsembleSpec, Method};
use lambdamax_cli::{run, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("lambdamax").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn closed_2x2(x: f64) -> f64 {
    1.0 - (x * std::f64::consts::PI / 2.0).sqrt() * (-x / 2.0).exp() * libm::erf((x / 2.0).sqrt()) - (-x).exp()
}

#[test]
fn cdf_prints_one_number() {
    let (code, out, _) = call(&["cdf", "--ensemble", "wishart-real", "--nmin", "2", "--nmax", "2", "--x", "1", "--method", "exact"]);
    assert_eq!(code, EXIT_OK);
    let v: f64 = out.trim().parse().unwrap();
    assert!((v - closed_2x2(1.0)).abs() <= 1e-12);
}

#[test]
fn gaussian_table_csv_and_json_agree_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("goe.csv");
    let json_path = dir.path().join("goe.json");
    let common = ["table", "--ensemble", "goe", "--n", "2,5,10,20,50", "--grid", "auto", "--method", "exact,tw-gamma"];
    for (fmt, path) in [("csv", &csv_path), ("json", &json_path)] {
        let mut args = common.to_vec();
        args.extend(["--format", fmt, "--output", path.to_str().unwrap()]);
        assert_eq!(call(&args).0, EXIT_OK);
    }

    let curves = read_csv(std::fs::File::open(&csv_path).unwrap(), EnsembleSpec::goe(2).unwrap(), Method::Exact).unwrap();
    let records: Vec<CurveRecord> = serde_json::from_reader(std::fs::File::open(&json_path).unwrap()).unwrap();
    assert_eq!(curves.len(), 10);
    assert_eq!(records.len(), 10);
    for (c, r) in curves.iter().zip(&records) {
        let from_json = r.to_curve().unwrap();
        assert_eq!(c, &from_json);
        assert_eq!(c.len(), 200);
        assert!(c.values.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(c.values[c.len() - 1] > 0.999);
    }
    let ns: Vec<usize> = curves.iter().step_by(2).map(|c| c.ensemble.order()).collect();
    assert_eq!(ns, [2, 5, 10, 20, 50]);
    assert!(curves.iter().step_by(2).all(|c| c.method == Method::Exact));
}

#[test]
fn csv_columns_follow_the_curve_mix() {
    let (_, one, _) = call(&["table", "--ensemble", "gue", "--n", "3", "--grid", "-1:1:3"]);
    assert_eq!(one.lines().next().unwrap(), "x,value");
    assert_eq!(one.lines().count(), 4);
    let (_, many, _) = call(&["table", "--ensemble", "gue", "--n", "3,4", "--grid", "-1:1:3", "--method", "exact,tw-gamma"]);
    assert_eq!(many.lines().next().unwrap(), "x,value,method,dims");
    assert_eq!(many.lines().count(), 13);
}

#[test]
fn validate_gue_three() {
    let (code, out, _) = call(&["validate", "--ensemble", "gue", "--n", "3", "--samples", "200000", "--seed", "7"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("PASS"));
}

#[test]
fn validate_failure_exit_code() {
    let (code, out, err) = call(&["validate", "--ensemble", "goe", "--n", "2", "--samples", "50", "--tolerance", "1e-6"]);
    assert_eq!(code, EXIT_VALIDATION);
    assert!(out.contains("FAIL") && err.contains("validation failed"));
}

#[test]
fn usage_errors() {
    for args in [
        vec!["cdf", "--bogus"],
        vec!["frobnicate"],
        vec!["cdf", "--ensemble", "goe", "--x", "1"],
        vec!["cdf", "--ensemble", "wishart-real", "--nmin", "2", "--x", "1"],
        vec!["cdf", "--ensemble", "goe", "--n", "2", "--nmin", "2", "--x", "1"],
        vec!["cdf", "--ensemble", "nope", "--n", "2", "--x", "1"],
        vec!["table", "--ensemble", "goe", "--n", "2", "--grid", "1:2"],
        vec!["cdf", "--ensemble", "goe", "--n", "2", "--x", "1", "--precision", "12"],
        vec!["pdf", "--ensemble", "goe", "--n", "2", "--x", "1", "--method", "monte-carlo"],
    ] {
        let (code, _, err) = call(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(!err.is_empty());
    }
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("validate"));
}

#[test]
fn domain_errors() {
    for args in [
        vec!["cdf", "--ensemble", "wishart-real", "--nmin", "5", "--nmax", "3", "--x", "1"],
        vec!["cdf", "--ensemble", "gue", "--n", "0", "--x", "1"],
        vec!["quantile", "--ensemble", "goe", "--n", "3", "--p", "1.5"],
        vec!["quantile", "--ensemble", "goe", "--n", "3", "--p", "0", "--method", "monte-carlo", "--samples", "10"],
        vec!["cdf", "--ensemble", "goe", "--n", "3", "--x", "1", "--method", "monte-carlo", "--samples", "0"],
    ] {
        assert_eq!(call(&args).0, EXIT_DOMAIN, "{args:?}");
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let run_with = |threads: &str| {
        call(&[
            "--threads", threads, "table", "--ensemble", "wishart-complex", "--n", "2,3", "--grid", "0.5:12:40",
            "--method", "exact,tw-gamma,monte-carlo", "--samples", "3000", "--seed", "9",
        ])
        .1
    };
    let one = run_with("1");
    assert_eq!(one, run_with("3"));
    let sample = |threads: &str| call(&["--threads", threads, "sample", "--ensemble", "goe", "--n", "4", "--samples", "500", "--seed", "2"]).1;
    assert_eq!(sample("1"), sample("4"));
    assert_eq!(sample("2").lines().count(), 500);
}

#[test]
fn quantile_inverts_cdf() {
    let (_, q, _) = call(&["quantile", "--ensemble", "wishart-real", "--nmin", "3", "--nmax", "6", "--p", "0.9"]);
    let (_, c, _) = call(&["cdf", "--ensemble", "wishart-real", "--nmin", "3", "--nmax", "6", "--x", q.trim()]);
    assert!((c.trim().parse::<f64>().unwrap() - 0.9).abs() <= 1e-9);
}

#[test]
fn bench_reports_runtime() {
    let (code, out, _) = call(&["bench", "--ensemble", "wishart-real", "--n", "50", "--repeat", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("wishart-real 50x50 x=") && out.contains("runtime_ms="));
}

#[test]
fn binary_exit_codes_and_env_threads() {
    let bin = env!("CARGO_BIN_EXE_lambdamax");
    let o = Command::new(bin).args(["cdf", "--nope"]).output().unwrap();
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert!(o.stdout.is_empty());

    let o = Command::new(bin)
        .env("LAMBDAMAX_THREADS", "2")
        .args(["cdf", "--ensemble", "gue", "--n", "1", "--x", "0"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "0.5");

    let o = Command::new(bin).args(["quantile", "--ensemble", "goe", "--n", "2", "--p", "2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(EXIT_DOMAIN));
}
