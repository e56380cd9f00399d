//! End-to-end tests of the `umbral` binary: the documented invocations,
//! the exit-code contract (0 ok, 1 identity violation, 2 invalid input,
//! 3 not a delta operator), JSON schema and determinism, and file output.

use carlitz_umbral::carlitz::CarlitzCache;
use carlitz_umbral::genfun::exp_series;
use carlitz_umbral::laurent::{eval_lin_series, ratfn_to_laurent};
use carlitz_umbral::parse::{fmt_ratfn, parse_ratfn};
use carlitz_umbral::{DeltaOperator, FieldSpec, SigmaSpec};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::{Command, Output};

fn umbral(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_umbral"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is valid JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Unique temp path per test so parallel tests never collide.
fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("umbral-{}-{}", std::process::id(), name))
}

#[test]
fn basic_example2_rows_are_binomials() {
    let out = umbral(&[
        "basic", "--q", "2", "--preset", "example2", "--n", "4", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["schema"], 1);
    let rows = v["rows"].as_array().expect("rows");
    assert_eq!(rows.len(), 5);
    // Q_0 = t and Q_n = t^{q^n} - t^{q^{n-1}}; over F_2 both signs are 1.
    assert_eq!(rows[0]["q_coeffs"], json!([{ "j": 0, "coeff": "1" }]));
    for (n, row) in rows.iter().enumerate().skip(1) {
        let expected = json!([
            { "j": n - 1, "coeff": "1" },
            { "j": n, "coeff": "1" },
        ]);
        assert_eq!(row["q_coeffs"], expected, "Q_{}", n);
    }
}

#[test]
fn basic_carlitz_rows_equal_f_tables() {
    let basic = umbral(&[
        "basic", "--q", "2", "--preset", "carlitz", "--n", "4", "--format", "json",
    ]);
    let tables = umbral(&["carlitz", "--q", "2", "--n", "4", "--format", "json"]);
    assert_eq!(code(&basic), 0);
    assert_eq!(code(&tables), 0);
    let b = json_of(&basic);
    let t = json_of(&tables);
    for n in 0..=4 {
        assert_eq!(
            b["rows"][n]["q_coeffs"], t["rows"][n]["f_coeffs"],
            "Q_{} != f_{}",
            n, n
        );
    }
}

#[test]
fn zero_sigma_is_not_a_delta_operator() {
    let path = temp_path("zero-sigma.json");
    std::fs::write(&path, "[\"0\", \"0\"]").unwrap();
    let out = umbral(&["basic", "--q", "2", "--sigma", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("S_1"), "stderr: {}", err);
}

#[test]
fn verify_all_passes_on_smallest_field() {
    let out = umbral(&[
        "verify", "all", "--q", "2", "--n", "5", "--terms", "4", "--seed", "7",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("summary:"), "stdout: {}", text);
    assert!(!text.contains("FAIL"), "stdout: {}", text);
}

#[test]
fn verify_gekeler_q3() {
    let out = umbral(&["verify", "gekeler", "--q", "3", "--n", "8"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn verify_each_suite_passes() {
    for suite in ["kbinomial", "taylor", "orthonormal", "genfun", "module"] {
        for preset in ["carlitz", "laguerre"] {
            let out = umbral(&[
                "verify", suite, "--q", "2", "--preset", preset, "--n", "3", "--terms", "3",
                "--seed", "1", "--format", "json",
            ]);
            assert_eq!(code(&out), 0, "suite {} preset {}", suite, preset);
            let v = json_of(&out);
            assert_eq!(v["ok"], true, "suite {} preset {}", suite, preset);
        }
    }
}

#[test]
fn tampered_suites_fail_with_counterexample() {
    for suite in ["kbinomial", "taylor", "gekeler", "orthonormal", "genfun", "module"] {
        let out = umbral(&[
            "verify", suite, "--q", "2", "--n", "3", "--terms", "3", "--tamper", "--format",
            "json",
        ]);
        assert_eq!(code(&out), 1, "suite {}", suite);
        let v = json_of(&out);
        assert_eq!(v["ok"], false, "suite {}", suite);
        let located = v["records"].as_array().unwrap().iter().any(|r| {
            r["ok"] == false && !r["counterexample"].is_null()
        });
        assert!(located, "suite {}: no localized counterexample", suite);
    }
}

#[test]
fn expand_t_pow_q_over_carlitz() {
    let out = umbral(&[
        "expand", "t^2", "--q", "2", "--preset", "carlitz", "--n", "2", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    let fs = FieldSpec::from_q(2).unwrap();
    // t^q = Q_0 + D_1 Q_1, so psi = (1, D_1) and the norm is q^0.
    let bracket = fmt_ratfn(&parse_ratfn(fs, "x^2 + x").unwrap());
    assert_eq!(v["psi"], json!(["1", bracket, "0"]));
    assert_eq!(v["norm_exponent"], 0);
}

#[test]
fn expand_q3_over_its_own_sequence_is_a_unit_vector() {
    let tables = umbral(&["carlitz", "--q", "2", "--n", "3", "--format", "json"]);
    let f3 = json_of(&tables)["rows"][3]["f_coeffs"].to_string();
    let out = umbral(&[
        "expand", &f3, "--q", "2", "--preset", "carlitz", "--n", "3", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["psi"], json!(["0", "0", "0", "1"]));
}

#[test]
fn eval_exp_matches_the_library_series() {
    let out = umbral(&[
        "eval", "--q", "2", "--preset", "carlitz", "--point", "x^2", "--prec", "16",
        "--terms", "6", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["valuation"], 2);

    let fs = FieldSpec::from_q(2).unwrap();
    let cache = CarlitzCache::new(fs, 6).unwrap();
    let op = DeltaOperator::new(&cache, SigmaSpec::Carlitz, 6).unwrap();
    let series = exp_series(&op, 6).unwrap();
    let lam = ratfn_to_laurent(&parse_ratfn(fs, "x^2").unwrap(), 16);
    let value = eval_lin_series(series.coeffs(), &lam, 16).unwrap();
    assert_eq!(v["value"], format!("{}", value));
}

#[test]
fn json_carries_schema_version() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["basic", "--q", "2", "--n", "2", "--format", "json"],
        vec!["carlitz", "--q", "2", "--n", "2", "--format", "json"],
        vec!["verify", "gekeler", "--q", "2", "--n", "2", "--format", "json"],
        vec!["genfun", "--q", "2", "--terms", "2", "--format", "json"],
        vec!["expand", "t^2", "--q", "2", "--n", "1", "--format", "json"],
        vec![
            "eval", "--q", "2", "--point", "x^2", "--prec", "6", "--terms", "3", "--format",
            "json",
        ],
    ];
    for args in runs {
        let out = umbral(&args);
        assert_eq!(code(&out), 0, "args {:?}", args);
        assert_eq!(json_of(&out)["schema"], 1, "args {:?}", args);
    }
}

#[test]
fn identical_config_gives_identical_bytes() {
    let args = [
        "verify", "taylor", "--q", "2", "--n", "4", "--seed", "7", "--format", "json",
    ];
    assert_eq!(umbral(&args).stdout, umbral(&args).stdout);
    let args = ["basic", "--q", "3", "--preset", "laguerre", "--n", "3", "--format", "json"];
    assert_eq!(umbral(&args).stdout, umbral(&args).stdout);
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let path = temp_path("carlitz-table.json");
    let direct = umbral(&["carlitz", "--q", "2", "--n", "2", "--format", "json"]);
    let to_file = umbral(&[
        "carlitz", "--q", "2", "--n", "2", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&to_file), 0);
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    std::fs::remove_file(&path).ok();
}

#[test]
fn invalid_inputs_exit_2() {
    let bad: Vec<Vec<&str>> = vec![
        vec!["basic", "--q", "6", "--n", "2"],
        vec!["basic", "--q", "2", "--nu", "0", "--n", "2"],
        vec!["expand", "t^2 +", "--q", "2"],
        vec!["eval", "--q", "2", "--point", "x", "--prec", "0"],
        vec!["eval", "--q", "2", "--point", "x/("],
        // v(x) = 1 sits on the divergence boundary of e_delta.
        vec!["eval", "--q", "2", "--point", "x", "--prec", "6", "--terms", "3"],
        vec!["verify", "nonsense", "--q", "2"],
        vec!["frobnicate", "--q", "2"],
    ];
    for args in bad {
        let out = umbral(&args);
        assert_eq!(code(&out), 2, "args {:?}", args);
    }
}
