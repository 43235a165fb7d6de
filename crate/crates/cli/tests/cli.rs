use std::process::{Command, Output};

use monoword_cli::output::{write_csv, write_json, Param, Record, Value};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn monoword(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_monoword"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("MONOWORD_THREADS", t),
        None => cmd.env_remove("MONOWORD_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = monoword(args, None);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    monoword(args, None).status.code().unwrap()
}

/// Parsed CSV rows after the header.
fn rows(csv_text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "route",
            "which",
            "n",
            "k",
            "N_or_t_or_s",
            "value",
            "err_bar",
            "exact_flag"
        ]
    );
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

fn value_at(csv_text: &str, n: &str) -> String {
    rows(csv_text).into_iter().find(|r| r[2] == n).expect("row")[5].clone()
}

#[test]
fn dist_examples() {
    let t = stdout(&[
        "dist", "--which", "I", "--k", "2", "--N", "2", "--route", "enum",
    ]);
    assert_eq!(value_at(&t, "1"), "1/4");
    let t = stdout(&[
        "dist", "--which", "I", "--k", "1", "--n-max", "1", "--N", "5", "--route", "series",
    ]);
    assert_eq!(value_at(&t, "0"), "0");
    let t = stdout(&["dist", "--which", "I", "--k", "3", "--N", "0"]);
    assert_eq!(value_at(&t, "0"), "1");
    assert!(t.ends_with('\n') && !t.contains('\r'));
}

#[test]
fn dist_routes_agree() {
    let out = monoword(
        &[
            "dist", "--which", "both", "--k", "1..3", "--N", "0..6", "--route", "all",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn limits_examples() {
    let t = stdout(&["limits", "f0", "--k", "2", "--s", "0"]);
    let v: f64 = rows(&t)[0][5].parse().unwrap();
    assert_eq!(v, 0.0);

    let t = stdout(&["limits", "f2", "--s", "6"]);
    let v: f64 = rows(&t)[0][5].parse().unwrap();
    assert!(v > 1.0 - 1e-6);

    let t = stdout(&["limits", "thm4", "--k", "2", "--N", "50,100,200"]);
    let col: Vec<f64> = rows(&t).iter().map(|r| r[5].parse().unwrap()).collect();
    assert_eq!(col.len(), 3);
    assert!(col.windows(2).all(|w| w[1] < w[0]), "{col:?}");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["dist", "--k", "2", "--N", "3,2"]), 2);
    assert_eq!(code(&["dist", "--k", "2"]), 2);
    assert_eq!(code(&["nosuch"]), 2);
    assert_eq!(
        code(&["dist", "--k", "9", "--N", "40", "--route", "enum"]),
        2
    );
    assert_eq!(
        code(&["laguerre", "--k", "2", "--n", "1", "--t", "1", "--method", "gamma"]),
        2
    );
    let bad = monoword(&["dist", "--k", "2", "--N", "2"], Some("x"));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_output() {
    let cases: [&[&str]; 3] = [
        &[
            "painleve", "--n", "1..3", "--k", "1..3", "--which", "both", "--t", "0.5,1,2",
            "--format", "json",
        ],
        &[
            "laguerre", "--k", "1..3", "--n", "0..3", "--t", "0.1,1,5", "--method", "all",
        ],
        &[
            "dist", "--which", "both", "--k", "2..4", "--N", "0..10", "--route", "tableaux",
        ],
    ];
    for args in cases {
        let one = monoword(args, Some("1"));
        let four = monoword(args, Some("4"));
        assert!(one.status.success() && four.status.success());
        assert_eq!(one.stdout, four.stdout, "{args:?}");
    }
}

#[test]
fn csv_cells_round_trip_through_json() {
    let base = [
        "laguerre",
        "--k",
        "1,2",
        "--n",
        "0..2",
        "--t",
        "0.1:2:0.3",
        "--method",
        "all",
    ];
    let csv_text = stdout(&base);
    let mut json_args = base.to_vec();
    json_args.extend(["--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&json_args)).unwrap();
    let records = json["records"].as_array().unwrap();
    let table = rows(&csv_text);
    assert_eq!(records.len(), table.len());
    for (row, rec) in table.iter().zip(records) {
        assert_eq!(row[0], rec["route"].as_str().unwrap());
        let x: f64 = row[4].parse().unwrap();
        let v: f64 = row[5].parse().unwrap();
        assert_eq!(x.to_bits(), rec["N_or_t_or_s"].as_f64().unwrap().to_bits());
        assert_eq!(v.to_bits(), rec["value"].as_f64().unwrap().to_bits());
    }
}

#[test]
fn exact_values_print_as_fractions_in_json() {
    let t = stdout(&[
        "dist", "--k", "2", "--N", "2", "--route", "enum", "--format", "json",
    ]);
    let json: serde_json::Value = serde_json::from_str(&t).unwrap();
    let rec = json["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["n"] == 1)
        .unwrap();
    assert_eq!(rec["value"], "1/4");
    assert_eq!(rec["exact_flag"], true);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let args = [
        "painleve",
        "--n",
        "2",
        "--k",
        "2",
        "--t",
        "0.5,1",
        "--compare",
    ];
    let direct = stdout(&args);
    let mut with_file = args.to_vec();
    with_file.extend(["-o", path.to_str().unwrap()]);
    assert!(stdout(&with_file).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
}

fn crosscheck_json(extra: &[&str]) -> (i32, serde_json::Value, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut args = vec![
        "crosscheck",
        "--seed",
        "3",
        "--points",
        "20",
        "-o",
        path.to_str().unwrap(),
    ];
    args.extend(extra);
    let out = monoword(&args, None);
    let text = std::fs::read_to_string(&path).expect("report written even on failure");
    (
        out.status.code().unwrap(),
        serde_json::from_str(&text).unwrap(),
        text,
    )
}

#[test]
fn crosscheck_passes_and_is_reproducible() {
    let (code, json, first) = crosscheck_json(&[]);
    assert_eq!(code, 0, "{first}");
    assert_eq!(json["pass"], true);
    let (_, _, second) = crosscheck_json(&[]);
    assert_eq!(first, second);
}

#[test]
fn crosscheck_fault_injection_names_the_identity() {
    let (code, json, _) = crosscheck_json(&["--perturb-determinant", "1e-3"]);
    assert_eq!(code, 1);
    assert_eq!(json["pass"], false);
    let failed: Vec<&str> = json["failed"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(failed.contains(&"theorem2.determinant"), "{failed:?}");
    assert!(failed.contains(&"theorem3.fredholm"), "{failed:?}");
}

#[test]
fn crosscheck_tolerance_override_is_reported() {
    let (code, json, _) = crosscheck_json(&[
        "--perturb-determinant",
        "1e-3",
        "--tol",
        "theorem2.determinant=1e-2",
    ]);
    let check = json["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "theorem2.determinant")
        .unwrap();
    assert_eq!(check["tolerance"].as_f64(), Some(1e-2));
    assert_eq!(check["pass"], true);
    assert_eq!(code, 1, "theorem3 checks still fail");
    assert_eq!(
        crate::code(&["crosscheck", "--points", "5", "--tol", "no.such=1"]),
        2
    );
}

fn record(x: f64, value: f64, err: Option<f64>) -> Record {
    Record {
        route: "r",
        which: None,
        n: Some(1),
        k: Some(2),
        x: Param::Real(x),
        value: Value::Float(value),
        err_bar: err,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn float_cells_round_trip(x in -1e6f64..1e6, v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, e in proptest::option::of(0.0f64..1.0)) {
        let recs = [record(x, v, e)];
        let mut c = Vec::new();
        write_csv(&recs, &mut c).unwrap();
        let mut j = Vec::new();
        write_json("t", &recs, &mut j).unwrap();
        let row = &rows(std::str::from_utf8(&c).unwrap())[0];
        let json: serde_json::Value = serde_json::from_slice(&j).unwrap();
        let rec = &json["records"][0];
        prop_assert_eq!(row[5].parse::<f64>().unwrap().to_bits(), v.to_bits());
        prop_assert_eq!(rec["value"].as_f64().unwrap().to_bits(), v.to_bits());
        prop_assert_eq!(rec["N_or_t_or_s"].as_f64().unwrap().to_bits(), x.to_bits());
        if let Some(e) = e {
            prop_assert_eq!(rec["err_bar"].as_f64().unwrap().to_bits(), e.to_bits());
            prop_assert_eq!(row[6].parse::<f64>().unwrap().to_bits(), e.to_bits());
        }
    }

    #[test]
    fn rational_cells_match(p in -1000i64..1000, q in 1i64..1000) {
        let r = BigRational::new(BigInt::from(p), BigInt::from(q));
        let recs = [Record { value: Value::Exact(r.clone()), ..record(0.0, 0.0, None) }];
        let mut c = Vec::new();
        write_csv(&recs, &mut c).unwrap();
        let mut j = Vec::new();
        write_json("t", &recs, &mut j).unwrap();
        let row = &rows(std::str::from_utf8(&c).unwrap())[0];
        let json: serde_json::Value = serde_json::from_slice(&j).unwrap();
        prop_assert_eq!(json["records"][0]["value"].as_str().unwrap(), row[5].as_str());
        let parsed: BigRational = row[5].parse().unwrap();
        prop_assert_eq!(parsed, r);
    }
}
