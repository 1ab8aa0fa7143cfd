//! End-to-end runs of the `kronecker` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kronecker")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

/// CSV output as (header, rows).
fn csv_rows(args: &[&str]) -> (Vec<String>, Vec<Vec<String>>) {
    parse_csv(&stdout(args))
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn json_rows(args: &[&str]) -> Vec<serde_json::Map<String, serde_json::Value>> {
    let mut args = args.to_vec();
    args.extend(["--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&args)).unwrap();
    v.as_array().unwrap().iter().map(|r| r.as_object().unwrap().clone()).collect()
}

/// The named column of the first row, as a float.
fn field(args: &[&str], name: &str) -> f64 {
    let (header, rows) = csv_rows(args);
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows[0][i].parse().unwrap()
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn count_examples() {
    assert_eq!(field(&["count", "0/1", "0.01", "1"], "n_h"), 31.0);
    assert_eq!(field(&["count", "golden", "1", "0"], "n_h"), 0.0);
    assert_eq!(field(&["count", "1/1", "1", "40"], "n_h"), 5.0);
}

#[test]
fn asym_examples() {
    let golden = field(&["asym", "golden", "0.01", "30"], "closed_form_asym");
    assert!((golden - 238.732).abs() < 1e-3, "{golden}");
    let half = field(&["asym", "1/2", "0.001", "30"], "closed_form_asym");
    assert!((half - 2118.2).abs() < 0.1, "{half}");
    let one = field(&["asym", "1/1", "1", "10"], "closed_form_asym");
    assert!((one - 10f64.sqrt() / (std::f64::consts::PI * 2f64.sqrt())).abs() < 1e-12, "{one}");
}

#[test]
fn heat_examples() {
    let args = ["heat", "1/2", "0.3", "0.1"];
    assert!(field(&args, "difference") <= 1e-10);
    let h_image = field(&["heat", "golden", "0.001", "0.05"], "h_image");
    assert!((h_image - 5.0 / std::f64::consts::PI).abs() <= 1e-6, "{h_image}");
    for name in ["spectral", "image"] {
        let v = field(&["heat", "0/1", "1", "100"], name);
        assert!((v - 1.0).abs() < 1e-12, "{name} {v}");
    }
}

#[test]
fn cf_examples() {
    assert_eq!(stdout(&["cf", "golden", "5", "--notation"]).trim(), "[1;1,1,1,1]");
    assert_eq!(stdout(&["cf", "sqrt2", "4", "--notation"]).trim(), "[1;2,2,2]");
    assert_eq!(stdout(&["cf", "7/5", "-", "--notation"]).trim(), "[1;2,2]");
    let (header, rows) = csv_rows(&["cf", "7/5", "-"]);
    assert_eq!(header, ["n", "quotient", "p", "q", "abs_error"]);
    let convergents: Vec<(&str, &str)> = rows.iter().map(|r| (r[2].as_str(), r[3].as_str())).collect();
    assert_eq!(convergents, [("1", "1"), ("3", "2"), ("7", "5")]);
    assert_eq!(rows[2][4].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn sweep_examples() {
    let (header, rows) = csv_rows(&["sweep", "1/2", "30", "--h", "0.001,0.1,0.01"]);
    let (h, residual) = (column(&header, "h"), column(&header, "residual"));
    let hs: Vec<f64> = rows.iter().map(|r| r[h].parse().unwrap()).collect();
    assert_eq!(hs, [0.1, 0.01, 0.001]);
    let res: Vec<f64> = rows.iter().map(|r| r[residual].parse::<f64>().unwrap().abs()).collect();
    assert!(res.windows(2).all(|w| w[1] < w[0]), "{res:?}");

    let (header, rows) = csv_rows(&["sweep", "golden", "30", "--grid", "0.1", "0.001", "3"]);
    let scaled = column(&header, "h_n_h");
    let limit = 30.0 / (4.0 * std::f64::consts::PI);
    let gaps: Vec<f64> = rows.iter().map(|r| (r[scaled].parse::<f64>().unwrap() - limit).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[2] < 0.01);
}

#[test]
fn residual_is_recomputable_from_each_row() {
    let (header, rows) = csv_rows(&["sweep", "sqrt2", "77", "--grid", "1", "0.002", "6"]);
    let [h, n, scaled, asym, residual] =
        ["h", "n_h", "h_n_h", "closed_form_asym", "residual"].map(|c| column(&header, c));
    for r in &rows {
        let get = |i: usize| r[i].parse::<f64>().unwrap();
        assert_eq!(get(scaled), get(h) * get(n));
        assert_eq!(get(residual), get(scaled) - get(h) * get(asym));
    }
}

/// Every CSV cell parses back to the JSON value of the same invocation.
fn assert_round_trip(args: &[&str]) {
    let (header, csv) = csv_rows(args);
    let json = json_rows(args);
    assert_eq!(csv.len(), json.len(), "{args:?}");
    for (row, obj) in csv.iter().zip(&json) {
        assert_eq!(obj.len(), header.len());
        for (name, cell) in header.iter().zip(row) {
            if name == "wall_time_ms" {
                continue;
            }
            let value = &obj[name];
            if value.is_null() {
                assert_eq!(cell, "", "{args:?} {name}");
            } else if value.is_i64() || value.is_u64() {
                assert_eq!(cell, &value.to_string(), "{args:?} {name}");
            } else {
                let parsed: f64 = cell.parse().unwrap();
                assert_eq!(parsed.to_bits(), value.as_f64().unwrap().to_bits(), "{args:?} {name}: {cell} vs {value}");
            }
        }
    }
}

#[test]
fn csv_and_json_agree_bit_for_bit() {
    assert_round_trip(&["sweep", "1/2", "30", "--h", "0.3,0.01,0.001"]);
    assert_round_trip(&["sweep", "golden", "30", "--h", "0.5", "--outputs", "weyl,exact_count"]);
    assert_round_trip(&["count", "-5/7", "0.37", "123.4", "--tol", "0.5"]);
    assert_round_trip(&["heat", "e", "0.2", "0.07"]);
    assert_round_trip(&["cf", "pi", "12"]);
    assert_round_trip(&["eig", "2/3", "0.4", "200"]);
    assert_round_trip(&["leafwise", "3/4", "60", "--samples", "7"]);
    assert_round_trip(&["weyl", "1/3", "0.05", "50"]);
    assert_round_trip(&["asym", "golden", "0.25", "50"]);
}

#[test]
fn exit_code_zero_on_success() {
    assert_eq!(exit_code(&["count", "1/2", "0.5", "10"]), 0);
}

#[test]
fn exit_code_two_on_usage_and_parse_errors() {
    for args in [
        &["count", "nope", "0.1", "1"][..],
        &["count", "1/0", "0.1", "1"],
        &["count", "1/2", "0", "1"],
        &["count", "1/2", "1.5", "1"],
        &["count", "1/2", "abc", "1"],
        &["count", "1/2"],
        &["frobnicate"],
        &["count", "1/2", "0.1", "1", "--format", "xml"],
        &["count", "1/2", "0.1", "1", "--exact-arith"],
        &["sweep", "1/2", "30", "--grid", "0.1", "0.01", "0"],
        &["sweep", "1/2", "30"],
        &["sweep", "1/2", "30", "--grid", "0.01", "0.1", "3"],
        &["heat", "1/2", "0.5", "0"],
        &["cf", "golden", "0"],
        &["cf", "golden", "-"],
        &["count", "1/2", "0.1", "1", "--tol", "-1"],
    ] {
        assert_eq!(exit_code(args), 2, "{args:?}");
    }
}

#[test]
fn exit_code_three_on_resource_limits() {
    assert_eq!(exit_code(&["count", "golden", "1e-15", "100"]), 3);
    assert_eq!(exit_code(&["count", "golden", "0.001", "30", "--max-strips", "100"]), 3);
    assert_eq!(exit_code(&["eig", "1/2", "0.0001", "1e6"]), 3);
}

#[test]
fn failed_sweep_rows_still_emit_the_completed_ones() {
    let out = run(&["sweep", "golden", "30", "--h", "0.1,1e-12,0.01"]);
    assert_eq!(out.status.code(), Some(3));
    let (header, rows) = parse_csv(&String::from_utf8(out.stdout).unwrap());
    let h = column(&header, "h");
    let hs: Vec<f64> = rows.iter().map(|r| r[h].parse().unwrap()).collect();
    assert_eq!(hs, [0.1, 0.01]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--max-strips"));
}

#[test]
fn exit_code_four_on_precision_exhaustion() {
    assert_eq!(exit_code(&["cf", "golden", "500"]), 4);
    assert_eq!(exit_code(&["cf", "golden", "100"]), 0);
}

fn without_timing(text: &str) -> Vec<Vec<String>> {
    let (header, rows) = parse_csv(text);
    let wall = column(&header, "wall_time_ms");
    rows.into_iter().map(|mut r| {
        r.remove(wall);
        r
    })
    .collect()
}

#[test]
fn config_file_mirrors_the_arguments() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join("sweep-spec.json");
    std::fs::write(
        &path,
        r#"{"slope":{"kind":"rational","p":1,"q":2},"lambda":30,
            "h_values":{"h_start":0.1,"h_end":0.001,"points":3},"tie_tolerance":0.0}"#,
    )
    .unwrap();
    let from_file = stdout(&["sweep", "--config", path.to_str().unwrap()]);
    let from_args = stdout(&["sweep", "1/2", "30", "--grid", "0.1", "0.001", "3"]);
    assert_eq!(without_timing(&from_file), without_timing(&from_args));

    std::fs::write(&path, r#"{"slope":"1/2","lambda":30,"h_values":[]}"#).unwrap();
    assert_eq!(exit_code(&["sweep", "--config", path.to_str().unwrap()]), 2);
    assert_eq!(exit_code(&["sweep", "--config", dir.join("absent.json").to_str().unwrap()]), 2);
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["sweep", "sqrt2", "50", "--grid", "0.5", "0.0005", "7", "--tol", "1e-6"];
    let one = stdout(&[&args[..], &["--threads", "1"]].concat());
    let four = stdout(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(without_timing(&one), without_timing(&four));
}

#[test]
fn exact_arithmetic_matches_floating_point_counts() {
    for (s, h, mu) in [("1/2", "0.1", "0.75"), ("2/3", "0.25", "3"), ("-1/4", "1", "2.5"), ("0/1", "0.01", "0.0253")] {
        let base = ["count", s, h, mu, "--reduced"];
        let exact = field(&[&base[..], &["--exact-arith"]].concat(), "n_h");
        let float = field(&base, "n_h");
        assert_eq!(exact, float, "{s} {h} {mu}");
    }
    // μ = 1 puts four modes of the square lattice exactly on the boundary
    let (header, rows) = csv_rows(&["count", "0/1", "1", "1", "--reduced", "--exact-arith"]);
    assert_eq!(rows[0][column(&header, "n_h")], "1");
    assert_eq!(rows[0][column(&header, "near_boundary")], "4");
}

#[test]
fn reduced_units_rescale_lambda() {
    let four_pi_sq = 4.0 * std::f64::consts::PI.powi(2);
    let reduced = field(&["asym", "golden", "0.5", "2", "--reduced"], "closed_form_asym");
    let absolute = field(&["asym", "golden", "0.5", &(2.0 * four_pi_sq).to_string()], "closed_form_asym");
    assert!((reduced - absolute).abs() < 1e-12 * absolute);
}

#[test]
fn eig_lists_every_counted_mode() {
    let (_, rows) = csv_rows(&["eig", "golden", "0.3", "150"]);
    let n = field(&["count", "golden", "0.3", "150"], "n_h");
    assert_eq!(rows.len() as f64, n);
    let values: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
    assert!(values.iter().all(|&v| v < 150.0));
}

#[test]
fn leafwise_distribution_is_valid_json() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&["leafwise", "1/2", "30", "--distribution"])).unwrap();
    assert_eq!(v["distribution"]["type"], "step");
    assert_eq!(v["slope"]["kind"], "rational");
    let v: serde_json::Value = serde_json::from_str(&stdout(&["leafwise", "golden", "30", "--distribution"])).unwrap();
    assert_eq!(v["distribution"]["type"], "sqrt");
}
