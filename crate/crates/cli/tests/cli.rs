use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name)
}

fn caisson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caisson"))
        .args(args)
        .env_remove("CAISSON_SEED")
        .env_remove("CAISSON_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn rank_of_the_pi_example() {
    let v = json(&caisson(&["rank", problem("section2.json").to_str().unwrap()]));
    assert_eq!(v["r"], 2);
    assert_eq!(v["rho"], 3);
}

#[test]
fn minimal_lift_and_factor() {
    let v = json(&caisson(&["lift", problem("section2.json").to_str().unwrap(), "--minimal"]));
    assert_eq!(v["lift"], serde_json::json!([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]));
    let v = json(&caisson(&["factorize", problem("example64.json").to_str().unwrap(), "--lift", "B"]));
    assert_eq!(v["factor"], serde_json::json!([["1", "0", "0"], ["0", "1", "0"]]));
    let v = json(&caisson(&[
        "lift",
        problem("example64.json").to_str().unwrap(),
        "--check",
        "[[1,1,1,1],[0,1,2,3]]",
    ]));
    assert_eq!(v["is_lift"], false);
}

#[test]
fn threshold_of_example_64() {
    let v = json(&caisson(&["threshold", problem("example64.json").to_str().unwrap(), "--term", "2"]));
    assert!((v["value"].as_f64().unwrap() - 3.0).abs() < 1e-6);
    assert_eq!(v["recession"], false);
}

#[test]
fn certify_example_65() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("ex65");
    let v = json(&caisson(&[
        "certify",
        problem("example65.json").to_str().unwrap(),
        "--lift",
        "B",
        "--out",
        stem.to_str().unwrap(),
    ]));
    assert_eq!(v["verdict"]["status"], "Certified");
    assert_eq!(v["order"], serde_json::json!(["3", "3"]));
    assert!(v["stages"].as_array().unwrap().iter().all(|s| s["passed"] == true && s.get("millis").is_none()));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("ex65.report.json")).unwrap()).unwrap();
    assert_eq!(saved, v);
    assert!(std::fs::read_to_string(dir.path().join("ex65.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn certify_with_a_small_coefficient_is_inconclusive() {
    let v = json(&caisson(&[
        "certify",
        problem("example64.json").to_str().unwrap(),
        "--lift",
        "B",
        "--c",
        "0.5,0",
        "--timings",
    ]));
    assert_eq!(v["verdict"]["reason"], "RegionInconclusive");
    assert!(v["stages"][0]["millis"].is_number());
}

#[test]
fn orders_and_roots() {
    let v = json(&caisson(&["order", problem("example64.json").to_str().unwrap(), "--at", "0"]));
    assert_eq!(v["order"], serde_json::json!([4]));
    let v = json(&caisson(&["order", problem("example65.json").to_str().unwrap(), "--at", "0,0"]));
    assert_eq!(v["order"], serde_json::json!([3, 3]));
    let v = json(&caisson(&["roots", "--coeffs", "-4,0,1"]));
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    assert!(roots.iter().all(|r| (r["log_modulus"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12));
}

#[test]
fn malformed_input_reports_json_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"support": [[0, 1]], "coefficients": [1]}"#).unwrap();
    let out = caisson(&["rank", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"], "ShapeMismatch");
    let out = caisson(&["roots", "--coeffs", "0,0"]);
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"], "ZeroPolynomial");
}

/// Reads the filled rectangles back into a flag grid.
fn svg_flags(svg: &str, nx: usize, ny: usize) -> Vec<bool> {
    let mut flags = vec![false; nx * ny];
    for line in svg.lines().filter(|l| l.starts_with("<rect x=")) {
        let attr = |name: &str| -> usize {
            let start = line.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
            line[start..].split('"').next().unwrap().parse().unwrap()
        };
        let (x, row, w) = (attr("x"), attr("y"), attr("width"));
        let iy = ny - 1 - row;
        for ix in x..x + w {
            flags[iy * nx + ix] = true;
        }
    }
    flags
}

#[test]
fn raster_outputs_agree_and_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem("example65.json");
    let run = |stem: &str, level: &str| {
        let s = dir.path().join(stem);
        let out = caisson(&["raster", p.to_str().unwrap(), "--level", level, "--res", "60", "--out", s.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (
            std::fs::read_to_string(dir.path().join(format!("{stem}.csv"))).unwrap(),
            std::fs::read_to_string(dir.path().join(format!("{stem}.svg"))).unwrap(),
        )
    };
    for level in ["A", "B", "I"] {
        let (csv, svg) = run(&format!("r{level}"), level);
        let (csv2, svg2) = run(&format!("s{level}"), level);
        assert_eq!(csv, csv2);
        assert_eq!(svg, svg2);
        let from_csv: Vec<bool> = csv.lines().skip(1).map(|l| l.ends_with(",1")).collect();
        assert_eq!(svg_flags(&svg, 60, 60), from_csv, "level {level}");
    }
}

#[test]
fn seeds_from_flag_and_environment() {
    let p = problem("example65.json");
    let base = ["omega", p.to_str().unwrap(), "--res", "80"];
    let a = caisson(&[&base[..], &["--seed", "5"]].concat());
    let b = Command::new(env!("CARGO_BIN_EXE_caisson"))
        .args(base)
        .args(["--seed", "9"])
        .env("CAISSON_SEED", "5")
        .env("CAISSON_THREADS", "2")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_caisson"))
        .args(base)
        .env("CAISSON_SEED", "x")
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

#[test]
fn limit_sweep_csv() {
    let out = caisson(&[
        "limit-sweep",
        problem("trinomial.json").to_str().unwrap(),
        "--lambdas",
        "1,0.1,0.01",
        "--res",
        "100",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let d: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(d.len(), 3);
    assert!(d[0] > d[1] && d[1] > d[2]);
}

#[test]
fn intervals_of_example_64() {
    let v = json(&caisson(&[
        "intervals",
        problem("example64.json").to_str().unwrap(),
        "--lift",
        "B",
        "--radius",
        "1.5",
    ]));
    let mut ends: Vec<f64> = v["rounded_pi"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|p| p.as_array().unwrap().iter().map(|x| x.as_f64().unwrap().abs()))
        .collect();
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    assert_eq!(ends, vec![0.25, 0.42, 0.91]);
}
