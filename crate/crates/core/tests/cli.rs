use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn pairnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairnet")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

const SAMPLE: &str =
    r#"{"format":"pairnet-instance-v1","metric":{"kind":"line1d","points":[0,1,3,10]},"pairs":[[0,2],[1,3]]}"#;

#[test]
fn solve_and_exact_on_the_line_sample() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "sample.json", SAMPLE);
    let input = input.to_str().unwrap();
    let out = pairnet(&["solve", "--problem", "mst", "--objective", "sum", "--input", input, "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["value"], 8.0);
    assert_eq!(report["oracle"], 8.0);
    assert_eq!(report["ratio"], 1.0);
    assert_eq!(report["algorithm"], "minsum-2mst");
    assert!(report.get("wall_time").is_none());

    let out = pairnet(&["exact", "--problem", "mst", "--objective", "sum", "--input", input]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], 8.0);
    assert_eq!(json(&out)["explored_count"], 2);

    let timed = pairnet(&["solve", "--problem", "mst", "--objective", "sum", "--input", input, "--timing"]);
    assert!(json(&timed)["wall_time"].is_number());
}

#[test]
fn reports_round_trip_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "sample.json", SAMPLE);
    let out =
        pairnet(&["solve", "--problem", "matching", "--objective", "bottleneck", "--input", input.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&value).unwrap()).unwrap();
    assert_eq!(again, value);
    assert_eq!(value["bottleneck"], 7.0);
}

#[test]
fn odd_matching_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let gen = pairnet(&["gen", "--family", "unit-line", "--n", "3", "--seed", "2"]);
    let input = write(dir.path(), "odd.json", std::str::from_utf8(&gen.stdout).unwrap());
    let out = pairnet(&["solve", "--problem", "matching", "--objective", "sum", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn capped_tour_voids_guarantee() {
    let dir = tempfile::tempdir().unwrap();
    let gen = pairnet(&["gen", "--family", "random-euclidean", "--n", "4", "--seed", "3"]);
    let input = write(dir.path(), "plane.json", std::str::from_utf8(&gen.stdout).unwrap());
    let input = input.to_str().unwrap();
    let out = pairnet(&["solve", "--problem", "tsp", "--objective", "sum", "--input", input, "--cap-k", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["guarantee_valid"], false);
    assert!(report["guarantee_factor"].is_null());
    let full = json(&pairnet(&["solve", "--problem", "tsp", "--objective", "sum", "--input", input]));
    assert_eq!(full["guarantee_factor"], 4.5);
    assert!(full["enumerated_count"].as_u64().unwrap() > 0);
    // Odd or oversized caps are usage errors.
    for cap in ["3", "22"] {
        let out = pairnet(&["solve", "--problem", "tsp", "--objective", "sum", "--input", input, "--cap-k", cap]);
        assert_eq!(out.status.code(), Some(2));
    }
}

#[test]
fn exact_limits_and_degenerate_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let gen = pairnet(&["gen", "--family", "random-euclidean", "--n", "10", "--seed", "4"]);
    let big = write(dir.path(), "big.json", std::str::from_utf8(&gen.stdout).unwrap());
    let out = pairnet(&["exact", "--problem", "tsp", "--objective", "sum", "--input", big.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(out.stdout.is_empty());

    let gen = pairnet(&["gen", "--family", "random-euclidean", "--n", "1", "--seed", "4"]);
    let one = write(dir.path(), "one.json", std::str::from_utf8(&gen.stdout).unwrap());
    let out = pairnet(&["exact", "--problem", "mst", "--objective", "sum", "--input", one.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], 0.0);
}

#[test]
fn ratio_batches_pass() {
    let out = pairnet(&[
        "ratio",
        "--family",
        "random-euclidean",
        "--problem",
        "matching",
        "--objective",
        "sum",
        "--count",
        "200",
        "--min-n",
        "2",
        "--max-n",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("instance_id,n,algorithm,value,oracle,ratio,bound,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 200);
    for (i, row) in rows.iter().enumerate() {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[0], i.to_string());
        assert!(cols[1].parse::<usize>().unwrap() % 2 == 0);
        assert_eq!(cols[6], "2");
        assert_eq!(cols[7], "true");
    }

    let out = pairnet(&[
        "ratio",
        "--family",
        "unit-line",
        "--problem",
        "mst",
        "--objective",
        "bottleneck",
        "--count",
        "200",
        "--max-n",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains("bottleneck-2mst-line") && l.ends_with(",3,true")));
}

#[test]
fn malformed_flags_exit_two() {
    for args in [
        &["ratio", "--family", "random-euclidean"][..],
        &["solve", "--problem", "mst", "--objective", "median", "--input", "x.json"],
        &["gen", "--family", "unit-line"],
        &["gen", "--family", "random-euclidean", "--n", "2", "--box", "-1"],
        &["solve", "--problem", "mst", "--objective", "sum", "--input", "/nonexistent/file.json"],
    ] {
        let out = pairnet(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn gen_families() {
    let out = pairnet(&["gen", "--family", "unit-line", "--n", "4", "--seed", "1"]);
    let v = json(&out);
    let xs: Vec<f64> = v["metric"]["points"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(xs, (0..8).map(|x| x as f64).collect::<Vec<_>>());

    let out = pairnet(&["gen", "--family", "partition-matching", "--xs", "1,2,3"]);
    assert_eq!(json(&out)["pairs"].as_array().unwrap().len(), 6);

    let out = pairnet(&["gen", "--family", "connected-partition-mst", "--vertices", "4", "--edges", "0-1,1-2,2-3,3-0"]);
    assert_eq!(json(&out)["metric"]["pseudometric"], true);
    let out = pairnet(&["gen", "--family", "connected-partition-mst", "--vertices", "4", "--edges", "0-1,2-3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out =
            pairnet(&["gen", "--family", "random-metric", "--n", "5", "--seed", "77", "--output", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let out = pairnet(&["validate", "--input", a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn validate_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"format":"pairnet-instance-v1","metric":{"kind":"matrix","matrix":[[0,5,10,1],[5,0,1,1],[10,1,0,1],[1,1,1,0]]},"pairs":[[0,1],[2,3]]}"#,
    );
    let out = pairnet(&["validate", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("triangle"));
}
