use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_string_lossy().into_owned()
}

fn mosc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mosc")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn error_kind(out: &Output) -> String {
    assert!(!out.status.success());
    let record: Value = serde_json::from_slice(&out.stderr).expect("json error record");
    record["error"]["kind"].as_str().unwrap().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mosc-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn triangles_on_zachary() {
    let v = stdout_json(&mosc(&["triangles", &data("zachary.txt")]));
    assert_eq!((v["nodes"].as_u64(), v["edges"].as_u64(), v["triangles"].as_u64()), (Some(34), Some(78), Some(45)));
    let csv = mosc(&["triangles", &data("zachary.txt"), "--out", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap(), "nodes,edges,triangles\n34,78,45\n");
}

#[test]
fn triangle_cache_is_reused() {
    let cache = scratch("cache").join("zachary.tri");
    for _ in 0..2 {
        let v = stdout_json(&mosc(&["triangles", &data("zachary.txt"), "--triangle-cache", cache.to_str().unwrap()]));
        assert_eq!(v["triangles"].as_u64(), Some(45));
    }
    assert!(cache.exists());
}

#[test]
fn cluster_all_criteria_with_truth() {
    let out = mosc(&[
        "cluster", "--graph", &data("zachary.txt"), "--truth", &data("zachary.truth"), "--method", "gl", "--lambda", "0.5",
    ]);
    let v = stdout_json(&out);
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 11);
    let best = runs.iter().map(|r| r["eval"]["eps_n"].as_f64().unwrap()).fold(f64::INFINITY, f64::min);
    assert_eq!(best, 1.0);
    assert_eq!(runs[0]["labels"].as_array().unwrap().len(), 34);
}

#[test]
fn cluster_csv_and_labels_round_trip() {
    let dir = scratch("labels");
    let labels = dir.join("rw.labels");
    let out = mosc(&[
        "cluster", "--graph", &data("zachary.txt"), "--method", "rw", "--criterion", "ncut2", "--out", "csv",
        "--labels-out", labels.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("method,lambda,criterion,criterion_value,k,eps_n,eps_e,eps_t,nmi\nrw,0.5,ncut2,"));
    let v = stdout_json(&mosc(&[
        "eval", "--graph", &data("zachary.txt"), "--truth", &data("zachary.truth"), "--labels", labels.to_str().unwrap(),
    ]));
    assert_eq!(v["eps_n"].as_f64(), Some(1.0));
    assert!((v["nmi"].as_f64().unwrap() - 0.837).abs() < 0.005);
}

#[test]
fn cluster_auto_and_oracle() {
    let v = stdout_json(&mosc(&["cluster", "--graph", &data("zachary.txt"), "--lambda", "auto", "--criterion", "con3"]));
    let sel = &v["runs"][0]["selection"];
    assert_eq!(sel["mode"], "cut-criterion");
    assert_eq!(sel["scores"].as_array().unwrap().len(), 11);

    let v = stdout_json(&mosc(&[
        "cluster", "--graph", &data("zachary.txt"), "--truth", &data("zachary.truth"), "--lambda", "oracle", "--criterion",
        "km", "--oracle-metric", "nmi",
    ]));
    assert_eq!(v["runs"][0]["selection"]["mode"], "oracle");

    let v = stdout_json(&mosc(&["cluster", "--graph", &data("zachary.txt"), "--k", "3", "--lambda", "auto", "--method", "rw"]));
    assert_eq!(v["runs"][0]["k"].as_u64(), Some(3));
    assert_eq!(v["runs"][0]["selection"]["mode"], "triangle-density");
}

#[test]
fn sweep_emits_curve() {
    let out = mosc(&["sweep", "--graph", &data("zachary.txt"), "--criterion", "conx", "--emit-curve"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "u,conx");
    assert_eq!(lines.len(), 34);
    let v = stdout_json(&mosc(&["sweep", "--graph", &data("zachary.txt"), "--method", "rw", "--criterion", "ncut3"]));
    let u = v["best_u"].as_u64().unwrap() as usize;
    assert_eq!(v["set"].as_array().unwrap().len(), u);
}

#[test]
fn ocut_reports_prefix_minimum() {
    let v = stdout_json(&mosc(&[
        "ocut", "--graph", &data("zachary.txt"), "--truth", &data("zachary.truth"), "--metric", "n",
    ]));
    let curve: Vec<f64> = v["curve"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(curve.len(), 33);
    assert_eq!(v["value"].as_f64().unwrap(), curve.iter().copied().fold(f64::INFINITY, f64::min));
    assert!(v["value"].as_f64().unwrap() <= 1.0);
}

#[test]
fn extract_pairs_writes_networks() {
    let dir = scratch("pairs");
    let graph = dir.join("g.txt");
    let comms = dir.join("c.txt");
    std::fs::write(&graph, "1 2\n2 3\n1 3\n4 5\n5 6\n4 6\n3 4\n7 8\n").unwrap();
    std::fs::write(&comms, "1 2 3\n4 5 6\n7 8\n").unwrap();
    let out_dir = dir.join("out");
    let v = stdout_json(&mosc(&[
        "extract-pairs", "--graph", graph.to_str().unwrap(), "--communities", comms.to_str().unwrap(), "--top", "2",
        "--max-size", "5", "--out-dir", out_dir.to_str().unwrap(),
    ]));
    assert_eq!(v["pairs"].as_u64(), Some(2));
    let truth = std::fs::read_to_string(out_dir.join("pair_0.truth")).unwrap();
    assert_eq!(truth.lines().count(), 6);
}

#[test]
fn bench_writes_tables() {
    let dir = scratch("bench");
    let cfg = dir.join("b.toml");
    std::fs::write(
        &cfg,
        format!(
            "methods = [\"gl\", \"shi\"]\nlambda_modes = [0.5, \"auto\"]\ncriteria = [\"con2\", \"km\"]\n\n[[networks]]\nname = \"z\"\ngraph = \"{}\"\ntruth = \"{}\"\n",
            data("zachary.txt"),
            data("zachary.truth")
        ),
    )
    .unwrap();
    let out_dir = dir.join("out");
    let v = stdout_json(&mosc(&["bench", "--config", cfg.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]));
    assert!(v["grid_rows"].as_u64().unwrap() > 0);
    for f in ["grid.csv", "best.csv", "failures.csv", "report.json", "timings.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
}

#[test]
fn failures_are_json_records() {
    assert_eq!(error_kind(&mosc(&["triangles", "/nonexistent/graph.txt"])), "io");
    assert_eq!(error_kind(&mosc(&["cluster", "--graph", &data("zachary.txt"), "--lambda", "1.5"])), "lambda_out_of_range");
    assert_eq!(error_kind(&mosc(&["cluster", "--graph", &data("zachary.txt"), "--lambda", "often"])), "domain");
    assert_eq!(error_kind(&mosc(&["cluster", "--graph", &data("zachary.txt"), "--lambda", "oracle"])), "config");
    assert_eq!(error_kind(&mosc(&["cluster", "--graph", &data("zachary.txt"), "--method", "nope"])), "usage");
    assert_eq!(error_kind(&mosc(&["cluster", "--graph", &data("zachary.txt"), "--criterion", "nope"])), "domain");
    assert_eq!(error_kind(&mosc(&["cluster", "--graph", &data("zachary.txt"), "--k", "99"])), "domain");

    let dir = scratch("bad");
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "1 2\n3 x\n").unwrap();
    assert_eq!(error_kind(&mosc(&["triangles", bad.to_str().unwrap()])), "parse");
    let empty = dir.join("empty.txt");
    std::fs::write(&empty, "# nothing\n").unwrap();
    assert_eq!(error_kind(&mosc(&["triangles", empty.to_str().unwrap()])), "empty_input");
}

#[test]
fn help_exits_zero() {
    let out = mosc(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("extract-pairs"));
}
