mod common;

use std::path::Path;
use std::process::{Command, Output};

use regional_planner::harness::{read_cycles_jsonl, MapSource, Scenario};
use regional_planner::metrics::read_summary_csv;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regional-planner"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_scenario(map: &Path) -> Scenario {
    Scenario {
        map_source: MapSource::File {
            path: map.to_path_buf(),
        },
        start: regional_planner::lattice::Pose::new(0.5, 0.5, 0.0),
        goal: regional_planner::lattice::Pose::new(5.5, 5.5, 0.0),
        sensor_radius: 2.0,
        max_cycles: 40,
        ..common::stability_scenario(1)
    }
}

#[test]
fn gen_map_plan_simulate_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("map.txt");
    let out = cli(&[
        "gen-map", "--seed", "4", "--width", "32", "--height", "32", "--threshold", "0.3",
        "--out", arg(&map),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let plan = dir.path().join("plan.jsonl");
    let out = cli(&[
        "plan", "--map", arg(&map), "--start", "0.5,0.5,0", "--goal", "5.5,5.5", "--out",
        arg(&plan),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records = read_cycles_jsonl(&std::fs::read_to_string(&plan).unwrap()).unwrap();
    assert_eq!(records.len(), 1);
    assert!(records[0].cost_now.is_some());

    let scenario = dir.path().join("scenario.json");
    std::fs::write(&scenario, serde_json::to_string(&small_scenario(&map)).unwrap()).unwrap();
    let cycles = dir.path().join("cycles.jsonl");
    let out = cli(&[
        "simulate", "--scenario", arg(&scenario), "--out", arg(&cycles), "--label", "alpha=0.95",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["digest"].as_str().unwrap().len(), 64);
    let logged = read_cycles_jsonl(&std::fs::read_to_string(&cycles).unwrap()).unwrap();
    assert!(!logged.is_empty());
    assert_eq!(summary["cycles"].as_u64().unwrap() as usize, logged.len());

    let csv = dir.path().join("summary.csv");
    let out = cli(&["metrics", "--cycles", arg(&cycles), "--out", arg(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("label,alpha,mean_filtered_mhd,filtered_count,zero_count,raw_count,threshold"));
    let rows = read_summary_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].label, "alpha=0.95");
    assert_eq!(rows[0].raw_count, logged.iter().filter(|c| c.mhd.is_some()).count());
}

#[test]
fn sweep_writes_one_row_per_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("scenario.json");
    let mut s = common::stability_scenario(3);
    if let MapSource::Perlin { params, .. } = &mut s.map_source {
        params.width = 32;
        params.height = 32;
    }
    s.goal = regional_planner::lattice::Pose::new(5.9, 5.9, 0.0);
    std::fs::write(&scenario, serde_json::to_string(&s).unwrap()).unwrap();
    let csv = dir.path().join("sweep.csv");
    let cycles = dir.path().join("sweep.jsonl");
    let out = cli(&[
        "sweep", "--scenario", arg(&scenario), "--alphas", "0.95,0.99", "--reps", "2", "--out",
        arg(&csv), "--cycles-out", arg(&cycles),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_summary_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    let labels: Vec<_> = rows.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, ["alpha=0.95", "alpha=0.99", "baseline"]);
    assert_eq!(rows[2].alpha, None);
    let logged = read_cycles_jsonl(&std::fs::read_to_string(&cycles).unwrap()).unwrap();
    let raw: usize = rows.iter().map(|r| r.raw_count).sum();
    assert_eq!(raw, logged.iter().filter(|c| c.mhd.is_some()).count());
}

#[test]
fn errors_exit_nonzero_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = cli(&["simulate", "--scenario", arg(&missing), "--out", arg(&dir.path().join("x"))]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.trim().lines().count(), 1, "{err}");
    assert!(err.starts_with("error:"));

    let map = dir.path().join("map.txt");
    std::fs::write(&map, "not a map").unwrap();
    let out = cli(&[
        "plan", "--map", arg(&map), "--start", "1,2", "--goal", "3,3", "--out",
        arg(&dir.path().join("p")),
    ]);
    assert!(!out.status.success());
}
