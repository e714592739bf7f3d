mod common;

use common::*;
use railroute_core::nav::{octile, route_from_geojson, GridIndex};
use std::fs;
use tempfile::TempDir;

fn tmp() -> TempDir {
    tempfile::tempdir().unwrap()
}

fn stdout(out: &std::process::Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn synth_writes_a_reloadable_tile() {
    let d = tmp();
    let args = ["synth", "--scenario", "ridge", "--size", "128", "--cellsize", "60", "--seed", "42", "-o", "t.asc"];
    let first = run_ok(&args, d.path());
    let dem = dem(&d.path().join("t.asc"));
    assert_eq!((dem.ncols(), dem.nrows()), (128, 128));
    assert_eq!(stdout(&first).trim(), dem.checksum());
    let bytes = fs::read(d.path().join("t.asc")).unwrap();
    run_ok(&args, d.path());
    assert_eq!(fs::read(d.path().join("t.asc")).unwrap(), bytes);
}

#[test]
fn usage_errors_exit_2() {
    let d = tmp();
    for args in [
        vec!["synth", "--scenario", "moon", "-o", "x.asc"],
        vec!["synth", "--scenario", "flat", "--size", "4", "-o", "x.asc"],
        vec!["predict", "--dem", "missing.asc", "--start", "0,0", "--end", "1,1", "-o", "r.geojson"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args, d.path()).status.code(), Some(2), "{args:?}");
    }
    run_ok(&["synth", "--scenario", "flat", "--size", "32", "-o", "f.asc"], d.path());
    let same = run(&["slope", "--dem", "f.asc", "-o", "f.asc"], d.path());
    assert_eq!(same.status.code(), Some(2));
    let outside = run(&["predict", "--dem", "f.asc", "--start", "cell:0,0", "--end", "cell:40,0", "-o", "r.geojson"], d.path());
    assert_eq!(outside.status.code(), Some(2));
}

#[test]
fn flat_geometric_route_is_octile() {
    let d = tmp();
    run_ok(&["synth", "--scenario", "flat", "--size", "64", "-o", "f.asc"], d.path());
    run_ok(&["predict", "--dem", "f.asc", "--start", "cell:2,3", "--end", "cell:50,30", "-o", "r.geojson"], d.path());
    let doc = route_from_geojson(&fs::read_to_string(d.path().join("r.geojson")).unwrap()).unwrap();
    let expect = octile(GridIndex::new(2, 3), GridIndex::new(50, 30)) * 60.0;
    assert!((doc.total_cost.unwrap() - expect).abs() < 1e-9);
    assert_feasible(&d.path().join("r.geojson"), &d.path().join("f.asc"), 0.022);
}

#[test]
fn world_coordinate_endpoints_snap() {
    let d = tmp();
    run_ok(&["synth", "--scenario", "flat", "--size", "32", "-o", "f.asc"], d.path());
    run_ok(&["predict", "--dem", "f.asc", "--start", "95,1900", "--end", "1000,1000", "-o", "r.geojson"], d.path());
    let cells = assert_feasible(&d.path().join("r.geojson"), &d.path().join("f.asc"), 0.022);
    assert_eq!(cells.first(), Some(&GridIndex::new(1, 0)));
    assert_eq!(cells.last(), Some(&GridIndex::new(16, 15)));
}

#[test]
fn blocked_goal_exits_3() {
    let d = tmp();
    let n = 16;
    let z = (0..n * n).map(|i| if i % n == 8 { 900.0 } else { 100.0 }).collect();
    let wall = railroute_core::terrain::DemGrid::from_values(n, n, 60.0, z).unwrap();
    fs::write(d.path().join("w.asc"), railroute_core::terrain::save_asc(&wall)).unwrap();
    let out = run(
        &["predict", "--dem", "w.asc", "--start", "cell:2,5", "--end", "cell:13,5", "-o", "x.geojson"],
        d.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!d.path().join("x.geojson").exists());
}

#[test]
fn ridge_mainline_route_detours() {
    let d = tmp();
    run_ok(&["synth", "--scenario", "ridge", "--size", "128", "--seed", "42", "-o", "r.asc"], d.path());
    run_ok(
        &["predict", "--dem", "r.asc", "--start", "cell:16,32", "--end", "cell:112,32", "--preset", "mainline", "-o", "p.geojson"],
        d.path(),
    );
    let cells = assert_feasible(&d.path().join("p.geojson"), &d.path().join("r.asc"), 0.01);
    let doc = route_from_geojson(&fs::read_to_string(d.path().join("p.geojson")).unwrap()).unwrap();
    assert!(doc.total_cost.unwrap() > 96.0 * 60.0);
    assert!(cells.iter().any(|c| c.row > 70));
}

#[test]
fn extension_follows_the_heading() {
    let d = tmp();
    run_ok(&["synth", "--scenario", "flat", "--size", "256", "-o", "f.asc"], d.path());
    run_ok(&["predict", "--dem", "f.asc", "--start", "cell:10,100", "--end", "cell:40,100", "-o", "a.geojson"], d.path());
    run_ok(
        &["predict", "--dem", "f.asc", "--extend-from", "a.geojson", "--distance", "10000", "-o", "b.geojson"],
        d.path(),
    );
    let cells = assert_feasible(&d.path().join("b.geojson"), &d.path().join("f.asc"), 0.022);
    assert_eq!(cells.first(), Some(&GridIndex::new(40, 100)));
    assert_eq!(cells.last(), Some(&GridIndex::new(207, 100)));
    let off = run(
        &["predict", "--dem", "f.asc", "--extend-from", "a.geojson", "--distance", "20000", "-o", "c.geojson"],
        d.path(),
    );
    assert_eq!(off.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&off.stderr).contains("cell:255,100"));
}

#[test]
fn untrained_irl_route_differs_from_geometric() {
    let d = tmp();
    run_ok(&["synth", "--scenario", "valley", "--size", "64", "--seed", "2", "-o", "v.asc"], d.path());
    let ends = ["--start", "cell:32,0", "--end", "cell:32,63"];
    let geo = [&["predict", "--dem", "v.asc", "-o", "g.geojson"][..], &ends].concat();
    let irl = [&["predict", "--dem", "v.asc", "--mode", "irl", "--seed", "1", "-o", "i.geojson"][..], &ends].concat();
    run_ok(&geo, d.path());
    run_ok(&irl, d.path());
    let g = assert_feasible(&d.path().join("g.geojson"), &d.path().join("v.asc"), 0.022);
    let i = assert_feasible(&d.path().join("i.geojson"), &d.path().join("v.asc"), 0.022);
    assert_ne!(g, i);
}

#[test]
fn train_logs_one_row_per_demo_and_epoch() {
    let d = tmp();
    run_ok(&["synth", "--scenario", "valley", "--size", "48", "--seed", "1", "-o", "a.asc", "--truth-out", "a.geojson"], d.path());
    run_ok(&["synth", "--scenario", "valley", "--size", "48", "--seed", "2", "-o", "b.asc", "--truth-out", "b.geojson"], d.path());
    assert_feasible(&d.path().join("a.geojson"), &d.path().join("a.asc"), 0.022);
    let args = [
        "train", "--dem", "a.asc", "--route", "a.geojson", "--dem", "b.asc", "--route", "b.geojson", "--epochs", "1",
        "-o", "m.bin", "--log", "log.csv",
    ];
    run_ok(&args, d.path());
    let log = fs::read_to_string(d.path().join("log.csv")).unwrap();
    let lines: Vec<_> = log.lines().collect();
    assert_eq!(lines[0], "epoch,demo,mean_deviation_cells,path_cost");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("0,1,"));

    let mismatched = run(&["train", "--dem", "a.asc", "--dem", "b.asc", "--route", "a.geojson", "-o", "n.bin"], d.path());
    assert_eq!(mismatched.status.code(), Some(2));
}

#[test]
fn costmap_and_slope_are_reloadable() {
    let d = tmp();
    run_ok(&["synth", "--scenario", "hills", "--size", "32", "--seed", "5", "-o", "h.asc"], d.path());
    run_ok(&["slope", "--dem", "h.asc", "-o", "s.asc"], d.path());
    run_ok(&["costmap", "--dem", "h.asc", "--seed", "3", "-o", "c.asc"], d.path());
    let h = dem(&d.path().join("h.asc"));
    let s = dem(&d.path().join("s.asc"));
    let c = dem(&d.path().join("c.asc"));
    assert_eq!((s.ncols(), c.nrows()), (h.ncols(), h.nrows()));
    assert!(s.values().iter().all(|v| *v >= 0.0));
    assert!(c.values().iter().all(|v| *v > 1e-3));
}

#[test]
fn eval_reports_metrics() {
    let d = tmp();
    run_ok(&["synth", "--scenario", "flat", "--size", "32", "-o", "f.asc"], d.path());
    run_ok(&["predict", "--dem", "f.asc", "--start", "cell:2,10", "--end", "cell:20,10", "-o", "a.geojson"], d.path());
    run_ok(&["predict", "--dem", "f.asc", "--start", "cell:2,11", "--end", "cell:20,11", "-o", "b.geojson"], d.path());
    let same = run_ok(&["eval", "--pred", "a.geojson", "--truth", "a.geojson", "--dem", "f.asc", "--radius", "300"], d.path());
    let m: serde_json::Value = serde_json::from_str(&stdout(&same)).unwrap();
    assert_eq!(m["mean_deviation_m"], 0.0);
    let off = run_ok(&["eval", "--pred", "b.geojson", "--truth", "a.geojson", "--dem", "f.asc", "--radius", "300"], d.path());
    let m: serde_json::Value = serde_json::from_str(&stdout(&off)).unwrap();
    assert!((m["mean_deviation_m"].as_f64().unwrap() - 60.0).abs() < 1e-9);
    fs::write(d.path().join("bad.geojson"), "{").unwrap();
    let bad = run(&["eval", "--pred", "bad.geojson", "--truth", "a.geojson", "--dem", "f.asc"], d.path());
    assert_eq!(bad.status.code(), Some(2));
}
