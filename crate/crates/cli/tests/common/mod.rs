#![allow(dead_code)]

use railroute_core::nav::{polyline_to_cells, route_from_geojson, GridIndex};
use railroute_core::terrain::{load_asc, DemGrid};
use std::path::Path;
use std::process::{Command, Output};

pub fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_railroute"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

pub fn run_ok(args: &[&str], cwd: &Path) -> Output {
    let out = run(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn dem(path: &Path) -> DemGrid {
    load_asc(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn route_cells(path: &Path, dem: &DemGrid) -> Vec<GridIndex> {
    let doc = route_from_geojson(&std::fs::read_to_string(path).unwrap()).unwrap();
    polyline_to_cells(&doc.points(), dem).unwrap()
}

/// Grade violations along an emitted route, recomputed from the raw DEM.
pub fn grade_violations(cells: &[GridIndex], dem: &DemGrid, max_grade: f64) -> Vec<(usize, f64)> {
    let cs = dem.cellsize();
    cells
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| {
            let dc = w[0].col.abs_diff(w[1].col);
            let dr = w[0].row.abs_diff(w[1].row);
            assert!(dc <= 1 && dr <= 1 && dc + dr > 0, "step {i} is not a grid move");
            let run = if dc + dr == 2 { cs * 2f64.sqrt() } else { cs };
            let grade = (dem.get(w[1]) - dem.get(w[0])).abs() / run;
            (grade > max_grade).then_some((i, grade))
        })
        .collect()
}

/// Loads an emitted route and asserts it is grade-feasible; returns its cells.
pub fn assert_feasible(route: &Path, dem_path: &Path, max_grade: f64) -> Vec<GridIndex> {
    let dem = dem(dem_path);
    let cells = route_cells(route, &dem);
    let bad = grade_violations(&cells, &dem, max_grade);
    assert!(bad.is_empty(), "{}: grade violations {bad:?}", route.display());
    cells
}
