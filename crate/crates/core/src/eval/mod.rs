//! Prediction quality against ground truth, and imagery tasking corridors.
//!
//! Deviations are measured from prediction cell centers to the nearest
//! *segment* of the truth polyline, so they do not depend on how densely
//! either route is sampled.

use crate::nav::{GridIndex, Route};
use crate::terrain::DemGrid;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("precondition failed: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathMetrics {
    /// Mean prediction-to-truth distance, meters.
    pub mean_deviation: f64,
    /// Directed Hausdorff distance prediction -> truth, meters.
    pub max_deviation: f64,
    /// Fraction of truth cells within the coverage radius of the prediction.
    pub truth_coverage: f64,
    pub pred_length: f64,
    pub truth_length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corridor {
    pub route: Route,
    pub radius: f64,
    pub cell_count: usize,
    pub area_km2: f64,
    pub bbox_area_km2: f64,
    pub reduction_ratio: f64,
}

type Point = (f64, f64);

fn to_point(c: GridIndex, cellsize: f64) -> Point {
    (c.col as f64 * cellsize, c.row as f64 * cellsize)
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (vx, vy) = (b.0 - a.0, b.1 - a.1);
    let (wx, wy) = (p.0 - a.0, p.1 - a.1);
    let len2 = vx * vx + vy * vy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((wx * vx + wy * vy) / len2).clamp(0.0, 1.0)
    };
    (wx - t * vx).hypot(wy - t * vy)
}

fn distance_to_polyline(p: Point, line: &[Point]) -> f64 {
    match line {
        [] => f64::INFINITY,
        [q] => (p.0 - q.0).hypot(p.1 - q.1),
        _ => line
            .windows(2)
            .map(|s| point_segment_distance(p, s[0], s[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

fn polyline_length(line: &[Point]) -> f64 {
    line.windows(2)
        .map(|s| (s[1].0 - s[0].0).hypot(s[1].1 - s[0].1))
        .sum()
}

/// Compares a predicted cell route with ground truth in the same grid frame.
pub fn path_metrics(
    pred: &[GridIndex],
    truth: &[GridIndex],
    cellsize: f64,
    coverage_radius: f64,
) -> Result<PathMetrics, EvalError> {
    if pred.is_empty() || truth.is_empty() {
        return Err(EvalError::Precondition("routes must be non-empty".into()));
    }
    if !(cellsize > 0.0) {
        return Err(EvalError::Precondition(format!("cellsize must be positive, got {cellsize}")));
    }
    let p: Vec<Point> = pred.iter().map(|c| to_point(*c, cellsize)).collect();
    let t: Vec<Point> = truth.iter().map(|c| to_point(*c, cellsize)).collect();

    let (sum, max) = p.iter().fold((0.0, 0.0f64), |(s, m), q| {
        let d = distance_to_polyline(*q, &t);
        (s + d, m.max(d))
    });
    let covered = t
        .iter()
        .filter(|q| distance_to_polyline(**q, &p) <= coverage_radius)
        .count();
    Ok(PathMetrics {
        mean_deviation: sum / p.len() as f64,
        max_deviation: max,
        truth_coverage: covered as f64 / t.len() as f64,
        pred_length: polyline_length(&p),
        truth_length: polyline_length(&t),
    })
}

/// Mean deviation in cells, as used for training convergence.
pub fn mean_deviation_cells(pred: &[GridIndex], truth: &[GridIndex]) -> Result<f64, EvalError> {
    path_metrics(pred, truth, 1.0, 0.0).map(|m| m.mean_deviation)
}

/// Cells whose centers lie within `radius` meters of any route segment.
pub fn corridor(route: &Route, radius: f64, grid: &DemGrid) -> Result<Corridor, EvalError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(EvalError::Precondition(format!("radius must be positive, got {radius}")));
    }
    if route.is_empty() {
        return Err(EvalError::Precondition("route must be non-empty".into()));
    }
    let cs = grid.cellsize();
    let (w, h) = (grid.ncols(), grid.nrows());
    let pts: Vec<Point> = route.cells.iter().map(|c| to_point(*c, cs)).collect();
    let segments: Vec<(Point, Point)> = if pts.len() == 1 {
        vec![(pts[0], pts[0])]
    } else {
        pts.windows(2).map(|s| (s[0], s[1])).collect()
    };

    let reach = (radius / cs).ceil() as isize;
    let mut inside = vec![false; w * h];
    for (a, b) in segments {
        let lo_c = ((a.0.min(b.0) / cs) as isize - reach).max(0);
        let hi_c = ((a.0.max(b.0) / cs) as isize + reach).min(w as isize - 1);
        let lo_r = ((a.1.min(b.1) / cs) as isize - reach).max(0);
        let hi_r = ((a.1.max(b.1) / cs) as isize + reach).min(h as isize - 1);
        for r in lo_r..=hi_r {
            for c in lo_c..=hi_c {
                let i = r as usize * w + c as usize;
                if !inside[i] {
                    let q = (c as f64 * cs, r as f64 * cs);
                    inside[i] = point_segment_distance(q, a, b) <= radius;
                }
            }
        }
    }
    let cell_count = inside.iter().filter(|v| **v).count();
    let area_km2 = cell_count as f64 * cs * cs / 1e6;
    let bbox_area_km2 = grid.area_m2() / 1e6;
    Ok(Corridor {
        route: route.clone(),
        radius,
        cell_count,
        area_km2,
        bbox_area_km2,
        reduction_ratio: area_km2 / bbox_area_km2,
    })
}

/// Flat metrics document; field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mean_deviation_m: f64,
    pub max_deviation_m: f64,
    pub truth_coverage: f64,
    pub pred_length_m: f64,
    pub truth_length_m: f64,
    pub corridor_area_km2: f64,
    pub bbox_area_km2: f64,
    pub reduction_ratio: f64,
}

impl MetricsReport {
    pub fn new(metrics: &PathMetrics, corridor: &Corridor) -> Self {
        Self {
            mean_deviation_m: metrics.mean_deviation,
            max_deviation_m: metrics.max_deviation,
            truth_coverage: metrics.truth_coverage,
            pred_length_m: metrics.pred_length,
            truth_length_m: metrics.truth_length,
            corridor_area_km2: corridor.area_km2,
            bbox_area_km2: corridor.bbox_area_km2,
            reduction_ratio: corridor.reduction_ratio,
        }
    }
}

pub fn report(metrics: &PathMetrics, corridor: &Corridor) -> String {
    let mut s = serde_json::to_string_pretty(&MetricsReport::new(metrics, corridor))
        .expect("plain numbers serialize");
    s.push('\n');
    s
}
