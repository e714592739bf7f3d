//! Grade-limited route search over elevation grids.
//!
//! The walkable surface is an 8-connected grid graph: a cell is walkable
//! when its slope is within the configured grade (optionally eroded by the
//! track half-width), and an edge is admitted only when its own rise over
//! run is within the same grade.

mod geojson;
mod heading;
mod raster;
mod search;
mod traversability;

use thiserror::Error;

pub use crate::terrain::GridIndex;
pub use geojson::{route_from_geojson, route_to_geojson, GeoJsonRoute};
pub use heading::{extend_heading, HEADING_WINDOW};
pub use raster::{polyline_to_cells, rasterize_polyline, WorldPoint};
pub use search::{
    astar, dijkstra_distances, dijkstra_oracle, edge_grade, octile, step_length, verify_route,
    CostField, RouteViolation, SearchSpace, NEIGHBORS,
};
pub use traversability::{traversability, TraversabilityMask};

/// Default grade limit: steeper mainline grades are rare.
pub const DEFAULT_MAX_GRADE: f64 = 0.022;
/// Preferred ceiling for freight main lines.
pub const MAINLINE_MAX_GRADE: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NavError {
    #[error("invalid navigation config: {0}")]
    Config(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("point {index} ({x}, {y}) lies outside the grid extent")]
    PointOutOfBounds { index: usize, x: f64, y: f64 },
    #[error("extension leaves the grid; nearest boundary cell is {clamped}")]
    ExtensionOutOfBounds { clamped: GridIndex },
    #[error("GeoJSON error: {0}")]
    GeoJson(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NavConfig {
    /// Rise over run, in `(0, 1]`.
    pub max_grade: f64,
    /// Erosion radius of the walkable mask, in cells.
    pub track_halfwidth: usize,
}

impl Default for NavConfig {
    fn default() -> Self {
        Self {
            max_grade: DEFAULT_MAX_GRADE,
            track_halfwidth: 0,
        }
    }
}

impl NavConfig {
    pub fn new(max_grade: f64, track_halfwidth: usize) -> Result<Self, NavError> {
        if !(max_grade > 0.0 && max_grade <= 1.0) {
            return Err(NavError::Config(format!(
                "max_grade must lie in (0, 1], got {max_grade}"
            )));
        }
        Ok(Self {
            max_grade,
            track_halfwidth,
        })
    }

    pub fn mainline() -> Self {
        Self {
            max_grade: MAINLINE_MAX_GRADE,
            track_halfwidth: 0,
        }
    }
}

/// An 8-connected, non-repeating cell path and its accumulated edge cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub cells: Vec<GridIndex>,
    pub total_cost: f64,
}

impl Route {
    pub fn new(cells: Vec<GridIndex>, total_cost: f64) -> Self {
        Self { cells, total_cost }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn start(&self) -> Option<GridIndex> {
        self.cells.first().copied()
    }

    pub fn end(&self) -> Option<GridIndex> {
        self.cells.last().copied()
    }

    /// Number of diagonal and orthogonal steps.
    pub fn step_counts(&self) -> (usize, usize) {
        self.cells.windows(2).fold((0, 0), |(d, o), w| {
            if w[0].col != w[1].col && w[0].row != w[1].row {
                (d + 1, o)
            } else {
                (d, o + 1)
            }
        })
    }
}
