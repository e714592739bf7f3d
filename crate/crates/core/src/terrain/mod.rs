//! Digital elevation grids and everything derived directly from them.

mod analysis;
mod asc;
mod synth;

use sha2::{Digest, Sha256};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

pub use analysis::{features, gradient_field, TerrainFeatures};
pub use asc::{load_asc, save_asc};
pub use synth::{synth_terrain, Scenario, ValleyShape};

/// Default grid resolution in meters, matching coarse SRTM-derived surface models.
pub const DEFAULT_CELLSIZE: f64 = 60.0;

/// Sentinel used when an ASC header omits `NODATA_value`.
pub const DEFAULT_NODATA: f64 = -9999.0;

#[derive(Debug, Error, PartialEq)]
pub enum TerrainError {
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("invalid grid: {0}")]
    Invalid(String),
    #[error("unknown scenario `{0}` (expected flat, ramp, ridge, valley or hills)")]
    UnknownScenario(String),
    #[error("synthetic terrain needs size >= 16, got {0}")]
    TooSmall(usize),
}

/// A cell address. Ordering is row-major, `(row, col)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridIndex {
    pub col: usize,
    pub row: usize,
}

impl GridIndex {
    pub const fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

impl Ord for GridIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.row, self.col).cmp(&(other.row, other.col))
    }
}

impl PartialOrd for GridIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GridIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cell:{},{}", self.col, self.row)
    }
}

/// Rectangular elevation raster in a projected frame with uniform square cells.
///
/// Values are row-major with row 0 the northernmost row, the same
/// top-first order as the ASC format.
#[derive(Debug, Clone, PartialEq)]
pub struct DemGrid {
    ncols: usize,
    nrows: usize,
    xllcorner: f64,
    yllcorner: f64,
    cellsize: f64,
    nodata: f64,
    values: Vec<f64>,
}

impl DemGrid {
    pub fn new(
        ncols: usize,
        nrows: usize,
        xllcorner: f64,
        yllcorner: f64,
        cellsize: f64,
        nodata: f64,
        values: Vec<f64>,
    ) -> Result<Self, TerrainError> {
        if ncols < 2 || nrows < 2 {
            return Err(TerrainError::Invalid(format!(
                "grid must be at least 2x2, got {ncols}x{nrows}"
            )));
        }
        if !(cellsize > 0.0 && cellsize.is_finite()) {
            return Err(TerrainError::Invalid(format!(
                "cellsize must be positive, got {cellsize}"
            )));
        }
        if !xllcorner.is_finite() || !yllcorner.is_finite() {
            return Err(TerrainError::Invalid("corner coordinates must be finite".into()));
        }
        if values.len() != ncols * nrows {
            return Err(TerrainError::Invalid(format!(
                "expected {} values, got {}",
                ncols * nrows,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|&v| !v.is_finite() && v != nodata) {
            return Err(TerrainError::Invalid(format!(
                "non-finite value at index {i}"
            )));
        }
        Ok(Self {
            ncols,
            nrows,
            xllcorner,
            yllcorner,
            cellsize,
            nodata,
            values,
        })
    }

    /// Grid anchored at the origin with the default nodata sentinel.
    pub fn from_values(
        ncols: usize,
        nrows: usize,
        cellsize: f64,
        values: Vec<f64>,
    ) -> Result<Self, TerrainError> {
        Self::new(ncols, nrows, 0.0, 0.0, cellsize, DEFAULT_NODATA, values)
    }

    /// Same header, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self, TerrainError> {
        Self::new(
            self.ncols,
            self.nrows,
            self.xllcorner,
            self.yllcorner,
            self.cellsize,
            self.nodata,
            values,
        )
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn xllcorner(&self) -> f64 {
        self.xllcorner
    }

    pub fn yllcorner(&self) -> f64 {
        self.yllcorner
    }

    pub fn cellsize(&self) -> f64 {
        self.cellsize
    }

    pub fn nodata(&self) -> f64 {
        self.nodata
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn offset(&self, cell: GridIndex) -> usize {
        cell.row * self.ncols + cell.col
    }

    pub fn index_of(&self, offset: usize) -> GridIndex {
        GridIndex::new(offset % self.ncols, offset / self.ncols)
    }

    pub fn contains(&self, cell: GridIndex) -> bool {
        cell.col < self.ncols && cell.row < self.nrows
    }

    pub fn get(&self, cell: GridIndex) -> f64 {
        self.values[self.offset(cell)]
    }

    pub fn is_nodata(&self, cell: GridIndex) -> bool {
        self.get(cell) == self.nodata
    }

    fn is_nodata_value(&self, v: f64) -> bool {
        v == self.nodata
    }

    /// World coordinates of a cell center.
    pub fn cell_center(&self, cell: GridIndex) -> (f64, f64) {
        (
            self.xllcorner + (cell.col as f64 + 0.5) * self.cellsize,
            self.yllcorner + (self.nrows as f64 - cell.row as f64 - 0.5) * self.cellsize,
        )
    }

    /// Continuous cell coordinates `(col, row)` of a world point; cell
    /// `(c, r)` covers `[c, c+1) x [r, r+1)`.
    pub fn to_cell_coords(&self, x: f64, y: f64) -> (f64, f64) {
        (
            (x - self.xllcorner) / self.cellsize,
            (self.yllcorner + self.nrows as f64 * self.cellsize - y) / self.cellsize,
        )
    }

    /// Nearest cell center to a world point, or `None` outside the extent.
    pub fn snap(&self, x: f64, y: f64) -> Option<GridIndex> {
        let (cx, cy) = self.to_cell_coords(x, y);
        let (w, h) = (self.ncols as f64, self.nrows as f64);
        if !(0.0..=w).contains(&cx) || !(0.0..=h).contains(&cy) {
            return None;
        }
        let col = (cx.floor() as usize).min(self.ncols - 1);
        let row = (cy.floor() as usize).min(self.nrows - 1);
        Some(GridIndex::new(col, row))
    }

    /// Tile area in square meters.
    pub fn area_m2(&self) -> f64 {
        self.ncols as f64 * self.nrows as f64 * self.cellsize * self.cellsize
    }

    /// Mean over data cells, or 0 for an all-nodata grid.
    pub fn finite_mean(&self) -> f64 {
        let (sum, n) = self
            .values
            .iter()
            .filter(|v| !self.is_nodata_value(**v))
            .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    /// SHA-256 over the header and the raw bits of every value.
    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.ncols as u64).to_le_bytes());
        hasher.update((self.nrows as u64).to_le_bytes());
        for v in [
            self.xllcorner,
            self.yllcorner,
            self.cellsize,
            self.nodata,
        ] {
            hasher.update(v.to_bits().to_le_bytes());
        }
        for v in &self.values {
            hasher.update(v.to_bits().to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dims() {
        assert!(DemGrid::from_values(1, 2, 60.0, vec![0.0; 2]).is_err());
        assert!(DemGrid::from_values(2, 2, 0.0, vec![0.0; 4]).is_err());
        assert!(DemGrid::from_values(2, 2, 60.0, vec![0.0; 3]).is_err());
        assert!(DemGrid::from_values(2, 2, 60.0, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn centers_and_snapping_agree() {
        let g = DemGrid::new(4, 3, 1000.0, 2000.0, 60.0, DEFAULT_NODATA, vec![0.0; 12]).unwrap();
        for row in 0..3 {
            for col in 0..4 {
                let c = GridIndex::new(col, row);
                let (x, y) = g.cell_center(c);
                assert_eq!(g.snap(x, y), Some(c));
            }
        }
        // row 0 is the northern edge
        assert_eq!(g.cell_center(GridIndex::new(0, 0)), (1030.0, 2150.0));
        assert_eq!(g.snap(999.0, 2100.0), None);
        // the far edges belong to the last cell
        assert_eq!(g.snap(1240.0, 2000.0), Some(GridIndex::new(3, 2)));
    }

    #[test]
    fn grid_index_orders_by_row_first() {
        assert!(GridIndex::new(5, 0) < GridIndex::new(0, 1));
        assert!(GridIndex::new(0, 1) < GridIndex::new(1, 1));
    }

    #[test]
    fn checksum_tracks_content() {
        let a = DemGrid::from_values(2, 2, 60.0, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = a.with_values(vec![1.0, 2.0, 3.0, 4.5]).unwrap();
        assert_eq!(a.checksum(), a.clone().checksum());
        assert_ne!(a.checksum(), b.checksum());
        assert_eq!(a.checksum().len(), 64);
    }
}
