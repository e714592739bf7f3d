use super::{GridIndex, NavConfig};
use crate::terrain::{gradient_field, DemGrid};

/// Per-cell walkability, same dimensions as the source grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraversabilityMask {
    ncols: usize,
    nrows: usize,
    cells: Vec<bool>,
}

impl TraversabilityMask {
    pub fn new(ncols: usize, nrows: usize, cells: Vec<bool>) -> Self {
        assert_eq!(cells.len(), ncols * nrows, "mask size must match dimensions");
        Self { ncols, nrows, cells }
    }

    /// Every data cell walkable; only nodata is excluded.
    pub fn data_cells(grid: &DemGrid) -> Self {
        let cells = grid.values().iter().map(|v| *v != grid.nodata()).collect();
        Self::new(grid.ncols(), grid.nrows(), cells)
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn get(&self, cell: GridIndex) -> bool {
        cell.col < self.ncols && cell.row < self.nrows && self.cells[cell.row * self.ncols + cell.col]
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }

    /// Keeps a cell only if every in-grid cell within Chebyshev `radius` is set.
    pub fn eroded(&self, radius: usize) -> Self {
        if radius == 0 {
            return self.clone();
        }
        let (w, h) = (self.ncols, self.nrows);
        // square structuring element: separable into a row pass and a column pass
        let mut rows = vec![false; w * h];
        for r in 0..h {
            for c in 0..w {
                let lo = c.saturating_sub(radius);
                let hi = (c + radius).min(w - 1);
                rows[r * w + c] = (lo..=hi).all(|k| self.cells[r * w + k]);
            }
        }
        let mut out = vec![false; w * h];
        for r in 0..h {
            let lo = r.saturating_sub(radius);
            let hi = (r + radius).min(h - 1);
            for c in 0..w {
                out[r * w + c] = (lo..=hi).all(|k| rows[k * w + c]);
            }
        }
        Self::new(w, h, out)
    }
}

/// Cells whose slope is within `config.max_grade`, eroded by the track
/// half-width. Nodata cells are never walkable.
pub fn traversability(grid: &DemGrid, config: &NavConfig) -> TraversabilityMask {
    let slope = gradient_field(grid);
    let base: Vec<bool> = grid
        .values()
        .iter()
        .zip(slope.values())
        .map(|(z, s)| *z != grid.nodata() && *s <= config.max_grade)
        .collect();
    TraversabilityMask::new(grid.ncols(), grid.nrows(), base).eroded(config.track_halfwidth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::{synth_terrain, Scenario};

    /// Direct scan of the erosion definition.
    fn erode_direct(mask: &TraversabilityMask, radius: usize) -> Vec<bool> {
        let (w, h) = (mask.ncols(), mask.nrows());
        let mut out = vec![false; w * h];
        for r in 0..h {
            for c in 0..w {
                let mut ok = true;
                for rr in r.saturating_sub(radius)..=(r + radius).min(h - 1) {
                    for cc in c.saturating_sub(radius)..=(c + radius).min(w - 1) {
                        ok &= mask.get(GridIndex::new(cc, rr));
                    }
                }
                out[r * w + c] = ok;
            }
        }
        out
    }

    #[test]
    fn flat_is_fully_walkable() {
        let g = synth_terrain(Scenario::Flat, 32, 60.0, 0).unwrap();
        let m = traversability(&g, &NavConfig { max_grade: 0.022, track_halfwidth: 2 });
        assert_eq!(m.count(), 32 * 32);
    }

    #[test]
    fn steep_ramp_is_blocked() {
        let g = synth_terrain(Scenario::Ramp { grade: 0.05 }, 32, 60.0, 0).unwrap();
        let m = traversability(&g, &NavConfig::default());
        assert_eq!(m.count(), 0);
    }

    #[test]
    fn ridge_crest_blocked_and_fringe_eroded() {
        let g = synth_terrain(Scenario::Ridge, 128, 60.0, 42).unwrap();
        let base = traversability(&g, &NavConfig::default());
        // crest blocked, far flanks open on the middle row
        assert!(!base.get(GridIndex::new(63, 64)));
        assert!(!base.get(GridIndex::new(64, 64)));
        assert!(base.get(GridIndex::new(10, 64)));
        assert!(base.get(GridIndex::new(118, 64)));

        let eroded = traversability(&g, &NavConfig { max_grade: 0.022, track_halfwidth: 1 });
        assert_eq!(eroded.cells(), erode_direct(&base, 1).as_slice());
        // the first walkable cell west of the crest is lost to erosion
        let fringe = (0..64).rev().find(|c| base.get(GridIndex::new(*c, 64))).unwrap();
        assert!(!eroded.get(GridIndex::new(fringe, 64)));
        assert!(eroded.get(GridIndex::new(fringe - 1, 64)));
    }

    #[test]
    fn nodata_never_walkable() {
        let mut v = vec![0.0; 16];
        v[6] = -9999.0;
        let g = DemGrid::from_values(4, 4, 60.0, v).unwrap();
        let m = traversability(&g, &NavConfig::default());
        assert!(!m.get(GridIndex::new(2, 1)));
        assert_eq!(m.count(), 15);
    }

    #[test]
    fn erosion_matches_direct_scan() {
        let cells: Vec<bool> = (0..23 * 17).map(|i| (i * 7919) % 11 != 0).collect();
        let m = TraversabilityMask::new(23, 17, cells);
        for r in 0..4 {
            assert_eq!(m.eroded(r).cells(), erode_direct(&m, r).as_slice());
        }
    }
}
