//! Slope fields and network input channels.

use super::{DemGrid, GridIndex};
use crate::numerics::Tensor;

/// Input channels for the cost model, shape `(3, nrows, ncols)`:
/// z-scored elevation, gradient magnitude, z-scored 3x3 roughness.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrainFeatures {
    pub channels: Tensor,
}

impl TerrainFeatures {
    pub const CHANNELS: usize = 3;
}

/// Gradient magnitude (rise over run) per cell.
///
/// Central differences in the interior; at the tile edge, or next to a nodata
/// cell, the missing side falls back to a one-sided difference against the
/// center. Nodata cells stay nodata. The result carries the source header.
pub fn gradient_field(grid: &DemGrid) -> DemGrid {
    let (w, h) = (grid.ncols(), grid.nrows());
    let cs = grid.cellsize();
    let nodata = grid.nodata();
    let z = grid.values();
    let valid = |c: usize, r: usize| z[r * w + c] != nodata;

    let diff = |center: f64, lo: Option<f64>, hi: Option<f64>| match (lo, hi) {
        (Some(a), Some(b)) => (b - a) / (2.0 * cs),
        (None, Some(b)) => (b - center) / cs,
        (Some(a), None) => (center - a) / cs,
        (None, None) => 0.0,
    };

    let mut out = vec![nodata; w * h];
    for r in 0..h {
        for c in 0..w {
            if !valid(c, r) {
                continue;
            }
            let center = z[r * w + c];
            let west = (c > 0 && valid(c - 1, r)).then(|| z[r * w + c - 1]);
            let east = (c + 1 < w && valid(c + 1, r)).then(|| z[r * w + c + 1]);
            let north = (r > 0 && valid(c, r - 1)).then(|| z[(r - 1) * w + c]);
            let south = (r + 1 < h && valid(c, r + 1)).then(|| z[(r + 1) * w + c]);
            let dzdx = diff(center, west, east);
            // y grows northward, rows grow southward
            let dzdy = diff(center, south, north);
            out[r * w + c] = dzdx.hypot(dzdy);
        }
    }
    grid.with_values(out)
        .expect("gradient of a valid grid is a valid grid")
}

/// Mean and population standard deviation.
fn moments(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    (mean, var.sqrt())
}

/// Z-scores `values` over the cells where `valid` holds; invalid cells and
/// zero-variance inputs map to 0.
fn zscore(values: &[f64], valid: &[bool]) -> Vec<f64> {
    let (mean, std) = moments(
        values
            .iter()
            .zip(valid)
            .filter(|(_, ok)| **ok)
            .map(|(v, _)| *v),
    );
    if std <= 1e-9 {
        return vec![0.0; values.len()];
    }
    values
        .iter()
        .zip(valid)
        .map(|(v, ok)| if *ok { (v - mean) / std } else { 0.0 })
        .collect()
}

/// 3x3 windowed standard deviation with edge replication; nodata samples
/// contribute the tile mean.
fn roughness(grid: &DemGrid) -> Vec<f64> {
    let (w, h) = (grid.ncols(), grid.nrows());
    let fill = grid.finite_mean();
    let sample = |c: isize, r: isize| {
        let c = c.clamp(0, w as isize - 1) as usize;
        let r = r.clamp(0, h as isize - 1) as usize;
        let v = grid.get(GridIndex::new(c, r));
        if v == grid.nodata() {
            fill
        } else {
            v
        }
    };
    let mut out = vec![0.0; w * h];
    for r in 0..h {
        for c in 0..w {
            let mut window = [0.0; 9];
            let mut k = 0;
            for dr in -1..=1 {
                for dc in -1..=1 {
                    window[k] = sample(c as isize + dc, r as isize + dr);
                    k += 1;
                }
            }
            out[r * w + c] = moments(window.iter().copied()).1;
        }
    }
    out
}

/// Builds the three network input channels for a grid.
pub fn features(grid: &DemGrid) -> TerrainFeatures {
    let (w, h) = (grid.ncols(), grid.nrows());
    let valid: Vec<bool> = grid.values().iter().map(|v| *v != grid.nodata()).collect();

    let elevation = zscore(grid.values(), &valid);
    let slope = gradient_field(grid);
    let slope: Vec<f64> = slope
        .values()
        .iter()
        .zip(&valid)
        .map(|(v, ok)| if *ok { *v } else { 0.0 })
        .collect();
    let rough = zscore(&roughness(grid), &valid);

    let mut data = Vec::with_capacity(3 * w * h);
    data.extend_from_slice(&elevation);
    data.extend_from_slice(&slope);
    data.extend_from_slice(&rough);
    TerrainFeatures {
        channels: Tensor::new(3, h, w, data).expect("three full channels"),
    }
}
