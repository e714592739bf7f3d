use super::{GridIndex, NavError};
use crate::terrain::DemGrid;

/// Number of trailing cells whose mean step direction defines the heading.
pub const HEADING_WINDOW: usize = 10;

/// Continues the prefix straight ahead by `distance` meters and returns the
/// nearest cell (rounding half away from zero).
///
/// The heading is the mean step of the last [`HEADING_WINDOW`] cells, or of
/// the whole prefix when it is shorter.
pub fn extend_heading(prefix: &[GridIndex], distance: f64, grid: &DemGrid) -> Result<GridIndex, NavError> {
    if prefix.len() < 2 {
        return Err(NavError::Precondition(format!(
            "heading needs at least 2 cells, got {}",
            prefix.len()
        )));
    }
    if !(distance >= 0.0 && distance.is_finite()) {
        return Err(NavError::Precondition(format!(
            "distance must be finite and non-negative, got {distance}"
        )));
    }
    let last = prefix[prefix.len() - 1];
    let first = prefix[prefix.len().saturating_sub(HEADING_WINDOW)];
    let dc = last.col as f64 - first.col as f64;
    let dr = last.row as f64 - first.row as f64;
    let norm = dc.hypot(dr);
    if norm == 0.0 {
        return Err(NavError::Precondition("prefix has no net heading".into()));
    }
    let cells = distance / grid.cellsize();
    let col = (last.col as f64 + cells * dc / norm).round();
    let row = (last.row as f64 + cells * dr / norm).round();
    let (w, h) = (grid.ncols() as f64, grid.nrows() as f64);
    if col < 0.0 || row < 0.0 || col >= w || row >= h {
        let clamped = GridIndex::new(col.clamp(0.0, w - 1.0) as usize, row.clamp(0.0, h - 1.0) as usize);
        return Err(NavError::ExtensionOutOfBounds { clamped });
    }
    Ok(GridIndex::new(col as usize, row as usize))
}
