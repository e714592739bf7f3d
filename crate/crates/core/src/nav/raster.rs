//! Supercover rasterization of world-coordinate polylines.

use super::{GridIndex, NavError};
use crate::terrain::DemGrid;
use std::collections::HashSet;

/// A point in the grid's projected frame, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
}

impl WorldPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Tolerance, in units of the segment parameter, for treating an x and a y
/// boundary crossing as one corner crossing.
const CORNER_EPS: f64 = 1e-9;

fn check_points(points: &[WorldPoint], grid: &DemGrid) -> Result<(), NavError> {
    for (index, p) in points.iter().enumerate() {
        if grid.snap(p.x, p.y).is_none() || !p.x.is_finite() || !p.y.is_finite() {
            return Err(NavError::PointOutOfBounds { index, x: p.x, y: p.y });
        }
    }
    Ok(())
}

fn cell_of(grid: &DemGrid, cx: f64, cy: f64) -> (isize, isize) {
    (
        (cx.floor() as isize).clamp(0, grid.ncols() as isize - 1),
        (cy.floor() as isize).clamp(0, grid.nrows() as isize - 1),
    )
}

/// Every cell touched by the segment, in order. At an exact corner crossing
/// both edge-adjacent cells are emitted before the diagonal one.
fn supercover_segment(grid: &DemGrid, a: WorldPoint, b: WorldPoint, out: &mut Vec<GridIndex>) {
    let (x0, y0) = grid.to_cell_coords(a.x, a.y);
    let (x1, y1) = grid.to_cell_coords(b.x, b.y);
    let (mut ix, mut iy) = cell_of(grid, x0, y0);
    let (jx, jy) = cell_of(grid, x1, y1);
    let (dx, dy) = (x1 - x0, y1 - y0);
    let sx: isize = if dx > 0.0 { 1 } else { -1 };
    let sy: isize = if dy > 0.0 { 1 } else { -1 };
    let t_delta_x = if dx != 0.0 { 1.0 / dx.abs() } else { f64::INFINITY };
    let t_delta_y = if dy != 0.0 { 1.0 / dy.abs() } else { f64::INFINITY };
    let mut t_max_x = if dx > 0.0 {
        (ix as f64 + 1.0 - x0) / dx
    } else if dx < 0.0 {
        (x0 - ix as f64) / -dx
    } else {
        f64::INFINITY
    };
    let mut t_max_y = if dy > 0.0 {
        (iy as f64 + 1.0 - y0) / dy
    } else if dy < 0.0 {
        (y0 - iy as f64) / -dy
    } else {
        f64::INFINITY
    };

    let (w, h) = (grid.ncols() as isize, grid.nrows() as isize);
    let push = |c: isize, r: isize, out: &mut Vec<GridIndex>| {
        if (0..w).contains(&c) && (0..h).contains(&r) {
            out.push(GridIndex::new(c as usize, r as usize));
        }
    };
    push(ix, iy, out);
    let budget = (jx - ix).unsigned_abs() + (jy - iy).unsigned_abs() + 2;
    let mut steps = 0;
    while (ix, iy) != (jx, jy) && steps < budget && t_max_x.min(t_max_y) <= 1.0 + CORNER_EPS {
        if (t_max_x - t_max_y).abs() <= CORNER_EPS {
            push(ix + sx, iy, out);
            push(ix, iy + sy, out);
            ix += sx;
            iy += sy;
            t_max_x += t_delta_x;
            t_max_y += t_delta_y;
            steps += 2;
        } else if t_max_x < t_max_y {
            ix += sx;
            t_max_x += t_delta_x;
            steps += 1;
        } else {
            iy += sy;
            t_max_y += t_delta_y;
            steps += 1;
        }
        push(ix, iy, out);
    }
}

fn dedup_in_order(cells: Vec<GridIndex>) -> Vec<GridIndex> {
    let mut seen = HashSet::with_capacity(cells.len());
    cells.into_iter().filter(|c| seen.insert(*c)).collect()
}

/// Supercover rasterization of a polyline, duplicates removed while keeping
/// first occurrences in order.
pub fn rasterize_polyline(points: &[WorldPoint], grid: &DemGrid) -> Result<Vec<GridIndex>, NavError> {
    check_points(points, grid)?;
    let mut cells = Vec::new();
    match points {
        [] => {}
        [p] => cells.extend(grid.snap(p.x, p.y)),
        _ => {
            for seg in points.windows(2) {
                supercover_segment(grid, seg[0], seg[1], &mut cells);
            }
        }
    }
    Ok(dedup_in_order(cells))
}

/// Converts a route polyline to cells: vertices snap to their cell, and only
/// segments whose endpoints are not already neighbours are supercovered.
///
/// This recovers a serialized cell route exactly while still densifying
/// sparse vector polylines.
pub fn polyline_to_cells(points: &[WorldPoint], grid: &DemGrid) -> Result<Vec<GridIndex>, NavError> {
    check_points(points, grid)?;
    let snap = |p: &WorldPoint| grid.snap(p.x, p.y).expect("checked above");
    let mut cells = Vec::with_capacity(points.len());
    if let Some(p) = points.first() {
        cells.push(snap(p));
    }
    for seg in points.windows(2) {
        let (a, b) = (snap(&seg[0]), snap(&seg[1]));
        if a.col.abs_diff(b.col) <= 1 && a.row.abs_diff(b.row) <= 1 {
            cells.push(b);
        } else {
            supercover_segment(grid, seg[0], seg[1], &mut cells);
        }
    }
    Ok(dedup_in_order(cells))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> DemGrid {
        DemGrid::from_values(10, 10, 60.0, vec![0.0; 100]).unwrap()
    }

    fn center(g: &DemGrid, col: usize, row: usize) -> WorldPoint {
        let (x, y) = g.cell_center(GridIndex::new(col, row));
        WorldPoint::new(x, y)
    }

    #[test]
    fn horizontal_segment() {
        let g = grid();
        let cells = rasterize_polyline(&[center(&g, 2, 4), center(&g, 6, 4)], &g).unwrap();
        assert_eq!(cells, (2..=6).map(|c| GridIndex::new(c, 4)).collect::<Vec<_>>());
    }

    #[test]
    fn exact_diagonal_includes_corner_neighbours() {
        let g = grid();
        let cells = rasterize_polyline(&[center(&g, 0, 0), center(&g, 2, 2)], &g).unwrap();
        let c = GridIndex::new;
        assert_eq!(cells, vec![c(0, 0), c(1, 0), c(0, 1), c(1, 1), c(2, 1), c(1, 2), c(2, 2)]);
    }

    #[test]
    fn single_point() {
        let g = grid();
        assert_eq!(
            rasterize_polyline(&[center(&g, 7, 3)], &g).unwrap(),
            vec![GridIndex::new(7, 3)]
        );
    }

    #[test]
    fn shallow_segment_is_four_connected() {
        let g = grid();
        let cells = rasterize_polyline(&[WorldPoint::new(10.0, 590.0), WorldPoint::new(590.0, 400.0)], &g)
            .unwrap();
        assert_eq!(cells.first(), Some(&GridIndex::new(0, 0)));
        assert_eq!(cells.last(), Some(&GridIndex::new(9, 3)));
        for w in cells.windows(2) {
            assert_eq!(w[0].col.abs_diff(w[1].col) + w[0].row.abs_diff(w[1].row), 1);
        }
    }

    #[test]
    fn out_of_extent_names_the_point() {
        let g = grid();
        let err = rasterize_polyline(&[center(&g, 1, 1), WorldPoint::new(700.0, 10.0)], &g);
        assert!(matches!(err, Err(NavError::PointOutOfBounds { index: 1, .. })));
    }

    #[test]
    fn polyline_to_cells_recovers_cell_routes() {
        let g = grid();
        let route: Vec<_> = [(0, 0), (1, 1), (2, 1), (3, 2), (3, 3)]
            .iter()
            .map(|&(c, r)| GridIndex::new(c, r))
            .collect();
        let pts: Vec<_> = route.iter().map(|c| center(&g, c.col, c.row)).collect();
        assert_eq!(polyline_to_cells(&pts, &g).unwrap(), route);
        // sparse polyline gets densified
        let sparse = [center(&g, 0, 5), center(&g, 9, 5)];
        assert_eq!(polyline_to_cells(&sparse, &g).unwrap().len(), 10);
    }
}
