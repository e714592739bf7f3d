//! A* over the grade-limited grid graph, plus the Dijkstra oracle.

use super::{GridIndex, NavError, Route, TraversabilityMask};
use crate::terrain::DemGrid;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

/// Neighbour offsets `(dcol, drow)` in expansion order.
pub const NEIGHBORS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// 1 for orthogonal neighbours, sqrt(2) for diagonal ones.
pub fn step_length(a: GridIndex, b: GridIndex) -> f64 {
    if a.col != b.col && a.row != b.row {
        SQRT_2
    } else {
        1.0
    }
}

/// 8-connected grid distance in cells.
pub fn octile(a: GridIndex, b: GridIndex) -> f64 {
    let dx = a.col.abs_diff(b.col) as f64;
    let dy = a.row.abs_diff(b.row) as f64;
    let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
    (hi - lo) + SQRT_2 * lo
}

/// Rise over horizontal run between two neighbouring cells.
pub fn edge_grade(dem: &DemGrid, a: GridIndex, b: GridIndex) -> f64 {
    (dem.get(b) - dem.get(a)).abs() / (step_length(a, b) * dem.cellsize())
}

/// Per-cell cost used to weight edges.
#[derive(Debug, Clone, Copy)]
pub enum CostField<'a> {
    /// Unit cost everywhere: edge cost is horizontal length in meters.
    Geometric,
    /// Row-major per-cell costs, strictly positive on walkable cells.
    Cells(&'a [f64]),
}

/// Everything a single search needs, validated up front.
#[derive(Debug, Clone, Copy)]
pub struct SearchSpace<'a> {
    dem: &'a DemGrid,
    mask: &'a TraversabilityMask,
    cost: CostField<'a>,
    max_grade: Option<f64>,
    min_cost: f64,
}

impl<'a> SearchSpace<'a> {
    /// `max_grade = None` disables the per-edge grade test.
    pub fn new(
        dem: &'a DemGrid,
        mask: &'a TraversabilityMask,
        cost: CostField<'a>,
        max_grade: Option<f64>,
    ) -> Result<Self, NavError> {
        if mask.ncols() != dem.ncols() || mask.nrows() != dem.nrows() {
            return Err(NavError::Precondition(format!(
                "mask is {}x{}, grid is {}x{}",
                mask.ncols(),
                mask.nrows(),
                dem.ncols(),
                dem.nrows()
            )));
        }
        let min_cost = match cost {
            CostField::Geometric => 1.0,
            CostField::Cells(c) => {
                if c.len() != dem.len() {
                    return Err(NavError::Precondition(format!(
                        "cost raster has {} cells, grid has {}",
                        c.len(),
                        dem.len()
                    )));
                }
                let mut min = f64::INFINITY;
                for (i, (v, ok)) in c.iter().zip(mask.cells()).enumerate() {
                    if !*ok {
                        continue;
                    }
                    if !(v.is_finite() && *v > 0.0) {
                        return Err(NavError::Precondition(format!(
                            "cost at {} must be positive and finite, got {v}",
                            dem.index_of(i)
                        )));
                    }
                    min = min.min(*v);
                }
                if min.is_finite() {
                    min
                } else {
                    1.0
                }
            }
        };
        Ok(Self {
            dem,
            mask,
            cost,
            max_grade,
            min_cost,
        })
    }

    pub fn dem(&self) -> &DemGrid {
        self.dem
    }

    pub fn mask(&self) -> &TraversabilityMask {
        self.mask
    }

    fn cell_cost(&self, i: usize) -> f64 {
        match self.cost {
            CostField::Geometric => 1.0,
            CostField::Cells(c) => c[i],
        }
    }

    /// Cost of moving between two neighbouring cells, or `None` when the
    /// edge is not admitted.
    pub fn edge_cost(&self, a: GridIndex, b: GridIndex) -> Option<f64> {
        if !self.mask.get(a) || !self.mask.get(b) {
            return None;
        }
        if let Some(limit) = self.max_grade {
            if edge_grade(self.dem, a, b) > limit {
                return None;
            }
        }
        let (ia, ib) = (self.dem.offset(a), self.dem.offset(b));
        let avg = 0.5 * (self.cell_cost(ia) + self.cell_cost(ib));
        Some(step_length(a, b) * self.dem.cellsize() * avg)
    }

    /// Octile distance scaled by the cheapest walkable cell; never exceeds
    /// the true remaining cost.
    pub fn heuristic(&self, cell: GridIndex, goal: GridIndex) -> f64 {
        octile(cell, goal) * self.dem.cellsize() * self.min_cost
    }

    fn neighbors(&self, cell: GridIndex) -> impl Iterator<Item = (GridIndex, f64)> + '_ {
        NEIGHBORS.iter().filter_map(move |(dc, dr)| {
            let col = cell.col.checked_add_signed(*dc)?;
            let row = cell.row.checked_add_signed(*dr)?;
            let nb = GridIndex::new(col, row);
            if !self.dem.contains(nb) {
                return None;
            }
            self.edge_cost(cell, nb).map(|c| (nb, c))
        })
    }

    /// Sum of edge costs along `cells` in path order, or `None` if any step
    /// is not an admitted edge.
    pub fn route_cost(&self, cells: &[GridIndex]) -> Option<f64> {
        cells.windows(2).try_fold(0.0, |acc, w| {
            if w[0].col.abs_diff(w[1].col) > 1 || w[0].row.abs_diff(w[1].row) > 1 || w[0] == w[1] {
                return None;
            }
            self.edge_cost(w[0], w[1]).map(|c| acc + c)
        })
    }

    fn check_endpoint(&self, cell: GridIndex, what: &str) -> Result<(), NavError> {
        if !self.dem.contains(cell) {
            return Err(NavError::Precondition(format!("{what} {cell} is outside the grid")));
        }
        if !self.mask.get(cell) {
            return Err(NavError::Precondition(format!("{what} {cell} is not traversable")));
        }
        Ok(())
    }
}

/// Open-list entry; the heap pops the smallest `(priority, row, col)`.
#[derive(Debug, Clone, Copy)]
struct Entry {
    priority: f64,
    g: f64,
    cell: GridIndex,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .priority
            .total_cmp(&self.priority)
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn best_first(
    space: &SearchSpace<'_>,
    start: GridIndex,
    goal: GridIndex,
    heuristic: impl Fn(GridIndex) -> f64,
) -> Result<Option<Route>, NavError> {
    space.check_endpoint(start, "start")?;
    space.check_endpoint(goal, "goal")?;
    let n = space.dem.len();
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut open = BinaryHeap::new();
    let s = space.dem.offset(start);
    g[s] = 0.0;
    open.push(Entry {
        priority: heuristic(start),
        g: 0.0,
        cell: start,
    });
    while let Some(Entry { g: gc, cell, .. }) = open.pop() {
        let i = space.dem.offset(cell);
        if gc > g[i] {
            continue;
        }
        if cell == goal {
            let mut cells = vec![goal];
            let mut k = i;
            while parent[k] != usize::MAX {
                k = parent[k];
                cells.push(space.dem.index_of(k));
            }
            cells.reverse();
            return Ok(Some(Route::new(cells, gc)));
        }
        for (nb, cost) in space.neighbors(cell) {
            let j = space.dem.offset(nb);
            let ng = gc + cost;
            if ng < g[j] {
                g[j] = ng;
                parent[j] = i;
                open.push(Entry {
                    priority: ng + heuristic(nb),
                    g: ng,
                    cell: nb,
                });
            }
        }
    }
    Ok(None)
}

/// Cost-minimal route from `start` to `goal`; `Ok(None)` when the goal is
/// unreachable. Equal priorities expand the smaller `(row, col)` first.
pub fn astar(
    space: &SearchSpace<'_>,
    start: GridIndex,
    goal: GridIndex,
) -> Result<Option<Route>, NavError> {
    best_first(space, start, goal, |c| space.heuristic(c, goal))
}

/// Label-setting search without a heuristic.
pub fn dijkstra_oracle(
    space: &SearchSpace<'_>,
    start: GridIndex,
    goal: GridIndex,
) -> Result<Option<Route>, NavError> {
    best_first(space, start, goal, |_| 0.0)
}

/// Optimal cost from `source` to every cell (infinite when unreachable).
/// Edge costs are symmetric, so this is also the cost *to* `source`.
pub fn dijkstra_distances(space: &SearchSpace<'_>, source: GridIndex) -> Result<Vec<f64>, NavError> {
    space.check_endpoint(source, "source")?;
    let mut dist = vec![f64::INFINITY; space.dem.len()];
    let mut open = BinaryHeap::new();
    dist[space.dem.offset(source)] = 0.0;
    open.push(Entry {
        priority: 0.0,
        g: 0.0,
        cell: source,
    });
    while let Some(Entry { g: gc, cell, .. }) = open.pop() {
        if gc > dist[space.dem.offset(cell)] {
            continue;
        }
        for (nb, cost) in space.neighbors(cell) {
            let j = space.dem.offset(nb);
            let ng = gc + cost;
            if ng < dist[j] {
                dist[j] = ng;
                open.push(Entry {
                    priority: ng,
                    g: ng,
                    cell: nb,
                });
            }
        }
    }
    Ok(dist)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RouteViolation {
    Empty,
    OutOfGrid { step: usize },
    NotAdjacent { step: usize },
    Repeated { cell: GridIndex },
    NotTraversable { cell: GridIndex },
    Grade { step: usize, grade: f64 },
}

/// Independent feasibility pass: adjacency, no repeats, walkable endpoints
/// and every edge within `max_grade`.
pub fn verify_route(
    dem: &DemGrid,
    mask: Option<&TraversabilityMask>,
    cells: &[GridIndex],
    max_grade: f64,
) -> Result<(), RouteViolation> {
    if cells.is_empty() {
        return Err(RouteViolation::Empty);
    }
    if let Some(step) = cells.iter().position(|c| !dem.contains(*c)) {
        return Err(RouteViolation::OutOfGrid { step });
    }
    let mut seen = std::collections::HashSet::with_capacity(cells.len());
    for c in cells {
        if !seen.insert(*c) {
            return Err(RouteViolation::Repeated { cell: *c });
        }
    }
    if let Some(mask) = mask {
        for c in cells {
            if !mask.get(*c) {
                return Err(RouteViolation::NotTraversable { cell: *c });
            }
        }
    }
    for (step, w) in cells.windows(2).enumerate() {
        if w[0].col.abs_diff(w[1].col) > 1 || w[0].row.abs_diff(w[1].row) > 1 {
            return Err(RouteViolation::NotAdjacent { step });
        }
        let grade = edge_grade(dem, w[0], w[1]);
        if grade > max_grade {
            return Err(RouteViolation::Grade { step, grade });
        }
    }
    Ok(())
}
