use crate::CliError;
use railroute_core::nav::GridIndex;
use railroute_core::terrain::DemGrid;
use std::str::FromStr;

/// A route endpoint as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    World { x: f64, y: f64 },
    Cell(GridIndex),
}

fn pair<T: FromStr>(s: &str) -> Option<(T, T)> {
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl FromStr for Endpoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix("cell:") {
            let (col, row) = pair(rest).ok_or_else(|| format!("expected `cell:col,row`, got `{s}`"))?;
            return Ok(Endpoint::Cell(GridIndex::new(col, row)));
        }
        let (x, y) = pair::<f64>(s).ok_or_else(|| format!("expected `x,y` or `cell:col,row`, got `{s}`"))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(format!("coordinates must be finite, got `{s}`"));
        }
        Ok(Endpoint::World { x, y })
    }
}

impl Endpoint {
    /// World points snap to the cell containing them.
    pub fn resolve(self, grid: &DemGrid) -> Result<GridIndex, CliError> {
        let cell = match self {
            Endpoint::World { x, y } => grid
                .snap(x, y)
                .ok_or_else(|| CliError::Usage(format!("point ({x}, {y}) is outside the DEM")))?,
            Endpoint::Cell(c) => c,
        };
        if !grid.contains(cell) {
            return Err(CliError::Usage(format!("{cell} is outside the DEM")));
        }
        Ok(cell)
    }
}
