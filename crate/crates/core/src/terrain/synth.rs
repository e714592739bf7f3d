//! Deterministic synthetic test terrain.
//!
//! Every scenario is a pure function of `(scenario, size, cellsize, seed)`.
//! Relief is expressed in multiples of the cellsize so grades do not depend
//! on resolution. Randomness comes from `ChaCha8Rng` seeded with the given
//! seed.

use super::{DemGrid, TerrainError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

const BASE_ELEVATION: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    Flat,
    /// Linear incline rising eastward at `grade` (rise/run).
    Ramp { grade: f64 },
    /// Narrow north-south ridge with a single low pass.
    Ridge,
    /// Meandering north-south valley with gentle flanks.
    Valley,
    /// Sum of seeded Gaussian bumps.
    Hills,
}

impl Scenario {
    pub const DEFAULT_RAMP_GRADE: f64 = 0.05;
}

impl FromStr for Scenario {
    type Err = TerrainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "flat" => Ok(Scenario::Flat),
            "ramp" => Ok(Scenario::Ramp {
                grade: Self::DEFAULT_RAMP_GRADE,
            }),
            "ridge" => Ok(Scenario::Ridge),
            "valley" => Ok(Scenario::Valley),
            "hills" => Ok(Scenario::Hills),
            _ => Err(TerrainError::UnknownScenario(s.to_string())),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Scenario::Flat => "flat",
            Scenario::Ramp { .. } => "ramp",
            Scenario::Ridge => "ridge",
            Scenario::Valley => "valley",
            Scenario::Hills => "hills",
        };
        f.write_str(name)
    }
}

/// Geometry of the valley scenario, in cell units. Exposed so callers can
/// build demonstrations that follow the valley floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValleyShape {
    pub size: usize,
    pub amplitude: f64,
    pub width: f64,
    pub depth: f64,
}

impl ValleyShape {
    pub fn new(size: usize, cellsize: f64, seed: u64) -> Self {
        let sign = if seed % 2 == 0 { 1.0 } else { -1.0 };
        Self {
            size,
            amplitude: sign * 0.25 * size as f64,
            width: (size as f64 / 32.0).max(2.0),
            depth: 0.08 * cellsize,
        }
    }

    /// Column coordinate of the valley floor at row coordinate `y`
    /// (both continuous, measured from the north-west corner).
    pub fn centerline(&self, y: f64) -> f64 {
        let n = self.size as f64;
        0.5 * n + self.amplitude * (2.0 * PI * y / n).sin()
    }

    /// World coordinates of the valley floor sampled from the north edge to
    /// the south edge of `grid`, four samples per row.
    pub fn floor_polyline(&self, grid: &DemGrid) -> Vec<(f64, f64)> {
        let n = self.size as f64;
        let steps = 4 * self.size;
        let cs = grid.cellsize();
        let top = grid.yllcorner() + grid.nrows() as f64 * cs;
        (0..=steps)
            .map(|k| {
                let y = 0.5 + (n - 1.0) * k as f64 / steps as f64;
                (grid.xllcorner() + self.centerline(y) * cs, top - y * cs)
            })
            .collect()
    }

    fn centerline_slope(&self, y: f64) -> f64 {
        let n = self.size as f64;
        self.amplitude * 2.0 * PI / n * (2.0 * PI * y / n).cos()
    }

    fn elevation(&self, x: f64, y: f64) -> f64 {
        let slope = self.centerline_slope(y);
        let d = (x - self.centerline(y)) / (1.0 + slope * slope).sqrt();
        BASE_ELEVATION + self.depth * (1.0 - (-(d * d) / (2.0 * self.width * self.width)).exp())
    }
}

fn ridge(size: usize, cellsize: f64, rng: &mut ChaCha8Rng) -> impl Fn(f64, f64) -> f64 {
    let n = size as f64;
    let crest = 0.5 * n;
    let sigma = (n / 64.0).max(2.0);
    let pass = n * rng.random_range(0.7..0.85);
    let pass_width = 0.16 * n;
    let height = cellsize;
    move |x, y| {
        let along = (y - pass) / pass_width;
        let h = height * (1.0 - (-0.5 * along * along).exp());
        let d = (x - crest) / sigma;
        BASE_ELEVATION + h * (-0.5 * d * d).exp()
    }
}

struct Bump {
    x: f64,
    y: f64,
    sigma: f64,
    height: f64,
}

fn hills(size: usize, cellsize: f64, rng: &mut ChaCha8Rng) -> impl Fn(f64, f64) -> f64 {
    let n = size as f64;
    let count = (size / 8).max(4);
    let bumps: Vec<Bump> = (0..count)
        .map(|_| Bump {
            x: rng.random_range(0.0..n),
            y: rng.random_range(0.0..n),
            sigma: n * rng.random_range(0.03..0.12),
            height: cellsize * rng.random_range(0.1..0.6),
        })
        .collect();
    move |x, y| {
        BASE_ELEVATION
            + bumps
                .iter()
                .map(|b| {
                    let d2 = (x - b.x).powi(2) + (y - b.y).powi(2);
                    b.height * (-d2 / (2.0 * b.sigma * b.sigma)).exp()
                })
                .sum::<f64>()
    }
}

fn sample(size: usize, cellsize: f64, f: impl Fn(f64, f64) -> f64) -> Result<DemGrid, TerrainError> {
    let mut values = Vec::with_capacity(size * size);
    for row in 0..size {
        for col in 0..size {
            values.push(f(col as f64 + 0.5, row as f64 + 0.5));
        }
    }
    DemGrid::from_values(size, size, cellsize, values)
}

/// Generates a square `size x size` tile anchored at the origin.
pub fn synth_terrain(
    scenario: Scenario,
    size: usize,
    cellsize: f64,
    seed: u64,
) -> Result<DemGrid, TerrainError> {
    if size < 16 {
        return Err(TerrainError::TooSmall(size));
    }
    if !(cellsize > 0.0) {
        return Err(TerrainError::Invalid(format!("cellsize must be positive, got {cellsize}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match scenario {
        Scenario::Flat => sample(size, cellsize, |_, _| BASE_ELEVATION),
        Scenario::Ramp { grade } => {
            sample(size, cellsize, move |x, _| BASE_ELEVATION + grade * x * cellsize)
        }
        Scenario::Ridge => sample(size, cellsize, ridge(size, cellsize, &mut rng)),
        Scenario::Valley => {
            let shape = ValleyShape::new(size, cellsize, seed);
            sample(size, cellsize, move |x, y| shape.elevation(x, y))
        }
        Scenario::Hills => sample(size, cellsize, hills(size, cellsize, &mut rng)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::{gradient_field, GridIndex};

    #[test]
    fn flat_is_constant() {
        let g = synth_terrain(Scenario::Flat, 64, 60.0, 99).unwrap();
        assert!(g.values().iter().all(|v| *v == g.values()[0]));
    }

    #[test]
    fn scenarios_are_deterministic() {
        for s in ["flat", "ramp", "ridge", "valley", "hills"] {
            let s: Scenario = s.parse().unwrap();
            let a = synth_terrain(s, 48, 60.0, 7).unwrap();
            let b = synth_terrain(s, 48, 60.0, 7).unwrap();
            assert_eq!(a.checksum(), b.checksum(), "{s}");
        }
        let a = synth_terrain(Scenario::Hills, 48, 60.0, 1).unwrap();
        let b = synth_terrain(Scenario::Hills, 48, 60.0, 2).unwrap();
        assert_ne!(a.checksum(), b.checksum());
    }

    #[test]
    fn unknown_scenario() {
        assert_eq!(
            "mesa".parse::<Scenario>(),
            Err(TerrainError::UnknownScenario("mesa".into()))
        );
        assert!(matches!(
            synth_terrain(Scenario::Flat, 8, 60.0, 0),
            Err(TerrainError::TooSmall(8))
        ));
    }

    #[test]
    fn ramp_has_configured_grade() {
        let g = synth_terrain(Scenario::Ramp { grade: 0.05 }, 32, 60.0, 0).unwrap();
        for v in gradient_field(&g).values() {
            assert!((v - 0.05).abs() < 1e-9);
        }
    }

    #[test]
    fn ridge_blocks_the_direct_crossing() {
        let g = synth_terrain(Scenario::Ridge, 128, 60.0, 42).unwrap();
        let slope = gradient_field(&g);
        // the global maximum lies on the two crest columns
        let (imax, _) = g
            .values()
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
        let col = g.index_of(imax).col;
        assert!(col == 63 || col == 64, "crest at column {col}");
        // crossing straight east along the middle row is steeper than 2.2%
        for col in [63, 64] {
            assert!(slope.get(GridIndex::new(col, 64)) > 0.022);
        }
    }

    #[test]
    fn valley_flanks_stay_gentle() {
        let g = synth_terrain(Scenario::Valley, 128, 60.0, 0).unwrap();
        let max = gradient_field(&g).values().iter().cloned().fold(0.0, f64::max);
        assert!(max < 0.02, "max valley grade {max}");
    }

    #[test]
    fn floor_polyline_follows_the_valley_floor() {
        let g = synth_terrain(Scenario::Valley, 64, 60.0, 3).unwrap();
        let shape = ValleyShape::new(64, 60.0, 3);
        let pts = shape.floor_polyline(&g);
        assert_eq!(pts.len(), 4 * 64 + 1);
        assert!((pts[0].0 - 32.0 * 60.0).abs() < 60.0);
        for (x, y) in pts {
            let cell = g.snap(x, y).unwrap();
            assert!(g.get(cell) - BASE_ELEVATION < 0.1 * shape.depth, "{cell}");
        }
    }
}
