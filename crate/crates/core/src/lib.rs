//! Terrain-aware route prediction for large transport corridors.
//!
//! The crate is organised bottom-up:
//!
//! - [`terrain`]: elevation grids, ESRI ASCII I/O, slope fields, feature
//!   channels and synthetic test terrain.
//! - [`numerics`]: a small double-precision tensor kernel with hand-written
//!   backward passes, Adam, and a finite-difference gradient checker.
//! - [`nav`]: grade-limited traversability, A* with a Dijkstra oracle,
//!   heading extension, polyline rasterization and GeoJSON routes.
//! - [`irl`]: the encoder-decoder cost model and the two-step inverse
//!   reinforcement learning loop.
//! - [`eval`]: deviation metrics against ground truth and imagery corridors.

pub mod eval;
pub mod irl;
pub mod nav;
pub mod numerics;
pub mod terrain;

pub use nav::{GridIndex, NavConfig, Route};
pub use terrain::DemGrid;
