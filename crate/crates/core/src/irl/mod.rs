//! Cost-map learning from demonstrated routes.
//!
//! Each epoch alternates two steps. Cost estimation runs the encoder-decoder
//! over the terrain features to get a strictly positive cost map. Policy
//! estimation runs A* over that map (under the grade mask) between the
//! demonstration's endpoints. The visitation difference between the
//! demonstration and the prediction is then pushed back through the network.

mod format;
mod model;
mod train;

use crate::nav::{GridIndex, NavConfig, NavError};
use crate::numerics::{NumericsError, Tensor};
use crate::terrain::DemGrid;
use thiserror::Error;

pub use format::{load_model, save_model, MODEL_MAGIC};
pub use model::{init_params, CostModel, ModelParams, UNetCache, ARCHITECTURE, ARCH_VERSION, MIN_SIDE, OUTPUT_INIT_GAIN};
pub use train::{
    cost_forward, irl_epoch, loss_gradient, predict_route, train, visitation, EpochOutcome, EpochRecord,
    TrainingLog,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrlError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("architecture mismatch: {0}")]
    Architecture(String),
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("invalid demonstration: {0}")]
    Demonstration(String),
    #[error("cell {0} is outside the grid")]
    OutOfBounds(GridIndex),
    #[error("no path between the demonstration endpoints at epoch {epoch} (demo {demo})")]
    NoPath { epoch: usize, demo: usize },
    #[error("epoch {epoch}, demo {demo}: {source}")]
    Training {
        epoch: usize,
        demo: usize,
        #[source]
        source: Box<IrlError>,
    },
    #[error(transparent)]
    Nav(#[from] NavError),
    #[error("model format error at offset {offset}: {message}")]
    Format { offset: usize, message: String },
}

impl From<NumericsError> for IrlError {
    fn from(e: NumericsError) -> Self {
        IrlError::Shape(e.to_string())
    }
}

impl IrlError {
    /// Whether this error (or the one it wraps) is a failed policy step.
    pub fn is_no_path(&self) -> bool {
        match self {
            IrlError::NoPath { .. } => true,
            IrlError::Training { source, .. } => source.is_no_path(),
            _ => false,
        }
    }
}

/// Learned per-cell traversal cost. Every value is at least `c_min`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMap {
    pub ncols: usize,
    pub nrows: usize,
    pub c_min: f64,
    pub values: Vec<f64>,
}

impl CostMap {
    /// Same header as `dem`, costs as values.
    pub fn to_grid(&self, dem: &DemGrid) -> DemGrid {
        dem.with_values(self.values.clone())
            .expect("cost map matches its grid")
    }

    pub fn as_tensor(&self) -> Tensor {
        Tensor::new(1, self.nrows, self.ncols, self.values.clone()).expect("cost map shape")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Stop once every demonstration's mean deviation (cells) is at most this.
    pub tolerance: f64,
    pub seed: u64,
    pub c_min: f64,
    pub nav: NavConfig,
    /// Restrict the policy step to the grade mask and grade-admitted edges.
    pub grade_mask: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            max_epochs: 200,
            tolerance: 2.0,
            seed: 0,
            c_min: 1e-3,
            nav: NavConfig::default(),
            grade_mask: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), IrlError> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(IrlError::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.max_epochs == 0 {
            return Err(IrlError::Config("max_epochs must be at least 1".into()));
        }
        if !(self.c_min > 0.0 && self.c_min.is_finite()) {
            return Err(IrlError::Config(format!("c_min must be positive, got {}", self.c_min)));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(IrlError::Config(format!(
                "tolerance must be non-negative, got {}",
                self.tolerance
            )));
        }
        NavConfig::new(self.nav.max_grade, self.nav.track_halfwidth)?;
        Ok(())
    }
}

/// A demonstrated route over its terrain. Start and goal are the first and
/// last route cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Demonstration {
    pub dem: DemGrid,
    pub route: Vec<GridIndex>,
    pub start: GridIndex,
    pub goal: GridIndex,
}

impl Demonstration {
    pub fn new(dem: DemGrid, route: Vec<GridIndex>) -> Result<Self, IrlError> {
        if route.len() < 2 {
            return Err(IrlError::Demonstration(format!(
                "route needs at least 2 cells, got {}",
                route.len()
            )));
        }
        if let Some(c) = route.iter().find(|c| !dem.contains(**c)) {
            return Err(IrlError::OutOfBounds(*c));
        }
        let (start, goal) = (route[0], route[route.len() - 1]);
        Ok(Self {
            dem,
            route,
            start,
            goal,
        })
    }
}
