use super::{CostMap, CostModel, Demonstration, IrlError, ModelParams, TrainConfig};
use crate::eval::mean_deviation_cells;
use crate::nav::{astar, traversability, CostField, GridIndex, Route, SearchSpace, TraversabilityMask};
use crate::numerics::{adam_step, softplus, AdamConfig, OptimizerState, Tensor};
use crate::terrain::{features, DemGrid, TerrainFeatures};

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Runs the model and maps logits to costs with `softplus(z) + c_min`.
/// The logits and cache are returned for the backward pass.
pub fn cost_forward<M: CostModel>(
    model: &M,
    feats: &TerrainFeatures,
    c_min: f64,
) -> Result<(CostMap, Tensor, M::Cache), IrlError> {
    let (logits, cache) = model.logits(&feats.channels)?;
    let (_, nrows, ncols) = logits.shape();
    let values = logits.data().iter().map(|z| softplus(*z) + c_min).collect();
    let map = CostMap {
        ncols,
        nrows,
        c_min,
        values,
    };
    Ok((map, logits, cache))
}

/// 0/1 indicator raster of the route cells.
pub fn visitation(cells: &[GridIndex], ncols: usize, nrows: usize) -> Result<Vec<f64>, IrlError> {
    let mut mu = vec![0.0; ncols * nrows];
    for c in cells {
        if c.col >= ncols || c.row >= nrows {
            return Err(IrlError::OutOfBounds(*c));
        }
        mu[c.row * ncols + c.col] = 1.0;
    }
    Ok(mu)
}

/// `mu_demo - mu_pred` on traversable cells, zero elsewhere.
pub fn loss_gradient(mu_demo: &[f64], mu_pred: &[f64], mask: &TraversabilityMask) -> Vec<f64> {
    mu_demo
        .iter()
        .zip(mu_pred)
        .zip(mask.cells())
        .map(|((d, p), ok)| if *ok { d - p } else { 0.0 })
        .collect()
}

fn policy_mask(dem: &DemGrid, config: &TrainConfig) -> TraversabilityMask {
    if config.grade_mask {
        traversability(dem, &config.nav)
    } else {
        TraversabilityMask::data_cells(dem)
    }
}

fn policy_step(
    dem: &DemGrid,
    mask: &TraversabilityMask,
    costs: &CostMap,
    start: GridIndex,
    goal: GridIndex,
    config: &TrainConfig,
) -> Result<Option<Route>, IrlError> {
    let max_grade = config.grade_mask.then_some(config.nav.max_grade);
    let space = SearchSpace::new(dem, mask, CostField::Cells(&costs.values), max_grade)?;
    Ok(astar(&space, start, goal)?)
}

/// Inference: cost map plus the A* route over it under the config's mask.
/// `Ok(None)` when the goal is unreachable.
pub fn predict_route<M: CostModel>(
    model: &M,
    dem: &DemGrid,
    start: GridIndex,
    goal: GridIndex,
    config: &TrainConfig,
) -> Result<(CostMap, Option<Route>), IrlError> {
    let (costs, _, _) = cost_forward(model, &features(dem), config.c_min)?;
    let mask = policy_mask(dem, config);
    let route = policy_step(dem, &mask, &costs, start, goal, config)?;
    Ok((costs, route))
}

/// What one epoch on one demonstration produced, before the update.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochOutcome {
    pub route: Route,
    pub mean_deviation_cells: f64,
    pub path_cost: f64,
}

/// One cost-estimation / policy-estimation round on `demo`, followed by an
/// Adam update. `epoch` and `demo_index` only label errors.
pub fn irl_epoch<M: CostModel>(
    model: &mut M,
    optimizer: &mut OptimizerState,
    demo: &Demonstration,
    config: &TrainConfig,
    epoch: usize,
    demo_index: usize,
) -> Result<EpochOutcome, IrlError> {
    let dem = &demo.dem;
    let feats = features(dem);
    let (costs, logits, cache) = cost_forward(model, &feats, config.c_min)?;
    let mask = policy_mask(dem, config);
    let route = policy_step(dem, &mask, &costs, demo.start, demo.goal, config)?.ok_or(
        IrlError::NoPath {
            epoch,
            demo: demo_index,
        },
    )?;

    let (w, h) = (dem.ncols(), dem.nrows());
    let mu_demo = visitation(&demo.route, w, h)?;
    let mu_pred = visitation(&route.cells, w, h)?;
    let grad_cost = loss_gradient(&mu_demo, &mu_pred, &mask);
    let grad_logits: Vec<f64> = grad_cost
        .iter()
        .zip(logits.data())
        .map(|(g, z)| g * sigmoid(*z))
        .collect();
    let grad_logits = Tensor::new(1, h, w, grad_logits)?;
    let grads = model.backward(&cache, &grad_logits)?;
    let mut params = model.flat_params();
    adam_step(&mut params, &grads, optimizer)?;
    model.set_flat_params(&params);

    let deviation = mean_deviation_cells(&route.cells, &demo.route)
        .expect("both routes are non-empty");
    Ok(EpochOutcome {
        path_cost: route.total_cost,
        mean_deviation_cells: deviation,
        route,
    })
}

/// One row of the training log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub demo: usize,
    pub mean_deviation_cells: f64,
    pub path_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingLog {
    pub records: Vec<EpochRecord>,
    pub epochs_run: usize,
    pub converged: bool,
}

/// Trains a fresh network from `config.seed`, visiting demonstrations in
/// order once per epoch. Stops after the first epoch in which every
/// demonstration's deviation is within tolerance.
pub fn train(demos: &[Demonstration], config: &TrainConfig) -> Result<(ModelParams, TrainingLog), IrlError> {
    config.validate()?;
    if demos.is_empty() {
        return Err(IrlError::Demonstration("at least one demonstration is required".into()));
    }
    let mut model = super::init_params(config.seed);
    let adam = AdamConfig {
        learning_rate: config.learning_rate,
        ..AdamConfig::default()
    };
    let mut optimizer = OptimizerState::new(model.param_count(), adam);
    let mut log = TrainingLog {
        records: Vec::new(),
        epochs_run: 0,
        converged: false,
    };
    for epoch in 0..config.max_epochs {
        let mut worst = 0.0f64;
        for (i, demo) in demos.iter().enumerate() {
            let out = irl_epoch(&mut model, &mut optimizer, demo, config, epoch, i).map_err(|e| match e {
                e @ IrlError::NoPath { .. } => e,
                other => IrlError::Training {
                    epoch,
                    demo: i,
                    source: Box::new(other),
                },
            })?;
            worst = worst.max(out.mean_deviation_cells);
            log.records.push(EpochRecord {
                epoch,
                demo: i,
                mean_deviation_cells: out.mean_deviation_cells,
                path_cost: out.path_cost,
            });
        }
        log.epochs_run = epoch + 1;
        if worst <= config.tolerance {
            log.converged = true;
            break;
        }
    }
    Ok((model, log))
}
