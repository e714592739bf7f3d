use crate::{CliError, CostmapArgs, EvalArgs, Mode, ModelArgs, PredictArgs, SlopeArgs, SynthArgs, TrainArgs};
use railroute_core::eval::{corridor, path_metrics, report};
use railroute_core::irl::{self, init_params, load_model, save_model, Demonstration, ModelParams, TrainConfig};
use railroute_core::nav::{
    astar, extend_heading, polyline_to_cells, rasterize_polyline, route_from_geojson, route_to_geojson,
    traversability, verify_route, CostField, GridIndex, NavConfig, Route, SearchSpace, TraversabilityMask,
    WorldPoint,
};
use railroute_core::terrain::{features, gradient_field, load_asc, save_asc, synth_terrain, DemGrid, Scenario, ValleyShape};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(CliError::io(path))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(CliError::io(path))
}

fn load_dem(path: &Path) -> Result<DemGrid, CliError> {
    load_asc(&read_text(path)?).map_err(|e| CliError::format(path, e))
}

/// Route file cells on `dem`, plus its recorded cost when present.
fn load_route(path: &Path, dem: &DemGrid) -> Result<(Vec<GridIndex>, Option<f64>), CliError> {
    let doc = route_from_geojson(&read_text(path)?).map_err(|e| CliError::format(path, e))?;
    let cells = polyline_to_cells(&doc.points(), dem).map_err(|e| CliError::format(path, e))?;
    Ok((cells, doc.total_cost))
}

fn load_or_init_model(args: &ModelArgs) -> Result<ModelParams, CliError> {
    match &args.model {
        Some(path) => {
            let bytes = fs::read(path).map_err(CliError::io(path))?;
            load_model(&bytes).map_err(|e| CliError::Model {
                path: path.clone(),
                message: e.to_string(),
            })
        }
        None => Ok(init_params(args.seed)),
    }
}

/// Rejects an output path that is also one of the inputs.
fn check_distinct(inputs: &[&Path], outputs: &[&Path]) -> Result<(), CliError> {
    let key = |p: &Path| std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf());
    for (k, out) in outputs.iter().enumerate() {
        let o = key(out);
        if inputs.iter().chain(&outputs[..k]).any(|p| key(p) == o) {
            return Err(CliError::Usage(format!(
                "{} is used more than once; inputs and outputs must be distinct",
                out.display()
            )));
        }
    }
    Ok(())
}

/// Independent check of every emitted route.
fn verified(dem: &DemGrid, mask: Option<&TraversabilityMask>, route: &Route, max_grade: f64) -> Result<(), CliError> {
    verify_route(dem, mask, &route.cells, max_grade)
        .map_err(|v| CliError::Internal(format!("emitted route failed verification: {v:?}")))
}

pub fn synth(args: &SynthArgs) -> Result<(), CliError> {
    let mut outputs = vec![args.out.as_path()];
    outputs.extend(args.truth_out.as_deref());
    check_distinct(&[], &outputs)?;
    let dem = synth_terrain(args.scenario, args.size, args.cellsize, args.seed)?;
    write(&args.out, save_asc(&dem))?;
    if let Some(path) = &args.truth_out {
        if args.scenario != Scenario::Valley {
            return Err(CliError::Usage("--truth-out needs --scenario valley".into()));
        }
        let floor: Vec<WorldPoint> = ValleyShape::new(args.size, args.cellsize, args.seed)
            .floor_polyline(&dem)
            .into_iter()
            .map(|(x, y)| WorldPoint::new(x, y))
            .collect();
        let cells = rasterize_polyline(&floor, &dem)?;
        let mask = TraversabilityMask::data_cells(&dem);
        let space = SearchSpace::new(&dem, &mask, CostField::Geometric, None)?;
        let cost = space
            .route_cost(&cells)
            .ok_or_else(|| CliError::Internal("valley floor is not a connected cell route".into()))?;
        let route = Route::new(cells, cost);
        verified(&dem, None, &route, NavConfig::default().max_grade)?;
        write(path, route_to_geojson(&route, &dem))?;
    }
    println!("{}", dem.checksum());
    Ok(())
}

pub fn slope(args: &SlopeArgs) -> Result<(), CliError> {
    check_distinct(&[&args.dem], &[&args.out])?;
    let dem = load_dem(&args.dem)?;
    write(&args.out, save_asc(&gradient_field(&dem)))
}

pub fn predict(args: &PredictArgs) -> Result<(), CliError> {
    let mut inputs = vec![args.dem.as_path()];
    inputs.extend(args.extend_from.as_deref());
    inputs.extend(args.model.model.as_deref());
    check_distinct(&inputs, &[&args.out])?;

    let dem = load_dem(&args.dem)?;
    let nav = args.nav.config()?;
    let (start, goal) = match (&args.extend_from, args.start, args.end) {
        (Some(path), _, _) => {
            let (prefix, _) = load_route(path, &dem)?;
            let distance = args.distance.expect("clap requires --distance");
            let goal = extend_heading(&prefix, distance, &dem)?;
            (*prefix.last().expect("routes are non-empty"), goal)
        }
        (None, Some(s), Some(e)) => (s.resolve(&dem)?, e.resolve(&dem)?),
        _ => return Err(CliError::Usage("give --start and --end, or --extend-from".into())),
    };

    let mask = traversability(&dem, &nav);
    let route = match args.mode {
        Mode::Geometric => {
            let space = SearchSpace::new(&dem, &mask, CostField::Geometric, Some(nav.max_grade))?;
            astar(&space, start, goal)?
        }
        Mode::Irl => {
            let model = load_or_init_model(&args.model)?;
            let config = TrainConfig {
                c_min: args.model.c_min,
                nav,
                ..TrainConfig::default()
            };
            config.validate()?;
            irl::predict_route(&model, &dem, start, goal, &config)?.1
        }
    };
    let route = route.ok_or_else(|| {
        CliError::NoPath(format!(
            "no route from {start} to {goal} within grade {} (track half-width {})",
            nav.max_grade, nav.track_halfwidth
        ))
    })?;
    verified(&dem, Some(&mask), &route, nav.max_grade)?;
    write(&args.out, route_to_geojson(&route, &dem))
}

#[derive(Serialize)]
struct LogRow {
    epoch: usize,
    demo: usize,
    mean_deviation_cells: f64,
    path_cost: f64,
}

pub fn train(args: &TrainArgs) -> Result<(), CliError> {
    if args.dem.len() != args.route.len() {
        return Err(CliError::Usage(format!(
            "{} --dem but {} --route; they pair up in order",
            args.dem.len(),
            args.route.len()
        )));
    }
    let inputs: Vec<&Path> = args.dem.iter().chain(&args.route).map(PathBuf::as_path).collect();
    let mut outputs = vec![args.out.as_path()];
    outputs.extend(args.log.as_deref());
    check_distinct(&inputs, &outputs)?;

    let config = TrainConfig {
        learning_rate: args.lr,
        max_epochs: args.epochs,
        tolerance: args.tolerance,
        seed: args.seed,
        c_min: args.c_min,
        nav: args.nav.config()?,
        grade_mask: !args.no_grade_mask,
    };
    config.validate()?;
    let demos = args
        .dem
        .iter()
        .zip(&args.route)
        .map(|(d, r)| {
            let dem = load_dem(d)?;
            let (cells, _) = load_route(r, &dem)?;
            Demonstration::new(dem, cells).map_err(|e| CliError::format(r, e))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let (model, log) = irl::train(&demos, &config)?;
    write(&args.out, save_model(&model))?;
    if let Some(path) = &args.log {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &log.records {
            w.serialize(LogRow {
                epoch: r.epoch,
                demo: r.demo,
                mean_deviation_cells: r.mean_deviation_cells,
                path_cost: r.path_cost,
            })
            .map_err(|e| CliError::Internal(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
        write(path, bytes)?;
    }
    let last = log.records.last().expect("at least one epoch ran");
    println!(
        "epochs {} converged {} final_deviation_cells {}",
        log.epochs_run, log.converged, last.mean_deviation_cells
    );
    Ok(())
}

pub fn costmap(args: &CostmapArgs) -> Result<(), CliError> {
    let mut inputs = vec![args.dem.as_path()];
    inputs.extend(args.model.model.as_deref());
    check_distinct(&inputs, &[&args.out])?;
    let dem = load_dem(&args.dem)?;
    let model = load_or_init_model(&args.model)?;
    let config = TrainConfig {
        c_min: args.model.c_min,
        ..TrainConfig::default()
    };
    config.validate()?;
    let (map, _, _) = irl::cost_forward(&model, &features(&dem), config.c_min)?;
    let values = map
        .values
        .iter()
        .zip(dem.values())
        .map(|(c, z)| if *z == dem.nodata() { dem.nodata() } else { *c })
        .collect();
    write(&args.out, save_asc(&dem.with_values(values)?))
}

pub fn eval(args: &EvalArgs) -> Result<(), CliError> {
    let dem = load_dem(&args.dem)?;
    let (pred, pred_cost) = load_route(&args.pred, &dem)?;
    let (truth, _) = load_route(&args.truth, &dem)?;
    let coverage = args.coverage_radius.unwrap_or(dem.cellsize());
    let metrics = path_metrics(&pred, &truth, dem.cellsize(), coverage).map_err(|e| CliError::Usage(e.to_string()))?;
    let band = corridor(&Route::new(pred, pred_cost.unwrap_or(0.0)), args.radius, &dem)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    print!("{}", report(&metrics, &band));
    Ok(())
}
