//! Scenario runners: parameter sweeps over the core models, CSV emission
//! and the run manifest. Re-running an identical configuration reproduces
//! byte-identical outputs.

use std::fmt::Write as _;
use std::path::PathBuf;

use surveil_core::a2a::{self, GeometryMode};
use surveil_core::a2g::{self, RayContribution};
use surveil_core::airspace::{Deployment, Layer};
use surveil_core::units;

use crate::config::{CoverageEngine, ExperimentConfig, McMode, Scenario};
use crate::{traj, CliError};

/// Files written by a run, in emission order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunArtifacts {
    pub files: Vec<PathBuf>,
}

/// Derive a per-point seed so sweep points consume independent substreams.
fn point_seed(seed: u64, index: u64) -> u64 {
    seed ^ (index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Map `f` over `items` on however many threads are available, preserving
/// input order in the output.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let n = items.len();
    if n == 0 {
        return Vec::new();
    }
    let threads = std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1).min(n);
    let chunk = n.div_ceil(threads);
    let mut out: Vec<Option<U>> = Vec::with_capacity(n);
    out.resize_with(n, || None);
    std::thread::scope(|scope| {
        for (item_chunk, out_chunk) in items.chunks(chunk).zip(out.chunks_mut(chunk)) {
            scope.spawn(|| {
                for (item, slot) in item_chunk.iter().zip(out_chunk.iter_mut()) {
                    *slot = Some(f(item));
                }
            });
        }
    });
    out.into_iter().map(|slot| slot.expect("par_map filled every slot")).collect()
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![lo];
    }
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

/// Run one configured experiment, writing its artifacts under
/// `config.out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunArtifacts, CliError> {
    let mut outputs: Vec<(String, String)> = Vec::new();

    match config.scenario {
        Scenario::A2gSweep => outputs.push(("a2g_sweep.csv".into(), a2g_sweep_csv(config)?)),
        Scenario::A2aDensity => outputs.push(("a2a_density.csv".into(), a2a_density_csv(config)?)),
        Scenario::A2aPower => outputs.push(("a2a_power.csv".into(), a2a_power_csv(config)?)),
        Scenario::A2aPathloss => {
            outputs.push(("a2a_pathloss.csv".into(), a2a_pathloss_csv(config)?))
        }
        Scenario::Trajectory => {
            let input = config.trajectory.input_sbs.as_ref().expect("validated at parse");
            let (optimized, stats) = traj::process_sbs_file(
                input,
                config.trajectory.window_n,
                config.trajectory.order_p,
                config.trajectory.degeneracy_threshold,
            )?;
            outputs.push(("optimized.sbs".into(), optimized));
            outputs.push(("trajectory_stats.txt".into(), stats));
        }
    }

    if config.airspace.export_deployment && config.scenario != Scenario::Trajectory {
        outputs.push(("deployment.csv".into(), deployment_csv(config)?));
    }
    outputs.push(("manifest.txt".into(), manifest(config)));

    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| CliError::io(&format!("creating {}", config.out_dir.display()), e))?;
    let mut files = Vec::new();
    for (name, content) in outputs {
        let path = config.out_dir.join(&name);
        std::fs::write(&path, content)
            .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))?;
        files.push(path);
    }
    Ok(RunArtifacts { files })
}

fn a2g_sweep_csv(config: &ExperimentConfig) -> Result<String, CliError> {
    let settings = &config.a2g;
    let mut heights = Vec::new();
    let mut h = settings.height_min_m;
    while h <= settings.height_max_m + 1e-9 {
        heights.push(h);
        h += settings.height_step_m;
    }
    let gs_height = config.airspace.gs_height_m;
    // Validate once; per-height rebuilds only change the UAV height.
    config.a2g.to_core(heights[0].max(gs_height + 1.0), gs_height)?;

    let rows = par_map(&heights, |&height| -> Result<String, CliError> {
        let params = config.a2g.to_core(height, gs_height)?;
        let geom = a2g::solve_geometry(&params, settings.ground_arc_m)
            .map_err(|e| CliError::Numerical(format!("height {height} m: {e}")))?;
        let ray = RayContribution::specular(&params, &geom)
            .map_err(|e| CliError::Numerical(format!("height {height} m: {e}")))?;
        let p_g = a2g::received_power(&params, &geom, &[ray])
            .map_err(|e| CliError::Numerical(format!("height {height} m: {e}")))?;
        let pl = a2g::path_loss(&params, p_g);
        let idx = ((height - settings.height_min_m) / settings.height_step_m) as u64;
        let fade = a2g::fade_averaged_path_loss(
            &params,
            p_g,
            point_seed(config.seed, idx),
            settings.fade_trials,
        );
        let snr = a2g::snr(&params, p_g);
        Ok(format!("{height},{},{},{}\n", pl.db, fade.db, snr.db))
    });

    let mut csv = String::from("height_m,pl_db_nofade,pl_db_fade,snr_db\n");
    for row in rows {
        csv.push_str(&row?);
    }
    Ok(csv)
}

fn a2a_density_csv(config: &ExperimentConfig) -> Result<String, CliError> {
    let airspace = config.airspace.to_core()?;
    let scenario = config.a2a.to_core(&airspace)?;
    let lo = config.a2a.density_min_count.min(config.a2a.density_max_count);
    let hi = config.a2a.density_max_count.max(config.a2a.density_min_count);
    let mut grid = Vec::new();
    let mut d = lo;
    while d <= hi + 1e-9 {
        grid.push(d);
        d += 1.0;
    }
    let table = a2a::mean_sinr_vs_density(&scenario, &grid, config.trials, config.seed)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut csv = String::from("density,mean_sinr_db\n");
    for (density, sinr_db) in table {
        let _ = writeln!(csv, "{density},{sinr_db}");
    }
    Ok(csv)
}

fn coverage_at(
    config: &ExperimentConfig,
    scenario: &surveil_core::a2a::A2aScenario,
) -> Result<f64, CliError> {
    match config.a2a.method {
        CoverageEngine::Analytic => {
            let result = a2a::coverage_analytic(
                scenario,
                scenario.central_position(),
                scenario.layer.diagonal(),
            )
            .map_err(|e| CliError::Numerical(e.to_string()))?;
            Ok(result.probability)
        }
        CoverageEngine::MonteCarlo => {
            let mode = match config.a2a.mc_mode {
                McMode::SphereLaw => GeometryMode::SphereLaw,
                McMode::Box => GeometryMode::Box,
            };
            let result = a2a::coverage_monte_carlo(scenario, config.trials, config.seed, mode)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            Ok(result.probability)
        }
    }
}

fn a2a_power_csv(config: &ExperimentConfig) -> Result<String, CliError> {
    let airspace = config.airspace.to_core()?;
    let base = config.a2a.to_core(&airspace)?;
    let powers = linspace(config.a2a.power_min_w, config.a2a.power_max_w, config.a2a.power_steps);
    let mut points = Vec::new();
    for &p_s in &powers {
        for &theta_db in &config.a2a.theta_db_list {
            points.push((p_s, theta_db));
        }
    }
    let rows = par_map(&points, |&(p_s, theta_db)| -> Result<String, CliError> {
        let mut scenario = base.clone();
        scenario.sub_tx_power = p_s;
        scenario.threshold = units::db_to_linear(theta_db);
        let coverage = coverage_at(config, &scenario)?;
        Ok(format!("{p_s},{theta_db},{coverage}\n"))
    });
    let mut csv = String::from("p_s_watts,theta_db,coverage\n");
    for row in rows {
        csv.push_str(&row?);
    }
    Ok(csv)
}

fn a2a_pathloss_csv(config: &ExperimentConfig) -> Result<String, CliError> {
    let airspace = config.airspace.to_core()?;
    let base = config.a2a.to_core(&airspace)?;
    let deltas = linspace(config.a2a.delta_min, config.a2a.delta_max, config.a2a.delta_steps);
    let mut points = Vec::new();
    for &delta in &deltas {
        for &theta_db in &config.a2a.theta_db_list {
            points.push((delta, theta_db));
        }
    }
    let rows = par_map(&points, |&(delta, theta_db)| -> Result<String, CliError> {
        let mut scenario = base.clone();
        scenario.path_loss_exponent = delta;
        scenario.threshold = units::db_to_linear(theta_db);
        let coverage = coverage_at(config, &scenario)?;
        Ok(format!("{delta},{theta_db},{coverage}\n"))
    });
    let mut csv = String::from("delta,theta_db,coverage\n");
    for row in rows {
        csv.push_str(&row?);
    }
    Ok(csv)
}

fn deployment_csv(config: &ExperimentConfig) -> Result<String, CliError> {
    let airspace = config.airspace.to_core()?;
    let deployment = Deployment::sample(&airspace, config.seed)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut csv = String::from("layer,x,y,z\n");
    for (label, points) in
        [("low", &deployment.low_uavs), ("high", &deployment.high_uavs)]
    {
        for p in points {
            let _ = writeln!(csv, "{label},{},{},{}", p[0], p[1], p[2]);
        }
    }
    let c = deployment.central_low;
    let _ = writeln!(csv, "central_low,{},{},{}", c[0], c[1], c[2]);
    let c = deployment.central_high;
    let _ = writeln!(csv, "central_high,{},{},{}", c[0], c[1], c[2]);
    Ok(csv)
}

fn manifest(config: &ExperimentConfig) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "tool = surveil {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "scenario = {}", config.scenario.name());
    let _ = writeln!(m, "config_hash = {:016x}", config.config_hash);
    let _ = writeln!(m, "seed = {}", config.seed);
    let _ = writeln!(m, "trials = {}", config.trials);
    let a = &config.airspace;
    let _ = writeln!(m, "airspace.half_extent_x_m = {}", a.half_extent_x_m);
    let _ = writeln!(m, "airspace.half_extent_y_m = {}", a.half_extent_y_m);
    let _ = writeln!(m, "airspace.layer_thickness_m = {}", a.layer_thickness_m);
    let _ = writeln!(m, "airspace.isolation_thickness_m = {}", a.isolation_thickness_m);
    let _ = writeln!(m, "airspace.gs_height_m = {}", a.gs_height_m);
    let _ = writeln!(m, "airspace.density_low_count = {}", a.density_low_count);
    let _ = writeln!(m, "airspace.density_high_count = {}", a.density_high_count);
    match config.scenario {
        Scenario::A2gSweep => {
            let g = &config.a2g;
            let _ = writeln!(m, "a2g.frequency_hz = {}", g.frequency_hz);
            let _ = writeln!(m, "a2g.wavelength_m = {}", units::wavelength(g.frequency_hz));
            let _ = writeln!(m, "a2g.bandwidth_hz = {}", g.bandwidth_hz);
            let _ = writeln!(m, "a2g.tx_power_w = {}", g.tx_power_w);
            let _ = writeln!(m, "a2g.total_gain_dbi = {}", g.total_gain_dbi);
            let _ =
                writeln!(m, "a2g.total_gain_linear = {}", units::dbi_to_linear(g.total_gain_dbi));
            let _ = writeln!(m, "a2g.noise_density_dbm_per_hz = {}", g.noise_density_dbm_per_hz);
            let _ = writeln!(
                m,
                "a2g.noise_density_w_per_hz = {}",
                units::dbm_per_hz_to_w_per_hz(g.noise_density_dbm_per_hz)
            );
            let _ = writeln!(m, "a2g.rice_factor = {}", g.rice_factor);
            let _ = writeln!(m, "a2g.ground_arc_m = {}", g.ground_arc_m);
            let _ = writeln!(m, "a2g.fade_trials = {}", g.fade_trials);
        }
        Scenario::Trajectory => {
            let t = &config.trajectory;
            if let Some(path) = &t.input_sbs {
                let _ = writeln!(m, "trajectory.input_sbs = {}", path.display());
            }
            let _ = writeln!(m, "trajectory.window_n = {}", t.window_n);
            let _ = writeln!(m, "trajectory.order_p = {}", t.order_p);
            let _ = writeln!(m, "trajectory.degeneracy_threshold = {}", t.degeneracy_threshold);
        }
        _ => {
            let s = &config.a2a;
            let _ = writeln!(m, "a2a.layer = {}", match s.layer {
                Layer::Low => "low",
                Layer::High => "high",
            });
            let _ = writeln!(m, "a2a.bandwidth_hz = {}", s.bandwidth_hz);
            let _ = writeln!(m, "a2a.noise_density_dbm_per_hz = {}", s.noise_density_dbm_per_hz);
            let _ = writeln!(
                m,
                "a2a.noise_power_w = {}",
                units::dbm_per_hz_to_w_per_hz(s.noise_density_dbm_per_hz) * s.bandwidth_hz
            );
            let _ = writeln!(m, "a2a.total_gain_dbi = {}", s.total_gain_dbi);
            let _ =
                writeln!(m, "a2a.total_gain_linear = {}", units::dbi_to_linear(s.total_gain_dbi));
            let _ = writeln!(m, "a2a.tx_power_w = {}", s.tx_power_w);
            let _ = writeln!(m, "a2a.path_loss_exponent = {}", s.path_loss_exponent);
            let _ = writeln!(m, "a2a.threshold_db = {}", s.threshold_db);
            let _ =
                writeln!(m, "a2a.threshold_linear = {}", units::db_to_linear(s.threshold_db));
            let _ = writeln!(m, "a2a.density_count = {}", s.density_count);
            let _ = writeln!(m, "a2a.fading_shape = {}", s.fading_shape);
            let _ = writeln!(m, "a2a.method = {}", match s.method {
                CoverageEngine::Analytic => "analytic",
                CoverageEngine::MonteCarlo => "monte_carlo",
            });
            let _ = writeln!(m, "a2a.mc_mode = {}", match s.mc_mode {
                McMode::SphereLaw => "sphere_law",
                McMode::Box => "box",
            });
        }
    }
    m
}
