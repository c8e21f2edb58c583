//! Plain-text experiment configuration: `key = value` pairs in per-module
//! sections, defaults mirroring the simulation parameter table, unknown or
//! duplicate keys rejected, unit suffixes required on dimensioned keys.

use std::collections::HashSet;
use std::path::PathBuf;

use surveil_core::a2a::A2aScenario;
use surveil_core::a2g::A2gParams;
use surveil_core::airspace::{AirspaceConfig, Layer};
use surveil_core::units;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    A2gSweep,
    A2aDensity,
    A2aPower,
    A2aPathloss,
    Trajectory,
}

impl Scenario {
    fn parse(value: &str, line: usize) -> Result<Self, CliError> {
        match value {
            "a2g_sweep" => Ok(Scenario::A2gSweep),
            "a2a_density" => Ok(Scenario::A2aDensity),
            "a2a_power" => Ok(Scenario::A2aPower),
            "a2a_pathloss" => Ok(Scenario::A2aPathloss),
            "trajectory" => Ok(Scenario::Trajectory),
            other => Err(CliError::Config(format!(
                "line {line}: unknown scenario {other:?} (expected a2g_sweep, a2a_density, \
                 a2a_power, a2a_pathloss or trajectory)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::A2gSweep => "a2g_sweep",
            Scenario::A2aDensity => "a2a_density",
            Scenario::A2aPower => "a2a_power",
            Scenario::A2aPathloss => "a2a_pathloss",
            Scenario::Trajectory => "trajectory",
        }
    }

    fn is_stochastic(&self) -> bool {
        !matches!(self, Scenario::Trajectory)
    }
}

/// Airspace geometry settings (meters / expected counts per layer).
#[derive(Debug, Clone, PartialEq)]
pub struct AirspaceSettings {
    pub half_extent_x_m: f64,
    pub half_extent_y_m: f64,
    pub layer_thickness_m: f64,
    pub isolation_thickness_m: f64,
    pub gs_height_m: f64,
    pub central_low_height_m: f64,
    pub central_high_height_m: f64,
    pub density_low_count: f64,
    pub density_high_count: f64,
    pub max_service_range_m: f64,
    pub export_deployment: bool,
}

impl Default for AirspaceSettings {
    fn default() -> Self {
        Self {
            half_extent_x_m: 15_000.0,
            half_extent_y_m: 15_000.0,
            layer_thickness_m: 4500.0,
            isolation_thickness_m: 1000.0,
            gs_height_m: 50.0,
            central_low_height_m: 2250.0,
            central_high_height_m: 7750.0,
            density_low_count: 20.0,
            density_high_count: 20.0,
            max_service_range_m: 45_000.0,
            export_deployment: false,
        }
    }
}

impl AirspaceSettings {
    pub fn to_core(&self) -> Result<AirspaceConfig, CliError> {
        let cfg = AirspaceConfig {
            half_extent_x: self.half_extent_x_m,
            half_extent_y: self.half_extent_y_m,
            layer_thickness: self.layer_thickness_m,
            isolation_thickness: self.isolation_thickness_m,
            density_low: 0.0,
            density_high: 0.0,
            gs_position: [0.0, 0.0, self.gs_height_m],
            central_low_height: self.central_low_height_m,
            central_high_height: self.central_high_height_m,
            max_service_range: self.max_service_range_m,
        }
        .with_expected_counts(self.density_low_count, self.density_high_count);
        cfg.validate().map_err(|e| CliError::Config(format!("[airspace] {e}")))?;
        Ok(cfg)
    }
}

/// Air-to-ground sweep settings (5G downlink by default).
#[derive(Debug, Clone, PartialEq)]
pub struct A2gSettings {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub tx_power_w: f64,
    pub total_gain_dbi: f64,
    pub rel_permittivity: f64,
    pub conductivity_s_per_m: f64,
    pub noise_density_dbm_per_hz: f64,
    pub beamwidth_rad: f64,
    pub rice_factor: f64,
    pub earth_radius_m: f64,
    pub ground_arc_m: f64,
    pub height_min_m: f64,
    pub height_max_m: f64,
    pub height_step_m: f64,
    pub fade_trials: u64,
}

impl Default for A2gSettings {
    fn default() -> Self {
        Self {
            frequency_hz: 3.5e9,
            bandwidth_hz: 100.0e6,
            tx_power_w: 20.0,
            total_gain_dbi: 20.0,
            rel_permittivity: 15.0,
            conductivity_s_per_m: 5.0e3,
            noise_density_dbm_per_hz: -174.0,
            beamwidth_rad: 0.35,
            rice_factor: 3.0,
            earth_radius_m: 6.371e6,
            ground_arc_m: 10_000.0,
            height_min_m: 500.0,
            height_max_m: 4500.0,
            height_step_m: 10.0,
            fade_trials: 10_000,
        }
    }
}

impl A2gSettings {
    pub fn to_core(&self, uav_height_m: f64, gs_height_m: f64) -> Result<A2gParams, CliError> {
        let params = A2gParams {
            earth_radius: self.earth_radius_m,
            frequency: self.frequency_hz,
            wavelength: units::wavelength(self.frequency_hz),
            bandwidth: self.bandwidth_hz,
            tx_power: self.tx_power_w,
            total_gain: units::dbi_to_linear(self.total_gain_dbi),
            rel_permittivity: self.rel_permittivity,
            conductivity: self.conductivity_s_per_m,
            vacuum_permittivity: units::VACUUM_PERMITTIVITY,
            noise_density: units::dbm_per_hz_to_w_per_hz(self.noise_density_dbm_per_hz),
            beamwidth: self.beamwidth_rad,
            rice_factor: self.rice_factor,
            uav_height: uav_height_m,
            gs_height: gs_height_m,
        };
        params.validate().map_err(|e| CliError::Config(format!("[a2g] {e}")))?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageEngine {
    Analytic,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McMode {
    SphereLaw,
    Box,
}

/// Air-to-air settings; the layer selection picks bandwidth-independent
/// geometry from the airspace section.
#[derive(Debug, Clone, PartialEq)]
pub struct A2aSettings {
    pub bandwidth_hz: f64,
    pub noise_density_dbm_per_hz: f64,
    pub total_gain_dbi: f64,
    pub tx_power_w: f64,
    pub path_loss_exponent: f64,
    pub threshold_db: f64,
    pub density_count: f64,
    pub fading_shape: f64,
    pub layer: Layer,
    pub method: CoverageEngine,
    pub mc_mode: McMode,
    pub power_min_w: f64,
    pub power_max_w: f64,
    pub power_steps: usize,
    pub theta_db_list: Vec<f64>,
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_steps: usize,
    pub density_min_count: f64,
    pub density_max_count: f64,
}

impl Default for A2aSettings {
    fn default() -> Self {
        Self {
            bandwidth_hz: 100.0e6,
            noise_density_dbm_per_hz: -174.0,
            total_gain_dbi: 23.0,
            tx_power_w: 20.0,
            path_loss_exponent: 2.0,
            threshold_db: -14.0,
            density_count: 20.0,
            fading_shape: 1.0,
            layer: Layer::Low,
            method: CoverageEngine::Analytic,
            mc_mode: McMode::SphereLaw,
            power_min_w: 1.0,
            power_max_w: 20.0,
            power_steps: 20,
            theta_db_list: vec![-14.0, -12.25, -10.5, -8.75, -7.0],
            delta_min: 2.0,
            delta_max: 4.9,
            delta_steps: 30,
            density_min_count: 1.0,
            density_max_count: 60.0,
        }
    }
}

impl A2aSettings {
    pub fn to_core(&self, airspace: &AirspaceConfig) -> Result<A2aScenario, CliError> {
        let layer_box = airspace.layer_box(self.layer);
        let scenario = A2aScenario {
            sub_tx_power: self.tx_power_w,
            total_gain: units::dbi_to_linear(self.total_gain_dbi),
            noise_power: units::dbm_per_hz_to_w_per_hz(self.noise_density_dbm_per_hz)
                * self.bandwidth_hz,
            path_loss_exponent: self.path_loss_exponent,
            threshold: units::db_to_linear(self.threshold_db),
            density: self.density_count / layer_box.volume(),
            fading_shape: self.fading_shape,
            layer: layer_box,
        };
        scenario.validate().map_err(|e| CliError::Config(format!("[a2a] {e}")))?;
        Ok(scenario)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySettings {
    pub input_sbs: Option<PathBuf>,
    pub window_n: usize,
    pub order_p: f64,
    pub degeneracy_threshold: f64,
}

impl Default for TrajectorySettings {
    fn default() -> Self {
        Self { input_sbs: None, window_n: 5, order_p: 2.0, degeneracy_threshold: 1e-9 }
    }
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub trials: u64,
    pub out_dir: PathBuf,
    pub airspace: AirspaceSettings,
    pub a2g: A2gSettings,
    pub a2a: A2aSettings,
    pub trajectory: TrajectorySettings,
    /// FNV-1a of the raw config text, recorded in the manifest.
    pub config_hash: u64,
}

fn parse_num(value: &str, line: usize, key: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Config(format!("line {line}: malformed number for {key}: {value:?}")))
}

fn parse_count(value: &str, line: usize, key: &str) -> Result<u64, CliError> {
    value
        .parse::<u64>()
        .map_err(|_| CliError::Config(format!("line {line}: malformed integer for {key}: {value:?}")))
}

fn parse_bool(value: &str, line: usize, key: &str) -> Result<bool, CliError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(CliError::Config(format!("line {line}: expected true/false for {key}"))),
    }
}

fn parse_list(value: &str, line: usize, key: &str) -> Result<Vec<f64>, CliError> {
    value.split(',').map(|item| parse_num(item.trim(), line, key)).collect()
}

fn positive(v: f64, line: usize, key: &str) -> Result<f64, CliError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("line {line}: {key} must be positive, got {v}")))
    }
}

fn nonnegative(v: f64, line: usize, key: &str) -> Result<f64, CliError> {
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("line {line}: {key} must be nonnegative, got {v}")))
    }
}

/// Parse a configuration file's text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut scenario = None;
    let mut seed = None;
    let mut trials: u64 = 100_000;
    let mut out_dir = PathBuf::from("out");
    let mut airspace = AirspaceSettings::default();
    let mut a2g = A2gSettings::default();
    let mut a2a = A2aSettings::default();
    let mut trajectory = TrajectorySettings::default();

    let mut section = String::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| CliError::Config(format!("line {line}: unterminated section header")))?;
            match name {
                "airspace" | "a2g" | "a2a" | "trajectory" => section = name.to_string(),
                other => {
                    return Err(CliError::Config(format!("line {line}: unknown section [{other}]")))
                }
            }
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(CliError::Config(format!("line {line}: expected key = value")));
        };
        let key = key.trim();
        let value = value.trim();
        if !seen.insert((section.clone(), key.to_string())) {
            return Err(CliError::Config(format!("line {line}: duplicate key {key:?}")));
        }

        match (section.as_str(), key) {
            ("", "scenario") => scenario = Some(Scenario::parse(value, line)?),
            ("", "seed") => seed = Some(parse_count(value, line, key)?),
            ("", "trials") => trials = parse_count(value, line, key)?,
            ("", "out_dir") => out_dir = PathBuf::from(value),

            ("airspace", "half_extent_x_m") => {
                airspace.half_extent_x_m = positive(parse_num(value, line, key)?, line, key)?
            }
            ("airspace", "half_extent_y_m") => {
                airspace.half_extent_y_m = positive(parse_num(value, line, key)?, line, key)?
            }
            ("airspace", "layer_thickness_m") => {
                airspace.layer_thickness_m = positive(parse_num(value, line, key)?, line, key)?
            }
            ("airspace", "isolation_thickness_m") => {
                airspace.isolation_thickness_m = positive(parse_num(value, line, key)?, line, key)?
            }
            ("airspace", "gs_height_m") => {
                airspace.gs_height_m = positive(parse_num(value, line, key)?, line, key)?
            }
            ("airspace", "central_low_height_m") => {
                airspace.central_low_height_m = positive(parse_num(value, line, key)?, line, key)?
            }
            ("airspace", "central_high_height_m") => {
                airspace.central_high_height_m = positive(parse_num(value, line, key)?, line, key)?
            }
            ("airspace", "density_low_count") => {
                airspace.density_low_count = nonnegative(parse_num(value, line, key)?, line, key)?
            }
            ("airspace", "density_high_count") => {
                airspace.density_high_count = nonnegative(parse_num(value, line, key)?, line, key)?
            }
            ("airspace", "max_service_range_m") => {
                airspace.max_service_range_m = positive(parse_num(value, line, key)?, line, key)?
            }
            ("airspace", "export_deployment") => {
                airspace.export_deployment = parse_bool(value, line, key)?
            }

            ("a2g", "frequency_hz") => {
                a2g.frequency_hz = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2g", "bandwidth_hz") => {
                a2g.bandwidth_hz = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2g", "tx_power_w") => {
                a2g.tx_power_w = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2g", "total_gain_dbi") => a2g.total_gain_dbi = parse_num(value, line, key)?,
            ("a2g", "rel_permittivity") => {
                a2g.rel_permittivity = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2g", "conductivity_s_per_m") => {
                a2g.conductivity_s_per_m = nonnegative(parse_num(value, line, key)?, line, key)?
            }
            ("a2g", "noise_density_dbm_per_hz") => {
                a2g.noise_density_dbm_per_hz = parse_num(value, line, key)?
            }
            ("a2g", "beamwidth_rad") => {
                a2g.beamwidth_rad = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2g", "rice_factor") => {
                a2g.rice_factor = nonnegative(parse_num(value, line, key)?, line, key)?
            }
            ("a2g", "earth_radius_m") => {
                a2g.earth_radius_m = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2g", "ground_arc_m") => {
                a2g.ground_arc_m = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2g", "height_min_m") => {
                a2g.height_min_m = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2g", "height_max_m") => {
                a2g.height_max_m = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2g", "height_step_m") => {
                a2g.height_step_m = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2g", "fade_trials") => a2g.fade_trials = parse_count(value, line, key)?.max(1),

            ("a2a", "bandwidth_hz") => {
                a2a.bandwidth_hz = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2a", "noise_density_dbm_per_hz") => {
                a2a.noise_density_dbm_per_hz = parse_num(value, line, key)?
            }
            ("a2a", "total_gain_dbi") => a2a.total_gain_dbi = parse_num(value, line, key)?,
            ("a2a", "tx_power_w") | ("a2a", "p_s_w") => {
                a2a.tx_power_w = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2a", "path_loss_exponent") => {
                a2a.path_loss_exponent = parse_num(value, line, key)?
            }
            ("a2a", "threshold_db") => a2a.threshold_db = parse_num(value, line, key)?,
            ("a2a", "density_count") => {
                a2a.density_count = nonnegative(parse_num(value, line, key)?, line, key)?
            }
            ("a2a", "fading_shape") => {
                a2a.fading_shape = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2a", "layer") => {
                a2a.layer = match value {
                    "low" => Layer::Low,
                    "high" => Layer::High,
                    _ => {
                        return Err(CliError::Config(format!(
                            "line {line}: layer must be low or high"
                        )))
                    }
                }
            }
            ("a2a", "method") => {
                a2a.method = match value {
                    "analytic" => CoverageEngine::Analytic,
                    "monte_carlo" => CoverageEngine::MonteCarlo,
                    _ => {
                        return Err(CliError::Config(format!(
                            "line {line}: method must be analytic or monte_carlo"
                        )))
                    }
                }
            }
            ("a2a", "mc_mode") => {
                a2a.mc_mode = match value {
                    "sphere_law" => McMode::SphereLaw,
                    "box" => McMode::Box,
                    _ => {
                        return Err(CliError::Config(format!(
                            "line {line}: mc_mode must be sphere_law or box"
                        )))
                    }
                }
            }
            ("a2a", "power_min_w") => {
                a2a.power_min_w = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2a", "power_max_w") => {
                a2a.power_max_w = positive(parse_num(value, line, key)?, line, key)?
            }
            ("a2a", "power_steps") => a2a.power_steps = parse_count(value, line, key)?.max(1) as usize,
            ("a2a", "theta_db_list") => a2a.theta_db_list = parse_list(value, line, key)?,
            ("a2a", "delta_min") => a2a.delta_min = parse_num(value, line, key)?,
            ("a2a", "delta_max") => a2a.delta_max = parse_num(value, line, key)?,
            ("a2a", "delta_steps") => a2a.delta_steps = parse_count(value, line, key)?.max(1) as usize,
            ("a2a", "density_min_count") => {
                a2a.density_min_count = nonnegative(parse_num(value, line, key)?, line, key)?
            }
            ("a2a", "density_max_count") => {
                a2a.density_max_count = nonnegative(parse_num(value, line, key)?, line, key)?
            }

            ("trajectory", "input_sbs") => trajectory.input_sbs = Some(PathBuf::from(value)),
            ("trajectory", "window_n") => {
                trajectory.window_n = parse_count(value, line, key)?.max(2) as usize
            }
            ("trajectory", "order_p") => {
                trajectory.order_p = positive(parse_num(value, line, key)?, line, key)?
            }
            ("trajectory", "degeneracy_threshold") => {
                trajectory.degeneracy_threshold =
                    positive(parse_num(value, line, key)?, line, key)?
            }

            (section, key) => {
                let place = if section.is_empty() {
                    "top level".to_string()
                } else {
                    format!("section [{section}]")
                };
                return Err(CliError::Config(format!("line {line}: unknown key {key:?} in {place}")));
            }
        }
    }

    let Some(scenario) = scenario else {
        return Err(CliError::Config(
            "missing required key 'scenario' (required keys: scenario; seed for stochastic \
             scenarios; [trajectory] input_sbs for the trajectory scenario)"
                .to_string(),
        ));
    };
    if scenario.is_stochastic() && seed.is_none() {
        return Err(CliError::Config(format!(
            "scenario {} is stochastic and requires a seed",
            scenario.name()
        )));
    }
    if scenario == Scenario::Trajectory && trajectory.input_sbs.is_none() {
        return Err(CliError::Config(
            "trajectory scenario requires [trajectory] input_sbs".to_string(),
        ));
    }

    let config = ExperimentConfig {
        scenario,
        seed: seed.unwrap_or(0),
        trials,
        out_dir,
        airspace,
        a2g,
        a2a,
        trajectory,
        config_hash: crate::fnv1a_hash(text.as_bytes()),
    };
    // Cross-field validation happens when the core structs are built.
    config.airspace.to_core()?;
    config.a2a.to_core(&config.airspace.to_core()?)?;
    config.a2g.to_core(
        (config.a2g.height_min_m + config.a2g.height_max_m) / 2.0,
        config.airspace.gs_height_m,
    )?;
    if config.a2g.height_min_m > config.a2g.height_max_m {
        return Err(CliError::Config("height_min_m exceeds height_max_m".to_string()));
    }
    if config.a2a.power_min_w > config.a2a.power_max_w {
        return Err(CliError::Config("power_min_w exceeds power_max_w".to_string()));
    }
    if config.a2a.delta_min > config.a2a.delta_max {
        return Err(CliError::Config("delta_min exceeds delta_max".to_string()));
    }
    if config.a2a.theta_db_list.is_empty() {
        return Err(CliError::Config("theta_db_list must not be empty".to_string()));
    }
    Ok(config)
}

/// Read and parse a configuration file.
pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    parse_config(&text)
}
