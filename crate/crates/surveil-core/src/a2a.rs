//! Stochastic air-to-air layer: SINR realizations between sub-UAVs and
//! their central UAV, Monte Carlo coverage estimation, and the analytic
//! coverage probability obtained from the Laplace transform of the
//! aggregate interference.
//!
//! Interfering sub-UAVs form a Poisson point process in the layer box; the
//! desired link distance follows either the isotropic nearest-neighbor law
//! (the assumption behind the analytic expression) or the true box geometry
//! of a tagged sub-UAV. Small-scale fading is unit-mean Gamma, Rayleigh for
//! shape 1.

use alloc::vec::Vec;

use rand_chacha::ChaCha12Rng;
use rand_core::RngCore;

use crate::airspace::{self, LayerBox};
use crate::numeric::{simpson_panels, CubicSpline, Halton3};
use crate::rng;

/// Points of the low-discrepancy set behind every interference integral.
const THETA_QMC_POINTS: usize = 200_000;
/// Relative agreement required between the half and full point sets.
const THETA_QMC_TOL: f64 = 5e-3;
/// Coverage agreement required between successive distance-grid refinements.
const GRID_REFINE_TOL: f64 = 1e-4;
/// Fixed panel count of the outer coverage quadrature; the coarser half
/// count only cross-checks the achieved error.
const OUTER_PANELS: usize = 8192;
const OUTER_TOL: f64 = 2e-4;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum A2aError {
    #[error("invalid scenario: {0}")]
    Scenario(&'static str),
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("at least {min} trials required, got {given}")]
    TooFewTrials { given: u64, min: u64 },
    #[error("quadrature failed to converge: achieved {achieved} with error bound {error}")]
    Numerical { achieved: f64, error: f64 },
}

/// Radio parameters of one airspace layer's air-to-air links.
#[derive(Debug, Clone, PartialEq)]
pub struct A2aScenario {
    /// Sub-UAV transmit power in watts (`P_s`).
    pub sub_tx_power: f64,
    /// Product of transmit and receive antenna gains, linear (`G_a`).
    pub total_gain: f64,
    /// Thermal noise power over the receiver bandwidth, watts.
    pub noise_power: f64,
    /// Path-loss exponent (`delta`).
    pub path_loss_exponent: f64,
    /// Receiver SINR threshold, linear.
    pub threshold: f64,
    /// Volumetric sub-UAV intensity, per cubic meter.
    pub density: f64,
    /// Gamma fading shape; 1 is Rayleigh.
    pub fading_shape: f64,
    /// The layer box holding the sub-UAVs.
    pub layer: LayerBox,
}

impl A2aScenario {
    /// Central-UAV position the link distances are measured from: the
    /// center of the layer box, directly above the ground station.
    pub fn central_position(&self) -> [f64; 3] {
        self.layer.center()
    }

    /// Expected number of interfering sub-UAVs in the layer.
    pub fn expected_count(&self) -> f64 {
        self.density * self.layer.volume()
    }

    pub fn validate(&self) -> Result<(), A2aError> {
        if !(self.sub_tx_power > 0.0 && self.sub_tx_power.is_finite()) {
            return Err(A2aError::Scenario("sub_tx_power must be positive"));
        }
        if !(self.total_gain > 0.0 && self.total_gain.is_finite()) {
            return Err(A2aError::Scenario("total_gain must be positive"));
        }
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return Err(A2aError::Scenario("noise_power must be nonnegative"));
        }
        if !(2.0..=4.9).contains(&self.path_loss_exponent) {
            return Err(A2aError::Scenario("path_loss_exponent outside [2, 4.9]"));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(A2aError::Scenario("threshold must be positive (linear units)"));
        }
        if !(self.density >= 0.0 && self.density.is_finite()) {
            return Err(A2aError::Scenario("density must be nonnegative"));
        }
        if !(self.fading_shape > 0.0 && self.fading_shape.is_finite()) {
            return Err(A2aError::Scenario("fading_shape must be positive"));
        }
        if self.layer.volume() <= 0.0 {
            return Err(A2aError::Scenario("layer box must have positive volume"));
        }
        Ok(())
    }
}

/// How the desired-link distance is drawn in Monte Carlo runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryMode {
    /// Distance from the isotropic nearest-neighbor law, matching the
    /// assumptions of the analytic expression.
    SphereLaw,
    /// Distance of a tagged sub-UAV placed uniformly in the layer box, the
    /// geometry an actual deployment realizes.
    Box,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageMethod {
    Analytic,
    MonteCarlo,
}

/// A coverage probability estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    pub probability: f64,
    pub method: CoverageMethod,
    /// Trial count, Monte Carlo only.
    pub trials: Option<u64>,
    /// Binomial standard error, Monte Carlo only.
    pub std_error: Option<f64>,
}

fn powd(base: f64, exp: f64) -> f64 {
    libm::pow(base, exp)
}

/// SINR of one link realization with freshly drawn fading.
///
/// The desired sub-UAV sits `desired_distance` from the central UAV and
/// every entry of `interferer_distances` contributes interference.
pub fn sinr_realization(
    scenario: &A2aScenario,
    desired_distance: f64,
    interferer_distances: &[f64],
    seed: u64,
) -> Result<f64, A2aError> {
    scenario.validate()?;
    if desired_distance <= 0.0 {
        return Err(A2aError::Domain("co-located UAVs: desired distance must be positive"));
    }
    if interferer_distances.iter().any(|d| *d <= 0.0) {
        return Err(A2aError::Domain("co-located UAVs: interferer distance must be positive"));
    }
    let mut rng = rng::substream(seed, 0);
    Ok(sinr_draw(scenario, desired_distance, interferer_distances.iter().copied(), &mut rng))
}

fn sinr_draw(
    scenario: &A2aScenario,
    desired_distance: f64,
    interferer_distances: impl Iterator<Item = f64>,
    rng: &mut impl RngCore,
) -> f64 {
    let delta = scenario.path_loss_exponent;
    let shape = scenario.fading_shape;
    let rho0 = rng::gamma_unit_mean(rng, shape);
    let signal =
        scenario.sub_tx_power * scenario.total_gain * rho0 * powd(desired_distance, -delta);
    let mut interference = 0.0;
    for d in interferer_distances {
        let rho = rng::gamma_unit_mean(rng, shape);
        interference += scenario.total_gain * rho * powd(d, -delta);
    }
    signal / (scenario.noise_power + scenario.sub_tx_power * interference)
}

fn draw_interferer_distances(
    scenario: &A2aScenario,
    rng: &mut impl RngCore,
    out: &mut Vec<f64>,
) {
    out.clear();
    let center = scenario.central_position();
    let count = rng::poisson(rng, scenario.expected_count());
    for _ in 0..count {
        let p = scenario.layer.uniform_point(rng);
        out.push(airspace::distance(p, center));
    }
}

/// Monte Carlo coverage probability `P(SINR >= threshold)`.
///
/// Each trial runs on its own substream of `seed`, so results are
/// reproducible and trials could be evaluated in any order.
pub fn coverage_monte_carlo(
    scenario: &A2aScenario,
    trials: u64,
    seed: u64,
    mode: GeometryMode,
) -> Result<CoverageResult, A2aError> {
    scenario.validate()?;
    if trials < 1000 {
        return Err(A2aError::TooFewTrials { given: trials, min: 1000 });
    }
    let base = rng::substream(seed, 0);
    let covered = (0..trials)
        .filter(|trial| {
            let mut rng = rng::fork(&base, *trial);
            covered_trial(scenario, mode, &mut rng)
        })
        .count() as f64;
    let p = covered / trials as f64;
    Ok(CoverageResult {
        probability: p,
        method: CoverageMethod::MonteCarlo,
        trials: Some(trials),
        std_error: Some(libm::sqrt(p * (1.0 - p) / trials as f64)),
    })
}

fn covered_trial(scenario: &A2aScenario, mode: GeometryMode, rng: &mut ChaCha12Rng) -> bool {
    let center = scenario.central_position();
    let desired = match mode {
        GeometryMode::SphereLaw => {
            airspace::nn_distance_quantile(rng::uniform(rng), scenario.density)
        }
        GeometryMode::Box => airspace::distance(scenario.layer.uniform_point(rng), center),
    };
    let delta = scenario.path_loss_exponent;
    let shape = scenario.fading_shape;
    let rho0 = rng::gamma_unit_mean(rng, shape);
    let signal = scenario.sub_tx_power * scenario.total_gain * rho0 * powd(desired, -delta);
    let count = rng::poisson(rng, scenario.expected_count());
    let mut interference = 0.0;
    for _ in 0..count {
        let p = scenario.layer.uniform_point(rng);
        let rho = rng::gamma_unit_mean(rng, shape);
        interference += scenario.total_gain * rho * powd(airspace::distance(p, center), -delta);
    }
    let sinr = signal / (scenario.noise_power + scenario.sub_tx_power * interference);
    sinr >= scenario.threshold
}

/// Evaluator for the interference integral behind the Laplace transform:
/// `Theta(L) = int_box [1 - 1/(1 + L r^-delta)] dV` with `r` measured from
/// the central UAV and `L = lambda_arg G_a`.
///
/// The kernel peaks sharply around the central UAV, so the ball inscribed
/// at the center is integrated radially (1D quadrature) and the fixed
/// low-discrepancy set only sees the flattened remainder.
struct InterferenceKernel {
    /// `max(r, r_in)^delta` per quasi-random point.
    clamped_pow: Vec<f64>,
    r_in: f64,
    r_in_pow: f64,
    delta: f64,
    volume: f64,
}

impl InterferenceKernel {
    fn new(layer: &LayerBox, central: [f64; 3], delta: f64) -> Self {
        let r_in = [
            central[0] - layer.x_min,
            layer.x_max - central[0],
            central[1] - layer.y_min,
            layer.y_max - central[1],
            central[2] - layer.z_min,
            layer.z_max - central[2],
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
        let mut seq = Halton3::new();
        let clamped_pow = (0..THETA_QMC_POINTS)
            .map(|_| {
                let u = seq.next_point();
                let p = [
                    layer.x_min + (layer.x_max - layer.x_min) * u[0],
                    layer.y_min + (layer.y_max - layer.y_min) * u[1],
                    layer.z_min + (layer.z_max - layer.z_min) * u[2],
                ];
                powd(airspace::distance(p, central).max(r_in), delta)
            })
            .collect();
        Self { clamped_pow, r_in, r_in_pow: powd(r_in, delta), delta, volume: layer.volume() }
    }

    /// `(Theta(L), error bound)` from the half-vs-full set disagreement.
    fn theta(&self, l: f64) -> (f64, f64) {
        if l <= 0.0 {
            return (0.0, 0.0);
        }
        let mut sum = 0.0;
        let mut sum_half = 0.0;
        let half_n = self.clamped_pow.len() / 2;
        for (i, q) in self.clamped_pow.iter().enumerate() {
            let v = l / (l + q);
            sum += v;
            if i < half_n {
                sum_half += v;
            }
        }
        let full = sum / self.clamped_pow.len() as f64 * self.volume;
        let half = sum_half / half_n as f64 * self.volume;

        // Inside the inscribed ball the clamped kernel is constant; put the
        // true radial profile back analytically.
        let mut radial = 0.0;
        if self.r_in > 0.0 {
            let edge = l / (l + self.r_in_pow);
            let mut f = |r: f64| {
                let v = l / (l + powd(r, self.delta));
                (v - edge) * r * r
            };
            radial = 4.0 * core::f64::consts::PI * simpson_panels(&mut f, 0.0, self.r_in, 256);
        }
        (full + radial, (full - half).abs())
    }
}

/// Laplace transform of the aggregate interference, evaluated as
/// `exp(-density * Theta)` with `Theta` the triple integral over the layer
/// box (`lambda_arg = threshold d^delta / G_a`).
pub fn laplace_interference(
    scenario: &A2aScenario,
    lambda_arg: f64,
    central_position: [f64; 3],
) -> Result<f64, A2aError> {
    scenario.validate()?;
    if lambda_arg.is_nan() || lambda_arg < 0.0 {
        return Err(A2aError::Domain("lambda_arg must be nonnegative"));
    }
    if lambda_arg == 0.0 || scenario.density == 0.0 {
        return Ok(1.0);
    }
    let kernel = InterferenceKernel::new(
        &scenario.layer,
        central_position,
        scenario.path_loss_exponent,
    );
    let (theta, err) = kernel.theta(lambda_arg * scenario.total_gain);
    let achieved = libm::exp(-scenario.density * theta);
    if err > THETA_QMC_TOL * theta.max(1e-300) {
        return Err(A2aError::Numerical { achieved, error: err });
    }
    Ok(achieved)
}

/// Analytic coverage probability via numerical integration of the
/// interference-Laplace expression against the nearest-neighbor density.
///
/// The outer integral over the desired-link distance is truncated at
/// `max_distance`; the interference integral is precomputed on a
/// logarithmic distance grid, interpolated with a cubic spline, and the
/// grid is refined until the coverage estimate moves less than 1e-4.
pub fn coverage_analytic(
    scenario: &A2aScenario,
    central_position: [f64; 3],
    max_distance: f64,
) -> Result<CoverageResult, A2aError> {
    scenario.validate()?;
    if !(max_distance > 0.0 && max_distance.is_finite()) {
        return Err(A2aError::Domain("max_distance must be positive"));
    }
    if scenario.fading_shape != 1.0 {
        return Err(A2aError::Scenario(
            "analytic coverage is derived for Rayleigh fading (shape 1) only",
        ));
    }
    let lambda = scenario.density;
    if lambda == 0.0 {
        return Ok(CoverageResult {
            probability: 0.0,
            method: CoverageMethod::Analytic,
            trials: None,
            std_error: None,
        });
    }

    let delta = scenario.path_loss_exponent;
    let theta = scenario.threshold;
    let gain = scenario.total_gain;
    let noise_coeff = theta * scenario.noise_power / (scenario.sub_tx_power * gain);

    // The kernel's point set is built once; every grid refinement reuses it.
    let kernel = InterferenceKernel::new(&scenario.layer, central_position, delta);
    let theta_of = |d: f64| -> f64 {
        // Theta(d) with LambdaGa = threshold * d^delta.
        kernel.theta(theta * powd(d, delta)).0
    };

    let d_lo = max_distance * 1e-4;
    // Outer integrand on a spline of Theta; the noise factor can be
    // switched off so grid-refinement decisions do not depend on the
    // transmit power (keeps sweeps over P_s exactly monotone).
    let integrate = |spline: &CubicSpline, with_noise: bool| -> (f64, f64) {
        let pi = core::f64::consts::PI;
        let mut f = |d: f64| {
            if d <= 0.0 {
                return 0.0;
            }
            let th = spline.eval(libm::log(d.max(d_lo)));
            let noise = if with_noise { noise_coeff * powd(d, delta) } else { 0.0 };
            let exponent = -noise - lambda * th - 4.0 / 3.0 * pi * lambda * d * d * d;
            4.0 * pi * lambda * d * d * libm::exp(exponent)
        };
        let full = simpson_panels(&mut f, 0.0, max_distance, OUTER_PANELS);
        let half = simpson_panels(&mut f, 0.0, max_distance, OUTER_PANELS / 2);
        (full, (full - half).abs())
    };

    let build_spline = |n: usize| -> CubicSpline {
        let log_lo = libm::log(d_lo);
        let log_hi = libm::log(max_distance);
        let xs: Vec<f64> =
            (0..n).map(|i| log_lo + (log_hi - log_lo) * i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| theta_of(libm::exp(*x))).collect();
        CubicSpline::new(xs, ys)
    };

    let mut grid = 17usize;
    let mut spline = build_spline(grid);
    let (mut surrogate, _) = integrate(&spline, false);
    loop {
        let finer = grid * 2 - 1;
        let next_spline = build_spline(finer);
        let (next_surrogate, _) = integrate(&next_spline, false);
        let moved = (next_surrogate - surrogate).abs();
        grid = finer;
        spline = next_spline;
        surrogate = next_surrogate;
        if moved < GRID_REFINE_TOL || grid >= 129 {
            if moved >= GRID_REFINE_TOL {
                let (p, _) = integrate(&spline, true);
                return Err(A2aError::Numerical { achieved: p.clamp(0.0, 1.0), error: moved });
            }
            break;
        }
    }

    let (p, err) = integrate(&spline, true);
    if err > OUTER_TOL {
        return Err(A2aError::Numerical { achieved: p.clamp(0.0, 1.0), error: err });
    }
    Ok(CoverageResult {
        probability: p.clamp(0.0, 1.0),
        method: CoverageMethod::Analytic,
        trials: None,
        std_error: None,
    })
}

/// Mean SINR in dB seen by the central UAV as the sub-UAV count grows.
///
/// For each density (an expected sub-UAV count per layer) the tagged
/// desired sub-UAV is uniform in the layer box and the remaining sub-UAVs
/// interfere; the per-trial SINR is averaged in the dB domain.
pub fn mean_sinr_vs_density(
    scenario: &A2aScenario,
    density_counts: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<(f64, f64)>, A2aError> {
    scenario.validate()?;
    if trials == 0 {
        return Err(A2aError::TooFewTrials { given: 0, min: 1 });
    }
    let volume = scenario.layer.volume();
    let base = rng::substream(seed, 0);
    let center = scenario.layer.center();
    let mut out = Vec::with_capacity(density_counts.len());
    let mut distances = Vec::new();
    for (idx, count) in density_counts.iter().enumerate() {
        if count.is_nan() || *count < 0.0 {
            return Err(A2aError::Domain("density counts must be nonnegative"));
        }
        let point = A2aScenario { density: count / volume, ..scenario.clone() };
        let mut acc = 0.0;
        for trial in 0..trials {
            let mut rng = rng::fork(&base, ((idx as u64) << 32) | trial);
            let desired = airspace::distance(point.layer.uniform_point(&mut rng), center);
            draw_interferer_distances(&point, &mut rng, &mut distances);
            let sinr = sinr_draw(&point, desired, distances.iter().copied(), &mut rng);
            acc += 10.0 * libm::log10(sinr);
        }
        out.push((*count, acc / trials as f64));
    }
    Ok(out)
}
