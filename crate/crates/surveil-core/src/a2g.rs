//! Deterministic air-to-ground channel: a curved-earth multi-ray model for
//! the link between a central UAV and the ground station.
//!
//! The line-of-sight ray is combined with one (or more) ground-reflected
//! rays. Solving the reflection geometry over a spherical earth yields the
//! grazing angle, path and phase differences; the reflected field is scaled
//! by the earth reflection coefficient and the divergence factor of the
//! convex surface. From the vector field sum follow received power, path
//! loss and SNR, with optional Rician fade averaging.

use num_complex::Complex64;

use crate::rng;
use crate::units::SPEED_OF_LIGHT;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum A2gError {
    #[error("invalid parameters: {0}")]
    Params(&'static str),
    #[error("geometry infeasible: {0}")]
    Geometry(&'static str),
    #[error("grazing angle {0} outside (0, pi/2]")]
    GrazingAngle(f64),
    #[error("at least one reflected ray is required")]
    NoRays,
    #[error("{given} rays exceed the beamwidth limit of {max}")]
    TooManyRays { given: usize, max: usize },
}

/// Radio and environment parameters of one air-to-ground link.
#[derive(Debug, Clone, PartialEq)]
pub struct A2gParams {
    /// Earth radius in meters.
    pub earth_radius: f64,
    /// Carrier frequency in Hz.
    pub frequency: f64,
    /// Wavelength in meters; kept consistent with `frequency`.
    pub wavelength: f64,
    /// Receiver bandwidth in Hz.
    pub bandwidth: f64,
    /// Central-UAV transmit power in watts.
    pub tx_power: f64,
    /// Product of transmit and receive antenna gains, linear.
    pub total_gain: f64,
    /// Relative dielectric constant of the ground.
    pub rel_permittivity: f64,
    /// Ground conductivity in S/m.
    pub conductivity: f64,
    /// Vacuum permittivity in F/m.
    pub vacuum_permittivity: f64,
    /// Noise power spectral density in W/Hz.
    pub noise_density: f64,
    /// Antenna beamwidth in radians; bounds the reflected-ray count.
    pub beamwidth: f64,
    /// Rician shape factor of the fading applied on top of the
    /// deterministic model.
    pub rice_factor: f64,
    /// UAV height above the reflection tangent plane, meters.
    pub uav_height: f64,
    /// Ground-station height above the reflection tangent plane, meters.
    pub gs_height: f64,
}

impl A2gParams {
    /// Largest admissible reflected-ray count, `floor(pi / (2 beamwidth))`.
    pub fn max_rays(&self) -> usize {
        libm::floor(core::f64::consts::PI / (2.0 * self.beamwidth)) as usize
    }

    /// Thermal noise power over the receiver bandwidth, watts.
    pub fn noise_power(&self) -> f64 {
        self.noise_density * self.bandwidth
    }

    pub fn validate(&self) -> Result<(), A2gError> {
        let finite = [
            self.earth_radius,
            self.frequency,
            self.wavelength,
            self.bandwidth,
            self.tx_power,
            self.total_gain,
            self.rel_permittivity,
            self.conductivity,
            self.vacuum_permittivity,
            self.noise_density,
            self.beamwidth,
            self.uav_height,
            self.gs_height,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(A2gError::Params("all parameters must be finite"));
        }
        if self.earth_radius <= 0.0
            || self.frequency <= 0.0
            || self.bandwidth <= 0.0
            || self.tx_power <= 0.0
            || self.total_gain <= 0.0
            || self.vacuum_permittivity <= 0.0
            || self.noise_density <= 0.0
            || self.conductivity < 0.0
            || self.rice_factor < 0.0
        {
            return Err(A2gError::Params("parameter out of range"));
        }
        let c = self.wavelength * self.frequency;
        if (c - SPEED_OF_LIGHT).abs() > 1e-9 * SPEED_OF_LIGHT {
            return Err(A2gError::Params("wavelength inconsistent with frequency"));
        }
        if !(0.0 < self.gs_height && self.gs_height < self.uav_height) {
            return Err(A2gError::Params("heights must satisfy 0 < gs < uav"));
        }
        if !(0.0 < self.beamwidth && self.beamwidth < core::f64::consts::FRAC_PI_2) {
            return Err(A2gError::Params("beamwidth outside (0, pi/2)"));
        }
        Ok(())
    }
}

impl Default for A2gParams {
    /// 5G link defaults: 3.5 GHz / 100 MHz, 20 W, 20 dBi total gain,
    /// ground with relative permittivity 15 and conductivity 5e3 S/m,
    /// -174 dBm/Hz noise density, Rice factor 3.
    fn default() -> Self {
        let frequency = 3.5e9;
        Self {
            earth_radius: 6.371e6,
            frequency,
            wavelength: SPEED_OF_LIGHT / frequency,
            bandwidth: 100.0e6,
            tx_power: 20.0,
            total_gain: 100.0, // 20 dBi
            rel_permittivity: 15.0,
            conductivity: 5.0e3,
            vacuum_permittivity: crate::units::VACUUM_PERMITTIVITY,
            noise_density: 3.9810717055349565e-21, // -174 dBm/Hz
            beamwidth: 0.35,
            rice_factor: 3.0,
            uav_height: 2250.0,
            gs_height: 50.0,
        }
    }
}

/// Solved reflection geometry for one link over the spherical earth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A2gLinkGeometry {
    /// Line-of-sight distance `R1`.
    pub los_distance: f64,
    /// Great-circle arc `s` between the surface feet of UAV and GS.
    pub arc_total: f64,
    /// Arc split `(s1, s2)` at the specular reflection point.
    pub arc_to_reflection: (f64, f64),
    /// Slant legs `(r1, r2)` from UAV to reflection point and on to the GS.
    pub slant_legs: (f64, f64),
    /// Grazing angle at the reflection point.
    pub grazing_angle: f64,
    /// Central angles `(phi, phi1, phi2)` subtended at the earth center.
    pub central_angles: (f64, f64, f64),
    /// Path-length difference between reflected and direct ray.
    pub path_difference: f64,
    /// Phase difference `2 pi path_difference / wavelength`.
    pub phase_difference: f64,
}

impl A2gLinkGeometry {
    /// Reflected-path length `r1 + r2`.
    pub fn reflected_distance(&self) -> f64 {
        self.slant_legs.0 + self.slant_legs.1
    }

    /// Exact path-length difference `(r1 + r2) - R1`, a diagnostic for the
    /// small-grazing-angle approximation used in `path_difference`.
    pub fn exact_path_difference(&self) -> f64 {
        self.reflected_distance() - self.los_distance
    }
}

/// Law-of-cosines side `sqrt(p^2 + q^2 - 2 p q cos(angle))` evaluated in the
/// cancellation-free half-angle form; `p` and `q` may be near-equal and huge.
fn law_of_cosines_side(p: f64, q: f64, angle: f64) -> f64 {
    let half = libm::sin(angle / 2.0);
    let diff = p - q;
    libm::sqrt(diff * diff + 4.0 * p * q * half * half)
}

/// Solve the specular reflection geometry for a link whose surface feet are
/// `ground_arc` meters apart along the great circle.
pub fn solve_geometry(params: &A2gParams, ground_arc: f64) -> Result<A2gLinkGeometry, A2gError> {
    params.validate()?;
    if ground_arc <= 0.0 || !ground_arc.is_finite() {
        return Err(A2gError::Geometry("ground arc must be positive"));
    }
    let a = params.earth_radius;
    let h = params.uav_height;
    let hg = params.gs_height;
    let s = ground_arc;

    let omega1 = s * s / (4.0 * a * (h + hg));
    let omega2 = (h - hg) / (h + hg);
    let arg = 1.5 * omega2 * libm::sqrt(3.0 * omega1 / libm::pow(1.0 + omega1, 3.0));
    if !(-1.0..=1.0).contains(&arg) {
        return Err(A2gError::Geometry("no specular point (acos argument out of range)"));
    }
    let omega3 = 2.0
        * libm::sqrt((omega1 + 1.0) / (3.0 * omega1))
        * libm::cos(core::f64::consts::FRAC_PI_3 + libm::acos(arg) / 3.0);

    let s1 = s * (1.0 + omega3) / 2.0;
    let s2 = s - s1;
    if s1 <= 0.0 || s2 <= 0.0 {
        return Err(A2gError::Geometry("reflection point outside the link arc"));
    }
    let phi1 = s1 / a;
    let phi2 = s2 / a;
    let phi = s / a;

    let grazing = (h + hg) * (1.0 - omega1 * (1.0 + omega2 * omega2)) / s;
    if grazing <= 0.0 {
        return Err(A2gError::Geometry("grazing angle not positive (beyond radio horizon)"));
    }
    if grazing >= core::f64::consts::FRAC_PI_2 {
        return Err(A2gError::Geometry("grazing angle reaches pi/2 (link too steep)"));
    }

    let r1 = law_of_cosines_side(a + h, a, phi1);
    let r2 = law_of_cosines_side(a + hg, a, phi2);
    let los = law_of_cosines_side(a + h, a + hg, phi);

    let path_difference = 2.0 * s1 * s2 * grazing * grazing / s;
    let phase_difference = 2.0 * core::f64::consts::PI * path_difference / params.wavelength;

    Ok(A2gLinkGeometry {
        los_distance: los,
        arc_total: s,
        arc_to_reflection: (s1, s2),
        slant_legs: (r1, r2),
        grazing_angle: grazing,
        central_angles: (phi, phi1, phi2),
        path_difference,
        phase_difference,
    })
}

/// Earth reflection coefficient for vertical polarization at the given
/// grazing angle.
pub fn reflection_coefficient(
    params: &A2gParams,
    grazing_angle: f64,
) -> Result<Complex64, A2gError> {
    if !(grazing_angle > 0.0 && grazing_angle <= core::f64::consts::FRAC_PI_2) {
        return Err(A2gError::GrazingAngle(grazing_angle));
    }
    let b = params.conductivity
        / (2.0 * core::f64::consts::PI * params.frequency * params.vacuum_permittivity);
    let z = Complex64::new(params.rel_permittivity, -b);
    let sin_psi = libm::sin(grazing_angle);
    let root = (z - libm::cos(grazing_angle)).sqrt();
    Ok((z * sin_psi - root) / (z * sin_psi + root))
}

/// Divergence factor of the spherical earth: the amplitude reduction of a
/// wave reflected off the convex surface.
pub fn divergence_factor(geom: &A2gLinkGeometry, earth_radius: f64) -> f64 {
    let (r1, r2) = geom.slant_legs;
    let denom = earth_radius * (r1 + r2) * libm::sin(geom.grazing_angle);
    1.0 / libm::sqrt(1.0 + 2.0 * r1 * r2 / denom)
}

/// One reflected ray's contribution to the field sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayContribution {
    /// Magnitude of the effective reflection coefficient, divergence
    /// included: `|Gamma_t| = D |Gamma_perp|`.
    pub reflection_coeff_magnitude: f64,
    /// Phase of the reflection coefficient.
    pub reflection_coeff_phase: f64,
    /// Divergence factor of this ray.
    pub divergence: f64,
    /// Phase lag of this ray relative to the line-of-sight ray.
    pub phase_difference: f64,
}

impl RayContribution {
    /// Contribution of a ray reflecting at arc position `s1` along the link,
    /// using the same reflection formulas as the specular ray.
    pub fn at_arc(
        params: &A2gParams,
        geom: &A2gLinkGeometry,
        s1: f64,
    ) -> Result<Self, A2gError> {
        let s = geom.arc_total;
        if !(s1 > 0.0 && s1 < s) {
            return Err(A2gError::Geometry("reflection arc outside the link"));
        }
        let a = params.earth_radius;
        let s2 = s - s1;
        let r1 = law_of_cosines_side(a + params.uav_height, a, s1 / a);
        let r2 = law_of_cosines_side(a + params.gs_height, a, s2 / a);
        let psi = geom.grazing_angle;
        let gamma = reflection_coefficient(params, psi)?;
        let divergence = {
            let denom = a * (r1 + r2) * libm::sin(psi);
            1.0 / libm::sqrt(1.0 + 2.0 * r1 * r2 / denom)
        };
        let delta_s = 2.0 * s1 * s2 * psi * psi / s;
        Ok(Self {
            reflection_coeff_magnitude: divergence * gamma.norm(),
            reflection_coeff_phase: gamma.arg(),
            divergence,
            phase_difference: 2.0 * core::f64::consts::PI * delta_s / params.wavelength,
        })
    }

    /// The default single specular ray of a solved geometry.
    pub fn specular(params: &A2gParams, geom: &A2gLinkGeometry) -> Result<Self, A2gError> {
        let gamma = reflection_coefficient(params, geom.grazing_angle)?;
        let divergence = divergence_factor(geom, params.earth_radius);
        Ok(Self {
            reflection_coeff_magnitude: divergence * gamma.norm(),
            reflection_coeff_phase: gamma.arg(),
            divergence,
            phase_difference: geom.phase_difference,
        })
    }
}

/// Power received at the ground station: the vector sum of the line-of-sight
/// field and every reflected ray, scaled by antenna gains and free-space
/// spreading over the line-of-sight distance.
pub fn received_power(
    params: &A2gParams,
    geom: &A2gLinkGeometry,
    rays: &[RayContribution],
) -> Result<f64, A2gError> {
    if rays.is_empty() {
        return Err(A2gError::NoRays);
    }
    let max = params.max_rays();
    if rays.len() > max {
        return Err(A2gError::TooManyRays { given: rays.len(), max });
    }
    let mut field = Complex64::new(1.0, 0.0);
    for ray in rays {
        let angle = ray.phase_difference - ray.reflection_coeff_phase;
        field += Complex64::from_polar(ray.reflection_coeff_magnitude, -angle);
    }
    let spreading = params.wavelength / (4.0 * core::f64::consts::PI * geom.los_distance);
    Ok(params.tx_power * params.total_gain * field.norm_sqr() * spreading * spreading)
}

/// A dB reading plus a flag marking numerically vanished received power
/// (perfect cancellation), so sweeps can complete without panicking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbReading {
    pub db: f64,
    pub deep_fade: bool,
}

/// Path loss in dB relative to the transmit power.
pub fn path_loss(params: &A2gParams, p_g: f64) -> DbReading {
    if p_g <= 0.0 {
        return DbReading { db: f64::INFINITY, deep_fade: true };
    }
    DbReading { db: -10.0 * libm::log10(p_g / params.tx_power), deep_fade: false }
}

/// Signal-to-noise ratio in dB over the receiver bandwidth.
pub fn snr(params: &A2gParams, p_g: f64) -> DbReading {
    if p_g <= 0.0 {
        return DbReading { db: f64::NEG_INFINITY, deep_fade: true };
    }
    DbReading {
        db: 10.0 * libm::log10(p_g) - 10.0 * libm::log10(params.noise_power()),
        deep_fade: false,
    }
}

/// Average of `p_g` multiplied by unit-mean Rician power gains over `trials`
/// draws; converges to `p_g` as the trial count grows.
pub fn apply_rician_fading(p_g: f64, rice_factor: f64, seed: u64, trials: u64) -> f64 {
    debug_assert!(trials >= 1);
    let mut rng = rng::substream(seed, 0);
    let mut acc = 0.0;
    for _ in 0..trials {
        acc += p_g * rng::rician_power_gain(&mut rng, rice_factor);
    }
    acc / trials as f64
}

/// Path loss averaged in the dB domain over Rician fading draws.
///
/// Fading is applied per draw and the instantaneous path loss is averaged,
/// which (unlike averaging power) leaves the fading penalty visible.
pub fn fade_averaged_path_loss(params: &A2gParams, p_g: f64, seed: u64, trials: u64) -> DbReading {
    if p_g <= 0.0 {
        return DbReading { db: f64::INFINITY, deep_fade: true };
    }
    let mut rng = rng::substream(seed, 0);
    let mut acc = 0.0;
    for _ in 0..trials {
        let gain = rng::rician_power_gain(&mut rng, params.rice_factor);
        acc += -10.0 * libm::log10(p_g * gain / params.tx_power);
    }
    DbReading { db: acc / trials as f64, deep_fade: false }
}

/// Full single-ray chain: solve the geometry, build the specular ray and
/// return the received power.
pub fn received_power_two_ray(params: &A2gParams, ground_arc: f64) -> Result<f64, A2gError> {
    let geom = solve_geometry(params, ground_arc)?;
    let ray = RayContribution::specular(params, &geom)?;
    received_power(params, &geom, &[ray])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, uniform_in};

    fn params_at(height: f64) -> A2gParams {
        A2gParams { uav_height: height, ..A2gParams::default() }
    }

    #[test]
    fn validate_catches_inconsistencies() {
        assert!(A2gParams::default().validate().is_ok());
        let mut p = A2gParams::default();
        p.wavelength *= 1.001;
        assert!(p.validate().is_err());
        let mut p = A2gParams::default();
        p.gs_height = p.uav_height + 1.0;
        assert!(p.validate().is_err());
        let p = A2gParams { beamwidth: 2.0, ..A2gParams::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn equal_heights_give_symmetric_split() {
        // omega2 = 0 puts the specular point at the arc midpoint.
        let mut p = params_at(800.0);
        p.gs_height = 800.0 - 1e-9; // validate needs gs < uav
        let g = solve_geometry(&p, 12_000.0).unwrap();
        let (s1, s2) = g.arc_to_reflection;
        assert!((s1 - s2).abs() <= 1e-9 * s1, "s1={s1} s2={s2}");
    }

    #[test]
    fn geometry_closure_properties_hold_over_random_links() {
        let mut rng = substream(0xA26, 0);
        let mut solved = 0;
        for _ in 0..2000 {
            let mut p = params_at(uniform_in(&mut rng, 200.0, 9000.0));
            p.gs_height = uniform_in(&mut rng, 1.0, 150.0);
            let s = uniform_in(&mut rng, 2000.0, 300_000.0);
            let Ok(g) = solve_geometry(&p, s) else { continue };
            solved += 1;
            let (s1, s2) = g.arc_to_reflection;
            assert!((s1 + s2 - g.arc_total).abs() < 1e-9 * g.arc_total);
            assert!(g.reflected_distance() >= g.los_distance);
            assert!(g.grazing_angle > 0.0 && g.grazing_angle < core::f64::consts::FRAC_PI_2);
            assert!(g.phase_difference >= 0.0);
            let (phi, phi1, phi2) = g.central_angles;
            assert!((phi1 + phi2 - phi).abs() < 1e-12 * phi);
        }
        assert!(solved > 1000, "only {solved} feasible draws");
    }

    #[test]
    fn beyond_horizon_is_an_error() {
        let mut p = params_at(500.0);
        p.gs_height = 10.0;
        // Horizon for these heights is ~90 km; 400 km is far beyond.
        assert!(matches!(solve_geometry(&p, 400_000.0), Err(A2gError::Geometry(_))));
    }

    #[test]
    fn near_vertical_link_is_an_error() {
        // Grazing angle reaches pi/2 when the arc is short against the
        // heights; the small-angle model does not apply there.
        let p = params_at(9000.0);
        assert!(matches!(solve_geometry(&p, 2000.0), Err(A2gError::Geometry(_))));
        assert!(solve_geometry(&p, 20_000.0).is_ok());
    }

    #[test]
    fn near_flat_earth_grazing_angle_matches_atan() {
        let mut p = params_at(1000.0);
        p.earth_radius *= 1e9;
        p.gs_height = 50.0;
        let s = 20_000.0;
        let g = solve_geometry(&p, s).unwrap();
        let flat = libm::atan((p.uav_height + p.gs_height) / s);
        assert!(
            (g.grazing_angle - flat).abs() < 0.01 * flat,
            "psi {} vs atan {flat}",
            g.grazing_angle
        );
    }

    #[test]
    fn perfect_conductor_limit_reflects_fully() {
        let p = A2gParams {
            conductivity: 0.0,
            rel_permittivity: 1e12,
            ..A2gParams::default()
        };
        let gamma = reflection_coefficient(&p, 0.3).unwrap();
        assert!((gamma.re - 1.0).abs() < 1e-4 && gamma.im.abs() < 1e-4, "{gamma}");
    }

    #[test]
    fn reflection_magnitude_never_exceeds_one() {
        let mut rng = substream(0xF1, 0);
        let mut p = A2gParams::default();
        p.frequency = 1.09e9;
        p.wavelength = SPEED_OF_LIGHT / p.frequency;
        for _ in 0..1000 {
            p.rel_permittivity = uniform_in(&mut rng, 1.0, 80.0);
            p.conductivity = uniform_in(&mut rng, 0.0, 5.0e3);
            let psi = uniform_in(&mut rng, 1e-4, core::f64::consts::FRAC_PI_2);
            let gamma = reflection_coefficient(&p, psi).unwrap();
            assert!(gamma.norm() <= 1.0 + 1e-12, "|gamma|={} at psi={psi}", gamma.norm());
        }
    }

    #[test]
    fn reflection_matches_independent_complex_evaluation() {
        // Re-derive the coefficient with hand-rolled complex arithmetic in
        // polar form, independent of the library path.
        let mut p = A2gParams::default();
        p.frequency = 1.09e9;
        p.wavelength = SPEED_OF_LIGHT / p.frequency;
        p.rel_permittivity = 15.0;
        p.conductivity = 5.0e3;
        let psi = 0.1_f64;

        let b = p.conductivity
            / (2.0 * core::f64::consts::PI * p.frequency * p.vacuum_permittivity);
        let (zr, zi) = (p.rel_permittivity, -b);
        // sqrt(z - cos psi) via polar decomposition.
        let (ur, ui) = (zr - libm::cos(psi), zi);
        let mag = libm::sqrt(libm::sqrt(ur * ur + ui * ui));
        let ang = 0.5 * libm::atan2(ui, ur);
        let (rr, ri) = (mag * libm::cos(ang), mag * libm::sin(ang));
        let s = libm::sin(psi);
        let (nr, ni) = (zr * s - rr, zi * s - ri);
        let (dr, di) = (zr * s + rr, zi * s + ri);
        let den = dr * dr + di * di;
        let expect_re = (nr * dr + ni * di) / den;
        let expect_im = (ni * dr - nr * di) / den;

        let gamma = reflection_coefficient(&p, psi).unwrap();
        assert!((gamma.re - expect_re).abs() < 1e-12, "{} vs {expect_re}", gamma.re);
        assert!((gamma.im - expect_im).abs() < 1e-12, "{} vs {expect_im}", gamma.im);
    }

    #[test]
    fn divergence_limits_and_monotonicity() {
        let p = params_at(2000.0);
        let mut g = solve_geometry(&p, 30_000.0).unwrap();
        // Reflection at the transmitter foot.
        g.slant_legs = (0.0, g.slant_legs.1);
        assert_eq!(divergence_factor(&g, p.earth_radius), 1.0);
        // Flat earth.
        let g = solve_geometry(&p, 30_000.0).unwrap();
        assert!(divergence_factor(&g, 1e30) > 1.0 - 1e-12);
        // Longer links diverge more.
        let mut prev = 1.0;
        for s in [10_000.0, 30_000.0, 60_000.0, 90_000.0, 120_000.0] {
            let g = solve_geometry(&p, s).unwrap();
            let d = divergence_factor(&g, p.earth_radius);
            assert!(d > 0.0 && d <= 1.0);
            assert!(d < prev, "divergence not decreasing at s={s}");
            prev = d;
        }
    }

    fn friis(p: &A2gParams, r1: f64) -> f64 {
        let spreading = p.wavelength / (4.0 * core::f64::consts::PI * r1);
        p.tx_power * p.total_gain * spreading * spreading
    }

    fn ray(mag: f64, phase: f64, dphi: f64) -> RayContribution {
        RayContribution {
            reflection_coeff_magnitude: mag,
            reflection_coeff_phase: phase,
            divergence: 1.0,
            phase_difference: dphi,
        }
    }

    #[test]
    fn received_power_limit_cases() {
        let p = params_at(1500.0);
        let g = solve_geometry(&p, 20_000.0).unwrap();
        let friis = friis(&p, g.los_distance);

        let pg = received_power(&p, &g, &[ray(0.0, 0.0, 0.0)]).unwrap();
        assert!((pg - friis).abs() < 1e-12 * friis);

        let pg = received_power(&p, &g, &[ray(1.0, 0.0, core::f64::consts::PI)]).unwrap();
        assert!(pg.abs() < 1e-28 * friis.max(1.0), "cancellation left {pg}");

        let pg = received_power(&p, &g, &[ray(1.0, 0.0, 0.0)]).unwrap();
        assert!((pg - 4.0 * friis).abs() < 1e-12 * friis);

        assert_eq!(received_power(&p, &g, &[]), Err(A2gError::NoRays));
        let too_many = alloc::vec![ray(0.1, 0.0, 0.0); p.max_rays() + 1];
        assert!(matches!(
            received_power(&p, &g, &too_many),
            Err(A2gError::TooManyRays { .. })
        ));
    }

    #[test]
    fn field_sum_bounded_by_full_reinforcement() {
        let mut rng = substream(0xE5, 0);
        let p = params_at(1500.0);
        let g = solve_geometry(&p, 20_000.0).unwrap();
        let friis = friis(&p, g.los_distance);
        for n in 1..=3usize {
            for _ in 0..200 {
                let rays: alloc::vec::Vec<_> = (0..n)
                    .map(|_| {
                        ray(
                            uniform_in(&mut rng, 0.0, 1.0),
                            uniform_in(&mut rng, -3.1, 3.1),
                            uniform_in(&mut rng, 0.0, 600.0),
                        )
                    })
                    .collect();
                let pg = received_power(&p, &g, &rays).unwrap();
                let bound = libm::pow(4.0, n as f64) * friis;
                assert!(pg <= bound * (1.0 + 1e-12), "n={n}: {pg} > {bound}");
            }
        }
    }

    #[test]
    fn path_loss_and_snr_identities() {
        let p = A2gParams::default();
        let pl = path_loss(&p, p.tx_power);
        assert!(pl.db.abs() < 1e-12 && !pl.deep_fade);
        let pl = path_loss(&p, p.tx_power / 100.0);
        assert!((pl.db - 20.0).abs() < 1e-12);
        let pl = path_loss(&p, 0.0);
        assert!(pl.db.is_infinite() && pl.deep_fade);

        let noise = p.noise_power();
        assert!(snr(&p, noise).db.abs() < 1e-12);
        let mut doubled = p.clone();
        doubled.bandwidth *= 2.0;
        let drop = snr(&p, 1.0).db - snr(&doubled, 1.0).db;
        assert!((drop - 10.0 * libm::log10(2.0)).abs() < 1e-12);
    }

    #[test]
    fn snr_trend_falls_with_height() {
        // Fade-averaged SNR oscillates with the lobes, so the falling trend
        // is fitted on lobe-averaged bins of a meter-resolution sweep.
        let heights: alloc::vec::Vec<f64> = (0..3500).map(|i| 1000.0 + i as f64).collect();
        let values: alloc::vec::Vec<f64> = heights
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                let p = params_at(h);
                let pg = received_power_two_ray(&p, 10_000.0).unwrap();
                let faded = apply_rician_fading(pg, p.rice_factor, i as u64, 500);
                snr(&p, faded).db
            })
            .collect();
        let bins = 50;
        let per = heights.len() / bins;
        let mean_of = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        let bin_h: alloc::vec::Vec<f64> =
            (0..bins).map(|b| mean_of(&heights[b * per..(b + 1) * per])).collect();
        let bin_v: alloc::vec::Vec<f64> =
            (0..bins).map(|b| mean_of(&values[b * per..(b + 1) * per])).collect();
        let mx = mean_of(&bin_h);
        let my = mean_of(&bin_v);
        let mut num = 0.0;
        let mut den = 0.0;
        for (h, v) in bin_h.iter().zip(&bin_v) {
            num += (h - mx) * (v - my);
            den += (h - mx) * (h - mx);
        }
        assert!(num / den < 0.0, "SNR slope {} not negative", num / den);
    }

    #[test]
    fn caller_provided_reflection_arcs() {
        let p = params_at(1500.0);
        let geom = solve_geometry(&p, 20_000.0).unwrap();
        // The specular arc reproduces the specular ray.
        let specular = RayContribution::specular(&p, &geom).unwrap();
        let at_specular =
            RayContribution::at_arc(&p, &geom, geom.arc_to_reflection.0).unwrap();
        assert!(
            (specular.reflection_coeff_magnitude - at_specular.reflection_coeff_magnitude).abs()
                < 1e-12
        );
        assert!((specular.phase_difference - at_specular.phase_difference).abs() < 1e-9);
        // Additional rays stay inside the field-sum bound.
        let extra = RayContribution::at_arc(&p, &geom, 0.3 * geom.arc_total).unwrap();
        assert!(extra.reflection_coeff_magnitude <= 1.0);
        let pg = received_power(&p, &geom, &[specular, extra]).unwrap();
        assert!(pg >= 0.0);
        // Arc positions outside the link are rejected.
        assert!(RayContribution::at_arc(&p, &geom, 0.0).is_err());
        assert!(RayContribution::at_arc(&p, &geom, geom.arc_total).is_err());
    }

    #[test]
    fn rician_fading_limits_and_determinism() {
        assert_eq!(apply_rician_fading(2.5, f64::INFINITY, 3, 100), 2.5);
        assert_eq!(
            apply_rician_fading(1.0, 3.0, 9, 1000),
            apply_rician_fading(1.0, 3.0, 9, 1000)
        );
        // Unit-mean property of the gain at K = 3.
        let mean = apply_rician_fading(1.0, 3.0, 17, 1_000_000);
        assert!((mean - 1.0).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn flat_earth_limit_matches_textbook_two_ray() {
        // Scale the earth radius up and compare the full chain against the
        // classic flat-earth two-ray model evaluated independently.
        let mut p = params_at(1000.0);
        p.gs_height = 50.0;
        p.earth_radius *= 1e6;
        let s = 20_000.0;
        let pg = received_power_two_ray(&p, s).unwrap();

        let (h1, h2) = (p.uav_height, p.gs_height);
        let r1 = libm::sqrt(s * s + (h1 - h2) * (h1 - h2));
        let dphi = 4.0 * core::f64::consts::PI * h1 * h2 / (p.wavelength * s);
        let psi = libm::atan((h1 + h2) / s);
        let gamma = reflection_coefficient(&p, psi).unwrap();
        let field = Complex64::new(1.0, 0.0)
            + Complex64::from_polar(gamma.norm(), -(dphi - gamma.arg()));
        let spread = p.wavelength / (4.0 * core::f64::consts::PI * r1);
        let oracle = p.tx_power * p.total_gain * field.norm_sqr() * spread * spread;

        assert!(
            (pg - oracle).abs() < 0.01 * oracle,
            "chain {pg} vs flat-earth oracle {oracle}"
        );
    }

    #[test]
    fn exact_path_difference_tracks_approximation_at_small_grazing() {
        let p = params_at(600.0);
        let g = solve_geometry(&p, 40_000.0).unwrap();
        let exact = g.exact_path_difference();
        assert!(
            (g.path_difference - exact).abs() < 0.01 * exact,
            "approx {} vs exact {exact}",
            g.path_difference
        );
    }
}
