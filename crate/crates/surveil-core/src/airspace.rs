//! Hierarchical deployment model: two stacked airspace layers separated by
//! an isolation layer, sub-UAVs scattered as a Poisson point process in each
//! layer, and one central UAV per layer hovering above the ground station.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::rng;

/// Substream ids for the per-layer deployment draws.
const STREAM_LOW: u64 = 1;
const STREAM_HIGH: u64 = 2;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AirspaceError {
    #[error("configuration invalid: {0}")]
    Config(&'static str),
    #[error("distance must be nonnegative, got {0}")]
    NegativeDistance(f64),
}

/// Which of the two stacked layers a point or draw belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Low,
    High,
}

/// Axis-aligned box holding one airspace layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl LayerBox {
    pub fn volume(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min) * (self.z_max - self.z_min)
    }

    pub fn center(&self) -> [f64; 3] {
        [
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
            0.5 * (self.z_min + self.z_max),
        ]
    }

    /// Full space diagonal, the natural truncation radius for integrals
    /// over distances inside the box.
    pub fn diagonal(&self) -> f64 {
        let dx = self.x_max - self.x_min;
        let dy = self.y_max - self.y_min;
        let dz = self.z_max - self.z_min;
        libm::sqrt(dx * dx + dy * dy + dz * dz)
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        p[0] >= self.x_min
            && p[0] <= self.x_max
            && p[1] >= self.y_min
            && p[1] <= self.y_max
            && p[2] >= self.z_min
            && p[2] <= self.z_max
    }

    pub fn uniform_point(&self, rng: &mut impl RngCore) -> [f64; 3] {
        [
            rng::uniform_in(rng, self.x_min, self.x_max),
            rng::uniform_in(rng, self.y_min, self.y_max),
            rng::uniform_in(rng, self.z_min, self.z_max),
        ]
    }
}

/// Geometry of the two stacked airspaces and their deployment densities.
///
/// The x extent is `[-half_extent_x, half_extent_x]` (likewise y); the low
/// layer spans `[0, layer_thickness]`, the high layer sits above the
/// isolation layer, and the total vertical extent is
/// `2 * layer_thickness + isolation_thickness`.
#[derive(Debug, Clone, PartialEq)]
pub struct AirspaceConfig {
    pub half_extent_x: f64,
    pub half_extent_y: f64,
    pub layer_thickness: f64,
    pub isolation_thickness: f64,
    /// Volumetric intensity of low-altitude sub-UAVs, per cubic meter.
    pub density_low: f64,
    /// Volumetric intensity of high-altitude sub-UAVs, per cubic meter.
    pub density_high: f64,
    /// Ground station position; the z component is the GS height.
    pub gs_position: [f64; 3],
    /// Hover height of the low-altitude central UAV.
    pub central_low_height: f64,
    /// Hover height of the high-altitude central UAV.
    pub central_high_height: f64,
    /// Longest distance the central UAV can serve.
    pub max_service_range: f64,
}

impl AirspaceConfig {
    /// Total vertical extent `L_z`.
    pub fn total_height(&self) -> f64 {
        2.0 * self.layer_thickness + self.isolation_thickness
    }

    pub fn layer_box(&self, layer: Layer) -> LayerBox {
        let (z_min, z_max) = match layer {
            Layer::Low => (0.0, self.layer_thickness),
            Layer::High => (
                self.layer_thickness + self.isolation_thickness,
                self.total_height(),
            ),
        };
        LayerBox {
            x_min: -self.half_extent_x,
            x_max: self.half_extent_x,
            y_min: -self.half_extent_y,
            y_max: self.half_extent_y,
            z_min,
            z_max,
        }
    }

    pub fn layer_volume(&self) -> f64 {
        4.0 * self.half_extent_x * self.half_extent_y * self.layer_thickness
    }

    pub fn density(&self, layer: Layer) -> f64 {
        match layer {
            Layer::Low => self.density_low,
            Layer::High => self.density_high,
        }
    }

    /// Central UAV position for a layer: directly above the ground station
    /// at the configured hover height.
    pub fn central_position(&self, layer: Layer) -> [f64; 3] {
        let h = match layer {
            Layer::Low => self.central_low_height,
            Layer::High => self.central_high_height,
        };
        [self.gs_position[0], self.gs_position[1], h]
    }

    /// Set the layer densities from expected sub-UAV counts per layer.
    ///
    /// Swept densities are quoted as counts (1..60 per layer); dividing by
    /// the layer volume yields the volumetric intensity used everywhere.
    pub fn with_expected_counts(mut self, low: f64, high: f64) -> Self {
        let v = self.layer_volume();
        self.density_low = low / v;
        self.density_high = high / v;
        self
    }

    pub fn validate(&self) -> Result<(), AirspaceError> {
        let lengths = [
            self.half_extent_x,
            self.half_extent_y,
            self.layer_thickness,
            self.isolation_thickness,
            self.max_service_range,
        ];
        if lengths.iter().any(|l| !l.is_finite() || *l <= 0.0) {
            return Err(AirspaceError::Config("all lengths must be finite and positive"));
        }
        if !self.density_low.is_finite()
            || !self.density_high.is_finite()
            || self.density_low < 0.0
            || self.density_high < 0.0
        {
            return Err(AirspaceError::Config("densities must be finite and nonnegative"));
        }
        if self.gs_position.iter().any(|c| !c.is_finite()) {
            return Err(AirspaceError::Config("ground station position must be finite"));
        }
        if !(0.0..=self.layer_thickness).contains(&self.central_low_height) {
            return Err(AirspaceError::Config("central_low_height outside the low layer"));
        }
        let high_lo = self.layer_thickness + self.isolation_thickness;
        if !(high_lo..=self.total_height()).contains(&self.central_high_height) {
            return Err(AirspaceError::Config("central_high_height outside the high layer"));
        }
        Ok(())
    }
}

impl Default for AirspaceConfig {
    /// Two 4.5 km thick layers over a 30 x 30 km footprint with a 1 km
    /// isolation layer, 20 expected sub-UAVs per layer, central UAVs at the
    /// layer mid-heights and the ground station at 50 m.
    fn default() -> Self {
        let cfg = Self {
            half_extent_x: 15_000.0,
            half_extent_y: 15_000.0,
            layer_thickness: 4500.0,
            isolation_thickness: 1000.0,
            density_low: 0.0,
            density_high: 0.0,
            gs_position: [0.0, 0.0, 50.0],
            central_low_height: 2250.0,
            central_high_height: 7750.0,
            max_service_range: 45_000.0,
        };
        cfg.with_expected_counts(20.0, 20.0)
    }
}

/// One realized deployment: sub-UAV positions per layer plus the central
/// UAVs and the seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub low_uavs: Vec<[f64; 3]>,
    pub high_uavs: Vec<[f64; 3]>,
    pub central_low: [f64; 3],
    pub central_high: [f64; 3],
    pub seed: u64,
}

impl Deployment {
    /// Draw a full two-layer deployment. The two layers consume independent
    /// substreams of `seed`, so their samples are uncorrelated.
    pub fn sample(config: &AirspaceConfig, seed: u64) -> Result<Self, AirspaceError> {
        Ok(Self {
            low_uavs: sample_ppp(config, Layer::Low, seed)?,
            high_uavs: sample_ppp(config, Layer::High, seed)?,
            central_low: config.central_position(Layer::Low),
            central_high: config.central_position(Layer::High),
            seed,
        })
    }
}

/// Sample a Poisson point process in one layer box.
///
/// The count is Poisson with mean `density * layer volume` and positions are
/// i.i.d. uniform in the box. Deterministic given `seed`.
pub fn sample_ppp(
    config: &AirspaceConfig,
    layer: Layer,
    seed: u64,
) -> Result<Vec<[f64; 3]>, AirspaceError> {
    config.validate()?;
    let stream = match layer {
        Layer::Low => STREAM_LOW,
        Layer::High => STREAM_HIGH,
    };
    let mut rng = rng::substream(seed, stream);
    let bbox = config.layer_box(layer);
    let mean = config.density(layer) * bbox.volume();
    let count = rng::poisson(&mut rng, mean);
    Ok((0..count).map(|_| bbox.uniform_point(&mut rng)).collect())
}

/// Nearest-neighbor distance CDF for a PPP of the given volumetric density:
/// `1 - exp(-(4/3) pi density d^3)`.
pub fn nn_distance_cdf(d: f64, density: f64) -> Result<f64, AirspaceError> {
    if d < 0.0 {
        return Err(AirspaceError::NegativeDistance(d));
    }
    let exponent = 4.0 / 3.0 * core::f64::consts::PI * density * d * d * d;
    Ok(1.0 - libm::exp(-exponent))
}

/// Nearest-neighbor distance PDF, the derivative of [`nn_distance_cdf`]:
/// `4 pi density d^2 exp(-(4/3) pi density d^3)`.
pub fn nn_distance_pdf(d: f64, density: f64) -> Result<f64, AirspaceError> {
    if d < 0.0 {
        return Err(AirspaceError::NegativeDistance(d));
    }
    let pi = core::f64::consts::PI;
    let exponent = 4.0 / 3.0 * pi * density * d * d * d;
    Ok(4.0 * pi * density * d * d * libm::exp(-exponent))
}

/// Inverse of [`nn_distance_cdf`]: the distance at which the CDF reaches `u`.
pub fn nn_distance_quantile(u: f64, density: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&u) && density > 0.0);
    let pi = core::f64::consts::PI;
    libm::cbrt(-libm::log(1.0 - u) * 3.0 / (4.0 * pi * density))
}

/// Euclidean distance between two points.
pub fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    libm::sqrt(dx * dx + dy * dy + dz * dz)
}
