//! On-board processing run by a central UAV: a per-aircraft sliding window
//! of Minkowski distances decides whether each incoming position packet is
//! redundant (abandoned) or marks a discontinuity (relayed together with a
//! synthesized supplement packet).
//!
//! The supplement is interpolated on the circumsphere of the four most
//! recent positions; degenerate geometry (coplanar points, a constant
//! altitude track) falls back to the linear midpoint.

use alloc::vec::Vec;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MecError {
    #[error("invalid processing config: {0}")]
    Config(&'static str),
    #[error("window not warmed up")]
    NotWarmed,
    #[error("warm-up needs exactly {needed} reports, got {got}")]
    WarmUpLength { needed: usize, got: usize },
    #[error("trajectory needs at least {needed} reports, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("position components must be finite")]
    NonFinite,
    #[error("sequence numbers must increase per source")]
    SequenceOrder,
    #[error("degenerate geometry: {0}")]
    Degenerate(&'static str),
}

/// One position packet as processed on board.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionVector {
    pub lon: f64,
    pub lat: f64,
    pub alt: f64,
    /// Aircraft key the packet belongs to.
    pub source_id: u32,
    /// Packet index within the source's stream.
    pub sequence: u64,
}

impl PositionVector {
    pub fn coords(&self) -> [f64; 3] {
        [self.lon, self.lat, self.alt]
    }

    fn is_finite(&self) -> bool {
        self.lon.is_finite() && self.lat.is_finite() && self.alt.is_finite()
    }
}

/// Minkowski distance of order `p` over the raw (lon, lat, alt) components.
pub fn minkowski_distance(a: &PositionVector, b: &PositionVector, p: f64) -> f64 {
    debug_assert!(p >= 1.0);
    let sum = libm::pow((a.lon - b.lon).abs(), p)
        + libm::pow((a.lat - b.lat).abs(), p)
        + libm::pow((a.alt - b.alt).abs(), p);
    libm::pow(sum, 1.0 / p)
}

/// Processing parameters: window capacity `N`, Minkowski order `p` and the
/// circumsphere degeneracy threshold (relative to the coordinate spread).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MecConfig {
    pub window_capacity: usize,
    pub order: f64,
    pub degeneracy_threshold: f64,
}

impl Default for MecConfig {
    fn default() -> Self {
        Self { window_capacity: 5, order: 2.0, degeneracy_threshold: 1e-9 }
    }
}

impl MecConfig {
    pub fn validate(&self) -> Result<(), MecError> {
        if self.window_capacity < 2 {
            return Err(MecError::Config("window capacity must be at least 2"));
        }
        if !(self.order >= 1.0 && self.order.is_finite()) {
            return Err(MecError::Config("Minkowski order must be >= 1"));
        }
        if self.degeneracy_threshold.is_nan() || self.degeneracy_threshold <= 0.0 {
            return Err(MecError::Config("degeneracy threshold must be positive"));
        }
        Ok(())
    }
}

/// What happened to one processed packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Relay,
    Abandon,
    RelayWithSupplement,
}

/// Interpolation path used for a supplement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fallback {
    Sphere,
    Linear,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessDecision {
    pub action: Action,
    pub supplement: Option<PositionVector>,
    pub fallback_used: Fallback,
}

/// Per-aircraft sliding record of the last `N` reference Minkowski
/// distances plus the recent accepted positions feeding the circumsphere.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiWindow {
    config: MecConfig,
    distances: Vec<f64>,
    /// Up to the four most recently accepted reports, oldest first.
    history: Vec<PositionVector>,
    warmed: bool,
}

impl MinkowskiWindow {
    pub fn new(config: MecConfig) -> Result<Self, MecError> {
        config.validate()?;
        Ok(Self { config, distances: Vec::new(), history: Vec::new(), warmed: false })
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn history(&self) -> &[PositionVector] {
        &self.history
    }

    pub fn is_warmed(&self) -> bool {
        self.warmed
    }

    fn push_history(&mut self, report: PositionVector) {
        if self.history.len() == 4 {
            self.history.remove(0);
        }
        self.history.push(report);
    }

    /// Seed the window from the first `N + 1` reports: the `N` adjacent-pair
    /// distances fill the record and the last reports seed the history.
    pub fn warm_up(&mut self, first_reports: &[PositionVector]) -> Result<(), MecError> {
        let needed = self.config.window_capacity + 1;
        if first_reports.len() != needed {
            return Err(MecError::WarmUpLength { needed, got: first_reports.len() });
        }
        if first_reports.iter().any(|r| !r.is_finite()) {
            return Err(MecError::NonFinite);
        }
        if first_reports.windows(2).any(|w| w[1].sequence <= w[0].sequence) {
            return Err(MecError::SequenceOrder);
        }
        self.distances = first_reports
            .windows(2)
            .map(|w| minkowski_distance(&w[0], &w[1], self.config.order))
            .collect();
        self.history.clear();
        for report in first_reports.iter().skip(first_reports.len().saturating_sub(4)) {
            self.history.push(*report);
        }
        self.warmed = true;
        Ok(())
    }

    fn min_max(&self) -> (usize, usize) {
        let mut min_idx = 0;
        let mut max_idx = 0;
        for (i, d) in self.distances.iter().enumerate() {
            if *d < self.distances[min_idx] {
                min_idx = i;
            }
            if *d > self.distances[max_idx] {
                max_idx = i;
            }
        }
        (min_idx, max_idx)
    }

    /// Process one incoming packet against the window.
    ///
    /// A distance below every recorded reference marks redundancy: the
    /// packet is abandoned and the largest reference is replaced. A distance
    /// at or above every reference marks a discontinuity: the packet is
    /// relayed together with an interpolated supplement and the smallest
    /// reference is replaced. Anything in between relays unchanged.
    pub fn process(&mut self, incoming: PositionVector) -> Result<ProcessDecision, MecError> {
        if !self.warmed {
            return Err(MecError::NotWarmed);
        }
        if !incoming.is_finite() {
            return Err(MecError::NonFinite);
        }
        let previous = *self.history.last().expect("warmed window has history");
        if incoming.sequence <= previous.sequence {
            return Err(MecError::SequenceOrder);
        }
        let m = minkowski_distance(&incoming, &previous, self.config.order);
        let (min_idx, max_idx) = self.min_max();

        if m < self.distances[min_idx] {
            self.distances[max_idx] = m;
            return Ok(ProcessDecision {
                action: Action::Abandon,
                supplement: None,
                fallback_used: Fallback::None,
            });
        }
        if m >= self.distances[max_idx] {
            let (supplement, fallback) =
                supplement_point(&self.history, &incoming, &self.config)?;
            self.distances[min_idx] = m;
            self.push_history(incoming);
            return Ok(ProcessDecision {
                action: Action::RelayWithSupplement,
                supplement: Some(supplement),
                fallback_used: fallback,
            });
        }
        self.push_history(incoming);
        Ok(ProcessDecision { action: Action::Relay, supplement: None, fallback_used: Fallback::None })
    }
}

/// Circumsphere of four points by Cramer's rule on the equidistance system.
///
/// Each pair of points yields one linear equation for the center; the
/// coefficient determinant vanishes when the points are coplanar, which is
/// reported as degeneracy against `degeneracy_threshold * spread^3`.
pub fn circumsphere(
    points: &[PositionVector; 4],
    degeneracy_threshold: f64,
) -> Result<([f64; 3], f64), MecError> {
    // Solved in centroid-centered coordinates; the determinant is built
    // from coordinate differences and is translation invariant.
    let mut centroid = [0.0; 3];
    for p in points {
        for (c, v) in centroid.iter_mut().zip(p.coords()) {
            *c += v * 0.25;
        }
    }
    let shifted: Vec<[f64; 3]> = points
        .iter()
        .map(|p| {
            let c = p.coords();
            [c[0] - centroid[0], c[1] - centroid[1], c[2] - centroid[2]]
        })
        .collect();

    let row = |a: usize, b: usize| -> [f64; 3] {
        [
            shifted[a][0] - shifted[b][0],
            shifted[a][1] - shifted[b][1],
            shifted[a][2] - shifted[b][2],
        ]
    };
    let rows = [row(0, 1), row(2, 3), row(1, 2)];
    let beta = |a: usize, b: usize| -> f64 {
        let (pa, pb) = (shifted[a], shifted[b]);
        (pa[0] * pa[0] - pb[0] * pb[0]
            + pa[1] * pa[1]
            - pb[1] * pb[1]
            + pa[2] * pa[2]
            - pb[2] * pb[2])
            / 2.0
    };
    let constants = [beta(0, 1), beta(2, 3), beta(1, 2)];

    let det3 = |m: &[[f64; 3]; 3]| -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let x = det3(&rows);

    let mut spread: f64 = 0.0;
    for dim in 0..3 {
        let mut lo = shifted[0][dim];
        let mut hi = shifted[0][dim];
        for p in &shifted {
            lo = lo.min(p[dim]);
            hi = hi.max(p[dim]);
        }
        spread = spread.max(hi - lo);
    }
    if x.abs() <= degeneracy_threshold * spread * spread * spread {
        return Err(MecError::Degenerate("circumsphere points are coplanar"));
    }

    let mut center = [0.0; 3];
    for dim in 0..3 {
        let mut replaced = rows;
        for (r, c) in replaced.iter_mut().zip(constants) {
            r[dim] = c;
        }
        center[dim] = det3(&replaced) / x;
    }
    let radius = libm::sqrt(
        (center[0] - shifted[0][0]) * (center[0] - shifted[0][0])
            + (center[1] - shifted[0][1]) * (center[1] - shifted[0][1])
            + (center[2] - shifted[0][2]) * (center[2] - shifted[0][2]),
    );
    Ok((
        [center[0] + centroid[0], center[1] + centroid[1], center[2] + centroid[2]],
        radius,
    ))
}

/// Component-wise midpoint of two reports, the degenerate-geometry
/// supplement.
pub fn linear_supplement(k: &PositionVector, k_minus_1: &PositionVector) -> PositionVector {
    PositionVector {
        lon: (k.lon + k_minus_1.lon) / 2.0,
        lat: (k.lat + k_minus_1.lat) / 2.0,
        alt: (k.alt + k_minus_1.alt) / 2.0,
        source_id: k.source_id,
        sequence: k.sequence,
    }
}

/// Interpolate the supplement between `incoming` and the latest accepted
/// report: the intersection of the circumsphere through the four most
/// recent positions with the ray from the center through their midpoint,
/// taking the intersection on the midpoint's side.
///
/// Falls back to the linear midpoint when fewer than three history points
/// exist, the sphere is degenerate, or the midpoint coincides with the
/// center.
pub fn supplement_point(
    history: &[PositionVector],
    incoming: &PositionVector,
    config: &MecConfig,
) -> Result<(PositionVector, Fallback), MecError> {
    let previous = history.last().ok_or(MecError::NotWarmed)?;
    if history.len() < 3 {
        return Ok((linear_supplement(incoming, previous), Fallback::Linear));
    }
    let n = history.len();
    let points = [*incoming, history[n - 1], history[n - 2], history[n - 3]];
    let (center, radius) = match circumsphere(&points, config.degeneracy_threshold) {
        Ok(solution) => solution,
        Err(MecError::Degenerate(_)) => {
            return Ok((linear_supplement(incoming, previous), Fallback::Linear));
        }
        Err(other) => return Err(other),
    };
    let mid = [
        (incoming.lon + previous.lon) / 2.0,
        (incoming.lat + previous.lat) / 2.0,
        (incoming.alt + previous.alt) / 2.0,
    ];
    let dir = [mid[0] - center[0], mid[1] - center[1], mid[2] - center[2]];
    let len = libm::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
    if len <= config.degeneracy_threshold * radius {
        return Ok((linear_supplement(incoming, previous), Fallback::Linear));
    }
    let scale = radius / len;
    let point = PositionVector {
        lon: center[0] + dir[0] * scale,
        lat: center[1] + dir[1] * scale,
        alt: center[2] + dir[2] * scale,
        source_id: incoming.source_id,
        sequence: incoming.sequence,
    };
    Ok((point, Fallback::Sphere))
}

/// One entry of the optimized output stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessedReport {
    Relayed(PositionVector),
    Supplement(PositionVector),
}

impl ProcessedReport {
    pub fn position(&self) -> &PositionVector {
        match self {
            ProcessedReport::Relayed(p) | ProcessedReport::Supplement(p) => p,
        }
    }

    pub fn is_supplement(&self) -> bool {
        matches!(self, ProcessedReport::Supplement(_))
    }
}

/// Counters over one processed trajectory. Warm-up packets are relayed
/// unmodified and counted separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrajectoryStats {
    pub warmup_count: usize,
    pub relayed_count: usize,
    pub abandoned_count: usize,
    pub supplemented_count: usize,
}

/// Stream a whole trajectory through the window.
///
/// The optimized stream keeps the warm-up packets, every relayed packet,
/// and each supplement interleaved immediately before the packet whose
/// arrival triggered it.
pub fn run_trajectory(
    reports: &[PositionVector],
    config: &MecConfig,
) -> Result<(Vec<ProcessedReport>, TrajectoryStats), MecError> {
    config.validate()?;
    let warmup = config.window_capacity + 1;
    if reports.len() < warmup + 1 {
        return Err(MecError::TooShort { needed: warmup + 1, got: reports.len() });
    }
    let mut window = MinkowskiWindow::new(*config)?;
    window.warm_up(&reports[..warmup])?;

    let mut optimized = Vec::with_capacity(reports.len());
    optimized.extend(reports[..warmup].iter().copied().map(ProcessedReport::Relayed));
    let mut stats = TrajectoryStats { warmup_count: warmup, ..TrajectoryStats::default() };

    for report in &reports[warmup..] {
        let decision = window.process(*report)?;
        match decision.action {
            Action::Abandon => stats.abandoned_count += 1,
            Action::Relay => {
                stats.relayed_count += 1;
                optimized.push(ProcessedReport::Relayed(*report));
            }
            Action::RelayWithSupplement => {
                stats.relayed_count += 1;
                stats.supplemented_count += 1;
                let supplement = decision.supplement.expect("supplement accompanies the action");
                optimized.push(ProcessedReport::Supplement(supplement));
                optimized.push(ProcessedReport::Relayed(*report));
            }
        }
    }
    Ok((optimized, stats))
}
