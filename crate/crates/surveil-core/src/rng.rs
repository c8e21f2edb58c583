//! Seedable, splittable random number generation and the distribution
//! samplers used by the stochastic models.
//!
//! Everything is built on `ChaCha12`: one 64-bit seed selects the generator
//! and a stream id selects an independent substream, so parallel draws
//! (layers, sweep points, Monte Carlo trials) stay uncorrelated and
//! reproducible. The samplers are hand-rolled so that seeded outputs are
//! stable regardless of external crate versions.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// An independent substream of the generator identified by `(seed, stream)`.
pub fn substream(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Cheap per-trial fork of an already-seeded generator onto another stream.
pub fn fork(base: &ChaCha12Rng, stream: u64) -> ChaCha12Rng {
    let mut rng = base.clone();
    rng.set_stream(stream);
    rng
}

/// Uniform draw in `[0, 1)` with 53-bit resolution.
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Uniform draw in `(0, 1]`; safe to pass through `ln`.
pub fn uniform_open(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
}

/// Uniform draw in `[lo, hi)`.
pub fn uniform_in(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// Unit-mean exponential draw, the small-scale Rayleigh power fading gain.
pub fn exp1(rng: &mut impl RngCore) -> f64 {
    -libm::log(uniform_open(rng))
}

/// Standard normal draw (Box-Muller).
pub fn standard_normal(rng: &mut impl RngCore) -> f64 {
    let r = libm::sqrt(-2.0 * libm::log(uniform_open(rng)));
    let theta = 2.0 * core::f64::consts::PI * uniform(rng);
    r * libm::cos(theta)
}

/// Poisson draw with the given mean (Knuth's product method).
///
/// Exact for the means used here (at most a few hundred points per layer).
pub fn poisson(rng: &mut impl RngCore, mean: f64) -> u64 {
    debug_assert!((0.0..700.0).contains(&mean), "poisson mean out of range");
    if mean <= 0.0 {
        return 0;
    }
    let limit = libm::exp(-mean);
    let mut count = 0u64;
    let mut product = uniform(rng);
    while product > limit {
        count += 1;
        product *= uniform(rng);
    }
    count
}

/// Unit-mean Gamma draw with shape `shape` and scale `1/shape`.
///
/// Shape 1 reduces to the exponential fading gain; larger shapes model less
/// severe fading. Uses Marsaglia-Tsang squeeze with the usual boost for
/// shapes below one.
pub fn gamma_unit_mean(rng: &mut impl RngCore, shape: f64) -> f64 {
    debug_assert!(shape > 0.0);
    gamma_std(rng, shape) / shape
}

fn gamma_std(rng: &mut impl RngCore, shape: f64) -> f64 {
    if shape < 1.0 {
        let boost = libm::pow(uniform_open(rng), 1.0 / shape);
        return boost * gamma_std(rng, shape + 1.0);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / libm::sqrt(9.0 * d);
    loop {
        let x = standard_normal(rng);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v3 = v * v * v;
        let u = uniform_open(rng);
        if libm::log(u) < 0.5 * x * x + d - d * v3 + d * libm::log(v3) {
            return d * v3;
        }
    }
}

/// One unit-mean Rician power gain with shape factor `k`.
///
/// `k` is the ratio of specular to scattered power; `k = 0` is Rayleigh and
/// `k -> inf` collapses to the deterministic gain 1.
pub fn rician_power_gain(rng: &mut impl RngCore, k: f64) -> f64 {
    debug_assert!(k >= 0.0);
    if k.is_infinite() {
        return 1.0;
    }
    let los = libm::sqrt(k / (k + 1.0));
    let sigma = libm::sqrt(0.5 / (k + 1.0));
    let re = los + sigma * standard_normal(rng);
    let im = sigma * standard_normal(rng);
    re * re + im * im
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_are_independent_and_reproducible() {
        let a: alloc::vec::Vec<u64> = (0..8).map(|_| substream(9, 1).next_u64()).collect();
        assert!(a.iter().all(|&x| x == a[0]));
        assert_ne!(substream(9, 1).next_u64(), substream(9, 2).next_u64());
        assert_ne!(substream(9, 1).next_u64(), substream(10, 1).next_u64());
    }

    #[test]
    fn uniform_bounds() {
        let mut rng = substream(1, 0);
        for _ in 0..10_000 {
            let u = uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
            let v = uniform_open(&mut rng);
            assert!(v > 0.0 && v <= 1.0);
        }
    }

    #[test]
    fn exp1_unit_mean() {
        let mut rng = substream(2, 0);
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| exp1(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn poisson_mean_and_zero() {
        let mut rng = substream(3, 0);
        assert_eq!(poisson(&mut rng, 0.0), 0);
        let n = 50_000;
        let mean: f64 = (0..n).map(|_| poisson(&mut rng, 12.5) as f64).sum::<f64>() / n as f64;
        assert!((mean - 12.5).abs() < 0.1, "mean {mean}");
    }

    #[test]
    fn gamma_unit_mean_holds_for_various_shapes() {
        let mut rng = substream(4, 0);
        for &shape in &[0.5, 1.0, 2.0, 4.5] {
            let n = 200_000;
            let mean: f64 =
                (0..n).map(|_| gamma_unit_mean(&mut rng, shape)).sum::<f64>() / n as f64;
            assert!((mean - 1.0).abs() < 0.02, "shape {shape}: mean {mean}");
        }
    }

    #[test]
    fn rician_gain_limits() {
        let mut rng = substream(5, 0);
        assert_eq!(rician_power_gain(&mut rng, f64::INFINITY), 1.0);
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| rician_power_gain(&mut rng, 3.0)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }
}
