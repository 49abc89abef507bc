use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};

/// Standard normal CDF Φ(z).
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Inverse of [`normal_cdf`].
pub fn normal_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

/// `count` uniforms in (0, 1], reproducible for a given seed on every platform.
pub fn uniform_stream(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count).map(|_| 1.0 - rng.gen::<f64>()).collect()
}

/// Samples from a normal law `N(mean, width²)` conditioned on `x > lower_bound`,
/// by inverting the truncated CDF. Pass `f64::NEG_INFINITY` for no truncation.
pub fn rng_truncated_normal(mean: f64, width: f64, lower_bound: f64, seed: u64, count: usize) -> Result<Vec<f64>> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::param("width", "must be positive and finite"));
    }
    if !mean.is_finite() || lower_bound.is_nan() {
        return Err(Error::param("mean", "must be finite"));
    }
    let alpha = (lower_bound - mean) / width;
    // Upper-tail mass Q(α) = P(Z > α), evaluated without cancellation.
    let mass = 0.5 * erfc(alpha / std::f64::consts::SQRT_2);
    if mass < 1e-6 {
        return Err(Error::Truncation(mass));
    }
    Ok(uniform_stream(seed, count)
        .into_iter()
        .map(|u| {
            // P(Z > z) = u·Q(α)  ⇒  z = √2·erfc⁻¹(2uQ(α))
            let z = std::f64::consts::SQRT_2 * erfc_inv(2.0 * u * mass);
            (mean + width * z).max(lower_bound)
        })
        .collect())
}
