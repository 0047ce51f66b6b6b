//! Willingness-to-pay distribution: a Gaussian truncated to `[0, ∞)`.
//!
//! `mu` and `sigma` are the location and scale of the parent Gaussian, in
//! dollars per minute. They are kept as `f64` because calibration resolves
//! `mu` far below the 10⁻⁶ $/min fixed-point grid; samples and thresholds are
//! rounded to [`Rate`] at the boundary with the exact model.

use crate::error::{CalibrationError, ModelError};
use crate::money::Rate;
use crate::normal;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct BDistribution {
    mu: f64,
    sigma: f64,
    /// Parent-Gaussian mass on `[0, ∞)`.
    kept: f64,
    /// Φ(−mu/sigma), the parent mass below zero.
    below: f64,
}

impl BDistribution {
    pub fn new(mu: f64, sigma: f64) -> Result<Self, ModelError> {
        if !mu.is_finite() {
            return Err(ModelError::InvalidParams(format!(
                "mu must be finite, got {mu}"
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        let alpha = -mu / sigma;
        let kept = normal::sf(alpha);
        if kept <= 0.0 {
            return Err(ModelError::InvalidParams(format!(
                "mu = {mu}, sigma = {sigma} leaves no mass above zero"
            )));
        }
        Ok(BDistribution {
            mu,
            sigma,
            kept,
            below: normal::cdf(alpha),
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Always true; negative willingness-to-pay is cut off and renormalized.
    pub fn truncated_at_zero(&self) -> bool {
        true
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        normal::pdf((x - self.mu) / self.sigma) / (self.sigma * self.kept)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let z = (x - self.mu) / self.sigma;
        if z > 0.0 {
            1.0 - normal::sf(z) / self.kept
        } else {
            ((normal::cdf(z) - self.below) / self.kept).max(0.0)
        }
    }

    /// 1 − cdf, without cancellation in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let z = (x - self.mu) / self.sigma;
        if z > 0.0 {
            normal::sf(z) / self.kept
        } else {
            1.0 - ((normal::cdf(z) - self.below) / self.kept).max(0.0)
        }
    }

    /// Inverse cdf for `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64, CalibrationError> {
        if !(0.0..1.0).contains(&u) {
            return Err(CalibrationError::Numeric(format!(
                "quantile level {u} is outside [0, 1)"
            )));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        let lower = self.below + u * self.kept;
        let z = if lower <= 0.5 {
            normal::quantile(lower)
        } else {
            normal::upper_tail_quantile((1.0 - u) * self.kept)
        }
        .ok_or_else(|| CalibrationError::Numeric(format!("quantile solver failed at u = {u}")))?;
        Ok((self.mu + self.sigma * z).max(0.0))
    }

    /// Mean of the truncated distribution (not `mu`).
    pub fn mean(&self) -> f64 {
        let alpha = -self.mu / self.sigma;
        self.mu + self.sigma * normal::pdf(alpha) / self.kept
    }

    /// Inverse-transform sample rounded to the fixed-point rate grid.
    pub fn sample_rate(&self, u: f64) -> Result<Rate, CalibrationError> {
        let b = self.quantile(u)?;
        Ok(Rate::from_dollars_per_minute(b)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson on [a, b] with `n` (even) panels.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + k as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn density_integrates_to_one() {
        for (mu, sigma) in [(0.051, 0.03), (0.0, 0.02), (-0.02, 0.03), (0.2, 0.01)] {
            let d = BDistribution::new(mu, sigma).unwrap();
            let top = mu.max(0.0) + 40.0 * sigma;
            let mass = simpson(|x| d.pdf(x), 0.0, top, 20_000);
            assert!((mass - 1.0).abs() < 1e-9, "{mu} {sigma}: {mass}");
        }
    }

    #[test]
    fn cdf_matches_quadrature() {
        let d = BDistribution::new(0.051, 0.03).unwrap();
        for x in [0.001, 0.02, 0.051, 0.08, 0.15] {
            let q = simpson(|s| d.pdf(s), 0.0, x, 4000);
            assert!((d.cdf(x) - q).abs() < 1e-10, "{x}");
            assert!((d.cdf(x) + d.sf(x) - 1.0).abs() < 1e-15);
        }
        assert_eq!(d.cdf(0.0), 0.0);
        assert_eq!(d.cdf(-1.0), 0.0);
    }

    #[test]
    fn quantile_and_cdf_are_inverse() {
        for (mu, sigma) in [(0.051, 0.03), (0.0, 0.05), (-0.03, 0.02), (0.5, 0.01)] {
            let d = BDistribution::new(mu, sigma).unwrap();
            for i in 1..1000 {
                let u = i as f64 / 1000.0;
                let x = d.quantile(u).unwrap();
                assert!((d.cdf(x) - u).abs() < 1e-9, "{mu} {sigma} {u}");
            }
        }
    }

    #[test]
    fn mean_matches_quadrature() {
        let d = BDistribution::new(0.051, 0.03).unwrap();
        let m = simpson(|x| x * d.pdf(x), 0.0, 2.0, 40_000);
        assert!((d.mean() - m).abs() < 1e-10);
        assert!(d.mean() > d.mu());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BDistribution::new(0.05, 0.0).is_err());
        assert!(BDistribution::new(0.05, -1.0).is_err());
        assert!(BDistribution::new(f64::NAN, 1.0).is_err());
        assert!(BDistribution::new(-100.0, 1.0).is_err());
        let d = BDistribution::new(0.05, 0.01).unwrap();
        assert!(d.quantile(1.0).is_err());
        assert!(d.quantile(-0.1).is_err());
        assert_eq!(d.quantile(0.0).unwrap(), 0.0);
    }
}
