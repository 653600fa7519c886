//! Probabilistic model of VG output for one hour.
//!
//! Output is Beta distributed on `[0, capacity]`. The distribution is built
//! from a point forecast (mean) and an error variance; when only a point
//! forecast is known, the variance follows the mean-conditional rule
//! `var_n = c * mean_n * (1 - mean_n)` on the normalized scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bracketed_newton, incomplete_beta_pair, ln_beta, log_beta_kernel};

/// Default coefficient `c` of the mean-conditional variance rule.
pub const DEFAULT_VARIANCE_COEFFICIENT: f64 = 0.05;

/// Normalized variance is kept within these fractions of `mean_n * (1 - mean_n)`.
pub const MIN_VARIANCE_FRACTION: f64 = 1e-6;
pub const MAX_VARIANCE_FRACTION: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastDistribution {
    capacity: f64,
    mean: f64,
    variance: f64,
    shape_a: f64,
    shape_b: f64,
    variance_clamped: bool,
}

/// Multiplier applied to the forecast-error variance.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarianceScale(f64);

impl VarianceScale {
    pub fn new(factor: f64) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(Error::domain(format!("variance scale must be a finite number >= 0, got {factor}")));
        }
        Ok(Self(factor))
    }

    pub fn factor(self) -> f64 {
        self.0
    }
}

impl ForecastDistribution {
    /// Builds the Beta distribution whose mean and variance match the inputs.
    ///
    /// The variance is clamped into the feasible band; [`Self::variance_clamped`]
    /// reports whether that happened.
    pub fn from_mean_variance(capacity: f64, mean: f64, variance: f64) -> Result<Self> {
        if !(capacity > 0.0 && capacity.is_finite()) {
            return Err(Error::domain(format!("capacity must be positive, got {capacity}")));
        }
        if !(mean > 0.0 && mean < capacity) {
            return Err(Error::domain(format!("forecast mean {mean} must lie strictly inside (0, {capacity})")));
        }
        if variance.is_nan() {
            return Err(Error::domain("forecast variance is NaN"));
        }
        let mu = mean / capacity;
        let spread = mu * (1.0 - mu);
        let requested = variance / (capacity * capacity);
        let clamped_n = requested.clamp(MIN_VARIANCE_FRACTION * spread, MAX_VARIANCE_FRACTION * spread);
        let variance_clamped = clamped_n != requested;
        let (variance, var_n) = if variance_clamped {
            (clamped_n * capacity * capacity, clamped_n)
        } else {
            (variance, requested)
        };
        let concentration = spread / var_n - 1.0;
        Ok(Self {
            capacity,
            mean,
            variance,
            shape_a: mu * concentration,
            shape_b: (1.0 - mu) * concentration,
            variance_clamped,
        })
    }

    /// Mean-conditional variance rule: `var = c * mean * (capacity - mean)`.
    pub fn from_mean_coefficient(capacity: f64, mean: f64, coefficient: f64) -> Result<Self> {
        if !(coefficient > 0.0 && coefficient < 1.0) {
            return Err(Error::domain(format!("variance coefficient must lie in (0, 1), got {coefficient}")));
        }
        Self::from_mean_variance(capacity, mean, coefficient * mean * (capacity - mean))
    }

    pub fn from_shapes(capacity: f64, shape_a: f64, shape_b: f64) -> Result<Self> {
        if !(capacity > 0.0 && capacity.is_finite()) {
            return Err(Error::domain(format!("capacity must be positive, got {capacity}")));
        }
        if !(shape_a > 0.0 && shape_b > 0.0 && shape_a.is_finite() && shape_b.is_finite()) {
            return Err(Error::domain(format!("beta shapes must be positive, got ({shape_a}, {shape_b})")));
        }
        let total = shape_a + shape_b;
        let mu = shape_a / total;
        Ok(Self {
            capacity,
            mean: capacity * mu,
            variance: capacity * capacity * mu * (1.0 - mu) / (total + 1.0),
            shape_a,
            shape_b,
            variance_clamped: false,
        })
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn shapes(&self) -> (f64, f64) {
        (self.shape_a, self.shape_b)
    }

    pub fn variance_clamped(&self) -> bool {
        self.variance_clamped
    }

    fn check_in_range(&self, p: f64, what: &str) -> Result<f64> {
        if !(0.0..=self.capacity).contains(&p) {
            return Err(Error::domain(format!("{what} {p} outside [0, {}]", self.capacity)));
        }
        Ok(p / self.capacity)
    }

    fn normalized_density(&self, x: f64) -> f64 {
        let (a, b) = (self.shape_a, self.shape_b);
        let edge = |shape: f64, other: f64| {
            if shape < 1.0 {
                f64::INFINITY
            } else if shape == 1.0 {
                (-ln_beta(1.0, other)).exp()
            } else {
                0.0
            }
        };
        if x <= 0.0 {
            return edge(a, b);
        }
        if x >= 1.0 {
            return edge(b, a);
        }
        log_beta_kernel(a, b, x).exp() / (x * (1.0 - x))
    }

    /// Density in 1/MW. Infinite at an endpoint whose shape is below one.
    pub fn pdf(&self, p: f64) -> Result<f64> {
        let x = self.check_in_range(p, "output")?;
        Ok(self.normalized_density(x) / self.capacity)
    }

    fn cdf_pair(&self, p: f64) -> (f64, f64) {
        if p <= 0.0 {
            return (0.0, 1.0);
        }
        if p >= self.capacity {
            return (1.0, 0.0);
        }
        incomplete_beta_pair(self.shape_a, self.shape_b, p / self.capacity)
            .expect("shapes validated at construction")
    }

    /// `P(output <= p)`; arguments outside `[0, capacity]` clamp to 0 or 1.
    pub fn cdf(&self, p: f64) -> f64 {
        self.cdf_pair(p).0
    }

    /// `P(output > p)` without the cancellation of `1 - cdf(p)` in the upper tail.
    pub fn survival(&self, p: f64) -> f64 {
        self.cdf_pair(p).1
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain(format!("probability {q} outside [0, 1]")));
        }
        if q > 0.5 {
            self.invert(1.0 - q, true)
        } else {
            self.invert(q, false)
        }
    }

    /// The level exceeded with probability `tail`, i.e. `quantile(1 - tail)`
    /// without rounding `1 - tail`.
    pub fn upper_quantile(&self, tail: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&tail) {
            return Err(Error::domain(format!("probability {tail} outside [0, 1]")));
        }
        self.invert(tail, true)
    }

    fn invert(&self, prob: f64, from_top: bool) -> Result<f64> {
        if prob == 0.0 {
            return Ok(if from_top { self.capacity } else { 0.0 });
        }
        if prob == 1.0 {
            return Ok(if from_top { 0.0 } else { self.capacity });
        }
        let (a, b) = (self.shape_a, self.shape_b);
        let x = bracketed_newton(0.0, 1.0, 0.0, 1e-15, |x| {
            let (lower, upper) = incomplete_beta_pair(a, b, x).expect("shapes validated at construction");
            let residual = if from_top { prob - upper } else { lower - prob };
            (residual, self.normalized_density(x))
        });
        Ok(x * self.capacity)
    }

    /// `∫_lo^hi p f(p) dp` in MW.
    pub fn partial_expectation(&self, lo: f64, hi: f64) -> Result<f64> {
        let xl = self.check_in_range(lo, "lower bound")?;
        let xh = self.check_in_range(hi, "upper bound")?;
        if lo > hi {
            return Err(Error::domain(format!("inverted interval [{lo}, {hi}]")));
        }
        if lo == hi {
            return Ok(0.0);
        }
        let (a, b) = (self.shape_a, self.shape_b);
        let scale = self.capacity * a / (a + b);
        let (il, ql) = incomplete_beta_pair(a + 1.0, b, xl)?;
        let (ih, qh) = incomplete_beta_pair(a + 1.0, b, xh)?;
        // I(xh) - I(xl) == Q(xl) - Q(xh); take the pair with the smaller magnitudes
        let mass = if il + ih < ql + qh { ih - il } else { ql - qh };
        Ok(scale * mass.max(0.0))
    }

    /// `E[(output - k)^+]`, the expected surplus above a level `k`.
    pub fn expected_surplus_above(&self, k: f64) -> Result<f64> {
        if k.is_nan() {
            return Err(Error::domain("surplus level is NaN"));
        }
        if k >= self.capacity {
            return Ok(0.0);
        }
        if k <= 0.0 {
            return Ok(self.mean - k);
        }
        let upper = self.partial_expectation(k, self.capacity)?;
        Ok((upper - k * self.survival(k)).max(0.0))
    }

    /// `E[(k - output)^+]`, the expected shortfall below a level `k`.
    pub fn expected_shortfall_below(&self, k: f64) -> Result<f64> {
        if k.is_nan() {
            return Err(Error::domain("shortfall level is NaN"));
        }
        if k <= 0.0 {
            return Ok(0.0);
        }
        if k >= self.capacity {
            return Ok(k - self.mean);
        }
        let lower = self.partial_expectation(0.0, k)?;
        Ok((k * self.cdf(k) - lower).max(0.0))
    }

    /// Same mean, variance multiplied by `scale` and clamped into the feasible band.
    pub fn scale_variance(&self, scale: VarianceScale) -> Self {
        if scale.factor() == 1.0 {
            return *self;
        }
        Self::from_mean_variance(self.capacity, self.mean, self.variance * scale.factor())
            .expect("mean and capacity already validated")
    }

    /// Draws one output by inverting the CDF at a uniform variate in `(0, 1)`.
    pub fn sample_with_uniform(&self, u: f64) -> Result<f64> {
        self.quantile(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beta22() -> ForecastDistribution {
        ForecastDistribution::from_mean_variance(100.0, 50.0, 500.0).unwrap()
    }

    fn uniform() -> ForecastDistribution {
        ForecastDistribution::from_mean_variance(100.0, 50.0, 10_000.0 / 12.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn moment_matching_shapes() {
        let d = beta22();
        let (a, b) = d.shapes();
        close(a, 2.0, 1e-12);
        close(b, 2.0, 1e-12);
        assert!(!d.variance_clamped());

        let (a, b) = uniform().shapes();
        close(a, 1.0, 1e-12);
        close(b, 1.0, 1e-12);
    }

    #[test]
    fn infeasible_variance_is_clamped() {
        let d = ForecastDistribution::from_mean_variance(100.0, 50.0, 2500.0).unwrap();
        assert!(d.variance_clamped());
        close(d.variance(), 0.999 * 2500.0, 1e-9);
        let (a, b) = d.shapes();
        assert!(a > 0.0 && a < 1e-3 && (a - b).abs() < 1e-12);

        let tight = ForecastDistribution::from_mean_variance(100.0, 50.0, 0.0).unwrap();
        assert!(tight.variance_clamped());
        close(tight.variance(), 1e-6 * 2500.0, 1e-15);
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(ForecastDistribution::from_mean_variance(0.0, 0.0, 1.0).is_err());
        assert!(ForecastDistribution::from_mean_variance(100.0, 0.0, 1.0).is_err());
        assert!(ForecastDistribution::from_mean_variance(100.0, 100.0, 1.0).is_err());
        assert!(ForecastDistribution::from_mean_variance(100.0, 50.0, f64::NAN).is_err());
        assert!(ForecastDistribution::from_mean_coefficient(100.0, 50.0, 1.0).is_err());
    }

    #[test]
    fn analytic_moments_match_inputs() {
        for &(cap, mean, var) in &[(100.0, 50.0, 500.0), (250.0, 20.0, 300.0), (80.0, 79.0, 0.5)] {
            let d = ForecastDistribution::from_mean_variance(cap, mean, var).unwrap();
            let (a, b) = d.shapes();
            let m = cap * a / (a + b);
            let v = cap * cap * a * b / ((a + b).powi(2) * (a + b + 1.0));
            assert!(((m - mean) / mean).abs() < 1e-9);
            assert!(((v - var) / var).abs() < 1e-9);
        }
    }

    #[test]
    fn pdf_values() {
        close(uniform().pdf(30.0).unwrap(), 0.01, 1e-14);
        close(beta22().pdf(50.0).unwrap(), 0.015, 1e-14);
        assert_eq!(beta22().pdf(100.0).unwrap(), 0.0);
        let exact_uniform = ForecastDistribution::from_shapes(100.0, 1.0, 1.0).unwrap();
        close(exact_uniform.pdf(100.0).unwrap(), 0.01, 1e-12);
        let spiky = ForecastDistribution::from_shapes(100.0, 0.5, 0.5).unwrap();
        assert!(spiky.pdf(0.0).unwrap().is_infinite());
        assert!(beta22().pdf(-1.0).is_err());
        assert!(beta22().pdf(100.5).is_err());
    }

    #[test]
    fn cdf_values() {
        close(beta22().cdf(50.0), 0.5, 1e-14);
        close(uniform().cdf(25.0), 0.25, 1e-14);
        close(beta22().cdf(75.0), 0.84375, 1e-14);
        assert_eq!(beta22().cdf(-5.0), 0.0);
        assert_eq!(beta22().cdf(0.0), 0.0);
        assert_eq!(beta22().cdf(100.0), 1.0);
        assert_eq!(beta22().cdf(1e9), 1.0);
    }

    #[test]
    fn quantile_values() {
        close(beta22().quantile(0.5).unwrap(), 50.0, 1e-9);
        close(uniform().quantile(0.8).unwrap(), 80.0, 1e-9);
        close(beta22().quantile(0.84375).unwrap(), 75.0, 1e-9);
        assert_eq!(beta22().quantile(0.0).unwrap(), 0.0);
        assert_eq!(beta22().quantile(1.0).unwrap(), 100.0);
        assert!(beta22().quantile(1.1).is_err());
        assert!(beta22().quantile(-0.1).is_err());
        assert!(beta22().quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_in_far_tails() {
        let d = ForecastDistribution::from_shapes(100.0, 0.4, 3.0).unwrap();
        for &q in &[1e-12, 1e-6, 0.999_999, 1.0 - 1e-12] {
            let p = d.quantile(q).unwrap();
            assert!((d.cdf(p) - q).abs() <= 1e-8, "q={q} p={p} cdf={}", d.cdf(p));
        }
    }

    #[test]
    fn partial_expectation_values() {
        close(beta22().partial_expectation(0.0, 100.0).unwrap(), 50.0, 1e-12);
        assert_eq!(beta22().partial_expectation(40.0, 40.0).unwrap(), 0.0);
        close(beta22().partial_expectation(50.0, 100.0).unwrap(), 34.375, 1e-12);
        assert!(beta22().partial_expectation(60.0, 40.0).is_err());
        assert!(beta22().partial_expectation(-1.0, 40.0).is_err());
        close(beta22().expected_surplus_above(50.0).unwrap(), 9.375, 1e-12);
        close(beta22().expected_shortfall_below(50.0).unwrap(), 9.375, 1e-12);
        assert_eq!(beta22().expected_surplus_above(100.0).unwrap(), 0.0);
        assert_eq!(beta22().expected_shortfall_below(0.0).unwrap(), 0.0);
    }

    #[test]
    fn variance_scaling() {
        let d = beta22();
        assert_eq!(d.scale_variance(VarianceScale::new(1.0).unwrap()), d);

        let wide = d.scale_variance(VarianceScale::new(2.0).unwrap());
        assert_eq!(wide.mean(), 50.0);
        close(wide.variance(), 1000.0, 1e-9);
        // moment equations: k = 0.25 / 0.1 - 1 = 1.5, a = b = 0.75
        let (a, b) = wide.shapes();
        close(a, 0.75, 1e-12);
        close(b, 0.75, 1e-12);

        let flat = d.scale_variance(VarianceScale::new(0.0).unwrap());
        assert!(flat.variance_clamped());
        assert_eq!(flat.mean(), 50.0);
        close(flat.variance(), 1e-6 * 2500.0, 1e-15);

        assert!(VarianceScale::new(-1.0).is_err());
    }
}
