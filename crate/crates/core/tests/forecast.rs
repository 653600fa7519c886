mod common;

use brs_core::{ForecastDistribution, VarianceScale};
use common::{beta_pdf, integrate};
use proptest::prelude::*;
use rand_distr::{Beta, Distribution};

#[test]
fn sampled_moments_match_the_fitted_shapes() {
    for (c, mean, var) in [(100.0, 50.0, 500.0), (100.0, 50.0, 10_000.0 / 12.0), (250.0, 60.0, 900.0)] {
        let d = ForecastDistribution::from_mean_variance(c, mean, var).unwrap();
        let (a, b) = d.shapes();
        let sampler = Beta::new(a, b).unwrap();
        let mut rng = common::rng(11);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| c * sampler.sample(&mut rng)).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((m - mean).abs() < 4.0 * (var / n as f64).sqrt(), "mean {m} vs {mean}");
        assert!((v / var - 1.0).abs() < 0.02, "variance {v} vs {var}");
    }
}

#[test]
fn beta22_shapes_and_uniform() {
    let (a, b) = ForecastDistribution::from_mean_variance(100.0, 50.0, 500.0).unwrap().shapes();
    assert!((a - 2.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
    let (a, b) = ForecastDistribution::from_mean_variance(100.0, 50.0, 10_000.0 / 12.0).unwrap().shapes();
    assert!((a - 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
}

#[test]
fn upper_half_partial_expectation_by_quadrature() {
    let d = ForecastDistribution::from_shapes(100.0, 2.0, 2.0).unwrap();
    let numeric = integrate(|p| p * beta_pdf(100.0, 2.0, 2.0, p), 50.0, 100.0, &[], 1e-12);
    assert!((numeric - 34.375).abs() < 1e-10);
    assert!((d.partial_expectation(50.0, 100.0).unwrap() - numeric).abs() < 1e-10);
}

#[test]
fn doubling_variance_refits_shapes() {
    let d = ForecastDistribution::from_shapes(100.0, 2.0, 2.0).unwrap();
    let s = d.scale_variance(VarianceScale::new(2.0).unwrap());
    assert_eq!(s.mean(), 50.0);
    assert!((s.variance() - 1000.0).abs() < 1e-9);
    // normalized moments 0.5 and 0.1: k = 0.25/0.1 - 1
    let (a, b) = s.shapes();
    assert!((a - 0.75).abs() < 1e-12 && (b - 0.75).abs() < 1e-12);
}

fn shapes() -> impl Strategy<Value = (f64, f64, f64)> {
    (10.0f64..500.0, 1.0f64..60.0, 1.0f64..60.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_is_the_integral_of_the_density((c, a, b) in shapes(), frac in 0.0f64..1.0) {
        let d = ForecastDistribution::from_shapes(c, a, b).unwrap();
        let p = c * frac;
        let numeric = integrate(|x| beta_pdf(c, a, b, x), 0.0, p, &[d.mean()], 1e-13);
        prop_assert!((d.cdf(p) - numeric).abs() < 1e-8, "{} vs {numeric}", d.cdf(p));
    }

    #[test]
    fn cdf_is_monotone((c, a, b) in shapes(), x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let d = ForecastDistribution::from_shapes(c, a, b).unwrap();
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(d.cdf(c * lo) <= d.cdf(c * hi));
    }

    #[test]
    fn full_partial_expectation_is_the_mean((c, a, b) in shapes()) {
        let d = ForecastDistribution::from_shapes(c, a, b).unwrap();
        let full = d.partial_expectation(0.0, c).unwrap();
        prop_assert!((full / d.mean() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn inversion_round_trips((c, a, b) in shapes(), q in 1e-6f64..(1.0 - 1e-6)) {
        let d = ForecastDistribution::from_shapes(c, a, b).unwrap();
        prop_assert!((d.cdf(d.quantile(q).unwrap()) - q).abs() < 1e-8);
    }

    #[test]
    fn variance_scaling_keeps_mean_and_clamps(
        c in 10.0f64..500.0,
        m in 0.02f64..0.98,
        coef in 0.01f64..0.5,
        k in 0.0f64..20.0,
    ) {
        let d = ForecastDistribution::from_mean_coefficient(c, c * m, coef).unwrap();
        let s = d.scale_variance(VarianceScale::new(k).unwrap());
        prop_assert_eq!(s.mean(), d.mean());
        let band = (d.mean() / c) * (1.0 - d.mean() / c) * c * c;
        let want = (d.variance() * k).clamp(1e-6 * band, 0.999 * band);
        prop_assert!((s.variance() / want - 1.0).abs() < 1e-9, "{} vs {want}", s.variance());
    }
}
