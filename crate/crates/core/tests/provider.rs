mod common;

use brs_core::provider::{
    payoff_delta, reference_units, revenue_unit, revenue_unit_with_brs, risk_report, rt_dispatch, DispatchableUnit,
    JointScenario, ScenarioGenerator, UnitKind,
};
use proptest::prelude::*;

fn sample_var(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
}

fn cov(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (n - 1.0)
}

#[test]
fn base_load_ignores_real_time_price() {
    let (base, _) = reference_units(30.0);
    for price in [-50.0, 0.0, 10.0, 30.0, 1e4] {
        assert_eq!(rt_dispatch(&base, price), base.da_schedule);
    }
}

#[test]
fn hand_evaluated_marginal_revenue() {
    let u = DispatchableUnit {
        p_min: 50.0,
        p_max: 250.0,
        marginal_cost: 30.0,
        da_schedule: 200.0,
        kind: UnitKind::Marginal,
        upward_opportunity_cost: 0.0,
    };
    let sc = JointScenario {
        da_price: 30.0,
        rt_price: 40.0,
        executed: 0.0,
    };
    assert_eq!(revenue_unit(&u, &sc), 8000.0);
    let sc = JointScenario {
        da_price: 30.0,
        rt_price: 25.0,
        executed: 20.0,
    };
    assert_eq!(payoff_delta(&sc), 100.0);
}

#[test]
fn base_load_risk_is_the_delta_variance() {
    let (base, _) = reference_units(30.0);
    let sc = ScenarioGenerator::default().generate(5000, 3).unwrap();
    let deltas: Vec<f64> = sc.iter().map(|s| (s.da_price - s.rt_price) * s.executed).collect();
    let r = risk_report(&base, &sc).unwrap();
    let want = sample_var(&deltas);
    assert!((r.incremental_variance - want).abs() <= 1e-9 * want);
    assert!((r.variance_with - want).abs() <= 1e-9 * want);
}

#[test]
fn negative_covariance_makes_risk_subadditive() {
    let (_, marginal) = reference_units(30.0);
    let sc = ScenarioGenerator {
        correlation: 0.6,
        ..ScenarioGenerator::default()
    }
    .generate(50_000, 4)
    .unwrap();
    let deltas: Vec<f64> = sc.iter().map(|s| (s.da_price - s.rt_price) * s.executed).collect();
    let without: Vec<f64> = sc.iter().map(|s| revenue_unit(&marginal, s)).collect();
    assert!(cov(&deltas, &without) < 0.0);
    let r = risk_report(&marginal, &sc).unwrap();
    assert!(r.incremental_variance < sample_var(&deltas));
}

#[test]
fn independent_generators_have_zero_mean_delta() {
    let (base, _) = reference_units(30.0);
    for seed in 0..5 {
        let sc = ScenarioGenerator::default().generate(100_000, seed).unwrap();
        let r = risk_report(&base, &sc).unwrap();
        assert!(r.expected_delta.abs() <= 3.0 * r.delta_stderr, "seed {seed}: {r:?}");
    }
}

proptest! {
    #[test]
    fn brs_changes_revenue_by_the_payoff_delta(
        p_min in 0i32..100,
        span in 10i32..300,
        at in 0.0f64..1.0,
        mc in 0i32..80,
        da in -20i32..150,
        rt in -20i32..150,
        ex in 0.0f64..1.0,
        marginal in any::<bool>(),
    ) {
        // integer inputs keep every product exact, so the identity must hold bit for bit
        let (p_min, p_max) = (f64::from(p_min), f64::from(p_min + span));
        let sched = (p_min + (at * f64::from(span)).floor()).min(p_max);
        let u = DispatchableUnit {
            p_min,
            p_max,
            marginal_cost: f64::from(mc),
            da_schedule: sched,
            kind: if marginal { UnitKind::Marginal } else { UnitKind::BaseLoad },
            upward_opportunity_cost: 0.0,
        };
        let executed = (p_min + (ex * f64::from(span)).floor()).min(p_max) - sched;
        let sc = JointScenario { da_price: f64::from(da), rt_price: f64::from(rt), executed };
        let diff = revenue_unit_with_brs(&u, &sc).unwrap() - revenue_unit(&u, &sc);
        prop_assert_eq!(diff, payoff_delta(&sc));
    }
}
