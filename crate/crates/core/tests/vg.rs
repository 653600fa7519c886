mod common;

use brs_core::direction::Direction;
use brs_core::vg::{
    expected_revenue, marginal_utility, marginal_utility_down, oic_report, optimal_quantity, revenue_realized,
    revenue_with_brs,
};
use brs_core::{BrsPosition, ForecastDistribution, PenaltyFactors, VgSchedule};
use common::{banded_revenue, beta_pdf, integrate};
use proptest::prelude::*;

fn beta22() -> ForecastDistribution {
    ForecastDistribution::from_shapes(100.0, 2.0, 2.0).unwrap()
}

#[test]
fn hand_evaluated_realized_revenue() {
    let s = VgSchedule::new(150.0, 100.0, 30.0).unwrap();
    let pf = PenaltyFactors::symmetric(0.3).unwrap();
    assert!((revenue_realized(&s, &pf, 120.0).unwrap() - 3420.0).abs() < 1e-9);
    assert!((revenue_realized(&s, &pf, 80.0).unwrap() - 2220.0).abs() < 1e-9);
    let pos = BrsPosition::new(20.0, 0.0, 0.0, 0.0);
    assert!((revenue_with_brs(&s, &pf, &pos, 130.0).unwrap() - 3810.0).abs() < 1e-9);
}

#[test]
fn expected_revenue_matches_quadrature() {
    let s = VgSchedule::new(100.0, 50.0, 30.0).unwrap();
    let pf = PenaltyFactors::symmetric(0.3).unwrap();
    let numeric = integrate(
        |p| banded_revenue(30.0, 50.0, 50.0, 0.3, 0.3, p) * beta_pdf(100.0, 2.0, 2.0, p),
        0.0,
        100.0,
        &[50.0],
        1e-11,
    );
    let closed = expected_revenue(&s, &pf, &BrsPosition::none(), &beta22()).unwrap();
    assert!((numeric - 1331.25).abs() < 1e-8);
    assert!((closed - numeric).abs() < 1e-8);
    let oic = oic_report(&s, &pf, &BrsPosition::none(), &beta22()).unwrap();
    assert!((oic.total_oic - 168.75).abs() < 1e-8);
}

#[test]
fn marginal_value_area_is_the_unhedged_over_penalty() {
    let s = VgSchedule::new(100.0, 35.0, 42.0).unwrap();
    let pf = PenaltyFactors::new(0.4, 0.2).unwrap();
    let d = ForecastDistribution::from_mean_coefficient(100.0, 45.0, 0.07).unwrap();
    let area = integrate(
        |r| marginal_utility_down(&s, &pf, &d, r).unwrap(),
        0.0,
        s.headroom(Direction::DownCoversOver),
        &[],
        1e-10,
    );
    let (a, b) = d.shapes();
    let penalty = integrate(|p| 42.0 * 0.4 * (p - 35.0).max(0.0) * beta_pdf(100.0, a, b, p), 0.0, 100.0, &[35.0], 1e-10);
    assert!((area / penalty - 1.0).abs() < 1e-4, "{area} vs {penalty}");
}

fn hour() -> impl Strategy<Value = (VgSchedule, PenaltyFactors, ForecastDistribution)> {
    (20.0f64..300.0, 0.05f64..0.95, 0.05f64..0.95, 0.01f64..0.3, 1.0f64..90.0, 0.0f64..1.0, 0.0f64..1.0).prop_map(
        |(c, m, sched, coef, price, over, under)| {
            (
                VgSchedule::new(c, c * sched, price).unwrap(),
                PenaltyFactors::new(over, under).unwrap(),
                ForecastDistribution::from_mean_coefficient(c, c * m, coef).unwrap(),
            )
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn expected_revenue_rises_with_cover((s, pf, d) in hour(), x in 0.0f64..1.0, y in 0.0f64..1.0, up in any::<bool>()) {
        let direction = if up { Direction::UpCoversUnder } else { Direction::DownCoversOver };
        let h = s.headroom(direction);
        let (lo, hi) = if x <= y { (x * h, y * h) } else { (y * h, x * h) };
        let at = |q: f64| {
            let pos = if up { BrsPosition::new(0.0, q, 0.0, 0.0) } else { BrsPosition::new(q, 0.0, 0.0, 0.0) };
            expected_revenue(&s, &pf, &pos, &d).unwrap()
        };
        prop_assert!(at(hi) >= at(lo) - 1e-9 * at(lo).abs());
    }

    #[test]
    fn demand_rises_with_penalty((s, _, d) in hour(), a1 in 0.0f64..1.0, a2 in 0.0f64..1.0, price in 0.0f64..30.0, up in any::<bool>()) {
        let direction = if up { Direction::UpCoversUnder } else { Direction::DownCoversOver };
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let q = |a: f64| optimal_quantity(&s, &PenaltyFactors::symmetric(a).unwrap(), &d, direction, price).unwrap();
        prop_assert!(q(hi) >= q(lo));
    }

    #[test]
    fn marginal_value_is_bounded_by_the_ceiling((s, pf, d) in hour(), frac in 0.0f64..1.0, up in any::<bool>()) {
        let direction = if up { Direction::UpCoversUnder } else { Direction::DownCoversOver };
        let v = marginal_utility(&s, &pf, &d, direction, frac * s.headroom(direction)).unwrap();
        prop_assert!(v >= 0.0 && v <= s.da_price * pf.for_direction(direction));
    }

    #[test]
    fn realized_revenue_matches_the_banded_payoff((s, pf, _) in hour(), down in 0.0f64..1.0, up in 0.0f64..1.0, actual in 0.0f64..1.0) {
        let pos = BrsPosition::new(
            down * s.headroom(Direction::DownCoversOver),
            up * s.headroom(Direction::UpCoversUnder),
            0.0,
            0.0,
        );
        let p = actual * s.capacity;
        let want = banded_revenue(
            s.da_price,
            s.da_quantity - pos.up_covers_under.quantity,
            s.da_quantity + pos.down_covers_over.quantity,
            pf.over,
            pf.under,
            p,
        );
        let got = revenue_with_brs(&s, &pf, &pos, p).unwrap();
        prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0));
    }
}
