//! Test oracles that share no code with the library's closed forms.
#![allow(dead_code)]

use brs_core::direction::Direction;
use brs_core::io::{HourlyValue, OfferConfig, ScenarioConfig, SeriesSource, UnitConfig, VgConfig};
use brs_core::provider::UnitKind;
use brs_core::PenaltyFactors;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
// Gauss weights for the odd-indexed Kronrod nodes
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err) = gk15(f, a, b);
    if err <= tol || depth == 0 || (b - a).abs() < 1e-12 {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss-Kronrod integral of `f` over `[a, b]`, split at `breaks`.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.windows(2).map(|w| adapt(&mut f, w[0], w[1], tol, 40)).sum()
}

/// Beta density on `[0, c]` written out directly from its definition.
pub fn beta_pdf(c: f64, a: f64, b: f64, p: f64) -> f64 {
    if p <= 0.0 || p >= c {
        return 0.0;
    }
    let x = p / c;
    let ln_norm = statrs::function::gamma::ln_gamma(a + b)
        - statrs::function::gamma::ln_gamma(a)
        - statrs::function::gamma::ln_gamma(b);
    ((a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() + ln_norm).exp() / c
}

/// Realized VG revenue written from the banded payoff: paid λ inside
/// `[lo, hi]`, (1 - α_over)·λ above `hi`, charged (1 + α_under)·λ below `lo`.
pub fn banded_revenue(price: f64, lo: f64, hi: f64, over: f64, under: f64, p: f64) -> f64 {
    if p > hi {
        price * hi + (1.0 - over) * price * (p - hi)
    } else if p < lo {
        price * lo - (1.0 + under) * price * (lo - p)
    } else {
        price * p
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn zone(rng: &mut ChaCha8Rng) -> Option<String> {
    match rng.random_range(0..3) {
        0 => None,
        1 => Some("north".into()),
        _ => Some("south".into()),
    }
}

/// A valid scenario with random prices, participants, offers and zones.
/// Every VG's realized output is either given or left to the seed.
pub fn random_scenario(rng: &mut ChaCha8Rng, horizon: usize, claim_noise_sd: f64) -> ScenarioConfig {
    let da: Vec<f64> = (0..horizon).map(|_| uniform(rng, 5.0, 90.0)).collect();
    let rt: Vec<f64> = da.iter().map(|p| p + uniform(rng, -15.0, 25.0)).collect();
    let vg = (0..rng.random_range(1..=3))
        .map(|i| {
            let capacity = uniform(rng, 50.0, 300.0);
            let mean: Vec<f64> = (0..horizon).map(|_| capacity * uniform(rng, 0.05, 0.95)).collect();
            let schedule: Vec<f64> = mean.iter().map(|m| (m + uniform(rng, -10.0, 10.0)).clamp(0.0, capacity)).collect();
            VgConfig {
                id: format!("vg{i}"),
                capacity,
                zone: zone(rng),
                forecast_mean: SeriesSource::Inline(mean),
                da_schedule: rng.random_bool(0.5).then_some(SeriesSource::Inline(schedule)),
                realized: rng
                    .random_bool(0.5)
                    .then(|| SeriesSource::Inline((0..horizon).map(|_| uniform(rng, 0.0, capacity)).collect())),
                variance_coefficient: rng.random_bool(0.3).then(|| uniform(rng, 0.01, 0.2)),
            }
        })
        .collect();
    let units: Vec<UnitConfig> = (0..rng.random_range(1..=3))
        .map(|i| {
            let p_min = uniform(rng, 0.0, 100.0);
            let p_max = p_min + uniform(rng, 50.0, 300.0);
            let schedule: Vec<f64> = (0..horizon).map(|_| uniform(rng, p_min, p_max)).collect();
            UnitConfig {
                id: format!("u{i}"),
                kind: if rng.random_bool(0.5) { UnitKind::BaseLoad } else { UnitKind::Marginal },
                p_min,
                p_max,
                marginal_cost: uniform(rng, 0.0, 60.0),
                da_schedule: HourlyValue::PerHour(SeriesSource::Inline(schedule)),
                zone: zone(rng),
                upward_opportunity_cost: if rng.random_bool(0.3) { uniform(rng, 0.0, 2.0) } else { 0.0 },
                rt_output: rng
                    .random_bool(0.3)
                    .then(|| SeriesSource::Inline((0..horizon).map(|_| uniform(rng, p_min, p_max)).collect())),
            }
        })
        .collect();
    let mut offers = Vec::new();
    for hour in 1..=horizon as u32 {
        for _ in 0..rng.random_range(0..=6) {
            offers.push(OfferConfig {
                seller: units[rng.random_range(0..units.len())].id.clone(),
                hour,
                direction: if rng.random_bool(0.5) { Direction::DownCoversOver } else { Direction::UpCoversUnder },
                price: uniform(rng, 0.0, 12.0),
                quantity: uniform(rng, 1.0, 80.0),
            });
        }
    }
    ScenarioConfig {
        first_hour: 1,
        horizon,
        da_prices: SeriesSource::Inline(da),
        rt_prices: Some(SeriesSource::Inline(rt)),
        penalty: PenaltyFactors {
            over: uniform(rng, 0.0, 1.0),
            under: uniform(rng, 0.0, 1.5),
        },
        variance_coefficient: uniform(rng, 0.01, 0.2),
        variance_scales: vec![1.0],
        brs_price: None,
        vg,
        units,
        offers,
        congested_boundaries: if rng.random_bool(0.5) {
            vec![["north".into(), "south".into()]]
        } else {
            Vec::new()
        },
        claim_noise_sd,
        seed: rng.random(),
    }
}
