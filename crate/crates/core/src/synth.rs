//! Seeded synthetic price and wind series for tests and the bundled data.
//!
//! Wind is a persistent AR(1) process pushed through a logistic map; prices
//! follow a daily double-peak shape, a weekend dip, AR(1) noise and a
//! negative response to wind (merit-order effect), with rare spikes.

use chrono::{DateTime, Datelike, Duration, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::scenario::TimeSeries;

#[derive(Debug, Clone, Copy)]
pub struct SynthParams {
    pub mean_price: f64,
    pub daily_swing: f64,
    pub price_noise: f64,
    /// €/MWh drop per unit of capacity factor above the mean.
    pub wind_price_response: f64,
    pub spike_probability: f64,
    /// Logistic offset; 0 gives a mean capacity factor near 0.45.
    pub wind_bias: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            mean_price: 40.0,
            daily_swing: 10.0,
            price_noise: 5.0,
            wind_price_response: 30.0,
            spike_probability: 0.01,
            wind_bias: -0.2,
        }
    }
}

pub fn synthetic_series(hours: usize, seed: u64, start: DateTime<Utc>, params: &SynthParams) -> (TimeSeries, TimeSeries) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut latent: f64 = unit.sample(&mut rng);
    let mut noise = 0.0;
    let mut prices = Vec::with_capacity(hours);
    let mut cf = Vec::with_capacity(hours);
    for k in 0..hours {
        latent = 0.96 * latent + 0.28 * unit.sample(&mut rng);
        let c = 1.0 / (1.0 + (-(1.6 * latent + params.wind_bias)).exp());
        let c = (c * 1e6).round() / 1e6;
        cf.push(c.clamp(0.0, 1.0));

        let ts = start + Duration::hours(k as i64);
        let hour = ((k as i64 + start.timestamp() / 3600) % 24) as f64;
        let shape = (-((hour - 8.0) / 2.5).powi(2)).exp() + 1.2 * (-((hour - 19.0) / 2.5).powi(2)).exp() - 0.45;
        let weekend = if ts.weekday().number_from_monday() >= 6 { -6.0 } else { 0.0 };
        noise = 0.8 * noise + params.price_noise * unit.sample(&mut rng);
        let spike = if rng.gen_bool(params.spike_probability) { rng.gen_range(40.0..120.0) } else { 0.0 };
        let price = params.mean_price + params.daily_swing * shape + weekend + noise
            - params.wind_price_response * (c - 0.45)
            + spike;
        prices.push((price * 100.0).round() / 100.0);
    }
    let series = |values, unit: &str| TimeSeries {
        start,
        values,
        unit: unit.to_string(),
    };
    (series(prices, "EUR/MWh"), series(cf, "capacity factor"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    #[test]
    fn deterministic_for_a_seed() {
        let start = Utc.with_ymd_and_hms(2019, 1, 1, 0, 0, 0).unwrap();
        let a = synthetic_series(200, 9, start, &SynthParams::default());
        let b = synthetic_series(200, 9, start, &SynthParams::default());
        assert_eq!(a, b);
        let c = synthetic_series(200, 10, start, &SynthParams::default());
        assert_ne!(a.0.values, c.0.values);
    }

    #[test]
    fn plausible_statistics() {
        let start = Utc.with_ymd_and_hms(2019, 1, 1, 0, 0, 0).unwrap();
        let (p, w) = synthetic_series(24 * 365, 1, start, &SynthParams::default());
        let mean_cf = w.values.iter().sum::<f64>() / w.values.len() as f64;
        let mean_p = p.values.iter().sum::<f64>() / p.values.len() as f64;
        assert!(w.values.iter().all(|c| (0.0..=1.0).contains(c)));
        assert!((0.3..0.6).contains(&mean_cf), "{mean_cf}");
        assert!((30.0..50.0).contains(&mean_p), "{mean_p}");
    }
}
