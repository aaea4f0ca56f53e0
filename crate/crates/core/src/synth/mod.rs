//! Seeded synthetic signals: random telegraph noise, 1/f^β noise, sinusoids
//! (optionally confined to a burst), linear drift and white noise, plus
//! recipes that combine them into single series or correlated sets.

mod recipe;
pub mod rng;

pub use recipe::{presets, Component, ComponentKind, NoiseRecipe, SeriesSpec, SetRecipe, SharedSpec};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::timeseries::{self, TimeSeries};
use rng::Xoshiro256StarStar;

/// Two-state `{0, amplitude}` Markov chain sampled every `dt`.
///
/// Per-step switching probabilities are `1 - exp(-rate·dt)`. The initial
/// state is drawn from the stationary occupancy `rate_up / (rate_up + rate_down)`
/// (a fair coin when both rates are zero).
pub fn gen_rts(
    n: usize,
    dt: f64,
    rate_up: f64,
    rate_down: f64,
    amplitude: f64,
    seed: u64,
) -> Result<TimeSeries> {
    TimeSeries::new("rts", 0.0, dt, rts_values(n, dt, rate_up, rate_down, amplitude, seed)?)
}

fn rts_values(
    n: usize,
    dt: f64,
    rate_up: f64,
    rate_down: f64,
    amplitude: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    for (name, rate) in [("rate_up", rate_up), ("rate_down", rate_down)] {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be >= 0, got {rate}")));
        }
        if rate * dt >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "{name}·dt = {} must be < 1 for a valid per-step switching probability",
                rate * dt
            )));
        }
    }
    let p_up = -(-rate_up * dt).exp_m1();
    let p_down = -(-rate_down * dt).exp_m1();
    let occupancy = if rate_up + rate_down > 0.0 {
        rate_up / (rate_up + rate_down)
    } else {
        0.5
    };
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut high = rng.next_f64() < occupancy;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(if high { amplitude } else { 0.0 });
        let p = if high { p_down } else { p_up };
        if rng.next_f64() < p {
            high = !high;
        }
    }
    Ok(out)
}

/// Stationary `1/f^β` noise by spectral synthesis: complex Gaussian
/// coefficients shaped by `f^(-β/2)`, zero DC, inverse transformed to a real
/// series and scaled to sample standard deviation `level`.
pub fn gen_colored(n: usize, dt: f64, beta: f64, level: f64, seed: u64) -> Result<TimeSeries> {
    TimeSeries::new("colored", 0.0, dt, colored_values(n, dt, beta, level, seed)?)
}

fn colored_values(n: usize, dt: f64, beta: f64, level: f64, seed: u64) -> Result<Vec<f64>> {
    if !(0.0..=2.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!("beta must be in [0, 2], got {beta}")));
    }
    if !(level >= 0.0) {
        return Err(Error::InvalidParameter(format!("level must be >= 0, got {level}")));
    }
    if n < 2 {
        return Err(Error::TooFewSamples { got: n, min: 2 });
    }
    if level == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    let df = 1.0 / (n as f64 * dt);
    for k in 1..=n / 2 {
        let shape = (k as f64 * df).powf(-beta / 2.0);
        let re = rng.next_normal();
        let im = rng.next_normal();
        if 2 * k == n {
            spec[k] = Complex64::new(re * shape, 0.0);
        } else {
            spec[k] = Complex64::new(re, im) * shape;
            spec[n - k] = spec[k].conj();
        }
    }
    fft::inverse(n).process(&mut spec);
    let values: Vec<f64> = spec.iter().map(|c| c.re).collect();
    let sd = timeseries::std(&values);
    Ok(values.iter().map(|v| v * level / sd).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_rates_give_constant_series() {
        let s = gen_rts(500, 1.0, 0.0, 0.0, 2.0, 3).unwrap();
        let first = s.values()[0];
        assert!(s.values().iter().all(|&v| v == first));
    }

    #[test]
    fn rejects_rate_too_high_for_step() {
        assert!(gen_rts(10, 1.0, 1.5, 0.1, 1.0, 0).is_err());
        assert!(gen_rts(10, 1.0, -0.1, 0.1, 1.0, 0).is_err());
    }

    #[test]
    fn rts_occupancy_and_switch_count() {
        let n = 1_000_000;
        let rate = 0.05;
        let s = gen_rts(n, 1.0, rate, rate, 1.0, 11).unwrap();
        let high = s.values().iter().filter(|&&v| v == 1.0).count() as f64 / n as f64;
        assert!((high - 0.5).abs() <= 0.02, "occupancy {high}");
        let switches = s.values().windows(2).filter(|w| w[0] != w[1]).count() as f64;
        let expected = n as f64 * (1.0 - (-rate).exp());
        assert!((switches / expected - 1.0).abs() <= 0.05, "{switches} vs {expected}");
    }

    #[test]
    fn colored_level_and_zero_level() {
        let s = gen_colored(1024, 0.5, 1.0, 2.5, 9).unwrap();
        assert!((s.std() - 2.5).abs() < 1e-12);
        assert!(s.mean().abs() < 1e-12);
        let z = gen_colored(64, 1.0, 1.0, 0.0, 9).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        assert!(gen_colored(64, 1.0, 2.5, 1.0, 9).is_err());
    }

    #[test]
    fn reproducible() {
        assert_eq!(
            gen_colored(333, 1.0, 0.7, 1.0, 5).unwrap(),
            gen_colored(333, 1.0, 0.7, 1.0, 5).unwrap()
        );
        assert_ne!(
            gen_rts(333, 1.0, 0.1, 0.1, 1.0, 5).unwrap(),
            gen_rts(333, 1.0, 0.1, 0.1, 1.0, 6).unwrap()
        );
    }
}
