//! Fourier-side estimators: periodogram, Welch PSD, cross-PSD and the
//! coherence function `|S_xy|² / (S_xx S_yy)`.
//!
//! All spectra are one-sided densities on `(0, 1/(2Δt)]` in input²/Hz,
//! normalized so that `Σ S(f)·Δf` equals the (1/N) variance of the
//! demeaned record for a rectangular window.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::timeseries::TimeSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Hann,
    Rect,
}

impl Window {
    /// Periodic window of length `len`.
    pub fn coefficients(&self, len: usize) -> Vec<f64> {
        match self {
            Window::Rect => vec![1.0; len],
            Window::Hann => (0..len)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / len as f64).cos())
                .collect(),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Window::Hann => "hann",
            Window::Rect => "rect",
        })
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hann" => Ok(Window::Hann),
            "rect" => Ok(Window::Rect),
            other => Err(Error::InvalidParameter(format!("unknown window `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Periodogram,
    Welch,
}

/// Welch segmentation: `segments` windows of equal length overlapping by
/// `overlap` (fraction of the segment length).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelchParams {
    pub segments: usize,
    pub overlap: f64,
    pub window: Window,
}

impl Default for WelchParams {
    fn default() -> Self {
        Self {
            segments: 8,
            overlap: 0.5,
            window: Window::Hann,
        }
    }
}

/// Smallest segment accepted by the Welch estimator.
pub const MIN_SEGMENT: usize = 8;

impl WelchParams {
    pub fn new(segments: usize, overlap: f64, window: Window) -> Self {
        Self {
            segments,
            overlap,
            window,
        }
    }

    /// Segment length and hop for a record of `n` samples.
    pub fn layout(&self, n: usize) -> Result<(usize, usize)> {
        if self.segments == 0 {
            return Err(Error::InvalidParameter("need at least one Welch segment".into()));
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(Error::InvalidParameter(format!(
                "overlap must be in [0, 1), got {}",
                self.overlap
            )));
        }
        let hop_frac = 1.0 - self.overlap;
        let len = (n as f64 / (1.0 + (self.segments - 1) as f64 * hop_frac)).floor() as usize;
        let hop = ((len as f64 * hop_frac).floor() as usize).max(1);
        if len < MIN_SEGMENT || (self.segments - 1) * hop + len > n {
            return Err(Error::TooFewSamples {
                got: n,
                min: MIN_SEGMENT * self.segments,
            });
        }
        Ok((len, hop))
    }
}

/// Metadata shared by auto and cross spectra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMeta {
    pub estimator: Estimator,
    pub segment_length: usize,
    pub segments: usize,
    pub overlap_fraction: f64,
    pub window: Window,
    pub dt: f64,
}

impl SpectrumMeta {
    pub fn df(&self) -> f64 {
        1.0 / (self.segment_length as f64 * self.dt)
    }
}

/// Real-valued one-sided auto spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: SpectrumMeta,
}

impl Spectrum {
    /// `Σ S(f)·Δf`.
    pub fn integrated_power(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.meta.df()
    }
}

/// Complex one-sided cross spectrum `S_xy`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossSpectrum {
    pub frequencies: Vec<f64>,
    pub values: Vec<Complex64>,
    pub meta: SpectrumMeta,
}

impl CrossSpectrum {
    pub fn conj(&self) -> CrossSpectrum {
        CrossSpectrum {
            frequencies: self.frequencies.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
            meta: self.meta.clone(),
        }
    }
}

/// Coherence per frequency; `None` where either auto spectrum vanishes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceSpectrum {
    pub frequencies: Vec<f64>,
    pub values: Vec<Option<f64>>,
    pub meta: SpectrumMeta,
}

impl CoherenceSpectrum {
    pub fn defined(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().flatten().copied()
    }
}

/// Windowed, per-segment-demeaned DFTs of every Welch segment.
fn segment_spectra(x: &[f64], len: usize, hop: usize, count: usize, w: &[f64]) -> Vec<Vec<Complex64>> {
    (0..count)
        .map(|s| {
            let seg = &x[s * hop..s * hop + len];
            let mu = seg.iter().sum::<f64>() / len as f64;
            let windowed: Vec<f64> = seg.iter().zip(w).map(|(v, wi)| (v - mu) * wi).collect();
            fft::dft_real(&windowed)
        })
        .collect()
}

fn estimate(
    x: &TimeSeries,
    y: Option<&TimeSeries>,
    params: &WelchParams,
    estimator: Estimator,
) -> Result<(Vec<f64>, Vec<Complex64>, SpectrumMeta)> {
    if let Some(y) = y {
        if y.len() != x.len() {
            return Err(Error::Mismatch(format!(
                "series lengths differ ({} vs {})",
                x.len(),
                y.len()
            )));
        }
        if (y.dt - x.dt).abs() > 1e-12 * x.dt {
            return Err(Error::Mismatch(format!("time steps differ ({} vs {})", x.dt, y.dt)));
        }
    }
    let (len, hop) = match estimator {
        Estimator::Welch => params.layout(x.len())?,
        Estimator::Periodogram => (x.len(), x.len()),
    };
    let w = params.window.coefficients(len);
    let w_power: f64 = w.iter().map(|v| v * v).sum();
    let sx = segment_spectra(x.values(), len, hop, params.segments, &w);
    let sy = y.map(|y| segment_spectra(y.values(), len, hop, params.segments, &w));
    let sy = sy.as_ref().unwrap_or(&sx);

    let bins = len / 2;
    let scale = x.dt / w_power / params.segments as f64;
    let mut values = vec![Complex64::new(0.0, 0.0); bins];
    for (a, b) in sx.iter().zip(sy) {
        for (k, v) in values.iter_mut().enumerate() {
            *v += a[k + 1] * b[k + 1].conj();
        }
    }
    for (k, v) in values.iter_mut().enumerate() {
        let bin = k + 1;
        let fold = if 2 * bin == len { 1.0 } else { 2.0 };
        *v *= scale * fold;
    }
    let df = 1.0 / (len as f64 * x.dt);
    let frequencies = (1..=bins).map(|k| k as f64 * df).collect();
    let meta = SpectrumMeta {
        estimator,
        segment_length: len,
        segments: params.segments,
        overlap_fraction: params.overlap,
        window: params.window,
        dt: x.dt,
    };
    Ok((frequencies, values, meta))
}

/// Rectangular-window periodogram of the demeaned record.
pub fn periodogram(x: &TimeSeries) -> Result<Spectrum> {
    let params = WelchParams::new(1, 0.0, Window::Rect);
    let (frequencies, values, meta) = estimate(x, None, &params, Estimator::Periodogram)?;
    Ok(Spectrum {
        frequencies,
        values: values.iter().map(|v| v.re).collect(),
        meta,
    })
}

/// Welch-averaged auto spectrum.
pub fn welch_psd(x: &TimeSeries, params: &WelchParams) -> Result<Spectrum> {
    let (frequencies, values, meta) = estimate(x, None, params, Estimator::Welch)?;
    Ok(Spectrum {
        frequencies,
        values: values.iter().map(|v| v.re).collect(),
        meta,
    })
}

/// Welch-averaged cross spectrum `⟨X_seg · Y*_seg⟩` with one segmentation for both inputs.
pub fn cross_psd(x: &TimeSeries, y: &TimeSeries, params: &WelchParams) -> Result<CrossSpectrum> {
    let (frequencies, values, meta) = estimate(x, Some(y), params, Estimator::Welch)?;
    Ok(CrossSpectrum {
        frequencies,
        values,
        meta,
    })
}

/// Welch coherence; needs at least two segments (a single segment gives 1 identically).
pub fn fourier_coherence(
    x: &TimeSeries,
    y: &TimeSeries,
    params: &WelchParams,
) -> Result<CoherenceSpectrum> {
    if params.segments < 2 {
        return Err(Error::InvalidParameter(
            "coherence needs at least 2 Welch segments".into(),
        ));
    }
    let sxy = cross_psd(x, y, params)?;
    let sxx = welch_psd(x, params)?;
    let syy = welch_psd(y, params)?;
    let values = sxy
        .values
        .iter()
        .zip(sxx.values.iter().zip(&syy.values))
        .map(|(c, (&a, &b))| {
            let denom = a * b;
            if denom > 0.0 {
                Some((c.norm_sqr() / denom).clamp(0.0, 1.0))
            } else {
                None
            }
        })
        .collect();
    Ok(CoherenceSpectrum {
        frequencies: sxy.frequencies,
        values,
        meta: sxy.meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::rng::Xoshiro256StarStar;

    fn noise(n: usize, seed: u64) -> TimeSeries {
        let mut r = Xoshiro256StarStar::seed_from_u64(seed);
        TimeSeries::new("w", 0.0, 0.5, (0..n).map(|_| r.next_normal()).collect()).unwrap()
    }

    fn pop_var(x: &TimeSeries) -> f64 {
        let mu = x.mean();
        x.values().iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / x.len() as f64
    }

    #[test]
    fn parseval_exact() {
        for (n, seed) in [(1000, 1), (1001, 2), (7, 3)] {
            let x = noise(n, seed);
            let p = periodogram(&x).unwrap();
            let rel = (p.integrated_power() - pop_var(&x)).abs() / pop_var(&x);
            assert!(rel < 1e-9, "n = {n}: {rel}");
        }
    }

    #[test]
    fn sinusoid_concentrates_in_one_bin() {
        let n = 512;
        let dt = 0.1;
        let amp = 1.7;
        let bin = 37;
        let f0 = bin as f64 / (n as f64 * dt);
        let x = TimeSeries::new(
            "s",
            0.0,
            dt,
            (0..n).map(|i| amp * (2.0 * PI * f0 * i as f64 * dt + 0.3).cos()).collect(),
        )
        .unwrap();
        let p = periodogram(&x).unwrap();
        let peak = p
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!((p.frequencies[peak] - f0).abs() < 1e-12);
        assert!((p.values[peak] * p.meta.df() - amp * amp / 2.0).abs() < 1e-9);
        assert!((p.integrated_power() - amp * amp / 2.0).abs() < 1e-9);
    }

    #[test]
    fn constant_series_has_zero_spectrum() {
        let x = TimeSeries::new("c", 0.0, 1.0, vec![3.0; 64]).unwrap();
        assert!(periodogram(&x).unwrap().values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_rect_segment_equals_periodogram() {
        let x = noise(999, 4);
        let w = welch_psd(&x, &WelchParams::new(1, 0.0, Window::Rect)).unwrap();
        let p = periodogram(&x).unwrap();
        assert_eq!(w.values, p.values);
        assert_eq!(w.frequencies, p.frequencies);
    }

    #[test]
    fn welch_finds_sinusoid() {
        let n = 4096;
        let f0 = 0.173;
        let x = TimeSeries::new(
            "s",
            0.0,
            1.0,
            (0..n).map(|i| (2.0 * PI * f0 * i as f64).sin()).collect(),
        )
        .unwrap();
        let w = welch_psd(&x, &WelchParams::default()).unwrap();
        let peak = w
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!((w.frequencies[peak] - f0).abs() <= w.meta.df());
    }

    #[test]
    fn cross_of_self_is_auto() {
        let x = noise(2048, 5);
        let params = WelchParams::default();
        let c = cross_psd(&x, &x, &params).unwrap();
        let a = welch_psd(&x, &params).unwrap();
        for (cv, av) in c.values.iter().zip(&a.values) {
            assert_eq!(cv.re, *av);
            assert!(cv.im.abs() <= 1e-12 * av.abs().max(1e-300));
        }
    }

    #[test]
    fn cross_is_hermitian() {
        let x = noise(2048, 6);
        let y = noise(2048, 7);
        let params = WelchParams::default();
        let xy = cross_psd(&x, &y, &params).unwrap();
        let yx = cross_psd(&y, &x, &params).unwrap();
        assert_eq!(xy.values, yx.conj().values);
    }

    #[test]
    fn coherence_of_linear_dependence_is_one() {
        let x = noise(4096, 8);
        let y = TimeSeries::new("y", 0.0, x.dt, x.values().iter().map(|v| 2.0 * v + 1.0).collect())
            .unwrap();
        let c = fourier_coherence(&x, &y, &WelchParams::default()).unwrap();
        assert!(c.defined().count() > 0);
        assert!(c.defined().all(|v| (v - 1.0).abs() <= 1e-9));
    }

    #[test]
    fn coherence_rejects_single_segment_and_flags_dead_bins() {
        let x = noise(256, 9);
        assert!(fourier_coherence(&x, &x, &WelchParams::new(1, 0.0, Window::Hann)).is_err());
        let z = TimeSeries::new("z", 0.0, x.dt, vec![0.0; 256]).unwrap();
        let c = fourier_coherence(&x, &z, &WelchParams::default()).unwrap();
        assert!(c.values.iter().all(Option::is_none));
    }

    #[test]
    fn rejects_mismatch_and_short_input() {
        let x = noise(256, 10);
        let y = noise(255, 11);
        assert!(matches!(
            cross_psd(&x, &y, &WelchParams::default()),
            Err(Error::Mismatch(_))
        ));
        let short = noise(30, 12);
        assert!(welch_psd(&short, &WelchParams::default()).is_err());
    }
}
