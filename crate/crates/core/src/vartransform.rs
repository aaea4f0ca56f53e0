//! Wavelet variance transformation: per-scale covariances between a response
//! series and a predictor's wavelet coefficients, used to reshape the
//! predictor's scale content, plus the all-pairs peak-variance summary.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlate::{scalewise_pearson, PearsonOptions};
use crate::cwt::{complex_variance, cwt, wavelet_spectrum, WaveletMatrix, WaveletSpectrum};
use crate::error::{Error, Result};
use crate::timeseries::{self, SeriesSet, TimeSeries};
use crate::wavelet::{coi_radius, ScaleGrid, WaveletBasis};

/// Keeps the widths whose cone leaves at least 80% of the record usable,
/// i.e. `coi_radius(k) <= 0.1·N`.
pub fn scale_cutoff(n: usize, grid: &ScaleGrid, basis: &WaveletBasis) -> Result<ScaleGrid> {
    grid.filter(|k| 10 * coi_radius(k, basis) <= n)
        .ok_or(Error::EmptyGrid { n })
}

/// Per-scale covariances `C_k`, aligned to the predictor's scale grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceVector {
    pub k_values: Vec<usize>,
    pub values: Vec<Complex64>,
}

/// `C_k = Σ_m (y_m - ȳ)·W(m, k) / (N - 1)` over every translation.
pub fn covariance_vector(y: &TimeSeries, wx: &WaveletMatrix) -> Result<CovarianceVector> {
    if y.len() != wx.rows() {
        return Err(Error::Mismatch(format!(
            "response has {} samples, transform has {} rows",
            y.len(),
            wx.rows()
        )));
    }
    let centred = y.demean();
    let denom = (y.len() - 1) as f64;
    let values = wx
        .columns()
        .par_iter()
        .map(|col| {
            col.iter()
                .zip(centred.values())
                .map(|(w, d)| w * d)
                .sum::<Complex64>()
                / denom
        })
        .collect();
    Ok(CovarianceVector {
        k_values: wx.scale_grid.k_values().to_vec(),
        values,
    })
}

/// `x'_m = Re(σ_x · Σ_k W(m, k)·C_k)`.
pub fn reconstruct(wx: &WaveletMatrix, c: &CovarianceVector, sigma_x: f64) -> Result<Vec<f64>> {
    if c.values.len() != wx.scales() {
        return Err(Error::Mismatch(format!(
            "{} covariances for {} scales",
            c.values.len(),
            wx.scales()
        )));
    }
    Ok((0..wx.rows())
        .map(|m| {
            let s: Complex64 = wx
                .columns()
                .iter()
                .zip(&c.values)
                .map(|(col, ck)| col[m] * ck)
                .sum();
            sigma_x * s.re
        })
        .collect())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TransformOptions {
    /// Rescale `x'` to unit sample standard deviation (left as is when zero).
    pub unit_variance: bool,
    /// Spectra and `r²` use only coefficients inside the cone.
    pub coi_only: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarianceTransformResult {
    pub x_prime: TimeSeries,
    pub covariances: CovarianceVector,
    /// Grid after the 80% cutoff.
    pub scale_grid: ScaleGrid,
    pub spectrum_before: WaveletSpectrum,
    pub spectrum_after: WaveletSpectrum,
    /// `Var(W(·, k))·|C_k|²` per retained scale.
    pub contributions: Vec<f64>,
    pub peak_index: usize,
    pub peak_k: usize,
    /// `1/λ` of the peak scale.
    pub peak_scale: f64,
    /// `None` when the Pearson r at the peak is undefined.
    pub r2_at_peak: Option<f64>,
}

pub fn variance_transform(
    x: &TimeSeries,
    y: &TimeSeries,
    basis: &WaveletBasis,
    grid: &ScaleGrid,
    opts: &TransformOptions,
) -> Result<VarianceTransformResult> {
    if x.len() != y.len() || (x.dt - y.dt).abs() > 1e-9 * x.dt {
        return Err(Error::Mismatch(
            "predictor and response must share N and dt; align them first".into(),
        ));
    }
    let grid = scale_cutoff(x.len(), grid, basis)?;
    let wx = cwt(x, basis, &grid)?;
    let wy = cwt(y, basis, &grid)?;
    let covariances = covariance_vector(y, &wx)?;
    let mut values = reconstruct(&wx, &covariances, x.std())?;
    if opts.unit_variance {
        let sd = timeseries::std(&values);
        if sd > 0.0 {
            values.iter_mut().for_each(|v| *v /= sd);
        }
    }
    let mut x_prime = x.with_values(values);
    x_prime.label = format!("{}'", x.label);
    let wxp = cwt(&x_prime, basis, &grid)?;

    let contributions: Vec<f64> = wx
        .columns()
        .iter()
        .zip(&covariances.values)
        .map(|(col, c)| complex_variance(col) * c.norm_sqr())
        .collect();
    let peak_index = contributions
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(j, _)| j)
        .unwrap_or(0);
    let peak_k = grid.k_values()[peak_index];

    let pearson = scalewise_pearson(
        &wx,
        &wy,
        &PearsonOptions {
            coi_only: opts.coi_only,
            ..PearsonOptions::default()
        },
    )?;
    Ok(VarianceTransformResult {
        x_prime,
        spectrum_before: wavelet_spectrum(&wx, opts.coi_only)?,
        spectrum_after: wavelet_spectrum(&wxp, opts.coi_only)?,
        covariances,
        contributions,
        peak_index,
        peak_k,
        peak_scale: 1.0 / (peak_k as f64 * grid.dt),
        r2_at_peak: pearson.entry(peak_k).map(|e| e.r2),
        scale_grid: grid,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakRow {
    pub predictor: String,
    pub response: String,
    pub peak_k: usize,
    pub peak_inv_lambda: f64,
    pub r2_at_peak: Option<f64>,
}

/// Variance transform on every ordered pair of distinct series.
///
/// The peak marks where variance is redistributed, which need not be where
/// the pair is most correlated; both are reported.
pub fn peak_variance_summary(
    set: &SeriesSet,
    basis: &WaveletBasis,
    grid: &ScaleGrid,
    opts: &TransformOptions,
) -> Result<Vec<PeakRow>> {
    if set.len() < 2 {
        return Err(Error::TooFewSamples {
            got: set.len(),
            min: 2,
        });
    }
    let series = set.entries();
    let pairs: Vec<(usize, usize)> = (0..series.len())
        .flat_map(|a| (0..series.len()).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    pairs
        .par_iter()
        .map(|&(p, r)| {
            let res = variance_transform(&series[p], &series[r], basis, grid, opts)?;
            Ok(PeakRow {
                predictor: series[p].label.clone(),
                response: series[r].label.clone(),
                peak_k: res.peak_k,
                peak_inv_lambda: res.peak_scale,
                r2_at_peak: res.r2_at_peak,
            })
        })
        .collect()
}
