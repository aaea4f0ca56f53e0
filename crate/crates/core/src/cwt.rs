//! Discretized continuous wavelet transform `W(m, k) = Σ_n x_n ψ*_n(m, k)`
//! and the per-scale wavelet spectrum.
//!
//! Each scale is an independent column. Haar columns are computed from prefix
//! sums; Morlet columns use direct summation for short kernels and FFT
//! correlation otherwise. Columns are evaluated in parallel, each with a fixed
//! reduction order, so results do not depend on the number of workers.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{self, SpectrumPlan};
use crate::timeseries::{self, TimeSeries};
use crate::wavelet::{coi_fraction, coi_radius, Kernel, ScaleGrid, WaveletBasis, WaveletKind};

/// Coefficients over translations × scales, stored one column per scale.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletMatrix {
    columns: Vec<Vec<Complex64>>,
    pub scale_grid: ScaleGrid,
    pub basis: WaveletBasis,
    coi_radii: Vec<usize>,
    pub source_label: String,
}

impl WaveletMatrix {
    /// Assembles a matrix from precomputed columns (one per grid width).
    pub fn from_columns(
        columns: Vec<Vec<Complex64>>,
        scale_grid: ScaleGrid,
        basis: WaveletBasis,
        source_label: impl Into<String>,
    ) -> Result<Self> {
        if columns.len() != scale_grid.len() {
            return Err(Error::Mismatch(format!(
                "{} columns for {} scales",
                columns.len(),
                scale_grid.len()
            )));
        }
        let n = columns.first().map_or(0, Vec::len);
        if n == 0 || columns.iter().any(|c| c.len() != n) {
            return Err(Error::Empty("wavelet matrix columns".into()));
        }
        let coi_radii = scale_grid
            .k_values()
            .iter()
            .map(|&k| coi_radius(k, &basis))
            .collect();
        Ok(Self {
            columns,
            scale_grid,
            basis,
            coi_radii,
            source_label: source_label.into(),
        })
    }

    /// Number of translations (rows).
    pub fn rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn scales(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<Complex64>] {
        &self.columns
    }

    pub fn get(&self, m: usize, j: usize) -> Complex64 {
        self.columns[j][m]
    }

    pub fn coi_radii(&self) -> &[usize] {
        &self.coi_radii
    }

    /// True when the coefficient at (m, scale j) is free of edge effects.
    pub fn in_coi(&self, m: usize, j: usize) -> bool {
        let r = self.coi_radii[j];
        m >= r && m + r < self.rows()
    }

    /// Boolean mask, one column per scale.
    pub fn coi_mask(&self) -> Vec<Vec<bool>> {
        (0..self.scales())
            .map(|j| (0..self.rows()).map(|m| self.in_coi(m, j)).collect())
            .collect()
    }

    pub fn coi_fraction(&self, j: usize) -> f64 {
        coi_fraction(self.rows(), self.scale_grid.k_values()[j], &self.basis)
    }

    pub(crate) fn same_layout(&self, other: &WaveletMatrix) -> Result<()> {
        if self.rows() != other.rows() || self.scale_grid != other.scale_grid {
            return Err(Error::Mismatch("wavelet matrices use different grids".into()));
        }
        if self.basis != other.basis {
            return Err(Error::Mismatch("wavelet matrices use different bases".into()));
        }
        Ok(())
    }
}

/// Transforms `x` over every width of `grid`.
pub fn cwt(x: &TimeSeries, basis: &WaveletBasis, grid: &ScaleGrid) -> Result<WaveletMatrix> {
    basis.validate()?;
    if (grid.dt - x.dt).abs() > 1e-9 * x.dt {
        return Err(Error::Mismatch(format!(
            "scale grid dt {} differs from series dt {}",
            grid.dt, x.dt
        )));
    }
    grid.check_fits(x.len())?;

    let values = x.values();
    let n = values.len();
    let mu = timeseries::mean(values);
    let centered: Vec<f64> = values.iter().map(|v| v - mu).collect();
    let kernels = grid
        .k_values()
        .iter()
        .map(|&k| basis.kernel(k))
        .collect::<Result<Vec<Kernel>>>()?;

    let columns: Vec<Vec<Complex64>> = match basis.kind {
        WaveletKind::Haar => {
            let prefix = prefix_sums(&centered);
            kernels
                .par_iter()
                .map(|kern| haar_column(&prefix, mu, kern))
                .collect()
        }
        WaveletKind::Morlet => {
            let signal: Vec<Complex64> = centered.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let conj: Vec<(Vec<Complex64>, isize)> = kernels
                .iter()
                .map(|kern| {
                    let taps: Vec<Complex64> = kern.taps.iter().map(|t| t.conj()).collect();
                    let (clipped, offset) = fft::clip_taps(&taps, kern.offset, n);
                    (clipped.to_vec(), offset)
                })
                .collect();
            let reach = conj
                .iter()
                .filter(|(t, _)| t.len() > DIRECT_TAPS)
                .map(|(t, o)| fft::max_reach(t.len(), *o))
                .max();
            let plan = reach.map(|r| SpectrumPlan::new(&signal, r));
            conj.par_iter()
                .map(|(taps, offset)| {
                    let mut col = match &plan {
                        Some(p) if taps.len() > DIRECT_TAPS => p.correlate(taps, *offset),
                        _ => fft::correlate_direct(&signal, taps, *offset),
                    };
                    add_mean_response(&mut col, mu, taps, *offset);
                    col
                })
                .collect()
        }
    };
    WaveletMatrix::from_columns(columns, grid.clone(), *basis, x.label.clone())
}

/// Kernels at most this long are summed directly.
const DIRECT_TAPS: usize = 64;

/// `S[i] = Σ_{n < i} x_n`, with `S[0] = 0`.
fn prefix_sums(x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for v in x {
        acc += v;
        out.push(acc);
    }
    out
}

/// Sum of `x` over `lo..=hi` clipped to the record, and the number of samples used.
fn clipped_sum(prefix: &[f64], lo: isize, hi: isize) -> (f64, f64) {
    let n = prefix.len() as isize - 1;
    let a = lo.max(0);
    let b = (hi + 1).min(n);
    if a >= b {
        return (0.0, 0.0);
    }
    (prefix[b as usize] - prefix[a as usize], (b - a) as f64)
}

fn haar_column(prefix: &[f64], mu: f64, kern: &Kernel) -> Vec<Complex64> {
    let n = prefix.len() - 1;
    let amp = kern.taps[0].re;
    let pos_len = kern.taps.iter().take_while(|t| t.re > 0.0).count() as isize;
    let first = kern.offset;
    let last = kern.offset + kern.taps.len() as isize - 1;
    (0..n as isize)
        .map(|m| {
            let (s_pos, c_pos) = clipped_sum(prefix, m + first, m + first + pos_len - 1);
            let (s_neg, c_neg) = clipped_sum(prefix, m + first + pos_len, m + last);
            let w = amp * ((s_pos - s_neg) + mu * (c_pos - c_neg));
            Complex64::new(w, 0.0)
        })
        .collect()
}

/// Adds `μ · Σ ψ*` over the in-record part of each kernel placement, so the
/// transform of the centered signal becomes the transform of the original.
fn add_mean_response(col: &mut [Complex64], mu: f64, taps: &[Complex64], offset: isize) {
    if mu == 0.0 || taps.is_empty() {
        return;
    }
    let mut prefix = Vec::with_capacity(taps.len() + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    prefix.push(acc);
    for t in taps {
        acc += t;
        prefix.push(acc);
    }
    let n = col.len() as isize;
    let len = taps.len() as isize;
    for (m, c) in col.iter_mut().enumerate() {
        let m = m as isize;
        // taps j with 0 <= m + offset + j < n
        let lo = (-m - offset).clamp(0, len);
        let hi = (n - m - offset).clamp(0, len);
        if hi > lo {
            *c += (prefix[hi as usize] - prefix[lo as usize]) * mu;
        }
    }
}

/// Per-scale variance of the wavelet coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub k: usize,
    pub inv_lambda: f64,
    pub sigma2: f64,
    pub sigma4: f64,
    pub n_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveletSpectrum {
    pub entries: Vec<SpectrumEntry>,
    /// Widths dropped because fewer than two coefficients were available.
    pub dropped: Vec<usize>,
    pub coi_only: bool,
}

impl WaveletSpectrum {
    pub fn inv_lambda(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.inv_lambda).collect()
    }

    pub fn sigma2(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.sigma2).collect()
    }
}

/// `σ²` per scale: sample variance (`n - 1`) of `|W - μ_W|` with `μ_W` the
/// complex mean, over the translations inside the cone when `coi_only`.
pub fn wavelet_spectrum(w: &WaveletMatrix, coi_only: bool) -> Result<WaveletSpectrum> {
    if w.scales() == 0 || w.rows() == 0 {
        return Err(Error::Empty("wavelet matrix".into()));
    }
    let mut entries = Vec::new();
    let mut dropped = Vec::new();
    for (j, &k) in w.scale_grid.k_values().iter().enumerate() {
        let col = w.column(j);
        let (lo, hi) = if coi_only {
            let r = w.coi_radii()[j];
            (r, w.rows().saturating_sub(r))
        } else {
            (0, w.rows())
        };
        if hi < lo + 2 {
            log::warn!("scale k = {k} has fewer than 2 coefficients inside the cone; dropped");
            dropped.push(k);
            continue;
        }
        let slice = &col[lo..hi];
        let sigma2 = complex_variance(slice);
        entries.push(SpectrumEntry {
            k,
            inv_lambda: 1.0 / (k as f64 * w.scale_grid.dt),
            sigma2,
            sigma4: sigma2 * sigma2,
            n_used: slice.len(),
        });
    }
    Ok(WaveletSpectrum {
        entries,
        dropped,
        coi_only,
    })
}

pub(crate) fn complex_variance(values: &[Complex64]) -> f64 {
    let mean: Complex64 = values.iter().sum::<Complex64>() / values.len() as f64;
    values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (values.len() as f64 - 1.0)
}
