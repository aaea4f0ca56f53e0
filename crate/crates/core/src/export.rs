//! CSV and JSON writers for every analysis product.
//!
//! Numbers are written with 17 significant digits so that they round-trip
//! to the same `f64`. Metadata lines start with `#` and precede the header.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::correlate::{CoherenceMap, CorrelationGrid, Smoothing};
use crate::cwt::{WaveletMatrix, WaveletSpectrum};
use crate::error::Result;
use crate::spectral::{CoherenceSpectrum, CrossSpectrum, Spectrum, SpectrumMeta};
use crate::vartransform::{PeakRow, VarianceTransformResult};
use crate::wavelet::{Normalization, ScaleMode, WaveletBasis, WaveletKind};

/// 17 significant digits, scientific notation; `NaN` for undefined values.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.16e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_else(|| "NaN".into())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(sep)
}

/// Metadata written next to a scale-resolved matrix.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixMeta {
    pub source: String,
    pub basis: WaveletKind,
    pub epsilon: Option<f64>,
    pub normalization: Normalization,
    pub dt: f64,
    pub rows: usize,
    pub scale_mode: ScaleMode,
    pub k_values: Vec<usize>,
    pub coi_radii: Vec<usize>,
    pub quantity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<Smoothing>,
}

impl MatrixMeta {
    fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# source={}", self.source),
            format!("# basis={}", self.basis),
        ];
        if let Some(e) = self.epsilon {
            lines.push(format!("# epsilon={e}"));
        }
        lines.push(format!(
            "# normalization={}",
            match self.normalization {
                Normalization::PaperExact => "paper",
                Normalization::UnitNorm => "unit",
            }
        ));
        lines.push(format!("# dt={}", fmt_f64(self.dt)));
        lines.push(format!("# coi_radii={}", join(&self.coi_radii, ";")));
        lines.push(format!("# quantity={}", self.quantity));
        if let Some(s) = &self.smoothing {
            lines.push(format!(
                "# smoothing=gaussian(tau={}*lambda, cut {} tau), scale boxcar {}",
                s.time_width_factor, s.time_truncation, s.scale_boxcar
            ));
        }
        lines
    }
}

fn matrix_meta(
    source: &str,
    basis: &WaveletBasis,
    rows: usize,
    grid: &crate::wavelet::ScaleGrid,
    coi_radii: &[usize],
    quantity: &str,
) -> MatrixMeta {
    MatrixMeta {
        source: source.into(),
        basis: basis.kind,
        epsilon: (basis.kind == WaveletKind::Morlet).then_some(basis.epsilon),
        normalization: basis.normalization,
        dt: grid.dt,
        rows,
        scale_mode: grid.mode,
        k_values: grid.k_values().to_vec(),
        coi_radii: coi_radii.to_vec(),
        quantity: quantity.into(),
        smoothing: None,
    }
}

/// Rows are translations `m`, columns are widths `k`.
fn write_matrix_csv(
    path: &Path,
    meta: &MatrixMeta,
    rows: usize,
    value: impl Fn(usize, usize) -> f64,
) -> Result<()> {
    let mut out = create(path)?;
    for line in meta.header_lines() {
        writeln!(out, "{line}")?;
    }
    write!(out, "m")?;
    for k in &meta.k_values {
        write!(out, ",k{k}")?;
    }
    writeln!(out)?;
    for m in 0..rows {
        write!(out, "{m}")?;
        for j in 0..meta.k_values.len() {
            write!(out, ",{}", fmt_f64(value(m, j)))?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

type CellFn<'a> = Box<dyn Fn(usize, usize) -> f64 + 'a>;

/// Haar: `<stem>.csv` with the real coefficients. Morlet: `<stem>_magnitude.csv`
/// and `<stem>_phase.csv`. Both get a `<stem>.json` sidecar.
pub fn write_wavelet_matrix(dir: &Path, stem: &str, w: &WaveletMatrix) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let parts: Vec<(&str, CellFn<'_>)> = match w.basis.kind {
        WaveletKind::Haar => vec![("", Box::new(|m, j| w.get(m, j).re))],
        WaveletKind::Morlet => vec![
            ("_magnitude", Box::new(|m, j| w.get(m, j).norm())),
            ("_phase", Box::new(|m, j| w.get(m, j).arg())),
        ],
    };
    for (suffix, f) in parts {
        let quantity = match suffix {
            "" => "coefficient",
            "_magnitude" => "magnitude",
            _ => "phase_rad",
        };
        let meta = matrix_meta(&w.source_label, &w.basis, w.rows(), &w.scale_grid, w.coi_radii(), quantity);
        let path = dir.join(format!("{stem}{suffix}.csv"));
        write_matrix_csv(&path, &meta, w.rows(), f)?;
        written.push(path);
    }
    let meta = matrix_meta(&w.source_label, &w.basis, w.rows(), &w.scale_grid, w.coi_radii(), "wavelet_matrix");
    let path = dir.join(format!("{stem}.json"));
    write_json(&path, &meta)?;
    written.push(path);
    Ok(written)
}

/// Boolean cone mask as 0/1 (1 = inside the cone).
pub fn write_coi_mask(path: &Path, w: &WaveletMatrix) -> Result<()> {
    let meta = matrix_meta(&w.source_label, &w.basis, w.rows(), &w.scale_grid, w.coi_radii(), "coi_mask");
    write_matrix_csv(path, &meta, w.rows(), |m, j| if w.in_coi(m, j) { 1.0 } else { 0.0 })
}

pub fn write_coherence_map(dir: &Path, stem: &str, c: &CoherenceMap) -> Result<Vec<PathBuf>> {
    let mut meta = matrix_meta("coherence", &c.basis, c.rows(), &c.scale_grid, &c.coi_radii, "coherence_squared");
    meta.smoothing = Some(c.smoothing);
    let csv = dir.join(format!("{stem}.csv"));
    write_matrix_csv(&csv, &meta, c.rows(), |m, j| c.values[j][m])?;
    let json = dir.join(format!("{stem}.json"));
    write_json(&json, &meta)?;
    Ok(vec![csv, json])
}

fn spectrum_header(out: &mut impl Write, meta: &SpectrumMeta) -> Result<()> {
    writeln!(out, "# estimator={:?}", meta.estimator)?;
    writeln!(out, "# segment_length={}", meta.segment_length)?;
    writeln!(out, "# segments={}", meta.segments)?;
    writeln!(out, "# overlap={}", meta.overlap_fraction)?;
    writeln!(out, "# window={}", meta.window)?;
    writeln!(out, "# dt={}", fmt_f64(meta.dt))?;
    Ok(())
}

pub fn write_spectrum(path: &Path, s: &Spectrum) -> Result<()> {
    let mut out = create(path)?;
    spectrum_header(&mut out, &s.meta)?;
    writeln!(out, "frequency_hz,value")?;
    for (f, v) in s.frequencies.iter().zip(&s.values) {
        writeln!(out, "{},{}", fmt_f64(*f), fmt_f64(*v))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_cross_spectrum(path: &Path, s: &CrossSpectrum) -> Result<()> {
    let mut out = create(path)?;
    spectrum_header(&mut out, &s.meta)?;
    writeln!(out, "frequency_hz,re,im,magnitude,phase")?;
    for (f, v) in s.frequencies.iter().zip(&s.values) {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(*f),
            fmt_f64(v.re),
            fmt_f64(v.im),
            fmt_f64(v.norm()),
            fmt_f64(v.arg())
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Undefined bins are written as `NaN`.
pub fn write_fourier_coherence(path: &Path, s: &CoherenceSpectrum) -> Result<()> {
    let mut out = create(path)?;
    spectrum_header(&mut out, &s.meta)?;
    writeln!(out, "frequency_hz,value")?;
    for (f, v) in s.frequencies.iter().zip(&s.values) {
        writeln!(out, "{},{}", fmt_f64(*f), fmt_opt(*v))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_wavelet_spectrum(path: &Path, basis: &WaveletBasis, s: &WaveletSpectrum) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "# basis={}", basis.label())?;
    writeln!(out, "# coi_only={}", s.coi_only)?;
    if !s.dropped.is_empty() {
        writeln!(out, "# dropped_k={}", join(&s.dropped, ";"))?;
    }
    writeln!(out, "k,inv_lambda,sigma2,sigma4,n_used")?;
    for e in &s.entries {
        writeln!(
            out,
            "{},{},{},{},{}",
            e.k,
            fmt_f64(e.inv_lambda),
            fmt_f64(e.sigma2),
            fmt_f64(e.sigma4),
            e.n_used
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Long form: one row per pair, basis and scale.
pub fn write_correlation_grid(path: &Path, g: &CorrelationGrid) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "var_a,var_b,basis,k,inv_lambda,r,r2,n_used,coi_fraction")?;
    for p in &g.pairs {
        for e in &p.correlation.entries {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                g.labels[p.a],
                g.labels[p.b],
                p.basis.kind,
                e.k,
                fmt_f64(e.inv_lambda),
                fmt_f64(e.r),
                fmt_f64(e.r2),
                e.n_used,
                fmt_f64(e.coi_fraction)
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Per-scale covariances and variance contributions.
pub fn write_covariances(path: &Path, r: &VarianceTransformResult) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "# peak_k={}", r.peak_k)?;
    writeln!(out, "k,inv_lambda,c_re,c_im,c_magnitude,contribution")?;
    for (j, (&k, c)) in r.covariances.k_values.iter().zip(&r.covariances.values).enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            k,
            fmt_f64(1.0 / (k as f64 * r.scale_grid.dt)),
            fmt_f64(c.re),
            fmt_f64(c.im),
            fmt_f64(c.norm()),
            fmt_f64(r.contributions[j])
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_peak_summary(path: &Path, rows: &[PeakRow]) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "# high variance at a scale does not imply high correlation there")?;
    writeln!(out, "predictor,response,peak_k,peak_inv_lambda,r2_at_peak")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.predictor,
            r.response,
            r.peak_k,
            fmt_f64(r.peak_inv_lambda),
            fmt_opt(r.r2_at_peak)
        )?;
    }
    out.flush()?;
    Ok(())
}
