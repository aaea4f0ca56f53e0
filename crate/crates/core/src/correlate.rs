//! Scale-resolved correlation: smoothed Morlet wavelet coherence, per-scale
//! Pearson correlation of wavelet coefficients and the all-pairs grid.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cwt::{cwt, WaveletMatrix};
use crate::error::{Error, Result};
use crate::fft;
use crate::stats;
use crate::timeseries::{SeriesSet, TimeSeries};
use crate::wavelet::{coi_radius, ScaleGrid, WaveletBasis, WaveletKind};

/// Time and scale smoothing used by the wavelet coherence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Smoothing {
    /// Gaussian time width `τ = factor · λ`.
    pub time_width_factor: f64,
    /// Gaussian kernels are cut at this many `τ`.
    pub time_truncation: f64,
    /// Total relative width of the scale boxcar: the window spans
    /// `[k / (1 + w/2), k · (1 + w/2)]`.
    pub scale_boxcar: f64,
}

impl Default for Smoothing {
    fn default() -> Self {
        Self {
            time_width_factor: 1.0,
            time_truncation: 4.0,
            scale_boxcar: 0.6,
        }
    }
}

/// Normalized Gaussian taps `e^{-d²/(2σ²)}`, `|d| <= truncation·σ`.
fn gaussian_taps(sigma: f64, truncation: f64) -> (Vec<Complex64>, isize) {
    let reach = (truncation * sigma).ceil().max(0.0) as isize;
    let raw: Vec<f64> = (-reach..=reach)
        .map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    (
        raw.iter().map(|v| Complex64::new(v / total, 0.0)).collect(),
        -reach,
    )
}

/// Gaussian smoothing along translations for one scale, renormalized over
/// the taps that fall inside the record.
pub fn smooth_time(column: &[f64], k: usize, smoothing: &Smoothing) -> Vec<f64> {
    let sigma = smoothing.time_width_factor * k as f64;
    let (taps, offset) = gaussian_taps(sigma, smoothing.time_truncation);
    let signal: Vec<Complex64> = column.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let smoothed = fft::correlate(&signal, &taps, offset);

    let mut prefix = Vec::with_capacity(taps.len() + 1);
    let mut acc = 0.0;
    prefix.push(acc);
    for t in &taps {
        acc += t.re;
        prefix.push(acc);
    }
    let n = column.len() as isize;
    let len = taps.len() as isize;
    smoothed
        .iter()
        .enumerate()
        .map(|(m, v)| {
            let m = m as isize;
            let lo = (-m - offset).clamp(0, len) as usize;
            let hi = (n - m - offset).clamp(0, len) as usize;
            v.re / (prefix[hi] - prefix[lo])
        })
        .collect()
}

/// Scale indices averaged into scale `j` by the boxcar.
fn boxcar_members(grid: &ScaleGrid, j: usize, width: f64) -> std::ops::Range<usize> {
    let ks = grid.k_values();
    let k = ks[j] as f64;
    let factor = 1.0 + width / 2.0;
    let (lo, hi) = (k / factor, k * factor);
    let start = ks.iter().position(|&kk| kk as f64 >= lo).unwrap_or(j).min(j);
    let end = ks.iter().rposition(|&kk| kk as f64 <= hi).unwrap_or(j).max(j);
    start..end + 1
}

/// Uniform boxcar across neighbouring scales for every translation.
pub fn smooth_scale(columns: &[Vec<f64>], grid: &ScaleGrid, smoothing: &Smoothing) -> Vec<Vec<f64>> {
    (0..columns.len())
        .map(|j| {
            let members = boxcar_members(grid, j, smoothing.scale_boxcar);
            let count = members.len() as f64;
            let mut out = vec![0.0; columns[j].len()];
            for jj in members {
                for (o, v) in out.iter_mut().zip(&columns[jj]) {
                    *o += v;
                }
            }
            for o in &mut out {
                *o /= count;
            }
            out
        })
        .collect()
}

/// Time smoothing followed by scale smoothing of a real matrix stored one
/// column per scale.
pub fn smooth_map(columns: &[Vec<f64>], grid: &ScaleGrid, smoothing: &Smoothing) -> Result<Vec<Vec<f64>>> {
    if columns.len() != grid.len() {
        return Err(Error::Mismatch(format!(
            "{} columns for {} scales",
            columns.len(),
            grid.len()
        )));
    }
    let timed: Vec<Vec<f64>> = columns
        .par_iter()
        .zip(grid.k_values().par_iter())
        .map(|(col, &k)| smooth_time(col, k, smoothing))
        .collect();
    Ok(smooth_scale(&timed, grid, smoothing))
}

/// Smoothed coherence over translations × scales, values in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceMap {
    /// One column per scale.
    pub values: Vec<Vec<f64>>,
    pub scale_grid: ScaleGrid,
    pub basis: WaveletBasis,
    pub coi_radii: Vec<usize>,
    pub smoothing: Smoothing,
}

impl CoherenceMap {
    pub fn rows(&self) -> usize {
        self.values[0].len()
    }

    pub fn in_coi(&self, m: usize, j: usize) -> bool {
        let r = self.coi_radii[j];
        m >= r && m + r < self.rows()
    }

    /// Every value inside the cone of influence.
    pub fn coi_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().enumerate().flat_map(move |(j, col)| {
            col.iter()
                .enumerate()
                .filter(move |(m, _)| self.in_coi(*m, j))
                .map(|(_, v)| *v)
        })
    }
}

/// Products `a·b*` computed so that swapping the arguments conjugates the
/// result exactly.
fn cross_product(a: Complex64, b: Complex64) -> Complex64 {
    Complex64::new(a.re * b.re + a.im * b.im, a.im * b.re - a.re * b.im)
}

/// Squared wavelet coherence `|s(W_x W_y*)|² / (s(|W_x|²) s(|W_y|²))`.
///
/// Only the Morlet basis has a smoothing rule; Haar is rejected.
pub fn wavelet_coherence(
    x: &TimeSeries,
    y: &TimeSeries,
    grid: &ScaleGrid,
    basis: &WaveletBasis,
    smoothing: &Smoothing,
) -> Result<CoherenceMap> {
    if basis.kind != WaveletKind::Morlet {
        return Err(Error::UnsupportedBasis(
            "wavelet coherence is defined for the Morlet basis only".into(),
        ));
    }
    if x.len() != y.len() || (x.dt - y.dt).abs() > 1e-12 * x.dt {
        return Err(Error::Mismatch("coherence needs equal length and dt".into()));
    }
    // demeaned so that an offset cannot leak in through the zero padding
    let wx = cwt(&x.demean(), basis, grid)?;
    let wy = cwt(&y.demean(), basis, grid)?;
    coherence_from_matrices(&wx, &wy, smoothing)
}

/// Wavelet coherence of two precomputed Morlet transforms.
pub fn coherence_from_matrices(
    wx: &WaveletMatrix,
    wy: &WaveletMatrix,
    smoothing: &Smoothing,
) -> Result<CoherenceMap> {
    wx.same_layout(wy)?;
    if wx.basis.kind != WaveletKind::Morlet {
        return Err(Error::UnsupportedBasis(
            "wavelet coherence is defined for the Morlet basis only".into(),
        ));
    }
    let grid = &wx.scale_grid;
    let mut cross_re = Vec::with_capacity(wx.scales());
    let mut cross_im = Vec::with_capacity(wx.scales());
    let mut auto_x = Vec::with_capacity(wx.scales());
    let mut auto_y = Vec::with_capacity(wx.scales());
    for (cx, cy) in wx.columns().iter().zip(wy.columns()) {
        let (re, im): (Vec<f64>, Vec<f64>) = cx
            .iter()
            .zip(cy)
            .map(|(a, b)| {
                let c = cross_product(*a, *b);
                (c.re, c.im)
            })
            .unzip();
        cross_re.push(re);
        cross_im.push(im);
        auto_x.push(cx.iter().map(|a| a.norm_sqr()).collect::<Vec<_>>());
        auto_y.push(cy.iter().map(|b| b.norm_sqr()).collect::<Vec<_>>());
    }
    let s_re = smooth_map(&cross_re, grid, smoothing)?;
    let s_im = smooth_map(&cross_im, grid, smoothing)?;
    let s_x = smooth_map(&auto_x, grid, smoothing)?;
    let s_y = smooth_map(&auto_y, grid, smoothing)?;

    let values = (0..wx.scales())
        .map(|j| {
            (0..wx.rows())
                .map(|m| {
                    let num = s_re[j][m] * s_re[j][m] + s_im[j][m] * s_im[j][m];
                    let den = s_x[j][m] * s_y[j][m];
                    if den > 0.0 {
                        (num / den).clamp(0.0, 1.0)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Ok(CoherenceMap {
        values,
        scale_grid: grid.clone(),
        basis: wx.basis,
        coi_radii: wx.coi_radii().to_vec(),
        smoothing: *smoothing,
    })
}

/// Which real quantity of a (possibly complex) coefficient enters Pearson's r.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientPart {
    Real,
    Magnitude,
}

impl CoefficientPart {
    fn apply(&self, c: Complex64) -> f64 {
        match self {
            CoefficientPart::Real => c.re,
            CoefficientPart::Magnitude => c.norm(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PearsonOptions {
    pub part: CoefficientPart,
    /// Restrict to translations inside the cone of influence.
    pub coi_only: bool,
}

impl Default for PearsonOptions {
    fn default() -> Self {
        Self {
            part: CoefficientPart::Real,
            coi_only: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleCorrelationEntry {
    pub k: usize,
    pub inv_lambda: f64,
    pub r: f64,
    pub r2: f64,
    pub n_used: usize,
    /// Fraction of the record inside the cone at this scale (confidence).
    pub coi_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleCorrelation {
    pub entries: Vec<ScaleCorrelationEntry>,
    /// Widths with no reportable r (too few coefficients or zero variance).
    pub omitted: Vec<usize>,
}

impl ScaleCorrelation {
    pub fn entry(&self, k: usize) -> Option<&ScaleCorrelationEntry> {
        self.entries.iter().find(|e| e.k == k)
    }

    pub fn mean_r2(&self) -> f64 {
        stats::mean(&self.entries.iter().map(|e| e.r2).collect::<Vec<_>>())
    }

    /// Entry with the largest r².
    pub fn peak(&self) -> Option<&ScaleCorrelationEntry> {
        self.entries.iter().max_by(|a, b| a.r2.total_cmp(&b.r2))
    }
}

/// Minimum number of coefficient pairs for a reported r.
pub const MIN_PAIRS: usize = 3;

/// Pearson r between matching columns of two transforms.
pub fn scalewise_pearson(
    wx: &WaveletMatrix,
    wy: &WaveletMatrix,
    opts: &PearsonOptions,
) -> Result<ScaleCorrelation> {
    wx.same_layout(wy)?;
    let mut entries = Vec::new();
    let mut omitted = Vec::new();
    for (j, &k) in wx.scale_grid.k_values().iter().enumerate() {
        let (a, b): (Vec<f64>, Vec<f64>) = (0..wx.rows())
            .filter(|&m| !opts.coi_only || (wx.in_coi(m, j) && wy.in_coi(m, j)))
            .map(|m| (opts.part.apply(wx.get(m, j)), opts.part.apply(wy.get(m, j))))
            .unzip();
        let r = if a.len() >= MIN_PAIRS {
            stats::pearson(&a, &b)
        } else {
            None
        };
        match r {
            Some(r) => entries.push(ScaleCorrelationEntry {
                k,
                inv_lambda: 1.0 / (k as f64 * wx.scale_grid.dt),
                r,
                r2: r * r,
                n_used: a.len(),
                coi_fraction: wx.coi_fraction(j),
            }),
            None => {
                log::info!("scale k = {k}: correlation undefined ({} pairs); omitted", a.len());
                omitted.push(k);
            }
        }
    }
    Ok(ScaleCorrelation { entries, omitted })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCorrelation {
    pub a: usize,
    pub b: usize,
    pub basis: WaveletBasis,
    pub correlation: ScaleCorrelation,
}

/// Scale-wise r² for every unordered pair of a series set (no diagonal).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationGrid {
    pub labels: Vec<String>,
    pub pairs: Vec<PairCorrelation>,
}

impl CorrelationGrid {
    /// Looks a pair up in either order.
    pub fn pair(&self, a: usize, b: usize, kind: WaveletKind) -> Option<&PairCorrelation> {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.pairs
            .iter()
            .find(|p| p.a == a && p.b == b && p.basis.kind == kind)
    }
}

pub fn correlation_grid(
    set: &SeriesSet,
    bases: &[WaveletBasis],
    grid: &ScaleGrid,
    opts: &PearsonOptions,
) -> Result<CorrelationGrid> {
    if set.len() < 2 {
        return Err(Error::TooFewSamples {
            got: set.len(),
            min: 2,
        });
    }
    let mut pairs = Vec::new();
    for basis in bases {
        let transforms = set
            .entries()
            .par_iter()
            .map(|s| cwt(&s.demean(), basis, grid))
            .collect::<Result<Vec<_>>>()?;
        let idx: Vec<(usize, usize)> = (0..set.len())
            .flat_map(|a| (a + 1..set.len()).map(move |b| (a, b)))
            .collect();
        let found = idx
            .par_iter()
            .map(|&(a, b)| {
                scalewise_pearson(&transforms[a], &transforms[b], opts).map(|correlation| {
                    PairCorrelation {
                        a,
                        b,
                        basis: *basis,
                        correlation,
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        pairs.extend(found);
    }
    Ok(CorrelationGrid {
        labels: set.entries().iter().map(|s| s.label.clone()).collect(),
        pairs,
    })
}

/// Cone radius helper re-exported for callers building masks by hand.
pub fn radius(k: usize, basis: &WaveletBasis) -> usize {
    coi_radius(k, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::rng::Xoshiro256StarStar;
    use crate::wavelet::ScaleMode;

    fn noise(n: usize, seed: u64) -> TimeSeries {
        let mut r = Xoshiro256StarStar::seed_from_u64(seed);
        TimeSeries::new("w", 0.0, 1.0, (0..n).map(|_| r.next_normal()).collect()).unwrap()
    }

    fn grid() -> ScaleGrid {
        ScaleGrid::from_k(vec![2, 4, 6, 8, 12, 16, 24, 32], 1.0, ScaleMode::LogSpaced).unwrap()
    }

    #[test]
    fn constant_matrix_is_unchanged() {
        let g = grid();
        let cols = vec![vec![2.5; 100]; g.len()];
        let s = smooth_map(&cols, &g, &Smoothing::default()).unwrap();
        for col in &s {
            for v in col {
                assert!((v - 2.5).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn impulse_spreads_with_unit_mass() {
        let n = 400;
        let k = 12;
        let mut col = vec![0.0; n];
        col[200] = 1.0;
        let out = smooth_time(&col, k, &Smoothing::default());
        let mass: f64 = out.iter().sum();
        assert!((mass - 1.0).abs() <= 1e-9);
        // Gaussian shape: direct oracle
        let sigma = k as f64;
        let norm: f64 = (-48..=48).map(|d: i32| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp()).sum();
        for d in [-30i32, -5, 0, 7, 40] {
            let expected = (-(d * d) as f64 / (2.0 * sigma * sigma)).exp() / norm;
            assert!((out[(200 + d) as usize] - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn smoothing_does_not_overshoot() {
        let g = grid();
        let x = noise(300, 3);
        let cols: Vec<Vec<f64>> = (0..g.len()).map(|j| x.values().iter().map(|v| v * (j + 1) as f64).collect()).collect();
        let once = smooth_map(&cols, &g, &Smoothing::default()).unwrap();
        let twice = smooth_map(&once, &g, &Smoothing::default()).unwrap();
        assert_ne!(once, twice);
        let lo = cols.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        let hi = cols.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        for v in once.iter().chain(&twice).flatten() {
            assert!(*v >= lo - 1e-12 && *v <= hi + 1e-12);
        }
    }

    #[test]
    fn boxcar_window() {
        let g = ScaleGrid::from_k(vec![2, 4, 6, 8, 10, 12, 20], 1.0, ScaleMode::PaperFull).unwrap();
        // k = 8: window [6.15, 10.4]
        assert_eq!(boxcar_members(&g, 3, 0.6), 3..5);
        // k = 2: window [1.54, 2.6] holds only itself
        assert_eq!(boxcar_members(&g, 0, 0.6), 0..1);
        // k = 20: [15.4, 26]
        assert_eq!(boxcar_members(&g, 6, 0.6), 6..7);
    }

    #[test]
    fn coherence_with_self_is_one_and_symmetric() {
        let basis = WaveletBasis::morlet(5.0).unwrap();
        let x = noise(512, 1);
        let y = noise(512, 2);
        let g = grid();
        let s = Smoothing::default();
        let c = wavelet_coherence(&x, &x, &g, &basis, &s).unwrap();
        assert!(c.coi_values().all(|v| (v - 1.0).abs() <= 1e-9));
        let xy = wavelet_coherence(&x, &y, &g, &basis, &s).unwrap();
        let yx = wavelet_coherence(&y, &x, &g, &basis, &s).unwrap();
        assert_eq!(xy.values, yx.values);
        assert!(xy.values.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn coherence_rejects_haar() {
        let x = noise(64, 1);
        let g = ScaleGrid::full(64, 1.0, Some(8)).unwrap();
        assert!(matches!(
            wavelet_coherence(&x, &x, &g, &WaveletBasis::haar(), &Smoothing::default()),
            Err(Error::UnsupportedBasis(_))
        ));
    }

    #[test]
    fn pearson_identities() {
        let x = noise(400, 5);
        let neg = TimeSeries::new("n", 0.0, 1.0, x.values().iter().map(|v| -v).collect()).unwrap();
        for basis in [WaveletBasis::haar(), WaveletBasis::morlet(5.0).unwrap()] {
            let wx = cwt(&x, &basis, &grid()).unwrap();
            let wn = cwt(&neg, &basis, &grid()).unwrap();
            let same = scalewise_pearson(&wx, &wx, &PearsonOptions::default()).unwrap();
            assert!(same.entries.iter().all(|e| (e.r - 1.0).abs() < 1e-12 && (e.r2 - 1.0).abs() < 1e-12));
            let opp = scalewise_pearson(&wx, &wn, &PearsonOptions::default()).unwrap();
            assert!(opp.entries.iter().all(|e| (e.r + 1.0).abs() < 1e-12 && (e.r2 - 1.0).abs() < 1e-12));
            assert_eq!(same.entries.len(), grid().len());
        }
    }

    #[test]
    fn pearson_omits_degenerate_scales() {
        let x = noise(20, 5);
        let g = ScaleGrid::from_k(vec![2, 16], 1.0, ScaleMode::LogSpaced).unwrap();
        let w = cwt(&x, &WaveletBasis::haar(), &g).unwrap();
        // k = 16 leaves 20 - 16 = 4 interior rows, k = 2 leaves 18
        let c = scalewise_pearson(&w, &w, &PearsonOptions::default()).unwrap();
        assert_eq!(c.entries.len(), 2);
        let g = ScaleGrid::from_k(vec![2, 18], 1.0, ScaleMode::LogSpaced).unwrap();
        let w = cwt(&x, &WaveletBasis::haar(), &g).unwrap();
        let c = scalewise_pearson(&w, &w, &PearsonOptions::default()).unwrap();
        assert_eq!(c.omitted, vec![18]);

        let z = TimeSeries::new("z", 0.0, 1.0, vec![1.0; 20]).unwrap();
        let wz = cwt(&z, &WaveletBasis::haar(), &g).unwrap();
        let c = scalewise_pearson(&w, &wz, &PearsonOptions::default()).unwrap();
        assert!(c.entries.is_empty());
    }

    #[test]
    fn pearson_rejects_grid_mismatch() {
        let x = noise(100, 5);
        let a = cwt(&x, &WaveletBasis::haar(), &grid()).unwrap();
        let b = cwt(&x, &WaveletBasis::haar(), &ScaleGrid::full(100, 1.0, Some(10)).unwrap()).unwrap();
        assert!(scalewise_pearson(&a, &b, &PearsonOptions::default()).is_err());
    }

    #[test]
    fn grid_of_identical_pair() {
        let x = noise(256, 9);
        let set = SeriesSet::new(vec![x.clone(), x]).unwrap();
        let g = correlation_grid(&set, &[WaveletBasis::haar()], &grid(), &PearsonOptions::default()).unwrap();
        assert_eq!(g.pairs.len(), 1);
        assert!(g.pairs[0].correlation.entries.iter().all(|e| (e.r2 - 1.0).abs() < 1e-12));
        let one = SeriesSet::new(vec![noise(64, 1)]).unwrap();
        assert!(correlation_grid(&one, &[WaveletBasis::haar()], &grid(), &PearsonOptions::default()).is_err());
    }
}
