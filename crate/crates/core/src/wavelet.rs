//! Mother wavelets, their discretized kernels, scale grids and the cone of
//! influence.
//!
//! A wavelet at translation `m` and even integer width `k` is evaluated at
//! sample `n` through the offset `d = n - m`. Two normalizations exist:
//!
//! * [`Normalization::PaperExact`] evaluates the textbook discrete formulas
//!   as written. The discrete Haar in this form has `k/2 + 1` positive and
//!   `k/2` negative samples at amplitude `1/(2√k)`, so it neither sums to zero
//!   nor has unit energy; it is kept for reproduction only.
//! * [`Normalization::UnitNorm`] (default) produces kernels with
//!   `Σψ = 0` and `Σ|ψ|² = 1` to rounding precision.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible Morlet window parameter.
pub const MIN_EPSILON: f64 = 5.0;
/// Morlet kernels are cut at `|n - m| <= MORLET_TRUNCATION * k`.
pub const MORLET_TRUNCATION: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletKind {
    Haar,
    Morlet,
}

impl fmt::Display for WaveletKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WaveletKind::Haar => "haar",
            WaveletKind::Morlet => "morlet",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    PaperExact,
    #[default]
    UnitNorm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveletBasis {
    pub kind: WaveletKind,
    /// Gaussian window parameter; only meaningful for Morlet.
    pub epsilon: f64,
    pub normalization: Normalization,
}

impl WaveletBasis {
    pub fn haar() -> Self {
        Self {
            kind: WaveletKind::Haar,
            epsilon: 0.0,
            normalization: Normalization::UnitNorm,
        }
    }

    pub fn morlet(epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self {
            kind: WaveletKind::Morlet,
            epsilon,
            normalization: Normalization::UnitNorm,
        })
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == WaveletKind::Morlet {
            check_epsilon(self.epsilon)?;
        }
        Ok(())
    }

    /// Discretized wavelet of width `k`, as a function of `d = n - m`.
    pub fn kernel(&self, k: usize) -> Result<Kernel> {
        check_width(k)?;
        self.validate()?;
        Ok(match self.kind {
            WaveletKind::Haar => haar_kernel(k, self.normalization),
            WaveletKind::Morlet => morlet_kernel(k, self.epsilon, self.normalization),
        })
    }

    /// Approximate frequency associated with width `k` (for axis overlays).
    /// Morlet uses its centre frequency `ε / (2π k Δt)`; Haar reports `1/λ`.
    pub fn approx_frequency(&self, k: usize, dt: f64) -> f64 {
        match self.kind {
            WaveletKind::Haar => 1.0 / (k as f64 * dt),
            WaveletKind::Morlet => self.epsilon / (2.0 * PI * k as f64 * dt),
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            WaveletKind::Haar => "haar".into(),
            WaveletKind::Morlet => format!("morlet(eps={})", self.epsilon),
        }
    }
}

fn check_width(k: usize) -> Result<()> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "wavelet width k must be an even integer >= 2, got {k}"
        )));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon >= MIN_EPSILON) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Morlet epsilon must be >= {MIN_EPSILON} (below that the wavelet degenerates to a Gaussian), got {epsilon}"
        )));
    }
    Ok(())
}

/// Discretized wavelet taps `ψ(d)` for `d` in `offset .. offset + taps.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    pub offset: isize,
    pub taps: Vec<Complex64>,
}

impl Kernel {
    /// `ψ(d)`, zero outside the support.
    pub fn value(&self, d: isize) -> Complex64 {
        let j = d - self.offset;
        if j < 0 || j as usize >= self.taps.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.taps[j as usize]
        }
    }

    pub fn sum(&self) -> Complex64 {
        self.taps.iter().sum()
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }
}

fn haar_kernel(k: usize, normalization: Normalization) -> Kernel {
    let half = (k / 2) as isize;
    let (offset, len, amp, pos_len) = match normalization {
        // positive on -k/2 ..= 0, negative on 1 ..= k/2
        Normalization::PaperExact => (-half, k + 1, 1.0 / (2.0 * (k as f64).sqrt()), k / 2 + 1),
        // positive on -k/2 .. 0, negative on 0 .. k/2
        Normalization::UnitNorm => (-half, k, 1.0 / (k as f64).sqrt(), k / 2),
    };
    let taps = (0..len)
        .map(|j| Complex64::new(if j < pos_len { amp } else { -amp }, 0.0))
        .collect();
    Kernel { offset, taps }
}

fn morlet_kernel(k: usize, epsilon: f64, normalization: Normalization) -> Kernel {
    let reach = (MORLET_TRUNCATION * k) as isize;
    let kf = k as f64;
    let u = |d: isize| d as f64 / kf;
    let envelope = |d: isize| (-0.5 * u(d) * u(d)).exp();
    let wave = |d: isize| Complex64::from_polar(1.0, -epsilon * u(d));
    let taps = match normalization {
        Normalization::PaperExact => {
            let correction = (-0.5 * epsilon * epsilon).exp();
            let amp = 1.0 / kf.sqrt();
            (-reach..=reach)
                .map(|d| (wave(d) - correction) * envelope(d) * amp)
                .collect()
        }
        Normalization::UnitNorm => {
            // Discrete analogue of the e^{-ε²/2} correction: pick the complex
            // constant that makes the truncated, sampled kernel sum to zero.
            let g: Vec<f64> = (-reach..=reach).map(envelope).collect();
            let g_sum: f64 = g.iter().sum();
            let wg_sum: Complex64 = (-reach..=reach).zip(&g).map(|(d, &gv)| wave(d) * gv).sum();
            let correction = wg_sum / g_sum;
            let mut taps: Vec<Complex64> = (-reach..=reach)
                .zip(&g)
                .map(|(d, &gv)| (wave(d) - correction) * gv)
                .collect();
            let mean: Complex64 = taps.iter().sum::<Complex64>() / taps.len() as f64;
            for t in &mut taps {
                *t -= mean;
            }
            let norm = taps.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
            for t in &mut taps {
                *t /= norm;
            }
            taps
        }
    };
    Kernel {
        offset: -reach,
        taps,
    }
}

/// Discrete Haar value `ψ_n(m, k)`.
pub fn haar_value(n: isize, m: isize, k: usize, normalization: Normalization) -> Result<f64> {
    check_width(k)?;
    Ok(haar_kernel(k, normalization).value(n - m).re)
}

/// Discrete Morlet value `ψ_n(m, k)` (truncated at `|n - m| <= 4k`).
pub fn morlet_value(
    n: isize,
    m: isize,
    k: usize,
    epsilon: f64,
    normalization: Normalization,
) -> Result<Complex64> {
    check_width(k)?;
    check_epsilon(epsilon)?;
    Ok(morlet_kernel(k, epsilon, normalization).value(n - m))
}

/// Half-width (in samples) of the region contaminated by record edges.
/// Haar: its exact support half-width `k/2`. Morlet: the e-folding time
/// `√2·k`, rounded up.
pub fn coi_radius(k: usize, basis: &WaveletBasis) -> usize {
    match basis.kind {
        WaveletKind::Haar => k / 2,
        WaveletKind::Morlet => (SQRT_2 * k as f64).ceil() as usize,
    }
}

/// Fraction of translations `m` whose coefficient lies inside the cone.
pub fn coi_fraction(n: usize, k: usize, basis: &WaveletBasis) -> f64 {
    n.saturating_sub(2 * coi_radius(k, basis)) as f64 / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleMode {
    /// Every even width `2, 4, ..., K`.
    PaperFull,
    LogSpaced,
}

/// Ordered even wavelet widths `k` with their physical widths `λ = k·Δt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleGrid {
    k_values: Vec<usize>,
    pub dt: f64,
    pub mode: ScaleMode,
}

/// Default number of log-spaced scales.
pub const DEFAULT_SCALE_COUNT: usize = 48;

impl ScaleGrid {
    /// Explicit widths; must be even, `>= 2`, strictly increasing.
    pub fn from_k(k_values: Vec<usize>, dt: f64, mode: ScaleMode) -> Result<Self> {
        if k_values.is_empty() {
            return Err(Error::Empty("scale grid".into()));
        }
        for &k in &k_values {
            check_width(k)?;
        }
        if k_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "scale widths must be strictly increasing".into(),
            ));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
        }
        Ok(Self { k_values, dt, mode })
    }

    /// Largest width usable for a record of `n` samples: `2·⌊(N-1)/2⌋`.
    pub fn max_width(n: usize) -> usize {
        2 * (n.saturating_sub(1) / 2)
    }

    /// Every even width from 2 to `max_k` (default `2·⌊(N-1)/2⌋`).
    pub fn full(n: usize, dt: f64, max_k: Option<usize>) -> Result<Self> {
        let top = max_k.unwrap_or(Self::max_width(n)).min(Self::max_width(n));
        Self::from_k((1..=top / 2).map(|i| 2 * i).collect(), dt, ScaleMode::PaperFull)
    }

    /// `count` geometrically spaced widths between 2 and `max_k`, rounded to
    /// even integers and deduplicated (so the result may be shorter).
    pub fn log_spaced(n: usize, dt: f64, count: usize, max_k: Option<usize>) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter("scale count must be >= 1".into()));
        }
        let top = max_k.unwrap_or(Self::max_width(n)).min(Self::max_width(n));
        if top < 2 {
            return Err(Error::TooFewSamples { got: n, min: 3 });
        }
        let mut ks: Vec<usize> = if count == 1 {
            vec![top]
        } else {
            let ratio = (top as f64 / 2.0).ln() / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    let g = 2.0 * (ratio * i as f64).exp();
                    ((g / 2.0).round() as usize * 2).clamp(2, top)
                })
                .collect()
        };
        ks.dedup();
        Self::from_k(ks, dt, ScaleMode::LogSpaced)
    }

    pub fn k_values(&self) -> &[usize] {
        &self.k_values
    }

    pub fn len(&self) -> usize {
        self.k_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_values.is_empty()
    }

    /// Physical widths `λ_j = k_j·Δt`.
    pub fn widths(&self) -> Vec<f64> {
        self.k_values.iter().map(|&k| k as f64 * self.dt).collect()
    }

    /// The exported inverse-width axis `1/λ_j`.
    pub fn inv_widths(&self) -> Vec<f64> {
        self.k_values
            .iter()
            .map(|&k| 1.0 / (k as f64 * self.dt))
            .collect()
    }

    /// Checks the grid against a record of `n` samples.
    pub fn check_fits(&self, n: usize) -> Result<()> {
        let top = *self.k_values.last().unwrap();
        if top > n.saturating_sub(1) {
            return Err(Error::InvalidParameter(format!(
                "largest width k = {top} exceeds N - 1 = {}",
                n.saturating_sub(1)
            )));
        }
        Ok(())
    }

    /// Keeps the widths selected by `keep`.
    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> Option<ScaleGrid> {
        let ks: Vec<usize> = self.k_values.iter().copied().filter(|&k| keep(k)).collect();
        if ks.is_empty() {
            None
        } else {
            Some(ScaleGrid {
                k_values: ks,
                dt: self.dt,
                mode: self.mode,
            })
        }
    }

    /// Index of the width closest to `k` on a log axis.
    pub fn nearest_index(&self, k: f64) -> usize {
        let target = k.ln();
        let mut best = 0;
        for (j, &kj) in self.k_values.iter().enumerate() {
            if ((kj as f64).ln() - target).abs() < ((self.k_values[best] as f64).ln() - target).abs() {
                best = j;
            }
        }
        best
    }
}
