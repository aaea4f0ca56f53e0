//! Wavelet-based noise analysis for long, uniformly sampled time series.
//!
//! The pipeline runs from ingestion ([`timeseries`]) through discretized
//! continuous wavelet transforms ([`wavelet`], [`cwt`]), Fourier estimators
//! ([`spectral`]), scale-resolved correlation ([`correlate`]) and the wavelet
//! variance transformation ([`vartransform`]). [`synth`] provides seeded
//! ground-truth signals. [`cli`] wires everything to files on disk.

// `!(x >= lo)` comparisons are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod correlate;
pub mod cwt;
pub mod error;
pub mod export;
mod fft;
pub mod spectral;
pub mod stats;
pub mod svg;
pub mod synth;
pub mod timeseries;
pub mod vartransform;
pub mod wavelet;

pub use correlate::{
    correlation_grid, scalewise_pearson, smooth_map, wavelet_coherence, CoefficientPart, CoherenceMap,
    CorrelationGrid, PearsonOptions, ScaleCorrelation, Smoothing,
};
pub use cwt::{cwt, wavelet_spectrum, WaveletMatrix, WaveletSpectrum};
pub use error::{Error, Result};
pub use spectral::{cross_psd, fourier_coherence, periodogram, welch_psd, Spectrum, WelchParams, Window};
pub use timeseries::{align_to_coarsest, load_csv, SeriesSet, TimeSeries};
pub use vartransform::{
    covariance_vector, peak_variance_summary, scale_cutoff, variance_transform, TransformOptions,
    VarianceTransformResult,
};
pub use wavelet::{coi_fraction, coi_radius, Normalization, ScaleGrid, ScaleMode, WaveletBasis, WaveletKind};
