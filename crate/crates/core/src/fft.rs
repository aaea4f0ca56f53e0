//! FFT plumbing shared by the transform, smoothing and spectral code.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

pub(crate) fn forward(len: usize) -> Arc<dyn Fft<f64>> {
    planner().lock().unwrap().plan_fft_forward(len)
}

pub(crate) fn inverse(len: usize) -> Arc<dyn Fft<f64>> {
    planner().lock().unwrap().plan_fft_inverse(len)
}

/// Forward DFT of a real sequence (unnormalized, `X_k = Σ x_n e^{-2πikn/N}`).
pub(crate) fn dft_real(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(buf.len()).process(&mut buf);
    buf
}

/// Work below which direct summation beats the FFT route.
const DIRECT_LIMIT: usize = 48;

/// Zero-padded correlation against a finite tap set:
/// `out[m] = Σ_j signal[m + offset + j] * taps[j]` for `m` in `0..signal.len()`,
/// treating samples outside the signal as zero.
pub(crate) fn correlate(signal: &[Complex64], taps: &[Complex64], offset: isize) -> Vec<Complex64> {
    let (taps, offset) = clip_taps(taps, offset, signal.len());
    if taps.len() <= DIRECT_LIMIT {
        correlate_direct(signal, taps, offset)
    } else {
        let plan = SpectrumPlan::new(signal, max_reach(taps.len(), offset));
        plan.correlate(taps, offset)
    }
}

/// Drops taps that can never overlap a signal of length `n`.
pub(crate) fn clip_taps(taps: &[Complex64], offset: isize, n: usize) -> (&[Complex64], isize) {
    let reach = n as isize - 1;
    let lo = (-reach - offset).max(0) as usize;
    let hi = ((reach - offset + 1).max(0) as usize).min(taps.len());
    if lo >= hi {
        return (&taps[0..0], 0);
    }
    (&taps[lo..hi], offset + lo as isize)
}

/// Largest |offset| touched by a tap set.
pub(crate) fn max_reach(len: usize, offset: isize) -> usize {
    if len == 0 {
        return 0;
    }
    let last = offset + len as isize - 1;
    offset.unsigned_abs().max(last.unsigned_abs())
}

pub(crate) fn correlate_direct(
    signal: &[Complex64],
    taps: &[Complex64],
    offset: isize,
) -> Vec<Complex64> {
    let n = signal.len() as isize;
    (0..n)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, tap) in taps.iter().enumerate() {
                let i = m + offset + j as isize;
                if i >= 0 && i < n {
                    acc += signal[i as usize] * tap;
                }
            }
            acc
        })
        .collect()
}

/// Cached spectrum of a zero-padded signal, reusable against many tap sets
/// whose reach does not exceed the value given at construction.
pub(crate) struct SpectrumPlan {
    n: usize,
    len: usize,
    spectrum: Vec<Complex64>,
}

impl SpectrumPlan {
    pub(crate) fn new(signal: &[Complex64], reach: usize) -> Self {
        let n = signal.len();
        let len = (n + reach.max(1)).next_power_of_two();
        let mut spectrum = vec![Complex64::new(0.0, 0.0); len];
        spectrum[..n].copy_from_slice(signal);
        forward(len).process(&mut spectrum);
        Self { n, len, spectrum }
    }

    pub(crate) fn reach(&self) -> usize {
        self.len - self.n
    }

    /// Same contract as [`correlate`]; taps must already be clipped and fit
    /// within [`Self::reach`].
    pub(crate) fn correlate(&self, taps: &[Complex64], offset: isize) -> Vec<Complex64> {
        debug_assert!(max_reach(taps.len(), offset) <= self.reach());
        // out[m] = Σ_i s[i] h[m - i] with h[-(offset + j)] = taps[j]
        let len = self.len as isize;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        for (j, tap) in taps.iter().enumerate() {
            let idx = (-(offset + j as isize)).rem_euclid(len) as usize;
            buf[idx] = *tap;
        }
        forward(self.len).process(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b *= s;
        }
        inverse(self.len).process(&mut buf);
        let scale = 1.0 / self.len as f64;
        buf.truncate(self.n);
        for b in &mut buf {
            *b *= scale;
        }
        buf
    }
}
