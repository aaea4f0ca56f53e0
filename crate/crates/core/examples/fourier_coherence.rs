//! Cross spectrum and Fourier coherence of two noisy series sharing a tone.

use wavenoise::synth::presets;
use wavenoise::{cross_psd, fourier_coherence, WelchParams, Window};

fn main() -> wavenoise::Result<()> {
    let period = 32.0;
    let set = presets::sine_pair(8192, 1.0, period, 3).generate()?;
    let (x, y) = (&set.entries()[0], &set.entries()[1]);
    let params = WelchParams::new(16, 0.5, Window::Hann);

    let coh = fourier_coherence(x, y, &params)?;
    let cross = cross_psd(x, y, &params)?;
    let f0 = 1.0 / period;
    let bin = coh
        .frequencies
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - f0).abs().total_cmp(&(b.1 - f0).abs()))
        .map(|(i, _)| i)
        .unwrap();

    let defined: Vec<f64> = coh.defined().collect();
    let mean = defined.iter().sum::<f64>() / defined.len() as f64;
    println!("shared tone at {f0:.4} Hz");
    println!("coherence at nearest bin ({:.4} Hz): {:.3}", coh.frequencies[bin], coh.values[bin].unwrap_or(f64::NAN));
    println!("mean coherence over {} defined bins: {mean:.3}", defined.len());
    println!("cross-PSD phase at the tone: {:.3} rad", cross.values[bin].arg());
    Ok(())
}
