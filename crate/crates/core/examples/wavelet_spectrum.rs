//! Welch PSD and wavelet spectrum of a 1/f background with one dominant
//! fluctuator; the fluctuator shows as a shoulder in both.

use wavenoise::stats::loglog_slope;
use wavenoise::synth::presets;
use wavenoise::{cwt, welch_psd, wavelet_spectrum, ScaleGrid, WaveletBasis, WelchParams};

fn main() -> wavenoise::Result<()> {
    let n = 1 << 15;
    let dt = 0.5;
    let x = presets::fluctuator(n, dt, 40.0, 11).compose()?;

    let psd = welch_psd(&x, &WelchParams::default())?;
    println!("Welch: {} bins, df = {:.2e} Hz, segment length {}", psd.values.len(), psd.meta.df(), psd.meta.segment_length);
    println!("Welch log-log slope: {:.2}", loglog_slope(&psd.frequencies, &psd.values));

    for basis in [WaveletBasis::haar(), WaveletBasis::morlet(5.0)?] {
        let grid = ScaleGrid::log_spaced(n, dt, 32, None)?;
        let spec = wavelet_spectrum(&cwt(&x, &basis, &grid)?, true)?;
        println!("\n{} wavelet spectrum (inside the cone):", basis.label());
        println!("{:>10} {:>12} {:>12}", "1/lambda", "sigma^2", "sigma^4");
        for e in spec.entries.iter().step_by(3) {
            println!("{:>10.4} {:>12.4e} {:>12.4e}", e.inv_lambda, e.sigma2, e.sigma4);
        }
        if !spec.dropped.is_empty() {
            println!("dropped widths: {:?}", spec.dropped);
        }
    }
    Ok(())
}
