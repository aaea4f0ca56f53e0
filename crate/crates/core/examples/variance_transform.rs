//! Reshapes a white-noise predictor toward a tonal response and reports the
//! peak-variance scale.

use wavenoise::synth::{presets, ComponentKind, NoiseRecipe};
use wavenoise::{peak_variance_summary, variance_transform, ScaleGrid, TransformOptions, WaveletBasis};

fn main() -> wavenoise::Result<()> {
    let n = 4096;
    let x = NoiseRecipe::new("x", n, 1.0, 1).with(ComponentKind::White { sigma: 1.0 }).compose()?;
    let y = NoiseRecipe::new("y", n, 1.0, 2)
        .with(ComponentKind::Sinusoid { frequency: 0.01, amplitude: 1.0, phase: 0.0, burst: None })
        .with(ComponentKind::White { sigma: 0.1 })
        .compose()?;
    let basis = WaveletBasis::morlet(5.0)?;
    let grid = ScaleGrid::log_spaced(n, 1.0, 48, None)?;
    let opts = TransformOptions { coi_only: true, ..Default::default() };
    let r = variance_transform(&x, &y, &basis, &grid, &opts)?;

    println!("retained widths: {} (largest k = {})", r.scale_grid.len(), r.scale_grid.k_values().last().unwrap());
    println!("peak variance at k = {} (1/lambda = {:.4}), r² there {:?}", r.peak_k, r.peak_scale, r.r2_at_peak);
    let before = r.spectrum_before.entries.iter().find(|e| e.k == r.peak_k).unwrap().sigma2;
    let after = r.spectrum_after.entries.iter().find(|e| e.k == r.peak_k).unwrap().sigma2;
    println!("wavelet variance at the peak: before {before:.3e}, after {after:.3e}");

    let drift = presets::drift_pair(n, 1.0, 3).generate()?;
    for row in peak_variance_summary(&drift, &basis, &grid, &opts)? {
        println!("{} -> {}: peak 1/lambda {:.4}, r² {:?}", row.predictor, row.response, row.peak_inv_lambda, row.r2_at_peak);
    }
    Ok(())
}
