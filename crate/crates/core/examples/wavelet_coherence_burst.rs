//! Morlet wavelet coherence localizes a shared transient in time and scale.
//!
//! `cargo run --example wavelet_coherence_burst -- [OUT.svg]`

use wavenoise::svg::Heatmap;
use wavenoise::synth::presets;
use wavenoise::{stats, wavelet_coherence, ScaleGrid, Smoothing, WaveletBasis};

fn main() -> wavenoise::Result<()> {
    let n = 4096;
    let period = 64.0;
    let set = presets::burst_pair(n, 1.0, period, 9).generate()?;
    let basis = WaveletBasis::morlet(5.0)?;
    let grid = ScaleGrid::log_spaced(n, 1.0, 96, None)?;
    let map = wavelet_coherence(&set.entries()[0], &set.entries()[1], &grid, &basis, &Smoothing::default())?;

    let j = grid.nearest_index(5.0 * period / (2.0 * std::f64::consts::PI));
    println!("coherence squared along k = {} (matched to the burst tone):", grid.k_values()[j]);
    for m in (0..n).step_by(256) {
        let bar = "#".repeat((map.values[j][m] * 40.0) as usize);
        println!("m = {m:>5} {:.2} {bar}", map.values[j][m]);
    }
    println!("median inside the cone: {:.3}", stats::median(map.coi_values()).unwrap());

    if let Some(path) = std::env::args().nth(1) {
        Heatmap::from_coherence(&map, "coherence squared, shared burst").write(path.as_ref())?;
        println!("wrote {path}");
    }
    Ok(())
}
