//! Scale-wise r² for all pairs of eight series, two of which share a
//! telegraph signal.

use wavenoise::synth::presets;
use wavenoise::{correlation_grid, scale_cutoff, PearsonOptions, ScaleGrid, WaveletBasis, WaveletKind};

fn main() -> wavenoise::Result<()> {
    let n = 8192;
    let set = presets::eight_series(n, 1.0, 21).generate()?;
    let haar = WaveletBasis::haar();
    let grid = scale_cutoff(n, &ScaleGrid::log_spaced(n, 1.0, 24, None)?, &haar)?;
    let morlet = WaveletBasis::morlet(5.0)?;
    let g = correlation_grid(&set, &[haar, morlet], &grid, &PearsonOptions::default())?;

    // the shared fluctuator has mean dwell 32 samples, i.e. Haar width 64
    let k = grid.k_values()[grid.nearest_index(64.0)];
    println!("r² at k = {k} (Haar), pairs ranked:");
    let mut rows: Vec<(String, f64)> = g
        .pairs
        .iter()
        .filter(|p| p.basis.kind == WaveletKind::Haar)
        .map(|p| {
            let r2 = p.correlation.entry(k).map_or(f64::NAN, |e| e.r2);
            (format!("{}-{}", g.labels[p.a], g.labels[p.b]), r2)
        })
        .collect();
    rows.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (name, r2) in rows.iter().take(6) {
        println!("  {name:<8} {r2:.3}");
    }
    println!("  ... {} pairs in total per basis", rows.len());

    let coupled = g.pair(1, 5, WaveletKind::Morlet).unwrap();
    let peak = coupled.correlation.peak().unwrap();
    println!("Morlet peak for v2-v6: r² = {:.3} at k = {}", peak.r2, peak.k);
    Ok(())
}
