//! Loads two CSV files on different grids, aligns them to the coarser one and
//! exports the Haar transform of each.
//!
//! `cargo run --example csv_pipeline -- [OUT_DIR]`

use std::path::PathBuf;

use wavenoise::export::write_wavelet_matrix;
use wavenoise::synth::presets;
use wavenoise::timeseries::{align_to_coarsest, load_csv, write_csv};
use wavenoise::{cwt, ScaleGrid, TimeSeries, WaveletBasis};

fn main() -> wavenoise::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("wavenoise-csv"));
    std::fs::create_dir_all(&out)?;

    // one series sampled every 0.5 s, the other every 2 s
    let fine = presets::fluctuator(4000, 0.5, 20.0, 1).compose()?;
    let coarse_src = presets::fluctuator(1000, 2.0, 20.0, 2).compose()?;
    let coarse = TimeSeries::new("coarse", 0.0, 2.0, coarse_src.into_values())?;
    write_csv(&out.join("fine.csv"), &[&fine])?;
    write_csv(&out.join("coarse.csv"), &[&coarse])?;

    let a = load_csv(&out.join("fine.csv"), "time", "fluctuator")?;
    let b = load_csv(&out.join("coarse.csv"), "time", "coarse")?;
    let set = align_to_coarsest(&[a, b])?;
    println!("aligned: dt = {}, N = {}, dropped {:?}", set.dt(), set.samples(), set.dropped);

    let grid = ScaleGrid::log_spaced(set.samples(), set.dt(), 24, None)?;
    for s in set.entries() {
        let w = cwt(s, &WaveletBasis::haar(), &grid)?;
        for path in write_wavelet_matrix(&out, &format!("{}_haar", s.label), &w)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
