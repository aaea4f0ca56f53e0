//! Generates the bundled synthetic datasets and writes them as CSV.
//!
//! `cargo run --example synth_datasets -- [OUT_DIR]`

use std::path::PathBuf;

use wavenoise::synth::{presets, NoiseRecipe};
use wavenoise::timeseries::write_csv;

fn main() -> wavenoise::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("wavenoise-synth"));
    std::fs::create_dir_all(&out)?;

    let single: NoiseRecipe = presets::fluctuator(16_384, 1.0, 50.0, 7);
    let x = single.compose()?;
    write_csv(&out.join("fluctuator.csv"), &[&x])?;
    println!("fluctuator: N = {}, mean {:.3}, std {:.3}", x.len(), x.mean(), x.std());

    let sets = [
        ("sine_pair", presets::sine_pair(4096, 1.0, 64.0, 1)),
        ("burst_pair", presets::burst_pair(4096, 1.0, 64.0, 2)),
        ("rts_pair", presets::rts_pair(8192, 1.0, 64.0, 3)),
        ("eight_series", presets::eight_series(8192, 1.0, 4)),
    ];
    for (name, recipe) in sets {
        let set = recipe.generate()?;
        let path = out.join(format!("{name}.csv"));
        write_csv(&path, &set.entries().iter().collect::<Vec<_>>())?;
        std::fs::write(out.join(format!("{name}.json")), serde_json::to_string_pretty(&recipe)?)?;
        println!("{name}: {} series x {} samples -> {}", set.len(), set.samples(), path.display());
    }
    Ok(())
}
