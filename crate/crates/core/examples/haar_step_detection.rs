//! Haar edge detection: the coefficient magnitude peaks where the signal steps.

use wavenoise::synth::rng::Xoshiro256StarStar;
use wavenoise::{cwt, ScaleGrid, ScaleMode, TimeSeries, WaveletBasis};

fn main() -> wavenoise::Result<()> {
    let n = 2048;
    let step_at = 1300;
    let mut rng = Xoshiro256StarStar::seed_from_u64(5);
    let values: Vec<f64> = (0..n)
        .map(|i| if i >= step_at { 1.0 } else { 0.0 } + 0.1 * rng.next_normal())
        .collect();
    let x = TimeSeries::new("step", 0.0, 1.0, values)?;
    let grid = ScaleGrid::from_k(vec![4, 8, 16, 32, 64, 128], 1.0, ScaleMode::LogSpaced)?;
    let w = cwt(&x, &WaveletBasis::haar(), &grid)?;

    println!("step inserted at n = {step_at}");
    for (j, &k) in grid.k_values().iter().enumerate() {
        let (m, peak) = w
            .column(j)
            .iter()
            .enumerate()
            .map(|(m, c)| (m, c.norm()))
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        println!("k = {k:>4}: argmax |W| at m = {m:>5} (|W| = {peak:.3}, offset {:+})", m as i64 - step_at as i64);
    }
    Ok(())
}
