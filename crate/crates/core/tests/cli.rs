use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wavenoise::synth::presets;
use wavenoise::timeseries::write_csv;

fn wavenoise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavenoise")).args(args).output().unwrap()
}

fn write_set(dir: &Path, name: &str, set: &wavenoise::SeriesSet) -> PathBuf {
    let path = dir.join(name);
    write_csv(&path, &set.entries().iter().collect::<Vec<_>>()).unwrap();
    path
}

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn coherence_of_identical_files_is_one() {
    let tmp = tempfile::tempdir().unwrap();
    let set = presets::independent_pair(1024, 1.0, 5).generate().unwrap();
    let one = wavenoise::SeriesSet::new(vec![set.entries()[0].clone()]).unwrap();
    let a = write_set(tmp.path(), "a.csv", &one);
    let b = write_set(tmp.path(), "b.csv", &one);
    let out = tmp.path().join("out");
    let o = wavenoise(&["coherence", a.to_str().unwrap(), b.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let rows = data_rows(&out.join("wavelet_coherence.csv"));
    assert_eq!(rows.len(), 1024);
    for row in &rows {
        for v in &row[1..] {
            let v: f64 = v.parse().unwrap();
            assert!((v - 1.0).abs() <= 1e-9, "{v}");
        }
    }
    for row in data_rows(&out.join("fourier_coherence.csv")) {
        let v: f64 = row[1].parse().unwrap();
        assert!((v - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn odd_max_k_is_rejected_with_json() {
    let tmp = tempfile::tempdir().unwrap();
    let set = presets::independent_pair(256, 1.0, 1).generate().unwrap();
    let data = write_set(tmp.path(), "pair.csv", &set);
    let out = tmp.path().join("out");
    let o = wavenoise(&["cwt", data.to_str().unwrap(), "--max-k", "33", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["exit_code"], o.status.code().unwrap());
    assert!(err["message"].as_str().unwrap().contains("max"));
}

#[test]
fn missing_input_exits_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let o = wavenoise(&["spectrum", tmp.path().join("nope.csv").to_str().unwrap()]);
    assert!(!o.status.success());
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "missing_file");
}

#[test]
fn eight_series_correlate_covers_every_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let set = presets::eight_series(2048, 1.0, 3).generate().unwrap();
    let data = write_set(tmp.path(), "eight.csv", &set);
    let out = tmp.path().join("out");
    let o = wavenoise(&["correlate", data.to_str().unwrap(), "--basis", "haar", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let rows = data_rows(&out.join("correlation_grid.csv"));
    let mut pairs: Vec<(String, String)> = rows.iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    pairs.dedup();
    assert_eq!(pairs.len(), 28);
    let mut ks: Vec<usize> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    ks.sort_unstable();
    ks.dedup();
    assert!(ks.iter().all(|&k| k / 2 <= 2048 / 10));
    assert_eq!(rows.len(), 28 * ks.len());
    for r in &rows {
        let r2: f64 = r[6].parse().unwrap();
        assert!((0.0..=1.0).contains(&r2));
    }
}

#[test]
fn saved_config_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let set = presets::sine_pair(2048, 1.0, 128.0, 8).generate().unwrap();
    let data = write_set(tmp.path(), "pair.csv", &set);
    let first = tmp.path().join("first");
    let o = wavenoise(&[
        "vartransform",
        data.to_str().unwrap(),
        "--basis",
        "haar",
        "--scales",
        "log:20",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let second = tmp.path().join("second");
    let o = wavenoise(&[
        "vartransform",
        "--config",
        first.join("config.json").to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["x_prime.csv", "covariances.csv", "peak_summary.csv", "spectrum_after.csv"] {
        assert_eq!(
            std::fs::read(first.join(name)).unwrap(),
            std::fs::read(second.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn synth_recipe_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let recipe = tmp.path().join("burst.json");
    let r = presets::burst_pair(512, 1.0, 32.0, 4);
    std::fs::write(&recipe, serde_json::to_string(&r).unwrap()).unwrap();
    let out = tmp.path().join("out");
    for seed in ["4", "4"] {
        let o = wavenoise(&["synth", recipe.to_str().unwrap(), "--seed", seed, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let rows = data_rows(&out.join("burst.csv"));
    assert_eq!(rows.len(), 512);
    assert_eq!(rows[0].len(), 3);
}
