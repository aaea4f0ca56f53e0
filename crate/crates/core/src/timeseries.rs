//! Uniformly sampled time series: ingestion, validation, alignment and
//! basic statistics.
//!
//! Timestamps are implicit once a series is built: sample `n` sits at
//! `t0 + n * dt`.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::fmt_f64;

/// A uniformly sampled, finite, real-valued signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub label: String,
    pub units: String,
    pub t0: f64,
    pub dt: f64,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series, checking `N >= 2`, `dt > 0` and that every value is finite.
    pub fn new(label: impl Into<String>, t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooFewSamples {
                got: values.len(),
                min: 2,
            });
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidParameter("t0 must be finite".into()));
        }
        if let Some(row) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row });
        }
        Ok(Self {
            label: label.into(),
            units: String::new(),
            t0,
            dt,
            values,
        })
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = units.into();
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Timestamp of sample `n`.
    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    /// Same grid and metadata, new values. Values must have the same length.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            label: self.label.clone(),
            units: self.units.clone(),
            t0: self.t0,
            dt: self.dt,
            values,
        }
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    /// Sample standard deviation (`N - 1` denominator).
    pub fn std(&self) -> f64 {
        std(&self.values)
    }

    pub fn demean(&self) -> TimeSeries {
        self.with_values(demean(&self.values))
    }

    /// Drops every sample with `t < t0 + seconds`.
    pub fn trim_start(&self, seconds: f64) -> Result<TimeSeries> {
        if !(seconds >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "trim must be non-negative, got {seconds}"
            )));
        }
        let cut = self.t0 + seconds;
        let first = (0..self.len())
            .find(|&n| self.time(n) >= cut)
            .unwrap_or(self.len());
        let mut out = TimeSeries::new(
            self.label.clone(),
            self.time(first.min(self.len() - 1)),
            self.dt,
            self.values[first..].to_vec(),
        )?;
        out.units = self.units.clone();
        Ok(out)
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (`N - 1` denominator).
pub fn std(values: &[f64]) -> f64 {
    let mu = mean(values);
    let ss: f64 = values.iter().map(|v| (v - mu) * (v - mu)).sum();
    (ss / (values.len() as f64 - 1.0)).sqrt()
}

pub fn demean(values: &[f64]) -> Vec<f64> {
    let mu = mean(values);
    values.iter().map(|v| v - mu).collect()
}

/// Options controlling CSV ingestion.
#[derive(Clone, Debug)]
pub struct CsvOptions {
    pub delimiter: u8,
    /// Largest tolerated deviation of any sampling interval from the median
    /// interval, as a fraction of the median.
    pub uniform_tolerance: f64,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            uniform_tolerance: 0.01,
        }
    }
}

/// Loads one value column against a time column.
pub fn load_csv(path: &Path, time_column: &str, value_column: &str) -> Result<TimeSeries> {
    load_csv_with(path, time_column, value_column, &CsvOptions::default())
}

pub fn load_csv_with(
    path: &Path,
    time_column: &str,
    value_column: &str,
    opts: &CsvOptions,
) -> Result<TimeSeries> {
    let mut all = load_csv_columns(path, time_column, Some(&[value_column.to_string()]), opts)?;
    Ok(all.remove(0))
}

/// Loads every non-time column of a wide CSV as its own series.
pub fn load_csv_all(path: &Path, time_column: &str, opts: &CsvOptions) -> Result<Vec<TimeSeries>> {
    load_csv_columns(path, time_column, None, opts)
}

/// Loads the named value columns (all non-time columns when `wanted` is `None`).
pub fn load_csv_columns(
    path: &Path,
    time_column: &str,
    wanted: Option<&[String]>,
    opts: &CsvOptions,
) -> Result<Vec<TimeSeries>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let time_idx = find(time_column)?;
    let value_cols: Vec<(usize, String)> = match wanted {
        Some(names) => names
            .iter()
            .map(|n| find(n).map(|i| (i, n.clone())))
            .collect::<Result<_>>()?,
        None => headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != time_idx)
            .map(|(i, h)| (i, h.to_string()))
            .collect(),
    };
    if value_cols.is_empty() {
        return Err(Error::MissingColumn("<any value column>".into()));
    }

    let mut times = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); value_cols.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let t = parse_field(&record, time_idx, row)?;
        times.push(t);
        for (col, (idx, _)) in columns.iter_mut().zip(&value_cols) {
            col.push(parse_field(&record, *idx, row)?);
        }
    }
    if times.len() < 2 {
        return Err(Error::TooFewSamples {
            got: times.len(),
            min: 2,
        });
    }
    if let Some(row) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneTime { row: row + 1 });
    }
    let dt = uniform_step(&times, opts.uniform_tolerance)?;

    value_cols
        .into_iter()
        .zip(columns)
        .map(|((_, name), values)| TimeSeries::new(name, times[0], dt, values))
        .collect()
}

fn parse_field(record: &csv::StringRecord, idx: usize, row: usize) -> Result<f64> {
    let field = record
        .get(idx)
        .ok_or_else(|| Error::Csv(format!("row {row} has too few fields")))?;
    let v: f64 = field
        .parse()
        .map_err(|_| Error::Csv(format!("row {row}: cannot parse `{field}` as a number")))?;
    if !v.is_finite() {
        return Err(Error::NonFinite { row });
    }
    Ok(v)
}

/// Median sampling interval, rejecting grids whose intervals stray from it
/// by more than `tolerance` (relative). For an even number of intervals the
/// lower middle element is used so the median is always an observed step.
pub fn uniform_step(times: &[f64], tolerance: f64) -> Result<f64> {
    let mut intervals: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    let raw = intervals.clone();
    intervals.sort_by(f64::total_cmp);
    let median = intervals[(intervals.len() - 1) / 2];
    for &interval in &raw {
        if (interval - median).abs() > tolerance * median {
            return Err(Error::NonUniform {
                interval,
                median,
                tolerance_pct: tolerance * 100.0,
            });
        }
    }
    Ok(median)
}

/// Writes `time,<label>` for each series (all series must share one grid).
pub fn write_csv(path: &Path, series: &[&TimeSeries]) -> Result<()> {
    let first = series
        .first()
        .ok_or_else(|| Error::Empty("no series to write".into()))?;
    if series
        .iter()
        .any(|s| s.len() != first.len() || s.dt != first.dt || s.t0 != first.t0)
    {
        return Err(Error::Mismatch("series written together must share a grid".into()));
    }
    let mut out = std::io::BufWriter::new(File::create(path)?);
    write!(out, "time")?;
    for s in series {
        write!(out, ",{}", s.label)?;
    }
    writeln!(out)?;
    for n in 0..first.len() {
        write!(out, "{}", fmt_f64(first.time(n)))?;
        for s in series {
            write!(out, ",{}", fmt_f64(s.values[n]))?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

/// Series sharing one sampling grid (identical `dt`, `t0` and `N`).
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSet {
    entries: Vec<TimeSeries>,
    /// Samples removed from each input by alignment (same order as entries).
    pub dropped: Vec<usize>,
}

impl SeriesSet {
    /// Wraps series that already share a grid.
    pub fn new(entries: Vec<TimeSeries>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::Empty("series set".into()))?;
        if entries
            .iter()
            .any(|s| s.len() != first.len() || s.dt != first.dt || s.t0 != first.t0)
        {
            return Err(Error::Mismatch(
                "series set entries must share dt, t0 and length".into(),
            ));
        }
        let dropped = vec![0; entries.len()];
        Ok(Self { entries, dropped })
    }

    pub fn entries(&self) -> &[TimeSeries] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<TimeSeries> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.entries[0].dt
    }

    pub fn samples(&self) -> usize {
        self.entries[0].len()
    }
}

/// Decimates every series onto the grid of the coarsest one, restricted to
/// the common overlap window. Each output sample is the input sample with the
/// nearest timestamp (ties go to the earlier sample); nothing is averaged or
/// interpolated.
pub fn align_to_coarsest(raw: &[TimeSeries]) -> Result<SeriesSet> {
    if raw.is_empty() {
        return Err(Error::Empty("no series to align".into()));
    }
    let start = raw.iter().map(|s| s.t0).fold(f64::NEG_INFINITY, f64::max);
    let end = raw.iter().map(|s| s.t_end()).fold(f64::INFINITY, f64::min);
    if start > end {
        return Err(Error::EmptyOverlap);
    }
    // first series with the largest step wins ties
    let coarse = raw
        .iter()
        .enumerate()
        .fold(0, |best, (i, s)| if s.dt > raw[best].dt { i } else { best });
    let grid = &raw[coarse];
    let slack = 1e-9 * grid.dt;
    let targets: Vec<f64> = (0..grid.len())
        .map(|n| grid.time(n))
        .filter(|&t| t >= start - slack && t <= end + slack)
        .collect();
    if targets.is_empty() {
        return Err(Error::EmptyOverlap);
    }

    let mut entries = Vec::with_capacity(raw.len());
    let mut dropped = Vec::with_capacity(raw.len());
    for s in raw {
        let values: Vec<f64> = targets
            .iter()
            .map(|&t| s.values[nearest_index(s, t)])
            .collect();
        dropped.push(s.len() - values.len());
        let mut out = TimeSeries::new(s.label.clone(), targets[0], grid.dt, values)?;
        out.units = s.units.clone();
        entries.push(out);
    }
    Ok(SeriesSet { entries, dropped })
}

fn nearest_index(s: &TimeSeries, t: f64) -> usize {
    let pos = ((t - s.t0) / s.dt).clamp(0.0, (s.len() - 1) as f64);
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(s.len() - 1);
    if (s.time(hi) - t).abs() < (t - s.time(lo)).abs() {
        hi
    } else {
        lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_file(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_three_rows() {
        let f = csv_file("# comment\ntime,v\n0,5\n1,6\n2,7\n");
        let s = load_csv(f.path(), "time", "v").unwrap();
        assert_eq!(s.t0, 0.0);
        assert_eq!(s.dt, 1.0);
        assert_eq!(s.values(), &[5.0, 6.0, 7.0]);
    }

    #[test]
    fn rejects_repeated_time() {
        let f = csv_file("time,v\n0,5\n1,6\n1,7\n");
        assert!(matches!(
            load_csv(f.path(), "time", "v"),
            Err(Error::NonMonotoneTime { row: 2 })
        ));
    }

    #[test]
    fn two_percent_jitter_is_non_uniform() {
        let f = csv_file("time,v\n0,5\n1.0,6\n2.02,7\n");
        assert!(matches!(
            load_csv(f.path(), "time", "v"),
            Err(Error::NonUniform { .. })
        ));
    }

    #[test]
    fn distinct_ingest_errors() {
        assert!(matches!(
            load_csv(Path::new("/nonexistent/x.csv"), "time", "v"),
            Err(Error::MissingFile(_))
        ));
        let f = csv_file("time,v\n0,5\n1,6\n");
        assert!(matches!(
            load_csv(f.path(), "time", "w"),
            Err(Error::MissingColumn(_))
        ));
        let f = csv_file("time,v\n0,5\n");
        assert!(matches!(
            load_csv(f.path(), "time", "v"),
            Err(Error::TooFewSamples { .. })
        ));
        let f = csv_file("time,v\n0,5\n1,inf\n");
        assert!(matches!(
            load_csv(f.path(), "time", "v"),
            Err(Error::NonFinite { row: 1 })
        ));
    }

    #[test]
    fn semicolon_delimiter() {
        let f = csv_file("time;a;b\n0;1;2\n0.5;3;4\n");
        let opts = CsvOptions {
            delimiter: b';',
            ..Default::default()
        };
        let all = load_csv_all(f.path(), "time", &opts).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[1].label, "b");
        assert_eq!(all[1].values(), &[2.0, 4.0]);
        assert_eq!(all[0].dt, 0.5);
    }

    #[test]
    fn csv_round_trip() {
        let s = TimeSeries::new("x", 1.5, 0.25, vec![0.1, -2.0 / 3.0, 1e-300]).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_csv(f.path(), &[&s]).unwrap();
        let back = load_csv(f.path(), "time", "x").unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn stats() {
        let s = TimeSeries::new("x", 0.0, 1.0, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.mean(), 2.0);
        assert_eq!(s.std(), 1.0);
        assert_eq!(s.demean().values(), &[-1.0, 0.0, 1.0]);

        let c = TimeSeries::new("c", 0.0, 1.0, vec![4.5; 4]).unwrap();
        assert_eq!(c.std(), 0.0);
        assert!(c.demean().values().iter().all(|&v| v == 0.0));

        let p = TimeSeries::new("p", 0.0, 1.0, vec![0.0, 2.0]).unwrap();
        assert_eq!(p.mean(), 1.0);
        assert!((p.std() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn align_decimates_by_selection() {
        let a = TimeSeries::new("a", 0.0, 1.0, (0..10).map(f64::from).collect()).unwrap();
        let b = TimeSeries::new("b", 0.0, 2.0, (0..5).map(|i| 100.0 + i as f64).collect()).unwrap();
        let set = align_to_coarsest(&[a, b.clone()]).unwrap();
        assert_eq!(set.entries()[0].values(), &[0.0, 2.0, 4.0, 6.0, 8.0]);
        assert_eq!(set.entries()[1], b);
        assert_eq!(set.dt(), 2.0);
        assert_eq!(set.dropped, vec![5, 0]);
    }

    #[test]
    fn align_identity_cases() {
        let a = TimeSeries::new("a", 3.0, 0.5, vec![1.0, 2.0, 3.0]).unwrap();
        let set = align_to_coarsest(std::slice::from_ref(&a)).unwrap();
        assert_eq!(set.entries()[0], a);

        let b = TimeSeries::new("b", 3.0, 0.5, vec![7.0, 8.0, 9.0]).unwrap();
        let set = align_to_coarsest(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(set.entries(), &[a, b]);
    }

    #[test]
    fn align_tie_goes_to_earlier_sample() {
        // coarse grid at 0, 3, 6; fine grid at 0, 2, 4, 6: t = 3 is equidistant from 2 and 4
        let fine = TimeSeries::new("f", 0.0, 2.0, vec![10.0, 20.0, 30.0, 40.0]).unwrap();
        let coarse = TimeSeries::new("c", 0.0, 3.0, vec![0.0, 1.0, 2.0]).unwrap();
        let set = align_to_coarsest(&[fine, coarse]).unwrap();
        assert_eq!(set.entries()[0].values(), &[10.0, 20.0, 40.0]);
    }

    #[test]
    fn align_rejects_disjoint_ranges() {
        let a = TimeSeries::new("a", 0.0, 1.0, vec![0.0; 3]).unwrap();
        let b = TimeSeries::new("b", 10.0, 1.0, vec![0.0; 3]).unwrap();
        assert!(matches!(align_to_coarsest(&[a, b]), Err(Error::EmptyOverlap)));
    }

    #[test]
    fn trim_drops_leading_samples() {
        let a = TimeSeries::new("a", 0.0, 1.0, (0..10).map(f64::from).collect()).unwrap();
        let t = a.trim_start(3.0).unwrap();
        assert_eq!(t.t0, 3.0);
        assert_eq!(t.values()[0], 3.0);
        assert_eq!(t.len(), 7);
    }
}
