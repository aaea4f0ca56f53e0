//! Batch front end: resolves a [`RunConfig`] from flags and an optional
//! config file, runs one analysis command and writes its outputs.
//!
//! Every run writes `config.json` (the fully resolved configuration) next to
//! its outputs; passing that file back with `--config` reproduces them.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::correlate::{self, CoefficientPart, PearsonOptions, Smoothing};
use crate::cwt::{cwt, wavelet_spectrum};
use crate::error::{Error, Result};
use crate::export;
use crate::spectral::{self, WelchParams, Window};
use crate::svg::{ColorScale, Heatmap};
use crate::synth::{NoiseRecipe, SetRecipe};
use crate::timeseries::{self, align_to_coarsest, CsvOptions, SeriesSet, TimeSeries};
use crate::vartransform::{self, TransformOptions};
use crate::wavelet::{Normalization, ScaleGrid, WaveletBasis, WaveletKind, DEFAULT_SCALE_COUNT};

/// Scale grid selection: `log:COUNT` or `full`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ScaleSpec {
    Log(usize),
    Full,
}

impl FromStr for ScaleSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "full" {
            return Ok(ScaleSpec::Full);
        }
        s.strip_prefix("log:")
            .and_then(|c| c.parse().ok())
            .filter(|&c: &usize| c >= 1)
            .map(ScaleSpec::Log)
            .ok_or_else(|| Error::InvalidParameter(format!("--scales expects log:COUNT or full, got `{s}`")))
    }
}

impl TryFrom<String> for ScaleSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ScaleSpec> for String {
    fn from(s: ScaleSpec) -> String {
        s.to_string()
    }
}

impl fmt::Display for ScaleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleSpec::Log(c) => write!(f, "log:{c}"),
            ScaleSpec::Full => f.write_str("full"),
        }
    }
}

fn parse_normalization(s: &str) -> Result<Normalization> {
    match s {
        "paper" => Ok(Normalization::PaperExact),
        "unit" => Ok(Normalization::UnitNorm),
        _ => Err(Error::InvalidParameter(format!("--normalization expects paper or unit, got `{s}`"))),
    }
}

fn parse_basis(s: &str) -> Result<WaveletKind> {
    match s {
        "haar" => Ok(WaveletKind::Haar),
        "morlet" => Ok(WaveletKind::Morlet),
        _ => Err(Error::InvalidParameter(format!("--basis expects haar or morlet, got `{s}`"))),
    }
}

fn parse_part(s: &str) -> Result<CoefficientPart> {
    match s {
        "real" => Ok(CoefficientPart::Real),
        "magnitude" => Ok(CoefficientPart::Magnitude),
        _ => Err(Error::InvalidParameter(format!("--part expects real or magnitude, got `{s}`"))),
    }
}

/// Everything a command needs, validated before any computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub time_column: String,
    /// Value columns to use; empty means every non-time column.
    pub columns: Vec<String>,
    pub delimiter: char,
    pub uniform_tolerance: f64,
    pub basis: WaveletKind,
    pub epsilon: f64,
    pub normalization: Normalization,
    pub scales: ScaleSpec,
    pub max_k: Option<usize>,
    pub welch: WelchParams,
    pub coi_only: bool,
    /// Apply the 80% cone cut-off to the grid (correlate, vartransform).
    pub cutoff: bool,
    pub trim_start: Option<f64>,
    pub out: PathBuf,
    pub svg: bool,
    pub color_scale: ColorScale,
    pub seed: Option<u64>,
    pub part: CoefficientPart,
    pub both_bases: bool,
    pub unit_variance: bool,
    pub smoothing: Smoothing,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            inputs: Vec::new(),
            time_column: "time".into(),
            columns: Vec::new(),
            delimiter: ',',
            uniform_tolerance: 0.01,
            basis: WaveletKind::Morlet,
            epsilon: 5.0,
            normalization: Normalization::UnitNorm,
            scales: ScaleSpec::Log(DEFAULT_SCALE_COUNT),
            max_k: None,
            welch: WelchParams::default(),
            coi_only: true,
            cutoff: true,
            trim_start: None,
            out: PathBuf::from("out"),
            svg: false,
            color_scale: ColorScale::Linear,
            seed: None,
            part: CoefficientPart::Real,
            both_bases: false,
            unit_variance: false,
            smoothing: Smoothing::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if let Some(k) = self.max_k {
            if k < 2 || k % 2 != 0 {
                return bad(format!("--max-k must be an even integer >= 2, got {k}"));
            }
        }
        self.wavelet_basis()?;
        self.welch.layout(usize::MAX / 4)?;
        if !(self.uniform_tolerance >= 0.0) {
            return bad(format!("uniform tolerance must be >= 0, got {}", self.uniform_tolerance));
        }
        if let Some(t) = self.trim_start {
            if !(t >= 0.0) {
                return bad(format!("--trim-start must be >= 0, got {t}"));
            }
        }
        if !self.delimiter.is_ascii() {
            return bad(format!("delimiter must be ASCII, got `{}`", self.delimiter));
        }
        let s = &self.smoothing;
        if !(s.time_width_factor > 0.0 && s.time_truncation > 0.0 && s.scale_boxcar >= 0.0) {
            return bad("smoothing widths must be positive".into());
        }
        if self.command != "synth" && self.inputs.is_empty() {
            return bad(format!("`{}` needs at least one input file", self.command));
        }
        Ok(())
    }

    pub fn wavelet_basis(&self) -> Result<WaveletBasis> {
        self.basis_of(self.basis)
    }

    fn basis_of(&self, kind: WaveletKind) -> Result<WaveletBasis> {
        let b = match kind {
            WaveletKind::Haar => WaveletBasis::haar(),
            WaveletKind::Morlet => WaveletBasis::morlet(self.epsilon)?,
        };
        Ok(b.with_normalization(self.normalization))
    }

    fn csv_options(&self) -> CsvOptions {
        CsvOptions {
            delimiter: self.delimiter as u8,
            uniform_tolerance: self.uniform_tolerance,
        }
    }

    /// Grid for a record of `n` samples, cut off when `cut` and enabled.
    pub fn grid(&self, n: usize, dt: f64, basis: &WaveletBasis, cut: bool) -> Result<ScaleGrid> {
        if n < 3 {
            return Err(Error::TooFewSamples { got: n, min: 3 });
        }
        let grid = match self.scales {
            ScaleSpec::Log(count) => ScaleGrid::log_spaced(n, dt, count, self.max_k)?,
            ScaleSpec::Full => {
                if n > 20_000 {
                    log::warn!("--scales full on N = {n} computes {} scales; expect a long run", n / 2);
                }
                ScaleGrid::full(n, dt, self.max_k)?
            }
        };
        if cut && self.cutoff {
            vartransform::scale_cutoff(n, &grid, basis)
        } else {
            Ok(grid)
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "wavenoise", version, about = "Wavelet-based noise analysis of long time series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate synthetic datasets from a JSON recipe.
    Synth(SynthArgs),
    /// Wavelet matrix and cone-of-influence export.
    Cwt(Flags),
    /// Welch PSD next to the wavelet spectrum.
    Spectrum(Flags),
    /// Fourier coherence plus Morlet wavelet coherence map of two series.
    Coherence(Flags),
    /// Scale-wise r² for every pair of a series set.
    Correlate(Flags),
    /// Wavelet variance transform and peak-variance summary.
    Vartransform(Flags),
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Recipe JSON: a single-series recipe or a set recipe.
    pub recipe: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the recipe seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct Flags {
    /// Input CSV files (`time` column plus one or more value columns).
    pub inputs: Vec<PathBuf>,
    /// Resolved config written by an earlier run; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = ["haar", "morlet"])]
    pub basis: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_parser = ["paper", "unit"])]
    pub normalization: Option<String>,
    /// `log:COUNT` or `full`.
    #[arg(long)]
    pub scales: Option<String>,
    /// Largest wavelet width (even).
    #[arg(long)]
    pub max_k: Option<usize>,
    #[arg(long)]
    pub welch_segments: Option<usize>,
    #[arg(long)]
    pub welch_overlap: Option<f64>,
    #[arg(long, value_parser = ["hann", "rect"])]
    pub window: Option<String>,
    /// Restrict statistics to the cone of influence (default true).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub coi_only: Option<bool>,
    /// Apply the 80% cut-off to the scale grid (default true).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub cutoff: Option<bool>,
    #[arg(long)]
    pub trim_start: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: bool,
    #[arg(long, value_parser = ["linear", "log"])]
    pub color_scale: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub time_column: Option<String>,
    /// Comma-separated value columns to use.
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
    #[arg(long)]
    pub delimiter: Option<char>,
    /// Coefficient part entering Pearson's r.
    #[arg(long, value_parser = ["real", "magnitude"])]
    pub part: Option<String>,
    /// Correlate with both Haar and Morlet.
    #[arg(long)]
    pub both_bases: bool,
    /// Rescale the transformed predictor to unit variance.
    #[arg(long)]
    pub unit_variance: bool,
}

impl Flags {
    /// Starts from `--config` (or defaults) and applies every given flag.
    pub fn resolve(&self, command: &str) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => read_config(path)?,
            None => RunConfig::default(),
        };
        c.command = command.into();
        if !self.inputs.is_empty() {
            c.inputs = self.inputs.clone();
        }
        if let Some(v) = &self.basis {
            c.basis = parse_basis(v)?;
        }
        if let Some(v) = self.epsilon {
            c.epsilon = v;
        }
        if let Some(v) = &self.normalization {
            c.normalization = parse_normalization(v)?;
        }
        if let Some(v) = &self.scales {
            c.scales = v.parse()?;
        }
        if self.max_k.is_some() {
            c.max_k = self.max_k;
        }
        if let Some(v) = self.welch_segments {
            c.welch.segments = v;
        }
        if let Some(v) = self.welch_overlap {
            c.welch.overlap = v;
        }
        if let Some(v) = &self.window {
            c.welch.window = v.parse::<Window>()?;
        }
        if let Some(v) = self.coi_only {
            c.coi_only = v;
        }
        if let Some(v) = self.cutoff {
            c.cutoff = v;
        }
        if self.trim_start.is_some() {
            c.trim_start = self.trim_start;
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        c.svg |= self.svg;
        if let Some(v) = &self.color_scale {
            c.color_scale = v.parse()?;
        }
        if self.seed.is_some() {
            c.seed = self.seed;
        }
        if let Some(v) = &self.time_column {
            c.time_column = v.clone();
        }
        if let Some(v) = &self.columns {
            c.columns = v.clone();
        }
        if let Some(v) = self.delimiter {
            c.delimiter = v;
        }
        if let Some(v) = &self.part {
            c.part = parse_part(v)?;
        }
        c.both_bases |= self.both_bases;
        c.unit_variance |= self.unit_variance;
        Ok(c)
    }
}

fn read_config(path: &Path) -> Result<RunConfig> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn write_config(cfg: &RunConfig) -> Result<PathBuf> {
    let path = cfg.out.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(cfg)? + "\n")?;
    Ok(path)
}

/// Loads every requested series, trimmed when configured.
pub fn load_inputs(cfg: &RunConfig) -> Result<Vec<TimeSeries>> {
    let opts = cfg.csv_options();
    let mut all = Vec::new();
    for path in &cfg.inputs {
        all.extend(timeseries::load_csv_all(path, &cfg.time_column, &opts)?);
    }
    if !cfg.columns.is_empty() {
        let mut picked = Vec::with_capacity(cfg.columns.len());
        for name in &cfg.columns {
            let s = all
                .iter()
                .find(|s| &s.label == name)
                .ok_or_else(|| Error::MissingColumn(name.clone()))?;
            picked.push(s.clone());
        }
        all = picked;
    }
    if all.is_empty() {
        return Err(Error::Empty("no value columns in the inputs".into()));
    }
    if let Some(t) = cfg.trim_start {
        all = all.iter().map(|s| s.trim_start(t)).collect::<Result<_>>()?;
    }
    Ok(all)
}

fn aligned(cfg: &RunConfig) -> Result<SeriesSet> {
    let set = align_to_coarsest(&load_inputs(cfg)?)?;
    if set.dropped.iter().any(|&d| d > 0) {
        log::info!("alignment dropped samples per series: {:?}", set.dropped);
    }
    Ok(set)
}

fn write_alignment(cfg: &RunConfig, set: &SeriesSet) -> Result<PathBuf> {
    #[derive(Serialize)]
    struct Alignment<'a> {
        labels: Vec<&'a str>,
        dt: f64,
        samples: usize,
        dropped: &'a [usize],
    }
    let path = cfg.out.join("alignment.json");
    let info = Alignment {
        labels: set.entries().iter().map(|s| s.label.as_str()).collect(),
        dt: set.dt(),
        samples: set.samples(),
        dropped: &set.dropped,
    };
    std::fs::write(&path, serde_json::to_string_pretty(&info)? + "\n")?;
    Ok(path)
}

fn exactly_two(series: Vec<TimeSeries>, what: &str) -> Result<(TimeSeries, TimeSeries)> {
    if series.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "{what} needs exactly two series, got {}",
            series.len()
        )));
    }
    let mut it = series.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap()))
}

fn safe_name(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Generates the datasets described by a recipe file.
pub fn cmd_synth(recipe: &Path, out: &Path, seed: Option<u64>) -> Result<Vec<PathBuf>> {
    if !recipe.exists() {
        return Err(Error::MissingFile(recipe.to_path_buf()));
    }
    std::fs::create_dir_all(out)?;
    let text = std::fs::read_to_string(recipe)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let stem = recipe
        .file_stem()
        .map(|s| safe_name(&s.to_string_lossy()))
        .unwrap_or_else(|| "synth".into());
    let path = out.join(format!("{stem}.csv"));
    let resolved = if value.get("series").is_some() {
        let mut r: SetRecipe = serde_json::from_value(value)?;
        if let Some(s) = seed {
            r.seed = s;
        }
        let set = r.generate()?;
        timeseries::write_csv(&path, &set.entries().iter().collect::<Vec<_>>())?;
        serde_json::to_value(&r)?
    } else {
        let mut r: NoiseRecipe = serde_json::from_value(value)?;
        if let Some(s) = seed {
            r.seed = s;
        }
        timeseries::write_csv(&path, &[&r.compose()?])?;
        serde_json::to_value(&r)?
    };
    let cfg = out.join("recipe.json");
    std::fs::write(&cfg, serde_json::to_string_pretty(&resolved)? + "\n")?;
    Ok(vec![path, cfg])
}

pub fn cmd_cwt(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let basis = cfg.wavelet_basis()?;
    let mut written = Vec::new();
    for x in load_inputs(cfg)? {
        let grid = cfg.grid(x.len(), x.dt, &basis, false)?;
        let w = cwt(&x, &basis, &grid)?;
        let stem = format!("{}_cwt", safe_name(&x.label));
        written.extend(export::write_wavelet_matrix(&cfg.out, &stem, &w)?);
        let coi = cfg.out.join(format!("{stem}_coi.csv"));
        export::write_coi_mask(&coi, &w)?;
        written.push(coi);
        if cfg.svg {
            let path = cfg.out.join(format!("{stem}.svg"));
            let title = format!("|W| {} ({})", x.label, basis.label());
            Heatmap::from_magnitude(&w, &title, cfg.color_scale).write(&path)?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let basis = cfg.wavelet_basis()?;
    let mut written = Vec::new();
    for x in load_inputs(cfg)? {
        let name = safe_name(&x.label);
        let welch = spectral::welch_psd(&x, &cfg.welch)?;
        let p = cfg.out.join(format!("{name}_welch_psd.csv"));
        export::write_spectrum(&p, &welch)?;
        written.push(p);
        let grid = cfg.grid(x.len(), x.dt, &basis, false)?;
        let ws = wavelet_spectrum(&cwt(&x, &basis, &grid)?, cfg.coi_only)?;
        let p = cfg.out.join(format!("{name}_wavelet_spectrum.csv"));
        export::write_wavelet_spectrum(&p, &basis, &ws)?;
        written.push(p);
    }
    Ok(written)
}

pub fn cmd_coherence(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let basis = cfg.wavelet_basis()?;
    if basis.kind != WaveletKind::Morlet {
        return Err(Error::UnsupportedBasis(
            "wavelet coherence is defined for the Morlet basis only".into(),
        ));
    }
    let set = align_to_coarsest(&load_inputs(cfg)?)?;
    let (x, y) = exactly_two(set.into_entries(), "coherence")?;
    let mut written = Vec::new();

    let fc = spectral::fourier_coherence(&x, &y, &cfg.welch)?;
    let p = cfg.out.join("fourier_coherence.csv");
    export::write_fourier_coherence(&p, &fc)?;
    written.push(p);
    let cross = spectral::cross_psd(&x, &y, &cfg.welch)?;
    let p = cfg.out.join("cross_psd.csv");
    export::write_cross_spectrum(&p, &cross)?;
    written.push(p);

    let grid = cfg.grid(x.len(), x.dt, &basis, false)?;
    let map = correlate::wavelet_coherence(&x, &y, &grid, &basis, &cfg.smoothing)?;
    written.extend(export::write_coherence_map(&cfg.out, "wavelet_coherence", &map)?);
    if cfg.svg {
        let path = cfg.out.join("wavelet_coherence.svg");
        let title = format!("coherence squared {} vs {}", x.label, y.label);
        Heatmap::from_coherence(&map, &title).write(&path)?;
        written.push(path);
    }
    Ok(written)
}

pub fn cmd_correlate(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let set = aligned(cfg)?;
    let kinds = if cfg.both_bases {
        vec![WaveletKind::Haar, WaveletKind::Morlet]
    } else {
        vec![cfg.basis]
    };
    let opts = PearsonOptions {
        part: cfg.part,
        coi_only: cfg.coi_only,
    };
    let mut combined: Option<correlate::CorrelationGrid> = None;
    for kind in kinds {
        let basis = cfg.basis_of(kind)?;
        let grid = cfg.grid(set.samples(), set.dt(), &basis, true)?;
        let g = correlate::correlation_grid(&set, &[basis], &grid, &opts)?;
        match &mut combined {
            Some(c) => c.pairs.extend(g.pairs),
            None => combined = Some(g),
        }
    }
    let grid = combined.expect("at least one basis");
    let path = cfg.out.join("correlation_grid.csv");
    export::write_correlation_grid(&path, &grid)?;
    Ok(vec![write_alignment(cfg, &set)?, path])
}

pub fn cmd_vartransform(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let basis = cfg.wavelet_basis()?;
    let set = aligned(cfg)?;
    let grid = cfg.grid(set.samples(), set.dt(), &basis, true)?;
    let opts = TransformOptions {
        unit_variance: cfg.unit_variance,
        coi_only: cfg.coi_only,
    };
    let mut written = vec![write_alignment(cfg, &set)?];
    if set.len() == 2 {
        let (x, y) = (&set.entries()[0], &set.entries()[1]);
        let r = vartransform::variance_transform(x, y, &basis, &grid, &opts)?;
        let p = cfg.out.join("x_prime.csv");
        timeseries::write_csv(&p, &[&r.x_prime])?;
        written.push(p);
        let p = cfg.out.join("covariances.csv");
        export::write_covariances(&p, &r)?;
        written.push(p);
        for (name, s) in [("spectrum_before.csv", &r.spectrum_before), ("spectrum_after.csv", &r.spectrum_after)] {
            let p = cfg.out.join(name);
            export::write_wavelet_spectrum(&p, &basis, s)?;
            written.push(p);
        }
    }
    let rows = vartransform::peak_variance_summary(&set, &basis, &grid, &opts)?;
    let p = cfg.out.join("peak_summary.csv");
    export::write_peak_summary(&p, &rows)?;
    written.push(p);
    Ok(written)
}

/// Runs an analysis command after validation, then records the config.
pub fn run_config(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out)?;
    let mut written = match cfg.command.as_str() {
        "cwt" => cmd_cwt(cfg)?,
        "spectrum" => cmd_spectrum(cfg)?,
        "coherence" => cmd_coherence(cfg)?,
        "correlate" => cmd_correlate(cfg)?,
        "vartransform" => cmd_vartransform(cfg)?,
        other => return Err(Error::InvalidParameter(format!("unknown command `{other}`"))),
    };
    written.push(write_config(cfg)?);
    Ok(written)
}

pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let (name, flags) = match cli.command {
        Command::Synth(a) => {
            return cmd_synth(&a.recipe, a.out.as_deref().unwrap_or(Path::new("out")), a.seed);
        }
        Command::Cwt(f) => ("cwt", f),
        Command::Spectrum(f) => ("spectrum", f),
        Command::Coherence(f) => ("coherence", f),
        Command::Correlate(f) => ("correlate", f),
        Command::Vartransform(f) => ("vartransform", f),
    };
    run_config(&flags.resolve(name)?)
}

/// Machine-readable failure report.
pub fn error_json(e: &Error) -> String {
    serde_json::json!({
        "error": e.kind(),
        "message": e.to_string(),
        "exit_code": e.exit_code(),
    })
    .to_string()
}
