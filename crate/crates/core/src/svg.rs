//! Minimal SVG heatmaps of scale-resolved matrices, with the edge-affected
//! region outside the cone of influence hatched.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::correlate::CoherenceMap;
use crate::cwt::WaveletMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorScale {
    #[default]
    Linear,
    Log,
}

impl std::str::FromStr for ColorScale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(ColorScale::Linear),
            "log" => Ok(ColorScale::Log),
            _ => Err(Error::InvalidParameter(format!("unknown colour scale `{s}`"))),
        }
    }
}

/// Translations are pooled into at most this many columns.
const MAX_TIME_BINS: usize = 400;
const CELL_W: f64 = 2.0;
const CELL_H: f64 = 8.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 40.0;

/// Viridis-like anchors, interpolated linearly.
const PALETTE: [(u8, u8, u8); 5] = [
    (68, 1, 84),
    (59, 82, 139),
    (33, 145, 140),
    (94, 201, 98),
    (253, 231, 37),
];

fn colour(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (PALETTE.len() - 1) as f64;
    let i = (t.floor() as usize).min(PALETTE.len() - 2);
    let f = t - i as f64;
    let (a, b) = (PALETTE[i], PALETTE[i + 1]);
    let mix = |x: u8, y: u8| (x as f64 + f * (y as f64 - x as f64)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

pub struct Heatmap<'a> {
    pub title: &'a str,
    /// One column per scale, all of equal length.
    pub columns: Vec<Vec<f64>>,
    pub k_values: &'a [usize],
    pub coi_radii: &'a [usize],
    pub scale: ColorScale,
}

impl<'a> Heatmap<'a> {
    pub fn from_magnitude(w: &'a WaveletMatrix, title: &'a str, scale: ColorScale) -> Self {
        Self {
            title,
            columns: w.columns().iter().map(|c| c.iter().map(|v| v.norm()).collect()).collect(),
            k_values: w.scale_grid.k_values(),
            coi_radii: w.coi_radii(),
            scale,
        }
    }

    pub fn from_coherence(c: &'a CoherenceMap, title: &'a str) -> Self {
        Self {
            title,
            columns: c.values.clone(),
            k_values: c.scale_grid.k_values(),
            coi_radii: &c.coi_radii,
            scale: ColorScale::Linear,
        }
    }

    fn transform(&self, v: f64) -> f64 {
        match self.scale {
            ColorScale::Linear => v,
            ColorScale::Log => v.max(f64::MIN_POSITIVE).log10(),
        }
    }

    pub fn render(&self) -> String {
        let rows = self.columns.first().map_or(0, Vec::len);
        let bins = rows.clamp(1, MAX_TIME_BINS);
        let per_bin = rows as f64 / bins as f64;
        let pooled: Vec<Vec<f64>> = self
            .columns
            .iter()
            .map(|col| {
                (0..bins)
                    .map(|b| {
                        let lo = (b as f64 * per_bin) as usize;
                        let hi = (((b + 1) as f64 * per_bin) as usize).max(lo + 1).min(rows);
                        let s: f64 = col[lo..hi].iter().map(|v| self.transform(*v)).sum();
                        s / (hi - lo) as f64
                    })
                    .collect()
            })
            .collect();
        let (lo, hi) = pooled
            .iter()
            .flatten()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let span = if hi > lo { hi - lo } else { 1.0 };

        let width = MARGIN_L + bins as f64 * CELL_W + 20.0;
        let height = MARGIN_T + self.columns.len() as f64 * CELL_H + MARGIN_B;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="10">"#
        );
        s.push_str(
            r##"<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)"><line x1="0" y1="0" x2="0" y2="6" stroke="#ffffff" stroke-width="1.5" stroke-opacity="0.7"/></pattern></defs>"##,
        );
        s.push('\n');
        let _ = writeln!(s, r#"<text x="{MARGIN_L}" y="18" font-size="12">{}</text>"#, escape(self.title));
        for (j, col) in pooled.iter().enumerate() {
            let y = MARGIN_T + j as f64 * CELL_H;
            for (b, v) in col.iter().enumerate() {
                let x = MARGIN_L + b as f64 * CELL_W;
                let fill = if v.is_finite() { colour((v - lo) / span) } else { "#808080".into() };
                let _ = writeln!(
                    s,
                    r#"<rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{fill}"/>"#
                );
            }
            // cone of influence, one hatched band per edge
            let r = self.coi_radii[j].min(rows) as f64;
            let band = (r / rows.max(1) as f64) * bins as f64 * CELL_W;
            if band > 0.0 {
                let right = MARGIN_L + bins as f64 * CELL_W - band;
                let _ = writeln!(
                    s,
                    r#"<rect x="{MARGIN_L}" y="{y}" width="{band}" height="{CELL_H}" fill="url(#hatch)"/><rect x="{right}" y="{y}" width="{band}" height="{CELL_H}" fill="url(#hatch)"/>"#
                );
            }
            if j % 4 == 0 {
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{}" text-anchor="end">k={}</text>"#,
                    MARGIN_L - 4.0,
                    y + CELL_H,
                    self.k_values[j]
                );
            }
        }
        let base = MARGIN_T + self.columns.len() as f64 * CELL_H + 14.0;
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN_L}" y="{base}">m = 0 .. {} ({} scale, range {:.3e} .. {:.3e})</text>"#,
            rows.saturating_sub(1),
            match self.scale {
                ColorScale::Linear => "linear",
                ColorScale::Log => "log10",
            },
            lo,
            hi
        );
        s.push_str("</svg>\n");
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
