use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::rng::{derive_seed, Xoshiro256StarStar};
use super::{colored_values, rts_values};
use crate::error::{Error, Result};
use crate::timeseries::{SeriesSet, TimeSeries};

/// One additive signal component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ComponentKind {
    Rts {
        rate_up: f64,
        rate_down: f64,
        amplitude: f64,
    },
    Colored {
        beta: f64,
        level: f64,
    },
    Sinusoid {
        frequency: f64,
        amplitude: f64,
        #[serde(default)]
        phase: f64,
        /// `[start, end)` in seconds from the start of the record; zero outside.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        burst: Option<[f64; 2]>,
    },
    Drift {
        slope: f64,
    },
    White {
        sigma: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    #[serde(flatten)]
    pub kind: ComponentKind,
    /// Explicit stream seed; derived from the recipe seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl From<ComponentKind> for Component {
    fn from(kind: ComponentKind) -> Self {
        Self { kind, seed: None }
    }
}

impl Component {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn validate(&self, n: usize, dt: f64) -> Result<()> {
        match self.kind {
            ComponentKind::Rts {
                rate_up, rate_down, ..
            } => {
                if !(rate_up > 0.0 && rate_down > 0.0) {
                    return Err(Error::InvalidParameter(
                        "rts component rates must be > 0".into(),
                    ));
                }
            }
            ComponentKind::Colored { beta, .. } => {
                if !(0.0..=2.0).contains(&beta) {
                    return Err(Error::InvalidParameter(format!(
                        "beta must be in [0, 2], got {beta}"
                    )));
                }
            }
            ComponentKind::Sinusoid {
                burst: Some([start, end]),
                ..
            } => {
                let duration = n as f64 * dt;
                if !(start >= 0.0 && start < end && end <= duration) {
                    return Err(Error::InvalidParameter(format!(
                        "burst window [{start}, {end}) must lie inside [0, {duration}]"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Samples the component on `n` points spaced `dt` apart.
    pub fn render(&self, n: usize, dt: f64, seed: u64) -> Result<Vec<f64>> {
        self.validate(n, dt)?;
        let seed = self.seed.unwrap_or(seed);
        let t = |i: usize| i as f64 * dt;
        Ok(match self.kind {
            ComponentKind::Rts {
                rate_up,
                rate_down,
                amplitude,
            } => rts_values(n, dt, rate_up, rate_down, amplitude, seed)?,
            ComponentKind::Colored { beta, level } => colored_values(n, dt, beta, level, seed)?,
            ComponentKind::Sinusoid {
                frequency,
                amplitude,
                phase,
                burst,
            } => (0..n)
                .map(|i| {
                    let ti = t(i);
                    let on = burst.is_none_or(|[a, b]| ti >= a && ti < b);
                    if on {
                        amplitude * (2.0 * PI * frequency * ti + phase).sin()
                    } else {
                        0.0
                    }
                })
                .collect(),
            ComponentKind::Drift { slope } => (0..n).map(|i| slope * t(i)).collect(),
            ComponentKind::White { sigma } => {
                let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
                (0..n).map(|_| sigma * rng.next_normal()).collect()
            }
        })
    }
}

/// A single synthetic series: the sum of its components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseRecipe {
    #[serde(default = "default_label")]
    pub label: String,
    pub n: usize,
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub components: Vec<Component>,
}

fn default_label() -> String {
    "x".into()
}

fn check_dims(n: usize, dt: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewSamples { got: n, min: 2 });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    Ok(())
}

fn sum_components(components: &[Component], n: usize, dt: f64, seed: u64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n];
    for (i, c) in components.iter().enumerate() {
        let v = c.render(n, dt, derive_seed(seed, i as u64))?;
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }
    Ok(out)
}

impl NoiseRecipe {
    pub fn new(label: impl Into<String>, n: usize, dt: f64, seed: u64) -> Self {
        Self {
            label: label.into(),
            n,
            dt,
            seed,
            components: Vec::new(),
        }
    }

    pub fn with(mut self, component: impl Into<Component>) -> Self {
        self.components.push(component.into());
        self
    }

    /// Components with every stream seed made explicit.
    pub fn resolved_components(&self) -> Vec<Component> {
        self.components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let seed = c.seed.unwrap_or_else(|| derive_seed(self.seed, i as u64));
                c.clone().with_seed(seed)
            })
            .collect()
    }

    /// Recipe whose output is the sum of both recipes' outputs.
    pub fn concat(&self, other: &NoiseRecipe) -> Result<NoiseRecipe> {
        if self.n != other.n || self.dt != other.dt {
            return Err(Error::Mismatch("recipes with different n or dt".into()));
        }
        let mut components = self.resolved_components();
        components.extend(other.resolved_components());
        Ok(NoiseRecipe {
            label: self.label.clone(),
            n: self.n,
            dt: self.dt,
            seed: self.seed,
            components,
        })
    }

    pub fn compose(&self) -> Result<TimeSeries> {
        compose(self)
    }
}

/// Sums the recipe's components (an empty recipe gives a zero series).
pub fn compose(recipe: &NoiseRecipe) -> Result<TimeSeries> {
    check_dims(recipe.n, recipe.dt)?;
    let values = sum_components(&recipe.components, recipe.n, recipe.dt, recipe.seed)?;
    TimeSeries::new(recipe.label.clone(), 0.0, recipe.dt, values)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub label: String,
    #[serde(default)]
    pub components: Vec<Component>,
}

/// A component instance injected, unchanged, into several series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharedSpec {
    pub members: Vec<usize>,
    pub component: Component,
}

/// Several series on one grid, each with independent components, plus shared
/// components that create known cross-correlation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetRecipe {
    pub n: usize,
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
    pub series: Vec<SeriesSpec>,
    #[serde(default)]
    pub shared: Vec<SharedSpec>,
}

impl SetRecipe {
    pub fn generate(&self) -> Result<SeriesSet> {
        gen_pairset(self)
    }
}

const SHARED_STREAM: u64 = 1 << 32;

/// Renders every series of the set; each shared component is rendered once
/// and added to all of its member series.
pub fn gen_pairset(recipe: &SetRecipe) -> Result<SeriesSet> {
    check_dims(recipe.n, recipe.dt)?;
    if recipe.series.is_empty() {
        return Err(Error::Empty("set recipe has no series".into()));
    }
    let mut values: Vec<Vec<f64>> = recipe
        .series
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            sum_components(
                &spec.components,
                recipe.n,
                recipe.dt,
                derive_seed(recipe.seed, i as u64),
            )
        })
        .collect::<Result<_>>()?;
    for (s, shared) in recipe.shared.iter().enumerate() {
        let v = shared.component.render(
            recipe.n,
            recipe.dt,
            derive_seed(recipe.seed, SHARED_STREAM + s as u64),
        )?;
        for &member in &shared.members {
            let target = values.get_mut(member).ok_or_else(|| {
                Error::InvalidParameter(format!("shared member index {member} out of range"))
            })?;
            for (o, x) in target.iter_mut().zip(&v) {
                *o += x;
            }
        }
    }
    let entries = recipe
        .series
        .iter()
        .zip(values)
        .map(|(spec, v)| TimeSeries::new(spec.label.clone(), 0.0, recipe.dt, v))
        .collect::<Result<Vec<_>>>()?;
    SeriesSet::new(entries)
}

/// Ready-made recipes used by the examples and the acceptance suite.
pub mod presets {
    use super::*;

    fn white(sigma: f64) -> Component {
        ComponentKind::White { sigma }.into()
    }

    fn pink(level: f64) -> Component {
        ComponentKind::Colored { beta: 1.0, level }.into()
    }

    fn symmetric_rts(dwell: f64, amplitude: f64) -> Component {
        ComponentKind::Rts {
            rate_up: 1.0 / dwell,
            rate_down: 1.0 / dwell,
            amplitude,
        }
        .into()
    }

    fn pair(n: usize, dt: f64, seed: u64, own: [Vec<Component>; 2], shared: Component) -> SetRecipe {
        let [a, b] = own;
        SetRecipe {
            n,
            dt,
            seed,
            series: vec![
                SeriesSpec {
                    label: "x".into(),
                    components: a,
                },
                SeriesSpec {
                    label: "y".into(),
                    components: b,
                },
            ],
            shared: vec![SharedSpec {
                members: vec![0, 1],
                component: shared,
            }],
        }
    }

    /// 1/f background with one dominant fluctuator of mean dwell `dwell` seconds.
    pub fn fluctuator(n: usize, dt: f64, dwell: f64, seed: u64) -> NoiseRecipe {
        NoiseRecipe::new("fluctuator", n, dt, seed)
            .with(pink(1.0))
            .with(symmetric_rts(dwell, 2.0))
    }

    /// Two independent unit white-noise series.
    pub fn independent_pair(n: usize, dt: f64, seed: u64) -> SetRecipe {
        let mut r = pair(n, dt, seed, [vec![white(1.0)], vec![white(1.0)]], white(0.0));
        r.shared.clear();
        r
    }

    /// A sinusoid of period `period` seconds shared by two series, each with
    /// independent unit white noise; signal-to-noise variance ratio 1.
    pub fn sine_pair(n: usize, dt: f64, period: f64, seed: u64) -> SetRecipe {
        let sine = ComponentKind::Sinusoid {
            frequency: 1.0 / period,
            amplitude: 2f64.sqrt(),
            phase: 0.0,
            burst: None,
        };
        pair(n, dt, seed, [vec![white(1.0)], vec![white(1.0)]], sine.into())
    }

    /// As [`sine_pair`] but the shared sinusoid only occupies the middle fifth
    /// of the record.
    pub fn burst_pair(n: usize, dt: f64, period: f64, seed: u64) -> SetRecipe {
        let duration = n as f64 * dt;
        let sine = ComponentKind::Sinusoid {
            frequency: 1.0 / period,
            amplitude: 2f64.sqrt(),
            phase: 0.0,
            burst: Some([0.4 * duration, 0.6 * duration]),
        };
        pair(n, dt, seed, [vec![white(1.0)], vec![white(1.0)]], sine.into())
    }

    /// A shared symmetric telegraph signal of mean dwell `dwell` seconds over
    /// independent 1/f backgrounds.
    pub fn rts_pair(n: usize, dt: f64, dwell: f64, seed: u64) -> SetRecipe {
        pair(
            n,
            dt,
            seed,
            [vec![pink(1.0), white(0.3)], vec![pink(1.0), white(0.3)]],
            symmetric_rts(dwell, 2.0),
        )
    }

    /// Two series sharing only a slow linear drift.
    pub fn drift_pair(n: usize, dt: f64, seed: u64) -> SetRecipe {
        let slope = 4.0 / (n as f64 * dt);
        pair(
            n,
            dt,
            seed,
            [vec![white(1.0)], vec![white(1.0)]],
            ComponentKind::Drift { slope }.into(),
        )
    }

    /// Eight series with independent 1/f + white backgrounds; series 1 and 5
    /// share a telegraph signal of mean dwell `32·dt`.
    pub fn eight_series(n: usize, dt: f64, seed: u64) -> SetRecipe {
        let series = (1..=8)
            .map(|i| SeriesSpec {
                label: format!("v{i}"),
                components: vec![pink(1.0), white(0.5)],
            })
            .collect();
        SetRecipe {
            n,
            dt,
            seed,
            series,
            shared: vec![SharedSpec {
                members: vec![1, 5],
                component: symmetric_rts(32.0 * dt, 1.5),
            }],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_recipe_is_zero() {
        let s = compose(&NoiseRecipe::new("z", 16, 1.0, 0)).unwrap();
        assert!(s.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn additivity() {
        let a = NoiseRecipe::new("a", 256, 0.5, 1)
            .with(ComponentKind::White { sigma: 1.0 })
            .with(ComponentKind::Drift { slope: 0.1 });
        let b = NoiseRecipe::new("b", 256, 0.5, 2)
            .with(ComponentKind::Colored { beta: 1.0, level: 2.0 })
            .with(ComponentKind::Rts {
                rate_up: 0.1,
                rate_down: 0.2,
                amplitude: 1.0,
            });
        let sum = compose(&a.concat(&b).unwrap()).unwrap();
        let sa = compose(&a).unwrap();
        let sb = compose(&b).unwrap();
        for ((s, x), y) in sum.values().iter().zip(sa.values()).zip(sb.values()) {
            assert!((s - (x + y)).abs() <= 1e-12 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn json_round_trip_and_schema() {
        let json = r#"{
            "label": "demo", "n": 100, "dt": 0.5, "seed": 3,
            "components": [
                {"type": "rts", "rate_up": 0.1, "rate_down": 0.2, "amplitude": 1.0},
                {"type": "colored", "beta": 1.0, "level": 1.0, "seed": 99},
                {"type": "sinusoid", "frequency": 0.05, "amplitude": 1.0, "burst": [10.0, 20.0]},
                {"type": "drift", "slope": 0.01},
                {"type": "white", "sigma": 0.5}
            ]
        }"#;
        let r: NoiseRecipe = serde_json::from_str(json).unwrap();
        assert_eq!(r.components.len(), 5);
        assert_eq!(r.components[1].seed, Some(99));
        let again: NoiseRecipe = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(again, r);
        assert_eq!(compose(&r).unwrap(), compose(&again).unwrap());
    }

    #[test]
    fn burst_confined_to_window() {
        let r = NoiseRecipe::new("b", 100, 1.0, 0).with(ComponentKind::Sinusoid {
            frequency: 0.1,
            amplitude: 1.0,
            phase: 0.5,
            burst: Some([20.0, 40.0]),
        });
        let s = compose(&r).unwrap();
        assert!(s.values()[..20].iter().all(|&v| v == 0.0));
        assert!(s.values()[40..].iter().all(|&v| v == 0.0));
        assert!(s.values()[20..40].iter().any(|&v| v != 0.0));

        let bad = NoiseRecipe::new("b", 100, 1.0, 0).with(ComponentKind::Sinusoid {
            frequency: 0.1,
            amplitude: 1.0,
            phase: 0.0,
            burst: Some([90.0, 140.0]),
        });
        assert!(compose(&bad).is_err());
    }

    #[test]
    fn recipe_rts_needs_positive_rates() {
        let r = NoiseRecipe::new("r", 10, 1.0, 0).with(ComponentKind::Rts {
            rate_up: 0.0,
            rate_down: 0.1,
            amplitude: 1.0,
        });
        assert!(compose(&r).is_err());
    }

    #[test]
    fn pairset_shares_one_instance() {
        let set = gen_pairset(&presets::rts_pair(512, 1.0, 20.0, 4)).unwrap();
        let own = SetRecipe {
            shared: vec![],
            ..presets::rts_pair(512, 1.0, 20.0, 4)
        };
        let bg = gen_pairset(&own).unwrap();
        let d0: Vec<f64> = set.entries()[0]
            .values()
            .iter()
            .zip(bg.entries()[0].values())
            .map(|(a, b)| a - b)
            .collect();
        let d1: Vec<f64> = set.entries()[1]
            .values()
            .iter()
            .zip(bg.entries()[1].values())
            .map(|(a, b)| a - b)
            .collect();
        for (a, b) in d0.iter().zip(&d1) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(d0.iter().any(|&v| v.abs() > 0.5));
    }

    #[test]
    fn pairset_rejects_bad_member() {
        let mut r = presets::sine_pair(64, 1.0, 8.0, 0);
        r.shared[0].members.push(7);
        assert!(gen_pairset(&r).is_err());
    }
}
