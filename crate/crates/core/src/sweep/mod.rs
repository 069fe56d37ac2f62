//! Parameter sweeps, figure datasets and the discrepancy ledger.

mod dataset;
pub mod figures;
pub mod ledger;
mod observable;

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{field_of, merge, resolve, Config, FIELDS};
use crate::cooling::linspace;
use crate::error::{Error, Result};
use crate::params::Case;

pub use dataset::{DatasetMetadata, SeriesMetadata, SweepDataset};
pub use figures::{run_figure, FigureId};
pub use ledger::{discrepancy_report, Ledger, LedgerEntry};
pub use observable::{evaluate, Flag, Observable, PointContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    /// A rate-like config field, `n_th`, `temperature` or `omega` (the
    /// evaluation frequency of spectra and self-energies).
    pub name: String,
    /// `rad`, `hz`, a ratio reference such as `gamma`, or `1` / `k` for the
    /// thermal axes.
    pub unit: String,
}

impl Axis {
    pub fn new(name: &str, unit: &str) -> Self {
        Axis {
            name: name.to_string(),
            unit: unit.to_string(),
        }
    }

    /// CSV header of the axis column.
    pub fn label(&self) -> String {
        format!("{}[{}]", self.name, self.unit)
    }

    fn check(&self) -> Result<()> {
        let ok = match self.name.as_str() {
            "omega" => ["rad", "hz", "omega_m", "gamma"].contains(&self.unit.as_str()),
            "n_th" => self.unit == "1",
            "temperature" => self.unit == "k",
            f => match FIELDS.iter().find(|(n, _)| *n == f) {
                Some((_, reference)) => {
                    self.unit == "rad" || self.unit == "hz" || *reference == Some(self.unit.as_str())
                }
                None => false,
            },
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "unsupported axis `{}` with unit `{}`",
                self.name, self.unit
            )))
        }
    }

    /// Config key set by this axis, or `None` for the `omega` axis.
    fn config_key(&self) -> Option<String> {
        match self.name.as_str() {
            "omega" => None,
            "n_th" => Some("n_th".into()),
            "temperature" => Some("temperature_k".into()),
            f => Some(match self.unit.as_str() {
                "rad" | "hz" => format!("{f}_{}", self.unit),
                r => format!("{f}_over_{r}"),
            }),
        }
    }
}

/// Extra resolution around known singular points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub centres: Vec<f64>,
    pub half_width: f64,
    #[serde(default = "default_factor")]
    pub factor: usize,
}

fn default_factor() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<Refinement>,
}

impl Grid {
    pub fn linear(start: f64, stop: f64, points: usize) -> Self {
        Grid {
            start,
            stop,
            points,
            scale: Scale::Linear,
            refine: None,
        }
    }

    pub fn log(start: f64, stop: f64, points: usize) -> Self {
        Grid {
            scale: Scale::Log,
            ..Grid::linear(start, stop, points)
        }
    }

    pub fn refined(mut self, centres: &[f64], half_width: f64) -> Self {
        self.refine = Some(Refinement {
            centres: centres.to_vec(),
            half_width,
            factor: default_factor(),
        });
        self
    }

    /// Axis values in ascending order.
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::Config(format!("grid needs >= 2 points, got {}", self.points)));
        }
        if self.start >= self.stop || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Config(format!(
                "grid needs start < stop, got [{}, {}]",
                self.start, self.stop
            )));
        }
        let mut v = match self.scale {
            Scale::Linear => linspace(self.start, self.stop, self.points),
            Scale::Log => {
                if self.start <= 0.0 {
                    return Err(Error::Config("log grid needs start > 0".into()));
                }
                linspace(self.start.log10(), self.stop.log10(), self.points)
                    .into_iter()
                    .map(|e| 10f64.powf(e))
                    .collect()
            }
        };
        if let Some(r) = &self.refine {
            if self.scale == Scale::Log {
                return Err(Error::Config("refinement is only supported on linear grids".into()));
            }
            let step = (self.stop - self.start) / (self.points - 1) as f64;
            let fine = step / r.factor.max(1) as f64;
            for &c in &r.centres {
                let lo = (c - r.half_width).max(self.start);
                let hi = (c + r.half_width).min(self.stop);
                let n = ((hi - lo) / fine).round() as usize;
                v.extend((0..=n).map(|k| c + (k as f64 - ((c - lo) / fine).round()) * fine));
                v.push(c);
            }
            v.retain(|x| *x >= self.start && *x <= self.stop);
            v.sort_by(f64::total_cmp);
            let tol = 1e-9 * fine;
            v.dedup_by(|a, b| (*a - *b).abs() <= tol);
        }
        Ok(v)
    }
}

/// User-facing sweep description, loaded from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(default = "default_id")]
    pub id: String,
    pub axis: Axis,
    pub grid: Grid,
    pub observables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<Case>,
    #[serde(default)]
    pub overrides: Map<String, Value>,
}

fn default_id() -> String {
    "sweep".into()
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        self.axis.check()?;
        self.grid.values()?;
        if self.observables.is_empty() {
            return Err(Error::Config("sweep needs at least one observable".into()));
        }
        for o in &self.observables {
            Observable::from_str(o)?;
        }
        if self.overrides.contains_key("case") {
            return Err(Error::Config("set `case` at the top level, not in overrides".into()));
        }
        if let Some(key) = self.axis.config_key() {
            let clash = self.overrides.keys().any(|k| {
                k == &key || (field_of(k).is_some() && field_of(k) == field_of(&key))
            });
            if clash {
                return Err(Error::Config(format!("axis `{}` is also overridden", self.axis.name)));
            }
        }
        Ok(())
    }
}

/// One output column: an observable evaluated under its own overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesDef {
    pub column: String,
    pub observable: Observable,
    pub overrides: Map<String, Value>,
}

/// A resolved sweep: axis, ordered values and output columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub id: String,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub series: Vec<SeriesDef>,
    pub notes: Vec<String>,
}

/// Evaluates every series at every axis value. Rows are computed in parallel
/// and collected in axis order, so the output does not depend on scheduling.
pub fn execute(plan: &Plan, config: &Config) -> Result<SweepDataset> {
    plan.axis.check()?;
    let key = plan.axis.config_key();
    let mut bases = Vec::with_capacity(plan.series.len());
    for s in &plan.series {
        let map = merge(&config.raw, &s.overrides);
        let resolved = resolve(&map)?;
        bases.push((map, resolved));
    }

    let cells: Vec<Vec<(Option<f64>, Vec<Flag>)>> = plan
        .values
        .par_iter()
        .map(|&x| {
            plan.series
                .iter()
                .zip(&bases)
                .map(|(s, (map, base))| {
                    let point = match &key {
                        Some(k) => {
                            let mut o = Map::new();
                            o.insert(k.clone(), Value::from(x));
                            resolve(&merge(map, &o))
                        }
                        None => Ok(base.clone()),
                    };
                    match point {
                        Ok(cfg) => {
                            let omega = match key {
                                Some(_) => cfg.params.omega_m,
                                None => omega_from_axis(&plan.axis, x, &cfg),
                            };
                            let ctx = PointContext {
                                params: cfg.params,
                                n_th: cfg.thermal.n_th,
                                omega,
                                backaction: cfg.backaction,
                            };
                            evaluate(s.observable, &ctx)
                        }
                        Err(_) => (None, vec![Flag::Invalid]),
                    }
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(cells.len());
    let mut flags = Vec::with_capacity(cells.len());
    for row in cells {
        let mut values = Vec::with_capacity(row.len());
        let mut tokens = Vec::new();
        for ((v, fl), s) in row.into_iter().zip(&plan.series) {
            values.push(v.filter(|x| x.is_finite()));
            if v.is_some_and(|x| !x.is_finite()) && !fl.contains(&Flag::Singular) {
                tokens.push(format!("{}:{}", s.column, Flag::Singular.name()));
            }
            tokens.extend(fl.iter().map(|f| format!("{}:{}", s.column, f.name())));
        }
        rows.push(values);
        flags.push(tokens);
    }

    let series = plan
        .series
        .iter()
        .zip(&bases)
        .map(|(s, (_, cfg))| SeriesMetadata {
            column: s.column.clone(),
            observable: s.observable.name().to_string(),
            params: cfg.params,
            n_th: cfg.thermal.n_th,
            temperature_k: cfg.thermal.temperature,
            backaction: cfg.backaction,
            overrides: s.overrides.clone(),
        })
        .collect();

    Ok(SweepDataset {
        id: plan.id.clone(),
        axis: plan.axis.clone(),
        axis_values: plan.values.clone(),
        columns: plan.series.iter().map(|s| s.column.clone()).collect(),
        rows,
        flags,
        metadata: DatasetMetadata::new(series, plan.notes.clone()),
    })
}

fn omega_from_axis(axis: &Axis, x: f64, cfg: &Config) -> f64 {
    match axis.unit.as_str() {
        "hz" => crate::params::hz_to_rad(x),
        "omega_m" => x * cfg.params.omega_m,
        "gamma" => x * cfg.params.gamma,
        _ => x,
    }
}

/// Runs a user sweep: one column per observable, all under the same
/// parameters.
pub fn run_sweep(spec: &SweepSpec, config: &Config) -> Result<SweepDataset> {
    spec.check()?;
    let mut overrides = spec.overrides.clone();
    if let Some(c) = spec.case {
        overrides.insert("case".into(), Value::from(c.label()));
    }
    let series = spec
        .observables
        .iter()
        .map(|o| {
            Ok(SeriesDef {
                column: o.clone(),
                observable: Observable::from_str(o)?,
                overrides: overrides.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let plan = Plan {
        id: spec.id.clone(),
        axis: spec.axis.clone(),
        values: spec.grid.values()?,
        series,
        notes: Vec::new(),
    };
    execute(&plan, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::linear(0.0, 1.0, 1).values().is_err());
        assert!(Grid::linear(1.0, 0.0, 5).values().is_err());
        assert!(Grid::log(0.0, 1.0, 5).values().is_err());
        let v = Grid::log(10.0, 1e6, 6).values().unwrap();
        assert_eq!(v.len(), 6);
        assert!((v[1] - 100.0).abs() < 1e-9);
    }

    #[test]
    fn refinement_contains_centre_and_fine_steps() {
        let g = Grid::linear(0.0, 1.0, 101).refined(&[0.5], 0.02);
        let v = g.values().unwrap();
        assert!(v.contains(&0.5));
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        let near: Vec<f64> = v.iter().copied().filter(|x| (x - 0.5).abs() <= 0.02).collect();
        assert!(near.len() >= 39, "{}", near.len());
        let max_gap = near.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        assert!(max_gap <= 0.0011, "{max_gap}");
    }

    #[test]
    fn spec_rejects_unknown_observable() {
        let text = r#"{"axis": {"name": "j", "unit": "gamma"},
            "grid": {"start": 0.1, "stop": 0.4, "points": 2},
            "observables": ["a_minus", "nonsense"]}"#;
        assert!(matches!(SweepSpec::from_json(text), Err(Error::Config(_))));
    }

    #[test]
    fn spec_rejects_bad_axis() {
        let text = r#"{"axis": {"name": "j", "unit": "omega_m"},
            "grid": {"start": 0.1, "stop": 0.4, "points": 2},
            "observables": ["a_minus"]}"#;
        assert!(matches!(SweepSpec::from_json(text), Err(Error::Config(_))));
    }

    #[test]
    fn two_point_sweep_has_two_rows() {
        let text = r#"{"axis": {"name": "j", "unit": "gamma"},
            "grid": {"start": 0.1, "stop": 0.4, "points": 2},
            "observables": ["a_minus"]}"#;
        let spec = SweepSpec::from_json(text).unwrap();
        let d = run_sweep(&spec, &Config::default()).unwrap();
        assert_eq!(d.rows.len(), 2);
        assert_eq!(d.csv_header().split(',').count(), 3);
    }

    #[test]
    fn transition_row_is_flagged_not_nan() {
        let text = r#"{"axis": {"name": "j", "unit": "gamma"},
            "grid": {"start": 0.4, "stop": 0.6, "points": 3},
            "observables": ["a_minus"]}"#;
        let spec = SweepSpec::from_json(text).unwrap();
        let d = run_sweep(&spec, &Config::default()).unwrap();
        assert_eq!(d.rows[1][0], None);
        assert!(d.flags[1].iter().any(|f| f.ends_with(":singular")), "{:?}", d.flags[1]);
        assert!(d.rows[0][0].is_some() && d.rows[2][0].is_some());
        assert!(!d.to_csv().contains("NaN"));
    }
}
