//! Built-in figure datasets on the reference parameter set.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{execute, Axis, Grid, Observable, Plan, SeriesDef, SweepDataset};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::params::Case;

/// Points per axis for the dense figure grids.
pub const FIGURE_POINTS: usize = 2001;
/// Points on the logarithmic thermal-occupancy axis.
pub const LOG_POINTS: usize = 201;
/// Coupling strengths shown side by side.
pub const G_VALUES: [f64; 2] = [0.015, 0.05];
/// Half-width (in units of γ) of the refined window around transitions.
pub const REFINE_HALF_WIDTH: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig3,
    Fig4a,
    Fig4b,
    Fig5,
    Fig6a,
    Fig6b,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3,
        FigureId::Fig4a,
        FigureId::Fig4b,
        FigureId::Fig5,
        FigureId::Fig6a,
        FigureId::Fig6b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6a => "fig6a",
            FigureId::Fig6b => "fig6b",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure `{s}`")))
    }
}

fn obj(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// Overrides that put a config into `case`, keeping its coupling and gain
/// where they make sense for that case.
fn case_overrides(config: &Config, case: Case) -> Map<String, Value> {
    let p = &config.params;
    let j = if p.j > 0.0 { p.j / p.gamma } else { 0.49 };
    match case {
        Case::ActivePassive => {
            let kappa = if p.kappa > 0.0 { p.kappa / p.gamma } else { 1.0 };
            obj(&[
                ("case", "A-P".into()),
                ("kappa_over_gamma", kappa.into()),
                ("j_over_gamma", j.into()),
            ])
        }
        Case::SingleCavity => obj(&[
            ("case", "S-C".into()),
            ("kappa_over_gamma", (-1.0).into()),
            ("j_over_gamma", 0.0.into()),
        ]),
        Case::PassivePassive => obj(&[
            ("case", "P-P".into()),
            ("kappa_over_gamma", (-1.0).into()),
            ("j_over_gamma", j.into()),
        ]),
    }
}

fn series(
    config: &Config,
    observable: Observable,
    case: Case,
    g: f64,
    extra: &[(&str, Value)],
) -> SeriesDef {
    let mut overrides = case_overrides(config, case);
    overrides.insert("g_lin_over_gamma".into(), g.into());
    for (k, v) in extra {
        overrides.insert(k.to_string(), v.clone());
    }
    SeriesDef {
        column: format!("{}_{}_g{}", observable.name(), case.tag(), g),
        observable,
        overrides,
    }
}

fn plan(id: FigureId, config: &Config) -> Result<Plan> {
    let balanced = [("kappa_over_gamma", Value::from(1.0))];
    let mut notes = vec![
        "spectra and rates are in rad/s with x_zpf^2/hbar^2 absorbed (A_-/+ = S(+/-omega_m))".to_string(),
    ];
    let (axis, grid, series) = match id {
        FigureId::Fig2a => (
            Axis::new("omega", "omega_m"),
            Grid::linear(-2.0, 2.0, FIGURE_POINTS),
            G_VALUES
                .iter()
                .map(|&g| series(config, Observable::STilde, Case::ActivePassive, g, &balanced))
                .collect(),
        ),
        FigureId::Fig2b => (
            Axis::new("omega", "omega_m"),
            Grid::linear(-2.0, 2.0, FIGURE_POINTS),
            [Case::SingleCavity, Case::PassivePassive]
                .iter()
                .flat_map(|&c| G_VALUES.iter().map(move |&g| (c, g)))
                .map(|(c, g)| series(config, Observable::STilde, c, g, &[]))
                .collect(),
        ),
        FigureId::Fig3 => (
            Axis::new("j", "gamma"),
            Grid::linear(0.0, 1.0, FIGURE_POINTS).refined(&[0.5], REFINE_HALF_WIDTH),
            G_VALUES
                .iter()
                .map(|&g| series(config, Observable::AMinus, Case::ActivePassive, g, &balanced))
                .collect(),
        ),
        FigureId::Fig4a => {
            notes.push("supermode frequencies relative to the bare cavity frequency".into());
            (
                Axis::new("j", "gamma"),
                Grid::linear(0.0, 1.0, FIGURE_POINTS).refined(&[0.5], REFINE_HALF_WIDTH),
                supermode_series(config, &balanced),
            )
        }
        FigureId::Fig4b => {
            notes.push("supermode frequencies relative to the bare cavity frequency".into());
            notes.push("the axis starts just above zero because the gain case needs kappa > 0".into());
            (
                Axis::new("kappa", "gamma"),
                Grid::linear(1e-3, 2.0, FIGURE_POINTS).refined(&[1.0], REFINE_HALF_WIDTH),
                supermode_series(config, &[("j_over_gamma", Value::from(0.5))]),
            )
        }
        FigureId::Fig5 => (
            Axis::new("delta_bar", "omega_m"),
            Grid::linear(-2.0, 2.0, FIGURE_POINTS),
            Case::ALL
                .iter()
                .flat_map(|&c| {
                    [Observable::DeltaOmegaM, Observable::GammaOpt]
                        .into_iter()
                        .flat_map(move |o| G_VALUES.iter().map(move |&g| (c, o, g)))
                })
                .map(|(c, o, g)| series(config, o, c, g, &[]))
                .collect(),
        ),
        FigureId::Fig6a => (
            Axis::new("delta_bar", "omega_m"),
            Grid::linear(-2.0, 0.0, FIGURE_POINTS),
            Case::ALL
                .iter()
                .flat_map(|&c| G_VALUES.iter().map(move |&g| (c, g)))
                .map(|(c, g)| series(config, Observable::NF, c, g, &[("n_th", Value::from(50.0))]))
                .collect(),
        ),
        FigureId::Fig6b => {
            notes.push("n_f at delta_bar = -omega_m and the minimum over delta_bar in [-2, 0] omega_m".into());
            let at_red = [("delta_bar_over_omega_m", Value::from(-1.0))];
            let mut s: Vec<SeriesDef> = Case::ALL
                .iter()
                .map(|&c| series(config, Observable::NF, c, 0.05, &at_red))
                .collect();
            s.extend(
                Case::ALL
                    .iter()
                    .map(|&c| series(config, Observable::NFMin, c, 0.05, &[])),
            );
            (Axis::new("n_th", "1"), Grid::log(1.0, 1e6, LOG_POINTS), s)
        }
    };
    Ok(Plan {
        id: id.name().to_string(),
        axis,
        values: grid.values()?,
        series,
        notes,
    })
}

fn supermode_series(config: &Config, extra: &[(&str, Value)]) -> Vec<SeriesDef> {
    [
        Observable::ReOmegaPlus,
        Observable::ReOmegaMinus,
        Observable::ImOmegaPlus,
        Observable::ImOmegaMinus,
    ]
    .into_iter()
    .map(|o| {
        let mut s = series(config, o, Case::ActivePassive, 0.05, extra);
        s.column = o.name().to_string();
        s
    })
    .collect()
}

/// Produces the dataset for one figure.
pub fn run_figure(id: FigureId, config: &Config) -> Result<SweepDataset> {
    execute(&plan(id, config)?, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_parse() {
        for f in FigureId::ALL {
            assert_eq!(f.name().parse::<FigureId>().unwrap(), f);
        }
        assert!("fig7".parse::<FigureId>().is_err());
    }

    #[test]
    fn fig3_peaks_at_transition() {
        let d = run_figure(FigureId::Fig3, &Config::default()).unwrap();
        let col = d.column("a_minus_ap_g0.05").unwrap();
        let (i, _) = col
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!((d.axis_values[i] - 0.5).abs() <= 1e-3);
        let k = d.axis_values.iter().position(|&x| x == 0.5).unwrap();
        assert_eq!(col[k], None);
        assert!(!d.flags[k].is_empty());
    }
}
