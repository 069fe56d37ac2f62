//! JSON configuration grammar.
//!
//! A config is a flat JSON object. Rates and frequencies take a unit suffix:
//!
//! | key                      | meaning                                    |
//! |--------------------------|--------------------------------------------|
//! | `<f>_hz`                 | ordinary frequency, multiplied by 2π       |
//! | `<f>_rad`                | angular frequency in rad/s                 |
//! | `<f>_over_<ref>`         | ratio to an already-resolved field         |
//!
//! where `<f>` is one of `omega_m`, `gamma_m`, `gamma`, `kappa`, `j`, `g_lin`,
//! `delta_bar`, and `<ref>` is fixed per field (see [`FIELDS`]). Other keys:
//! `case` (`"A-P"`, `"S-C"`, `"P-P"`), `g_lin_phase` (rad), `temperature_k` or
//! `n_th`, `backaction` (bool) and an optional `drive` object which replaces
//! `g_lin`/`delta_bar` by a steady-state solve. Anything missing falls back to
//! the reference parameter set. Unknown keys are rejected.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::linearize::{linearize, CavityRates, LinearizationResult};
use crate::params::{hz_to_rad, Case, DriveSpec, SystemParams, ThermalEnv};

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "PTCOOL_CONFIG";

pub const DEFAULT_N_TH: f64 = 50.0;
pub const DEFAULT_G_OVER_GAMMA: f64 = 0.05;

/// Rate-like fields and the field each one's `_over_` ratio refers to.
pub const FIELDS: [(&str, Option<&str>); 7] = [
    ("omega_m", None),
    ("gamma_m", Some("omega_m")),
    ("gamma", Some("omega_m")),
    ("kappa", Some("gamma")),
    ("j", Some("gamma")),
    ("g_lin", Some("gamma")),
    ("delta_bar", Some("omega_m")),
];

const OTHER_KEYS: [&str; 6] = ["case", "g_lin_phase", "temperature_k", "n_th", "backaction", "drive"];

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub params: SystemParams,
    pub thermal: ThermalEnv,
    pub backaction: bool,
    /// Present when the config carried a `drive` block.
    pub linearization: Option<LinearizationResult>,
    /// Keys as given, kept so sweeps can layer overrides on top.
    #[serde(skip)]
    pub raw: Map<String, Value>,
}

impl Default for Config {
    fn default() -> Self {
        resolve(&Map::new()).expect("reference parameters are valid")
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Which base field a key sets, if it is a rate-like key.
pub fn field_of(key: &str) -> Option<&'static str> {
    // Longest names first so `gamma_m_hz` does not resolve to `gamma`.
    let mut names: Vec<&'static str> = FIELDS.iter().map(|(f, _)| *f).collect();
    names.sort_by_key(|f| std::cmp::Reverse(f.len()));
    for f in names {
        if let Some(rest) = key.strip_prefix(f) {
            let reference = FIELDS.iter().find(|(n, _)| *n == f).and_then(|(_, r)| *r);
            let ok = rest == "_hz"
                || rest == "_rad"
                || reference.is_some_and(|r| rest == format!("_over_{r}"));
            if ok {
                return Some(f);
            }
        }
    }
    None
}

fn number(key: &str, v: &Value) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| config_err(format!("`{key}` must be a finite number, got {v}")))
}

/// Rate-like value as specified: absolute (rad/s) or a ratio to a reference field.
#[derive(Debug, Clone, Copy)]
enum Spec {
    Absolute(f64),
    Ratio(f64),
}

fn field_spec(map: &Map<String, Value>, field: &str) -> Result<Option<Spec>> {
    let mut found: Option<(String, Spec)> = None;
    for (key, v) in map {
        if field_of(key) != Some(field) {
            continue;
        }
        let x = number(key, v)?;
        let spec = if key.ends_with("_hz") {
            Spec::Absolute(hz_to_rad(x))
        } else if key.ends_with("_rad") {
            Spec::Absolute(x)
        } else {
            Spec::Ratio(x)
        };
        if let Some((prev, _)) = &found {
            return Err(config_err(format!("`{field}` given twice (`{prev}` and `{key}`)")));
        }
        found = Some((key.clone(), spec));
    }
    Ok(found.map(|(_, s)| s))
}

fn resolve_field(map: &Map<String, Value>, field: &str, reference: f64, default_ratio: f64) -> Result<f64> {
    Ok(match field_spec(map, field)? {
        Some(Spec::Absolute(x)) => x,
        Some(Spec::Ratio(r)) => r * reference,
        None => default_ratio * reference,
    })
}

fn check_keys(map: &Map<String, Value>) -> Result<()> {
    for key in map.keys() {
        if field_of(key).is_none() && !OTHER_KEYS.contains(&key.as_str()) {
            return Err(config_err(format!("unknown key `{key}`")));
        }
    }
    Ok(())
}

fn parse_drive(v: &Value) -> Result<DriveSpec> {
    const KEYS: [&str; 5] = ["g", "omega_drive", "omega_p", "omega_a", "omega_b"];
    let obj = v
        .as_object()
        .ok_or_else(|| config_err("`drive` must be an object"))?;
    let mut vals = [None; 5];
    let mut phase = 0.0;
    for (key, val) in obj {
        if key == "omega_drive_phase" {
            phase = number(key, val)?;
            continue;
        }
        let (base, scale) = if let Some(b) = key.strip_suffix("_hz") {
            (b, 2.0 * PI)
        } else if let Some(b) = key.strip_suffix("_rad") {
            (b, 1.0)
        } else {
            return Err(config_err(format!("unknown drive key `{key}`")));
        };
        let idx = KEYS
            .iter()
            .position(|k| *k == base)
            .ok_or_else(|| config_err(format!("unknown drive key `{key}`")))?;
        if vals[idx].is_some() {
            return Err(config_err(format!("drive `{base}` given twice")));
        }
        vals[idx] = Some(number(key, val)? * scale);
    }
    let get = |i: usize| vals[i].ok_or_else(|| config_err(format!("drive block needs `{}_hz` or `{}_rad`", KEYS[i], KEYS[i])));
    DriveSpec {
        g: get(0)?,
        omega_drive: Complex64::from_polar(get(1)?, phase),
        omega_p: get(2)?,
        omega_a: get(3)?,
        omega_b: get(4)?,
    }
    .validate()
}

/// Resolves a parsed JSON object into a [`Config`].
pub fn resolve(map: &Map<String, Value>) -> Result<Config> {
    check_keys(map)?;
    let case = match map.get("case") {
        None => Case::ActivePassive,
        Some(Value::String(s)) => s.parse::<Case>()?,
        Some(v) => return Err(config_err(format!("`case` must be a string, got {v}"))),
    };

    let omega_m = match field_spec(map, "omega_m")? {
        Some(Spec::Absolute(x)) => x,
        Some(Spec::Ratio(_)) => unreachable!("omega_m has no ratio form"),
        None => SystemParams::REFERENCE_OMEGA_M,
    };
    let gamma_m = resolve_field(map, "gamma_m", omega_m, 1.0e-5)?;
    let gamma = resolve_field(map, "gamma", omega_m, 1.0 / (5.0 * PI))?;
    let (kappa_default, j_default) = match case {
        Case::ActivePassive => (1.0, 0.49),
        Case::SingleCavity => (-1.0, 0.0),
        Case::PassivePassive => (-1.0, 0.49),
    };
    let kappa = resolve_field(map, "kappa", gamma, kappa_default)?;
    let j = resolve_field(map, "j", gamma, j_default)?;

    let backaction = match map.get("backaction") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(v) => return Err(config_err(format!("`backaction` must be a bool, got {v}"))),
    };

    let thermal = match (map.get("temperature_k"), map.get("n_th")) {
        (Some(_), Some(_)) => return Err(config_err("give either `temperature_k` or `n_th`, not both")),
        (Some(t), None) => {
            let t = number("temperature_k", t)?;
            if t < 0.0 {
                return Err(config_err("`temperature_k` must be >= 0"));
            }
            ThermalEnv::from_temperature(t, omega_m)
        }
        (None, Some(n)) => {
            let n = number("n_th", n)?;
            if n < 0.0 {
                return Err(config_err("`n_th` must be >= 0"));
            }
            ThermalEnv {
                temperature: if n > 0.0 {
                    crate::params::temperature_from_occupancy(n, omega_m)
                } else {
                    0.0
                },
                n_th: n,
            }
        }
        (None, None) => ThermalEnv::from_occupancy(DEFAULT_N_TH, omega_m),
    };

    let (params, linearization) = if let Some(d) = map.get("drive") {
        for f in ["g_lin", "delta_bar"] {
            if field_spec(map, f)?.is_some() {
                return Err(config_err(format!("`{f}` cannot be combined with a `drive` block")));
            }
        }
        if map.contains_key("g_lin_phase") {
            return Err(config_err("`g_lin_phase` cannot be combined with a `drive` block"));
        }
        let drive = parse_drive(d)?;
        let rates = CavityRates {
            kappa,
            gamma,
            gamma_m,
            omega_m,
        };
        let lin = linearize(&drive, &rates, j)?;
        let p = lin.system_params(&drive, &rates, j, case)?;
        (p, Some(lin))
    } else {
        let g_abs = resolve_field(map, "g_lin", gamma, DEFAULT_G_OVER_GAMMA)?;
        let phase = match map.get("g_lin_phase") {
            Some(v) => number("g_lin_phase", v)?,
            None => 0.0,
        };
        let delta_bar = resolve_field(map, "delta_bar", omega_m, -1.0)?;
        let p = SystemParams {
            omega_m,
            gamma_m,
            gamma,
            kappa,
            j,
            g_lin: Complex64::from_polar(g_abs, phase),
            delta_bar,
            case,
        }
        .validate()?;
        (p, None)
    };

    Ok(Config {
        params,
        thermal,
        backaction,
        linearization,
        raw: map.clone(),
    })
}

pub fn parse_config(text: &str) -> Result<Config> {
    let v: Value = serde_json::from_str(text)?;
    match v {
        Value::Object(map) => resolve(&map),
        _ => Err(config_err("config must be a JSON object")),
    }
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Loads `path`, else the file named by [`CONFIG_ENV`], else the defaults.
pub fn load_or_default(path: Option<&Path>) -> Result<Config> {
    if let Some(p) = path {
        return load_config(p);
    }
    match std::env::var_os(CONFIG_ENV) {
        Some(p) if !p.is_empty() => load_config(Path::new(&p)),
        _ => Ok(Config::default()),
    }
}

/// Layers `overrides` over `base`: every field an override touches drops all
/// of the base's keys for that field first, so `j_over_gamma` can replace a
/// base `j_hz`.
pub fn merge(base: &Map<String, Value>, overrides: &Map<String, Value>) -> Map<String, Value> {
    let mut out = base.clone();
    for key in overrides.keys() {
        if let Some(f) = field_of(key) {
            out.retain(|k, _| field_of(k) != Some(f));
        }
        if key == "n_th" || key == "temperature_k" {
            out.remove("n_th");
            out.remove("temperature_k");
        }
    }
    for (k, v) in overrides {
        out.insert(k.clone(), v.clone());
    }
    out
}

impl Config {
    /// Re-resolves with `overrides` layered on top of this config's keys.
    pub fn with_overrides(&self, overrides: &Map<String, Value>) -> Result<Config> {
        resolve(&merge(&self.raw, overrides))
    }
}
