//! Parameter model for the linearized three-mode system.
//!
//! All rates and frequencies are angular, in rad/s. The auxiliary cavity rate
//! `kappa` is signed: positive for a gain cavity, negative for a lossy one.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant [J/K].
pub const K_B: f64 = 1.380_649e-23;

/// Which of the three compared configurations a parameter set describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Case {
    /// Gain cavity coupled to the optomechanical cavity (A-P).
    ActivePassive,
    /// Standard single-cavity optomechanics (S-C).
    SingleCavity,
    /// Lossy auxiliary cavity coupled to the optomechanical cavity (P-P).
    PassivePassive,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::ActivePassive, Case::SingleCavity, Case::PassivePassive];

    pub fn label(self) -> &'static str {
        match self {
            Case::ActivePassive => "A-P",
            Case::SingleCavity => "S-C",
            Case::PassivePassive => "P-P",
        }
    }

    /// Short lower-case tag used in dataset column names.
    pub fn tag(self) -> &'static str {
        match self {
            Case::ActivePassive => "ap",
            Case::SingleCavity => "sc",
            Case::PassivePassive => "pp",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl TryFrom<String> for Case {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Case> for String {
    fn from(c: Case) -> String {
        c.label().to_string()
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "ap" | "activepassive" => Ok(Case::ActivePassive),
            "sc" | "singlecavity" => Ok(Case::SingleCavity),
            "pp" | "passivepassive" => Ok(Case::PassivePassive),
            other => Err(Error::Config(format!("unknown case `{other}`"))),
        }
    }
}

/// Rates and frequencies of the linearized model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega_m: f64,
    pub gamma_m: f64,
    /// Passive (driven) cavity decay rate.
    pub gamma: f64,
    /// Auxiliary cavity rate; positive = gain, negative = loss.
    pub kappa: f64,
    /// Inter-cavity coupling.
    pub j: f64,
    /// Linearized optomechanical coupling `g * alpha2`.
    pub g_lin: Complex64,
    /// Common detuning of both cavities from the pump.
    pub delta_bar: f64,
    pub case: Case,
}

impl SystemParams {
    /// Mechanical frequency used throughout the reference parameter set (20 MHz).
    pub const REFERENCE_OMEGA_M: f64 = 2.0 * PI * 20.0e6;

    /// Reference parameter set: `omega_m/2pi = 20 MHz`, `gamma_m/omega_m = 1e-5`,
    /// `gamma/omega_m = 1/(5 pi)`, `J/gamma = 0.49`, `delta = -omega_m`, with the
    /// given `G/gamma`. The auxiliary rate follows the case (`+gamma`, unused, `-gamma`).
    pub fn reference(case: Case, g_over_gamma: f64) -> Self {
        let omega_m = Self::REFERENCE_OMEGA_M;
        let gamma = omega_m / (5.0 * PI);
        let (kappa, j) = match case {
            Case::ActivePassive => (gamma, 0.49 * gamma),
            Case::SingleCavity => (-gamma, 0.0),
            Case::PassivePassive => (-gamma, 0.49 * gamma),
        };
        SystemParams {
            omega_m,
            gamma_m: 1.0e-5 * omega_m,
            gamma,
            kappa,
            j,
            g_lin: Complex64::new(g_over_gamma * gamma, 0.0),
            delta_bar: -omega_m,
            case,
        }
    }

    pub fn g_abs2(&self) -> f64 {
        self.g_lin.norm_sqr()
    }

    pub fn with_j(mut self, j: f64) -> Self {
        self.j = j;
        self
    }

    pub fn with_delta(mut self, delta_bar: f64) -> Self {
        self.delta_bar = delta_bar;
        self
    }

    pub fn with_g(mut self, g_lin: Complex64) -> Self {
        self.g_lin = g_lin;
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    /// Checks the type invariants and normalizes the case-dependent auxiliary
    /// rate. A single-cavity set gets `kappa = -gamma`, so its (decoupled)
    /// auxiliary block is a damped vacuum mode.
    pub fn validate(self) -> Result<Self> {
        validate_params(self)
    }
}

/// Returns `raw` iff every invariant holds; see [`SystemParams::validate`].
pub fn validate_params(raw: SystemParams) -> Result<SystemParams> {
    let positive = |field: &'static str, v: f64| -> Result<()> {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(Error::invalid(field, format!("must be > 0, got {v}")))
        }
    };
    positive("omega_m", raw.omega_m)?;
    positive("gamma_m", raw.gamma_m)?;
    positive("gamma", raw.gamma)?;
    if !(raw.j.is_finite() && raw.j >= 0.0) {
        return Err(Error::invalid("J", format!("must be >= 0, got {}", raw.j)));
    }
    if !(raw.g_lin.re.is_finite() && raw.g_lin.im.is_finite()) {
        return Err(Error::invalid("G_lin", "must be finite"));
    }
    if !raw.delta_bar.is_finite() {
        return Err(Error::invalid("delta_bar", "must be finite"));
    }
    if !raw.kappa.is_finite() {
        return Err(Error::invalid("kappa", "must be finite"));
    }

    let mut p = raw;
    match p.case {
        Case::SingleCavity => {
            if p.j != 0.0 {
                return Err(Error::invalid(
                    "J",
                    format!("J must be 0 for the single-cavity case, got {}", p.j),
                ));
            }
            p.kappa = -p.gamma;
        }
        Case::PassivePassive => {
            if (p.kappa + p.gamma).abs() > 1e-12 * p.gamma {
                return Err(Error::invalid(
                    "kappa",
                    format!("kappa must equal -gamma = {} for P-P, got {}", -p.gamma, p.kappa),
                ));
            }
            p.kappa = -p.gamma;
        }
        Case::ActivePassive => {
            if p.kappa <= 0.0 {
                return Err(Error::invalid(
                    "kappa",
                    format!("kappa must be > 0 (gain) for A-P, got {}", p.kappa),
                ));
            }
        }
    }
    Ok(p)
}

/// Pump and bare-cavity description for the steady-state solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    /// Single-photon optomechanical coupling.
    pub g: f64,
    /// Drive amplitude.
    pub omega_drive: Complex64,
    pub omega_p: f64,
    pub omega_a: f64,
    pub omega_b: f64,
}

impl DriveSpec {
    pub fn validate(self) -> Result<Self> {
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::invalid("g", format!("must be >= 0, got {}", self.g)));
        }
        for (field, v) in [
            ("omega_p", self.omega_p),
            ("omega_a", self.omega_a),
            ("omega_b", self.omega_b),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("must be > 0, got {v}")));
            }
        }
        Ok(self)
    }

    /// Detuning of the auxiliary cavity, `omega_p - omega_a`.
    pub fn delta_a(&self) -> f64 {
        self.omega_p - self.omega_a
    }

    /// Bare detuning of the driven cavity, `omega_p - omega_b`.
    pub fn delta_b(&self) -> f64 {
        self.omega_p - self.omega_b
    }
}

/// Mechanical bath temperature together with its mean occupancy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalEnv {
    pub temperature: f64,
    pub n_th: f64,
}

impl ThermalEnv {
    pub fn from_temperature(temperature: f64, omega_m: f64) -> Self {
        ThermalEnv {
            temperature,
            n_th: occupancy_from_temperature(temperature, omega_m),
        }
    }

    pub fn from_occupancy(n_th: f64, omega_m: f64) -> Self {
        ThermalEnv {
            temperature: temperature_from_occupancy(n_th, omega_m),
            n_th,
        }
    }
}

/// Bose-Einstein occupancy `1/(exp(hbar w / kB T) - 1)`.
pub fn occupancy_from_temperature(temperature: f64, omega_m: f64) -> f64 {
    debug_assert!(temperature >= 0.0 && omega_m > 0.0);
    if temperature == 0.0 {
        return 0.0;
    }
    let x = HBAR * omega_m / (K_B * temperature);
    1.0 / x.exp_m1()
}

/// Exact inverse of [`occupancy_from_temperature`].
pub fn temperature_from_occupancy(n_th: f64, omega_m: f64) -> f64 {
    debug_assert!(n_th > 0.0 && omega_m > 0.0);
    HBAR * omega_m / (K_B * (1.0 / n_th).ln_1p())
}

/// Converts an ordinary frequency in Hz to angular frequency.
pub fn hz_to_rad(f: f64) -> f64 {
    2.0 * PI * f
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_active_passive_accepted() {
        let p = SystemParams::reference(Case::ActivePassive, 0.05);
        assert_relative_eq!(p.gamma, 8.0e6, max_relative = 1e-12);
        let v = validate_params(p).unwrap();
        assert_eq!(v.kappa, p.kappa);
        assert_relative_eq!(v.j / v.gamma, 0.49, max_relative = 1e-12);
    }

    #[test]
    fn single_cavity_rejects_coupling() {
        let p = SystemParams::reference(Case::SingleCavity, 0.05).with_j(0.8e6);
        match validate_params(p) {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "J"),
            other => panic!("expected InvalidParameter(J), got {other:?}"),
        }
    }

    #[test]
    fn passive_passive_rejects_gain() {
        let p = SystemParams::reference(Case::PassivePassive, 0.05);
        let p = p.with_kappa(p.gamma);
        match validate_params(p) {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "kappa"),
            other => panic!("expected InvalidParameter(kappa), got {other:?}"),
        }
    }

    #[test]
    fn active_passive_requires_gain() {
        let p = SystemParams::reference(Case::ActivePassive, 0.05).with_kappa(-1.0);
        assert!(validate_params(p).is_err());
    }

    #[test]
    fn negative_rates_rejected() {
        let mut p = SystemParams::reference(Case::SingleCavity, 0.05);
        p.gamma_m = -1.0;
        assert!(matches!(
            validate_params(p),
            Err(Error::InvalidParameter { field: "gamma_m", .. })
        ));
    }

    #[test]
    fn single_cavity_kappa_normalized() {
        let p = SystemParams::reference(Case::SingleCavity, 0.05).with_kappa(3.0);
        assert_eq!(validate_params(p).unwrap().kappa, -p.gamma);
    }

    #[test]
    fn room_temperature_occupancy() {
        let n = occupancy_from_temperature(293.0, hz_to_rad(20e6));
        assert!((n / 305_260.0 - 1.0).abs() < 5e-3, "n_th = {n}");
    }

    #[test]
    fn occupancy_vanishes_at_zero_temperature() {
        let w = hz_to_rad(20e6);
        assert_eq!(occupancy_from_temperature(0.0, w), 0.0);
        assert!(occupancy_from_temperature(1e-5, w) < 1e-30);
    }

    #[test]
    fn temperatures_for_low_occupancies() {
        let w = hz_to_rad(20e6);
        // T = (hbar w / kB) / ln(1 + 1/n)
        let scale = HBAR * w / K_B;
        let t65 = temperature_from_occupancy(65.0, w);
        let t32 = temperature_from_occupancy(32.0, w);
        assert_relative_eq!(t65, scale / (66.0f64 / 65.0).ln(), max_relative = 1e-12);
        assert!((t65 * 1e3 - 62.9).abs() < 0.05, "{t65}");
        assert!((t32 * 1e3 / 31.2 - 1.0).abs() < 0.01, "{t32}");
    }

    #[test]
    fn rayleigh_jeans_limit() {
        let w = hz_to_rad(20e6);
        let n = 1e9;
        let t = temperature_from_occupancy(n, w);
        assert_relative_eq!(t, n * HBAR * w / K_B, max_relative = 1e-9);
    }

    #[test]
    fn case_parsing() {
        assert_eq!("A-P".parse::<Case>().unwrap(), Case::ActivePassive);
        assert_eq!("single_cavity".parse::<Case>().unwrap(), Case::SingleCavity);
        assert_eq!("pp".parse::<Case>().unwrap(), Case::PassivePassive);
        assert!("xx".parse::<Case>().is_err());
    }
}
