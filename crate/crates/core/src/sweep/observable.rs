use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cooling::{final_phonon_number, linspace, min_occupancy_over_detuning, self_energy};
use crate::error::{Error, Result};
use crate::oracle::lyapunov_steady_occupancy;
use crate::params::SystemParams;
use crate::spectra::{cooling_rates, force_spectrum, simplified_cooling_rate, CoolingRates};
use crate::supermodes::{stability_check, supermode_frequencies, Regime};

/// Registered per-point observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// Force spectrum at the evaluation frequency.
    STilde,
    AMinus,
    APlus,
    /// `-2 Im Σ(ω)`.
    GammaOpt,
    /// `Re Σ(ω)`.
    DeltaOmegaM,
    /// Balanced-gain weak-coupling estimate of `A₋`.
    SimplifiedAMinus,
    NF,
    NFClassical,
    NFQuantum,
    /// Minimum of `n_f` over `Δ̄ ∈ [-2 ω_m, 0]`.
    NFMin,
    /// Detuning at which [`Observable::NFMin`] is reached.
    DeltaStar,
    StabilityMargin,
    /// Supermodes with the bare cavity frequency set to zero.
    ReOmegaPlus,
    ImOmegaPlus,
    ReOmegaMinus,
    ImOmegaMinus,
    /// `<c†c>` from the exact covariance solve.
    LyapunovNC,
}

impl Observable {
    pub const ALL: [Observable; 17] = [
        Observable::STilde,
        Observable::AMinus,
        Observable::APlus,
        Observable::GammaOpt,
        Observable::DeltaOmegaM,
        Observable::SimplifiedAMinus,
        Observable::NF,
        Observable::NFClassical,
        Observable::NFQuantum,
        Observable::NFMin,
        Observable::DeltaStar,
        Observable::StabilityMargin,
        Observable::ReOmegaPlus,
        Observable::ImOmegaPlus,
        Observable::ReOmegaMinus,
        Observable::ImOmegaMinus,
        Observable::LyapunovNC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::STilde => "s_tilde",
            Observable::AMinus => "a_minus",
            Observable::APlus => "a_plus",
            Observable::GammaOpt => "gamma_opt",
            Observable::DeltaOmegaM => "delta_omega_m",
            Observable::SimplifiedAMinus => "simplified_a_minus",
            Observable::NF => "n_f",
            Observable::NFClassical => "n_f_classical",
            Observable::NFQuantum => "n_f_quantum",
            Observable::NFMin => "n_f_min",
            Observable::DeltaStar => "delta_star",
            Observable::StabilityMargin => "stability_margin",
            Observable::ReOmegaPlus => "re_omega_plus",
            Observable::ImOmegaPlus => "im_omega_plus",
            Observable::ReOmegaMinus => "re_omega_minus",
            Observable::ImOmegaMinus => "im_omega_minus",
            Observable::LyapunovNC => "lyapunov_n_c",
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown observable `{s}`")))
    }
}

/// Per-cell event markers written to the `flags` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// A pole of a susceptibility or closed form; the cell is empty.
    Singular,
    /// Parameters at this point fail validation; the cell is empty.
    Invalid,
    /// The linearized drift has an eigenvalue with non-negative real part.
    Unstable,
    /// `A₋ > 0.1 ω_m`, outside the golden-rule regime.
    Perturbative,
    /// `γ_m + Γ_opt <= 0`; the cell is empty.
    NoSteadyState,
    ExceptionalPoint,
    /// `A₋` or `A₊` came out negative (auxiliary-loss convention).
    NegativeRate,
    /// Any other numerical failure; the cell is empty.
    Failed,
}

impl Flag {
    pub fn name(self) -> &'static str {
        match self {
            Flag::Singular => "singular",
            Flag::Invalid => "invalid",
            Flag::Unstable => "unstable",
            Flag::Perturbative => "perturbative",
            Flag::NoSteadyState => "no_steady_state",
            Flag::ExceptionalPoint => "exceptional_point",
            Flag::NegativeRate => "negative_rate",
            Flag::Failed => "failed",
        }
    }

    fn from_error(e: &Error) -> Flag {
        match e {
            e if e.is_singularity() => Flag::Singular,
            Error::NoSteadyState { .. } | Error::AllUnstable => Flag::NoSteadyState,
            Error::UnstableSystem { .. } => Flag::Unstable,
            Error::InvalidParameter { .. } => Flag::Invalid,
            _ => Flag::Failed,
        }
    }
}

/// Everything an observable needs at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointContext {
    pub params: SystemParams,
    pub n_th: f64,
    /// Evaluation frequency for spectra and self-energies.
    pub omega: f64,
    pub backaction: bool,
}

/// Number of detuning samples used by `n_f_min` / `delta_star`.
pub const DETUNING_SAMPLES: usize = 1001;

fn attempt(f: impl FnOnce() -> Result<(f64, Vec<Flag>)>) -> (Option<f64>, Vec<Flag>) {
    match f() {
        Ok((v, flags)) => (Some(v), flags),
        Err(e) => (None, vec![Flag::from_error(&e)]),
    }
}

/// Evaluates one observable. Failures become flags with an empty value.
pub fn evaluate(obs: Observable, ctx: &PointContext) -> (Option<f64>, Vec<Flag>) {
    let p = &ctx.params;
    let rate_flags = |r: &CoolingRates| {
        let mut f = Vec::new();
        if r.is_nonperturbative(p.omega_m) {
            f.push(Flag::Perturbative);
        }
        if r.a_minus < 0.0 || r.a_plus < 0.0 {
            f.push(Flag::NegativeRate);
        }
        f
    };
    match obs {
        Observable::STilde => attempt(|| Ok((force_spectrum(ctx.omega, p, ctx.backaction)?.s_tilde, vec![]))),
        Observable::AMinus | Observable::APlus => attempt(|| {
            let r = cooling_rates(p, ctx.backaction)?;
            let v = if obs == Observable::AMinus { r.a_minus } else { r.a_plus };
            Ok((v, rate_flags(&r)))
        }),
        Observable::GammaOpt | Observable::DeltaOmegaM => attempt(|| {
            let s = self_energy(ctx.omega, p, ctx.backaction)?;
            let v = if obs == Observable::GammaOpt {
                -2.0 * s.value.im
            } else {
                s.value.re
            };
            Ok((v, vec![]))
        }),
        Observable::SimplifiedAMinus => attempt(|| Ok((simplified_cooling_rate(p)?, vec![]))),
        Observable::NF | Observable::NFClassical | Observable::NFQuantum => attempt(|| {
            let o = final_phonon_number(p, ctx.n_th, ctx.backaction)?;
            let v = match obs {
                Observable::NF => o.n_f,
                Observable::NFClassical => o.n_f_classical,
                _ => o.n_f_quantum,
            };
            let mut flags = rate_flags(&o.rates);
            if !o.stability.stable {
                flags.insert(0, Flag::Unstable);
            }
            Ok((v, flags))
        }),
        Observable::NFMin | Observable::DeltaStar => attempt(|| {
            let grid = linspace(-2.0 * p.omega_m, 0.0, DETUNING_SAMPLES);
            let opt = min_occupancy_over_detuning(p, ctx.n_th, &grid)?;
            let v = if obs == Observable::NFMin {
                opt.n_f_min
            } else {
                opt.delta_star
            };
            let mut flags = rate_flags(&opt.occupancy.rates);
            if !opt.occupancy.stability.stable {
                flags.insert(0, Flag::Unstable);
            }
            Ok((v, flags))
        }),
        Observable::StabilityMargin => (Some(stability_check(p).margin), vec![]),
        Observable::ReOmegaPlus
        | Observable::ImOmegaPlus
        | Observable::ReOmegaMinus
        | Observable::ImOmegaMinus => {
            let s = supermode_frequencies(0.0, p.kappa, p.gamma, p.j);
            let v = match obs {
                Observable::ReOmegaPlus => s.omega_plus.re,
                Observable::ImOmegaPlus => s.omega_plus.im,
                Observable::ReOmegaMinus => s.omega_minus.re,
                _ => s.omega_minus.im,
            };
            let flags = if s.regime == Regime::ExceptionalPoint {
                vec![Flag::ExceptionalPoint]
            } else {
                vec![]
            };
            (Some(v), flags)
        }
        Observable::LyapunovNC => attempt(|| Ok((lyapunov_steady_occupancy(p, ctx.n_th)?.n_c, vec![]))),
    }
}
