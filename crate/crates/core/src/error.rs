use thiserror::Error;

/// Errors produced by the cooling model and its oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("fixed point not reached after {iterations} iterations (residual {residual:e})")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("pole of {what} at omega = {omega:e} rad/s")]
    PoleSingularity { what: &'static str, omega: f64 },

    #[error("simplified cooling rate diverges at the transition point J = gamma/2")]
    DivergesAtTransition,

    #[error("closed-form damping diverges at detuning {delta:e} rad/s (delta = +/- omega_m)")]
    DivergesAtResonance { delta: f64 },

    #[error("no steady state: gamma_m + Gamma_opt = {total_damping:e} <= 0")]
    NoSteadyState { total_damping: f64 },

    #[error("no detuning grid point admits a steady state")]
    AllUnstable,

    #[error("Fock truncation breached: tail mass {tail_mass:e} at n_max = {n_max}")]
    TruncationBreach { tail_mass: f64, n_max: usize },

    #[error("time step too large: per-step transition probability {probability:.3} >= 0.1")]
    StepTooLarge { probability: f64 },

    #[error("drift matrix is not strictly stable (spectral abscissa {margin:e})")]
    UnstableSystem { margin: f64 },

    #[error("Lyapunov solve ill-conditioned (relative residual {residual:e})")]
    IllConditioned { residual: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub fn is_singularity(&self) -> bool {
        matches!(
            self,
            Error::PoleSingularity { .. }
                | Error::DivergesAtTransition
                | Error::DivergesAtResonance { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
