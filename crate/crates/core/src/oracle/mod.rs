//! Brute-force validators for the analytic occupancy: a truncated-Fock rate
//! equation and an exact Lyapunov covariance solve.

pub mod lyapunov;
pub mod rate_equation;

pub use lyapunov::{diffusion_matrix, lyapunov_steady_occupancy, CovarianceState, RESIDUAL_TOLERANCE};
pub use rate_equation::{
    evolve_adaptive, mean_field_parameters, mean_phonon_closed_form, mean_phonon_ode,
    rate_equation_evolve, stable_step, FockDistribution, Trajectory,
};
