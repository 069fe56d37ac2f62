//! Exact steady-state second moments of the linearized three-mode model.
//!
//! With `v = (a, a†, b, b†, c, c†)` and `dv/dt = M v + ξ`, the ordered moments
//! `C_ij = <v_i v_j>` obey `M C + C Mᵀ + D = 0` where
//! `<ξ_i(t) ξ_j(t')> = D_ij δ(t-t')`. The auxiliary mode's input noise is
//! anti-normally ordered when it carries gain (`<a_in† a_in> = δ`) and vacuum
//! otherwise.

use nalgebra::{DMatrix, DVector, Matrix6};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::supermodes::{drift_matrix, stability_check};

/// Largest accepted relative residual `‖M C + C Mᵀ + D‖ / ‖D‖`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    /// `C_ij = <v_i v_j>` over `(a, a†, b, b†, c, c†)`.
    pub moments: Matrix6<Complex64>,
    /// `<a†a>`.
    pub n_a: f64,
    /// `<b†b>`.
    pub n_b: f64,
    /// `<c†c>`: phonon occupancy of the exact linear model.
    pub n_c: f64,
    pub residual: f64,
}

impl CovarianceState {
    /// `<x x†> - <x† x>` for mode index 0 (a), 1 (b) or 2 (c).
    pub fn commutator(&self, mode: usize) -> Complex64 {
        let i = 2 * mode;
        self.moments[(i, i + 1)] - self.moments[(i + 1, i)]
    }
}

/// Input-noise correlation matrix `D`.
pub fn diffusion_matrix(p: &SystemParams, n_th: f64) -> Matrix6<Complex64> {
    let mut d = Matrix6::from_element(Complex64::new(0.0, 0.0));
    if p.kappa > 0.0 {
        // <a_in† a_in> = δ, <a_in a_in†> = 0
        d[(1, 0)] = Complex64::new(p.kappa, 0.0);
    } else {
        d[(0, 1)] = Complex64::new(-p.kappa, 0.0);
    }
    d[(2, 3)] = Complex64::new(p.gamma, 0.0);
    d[(4, 5)] = Complex64::new(p.gamma_m * (n_th + 1.0), 0.0);
    d[(5, 4)] = Complex64::new(p.gamma_m * n_th, 0.0);
    d
}

fn frobenius(m: &Matrix6<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Solves the steady-state Lyapunov equation by a dense solve of the
/// vectorized 36×36 system.
pub fn lyapunov_steady_occupancy(p: &SystemParams, n_th: f64) -> Result<CovarianceState> {
    let report = stability_check(p);
    if !report.stable {
        return Err(Error::UnstableSystem {
            margin: report.margin,
        });
    }
    let m = drift_matrix(p);
    let d = diffusion_matrix(p, n_th);

    // Row-major vec: index 6i + j.
    let mut a = DMatrix::from_element(36, 36, Complex64::new(0.0, 0.0));
    for i in 0..6 {
        for j in 0..6 {
            let row = 6 * i + j;
            for k in 0..6 {
                a[(row, 6 * k + j)] += m[(i, k)];
                a[(row, 6 * i + k)] += m[(j, k)];
            }
        }
    }
    let rhs = DVector::from_iterator(36, (0..36).map(|idx| -d[(idx / 6, idx % 6)]));
    let x = a
        .lu()
        .solve(&rhs)
        .ok_or(Error::IllConditioned {
            residual: f64::INFINITY,
        })?;
    let c = Matrix6::from_fn(|i, j| x[6 * i + j]);

    let residual = frobenius(&(m * c + c * m.transpose() + d)) / frobenius(&d);
    if residual.is_nan() || residual > RESIDUAL_TOLERANCE {
        return Err(Error::IllConditioned { residual });
    }
    Ok(CovarianceState {
        moments: c,
        n_a: c[(1, 0)].re,
        n_b: c[(3, 2)].re,
        n_c: c[(5, 4)].re,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Case;

    #[test]
    fn decoupled_modes_sit_at_bath_occupancy() {
        let p = SystemParams::reference(Case::SingleCavity, 0.0).validate().unwrap();
        let s = lyapunov_steady_occupancy(&p, 50.0).unwrap();
        assert!((s.n_c - 50.0).abs() < 1e-9 * 50.0, "{}", s.n_c);
        assert!(s.n_b.abs() < 1e-12);
        assert!(s.n_a.abs() < 1e-12);
    }

    #[test]
    fn commutators_are_preserved() {
        let p = SystemParams::reference(Case::SingleCavity, 0.05).validate().unwrap();
        let s = lyapunov_steady_occupancy(&p, 50.0).unwrap();
        for mode in 0..3 {
            let c = s.commutator(mode);
            assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-9, "mode {mode}: {c}");
        }
    }

    #[test]
    fn occupancies_are_real_and_blocks_hermitian() {
        let p = SystemParams::reference(Case::PassivePassive, 0.05).validate().unwrap();
        let s = lyapunov_steady_occupancy(&p, 50.0).unwrap();
        let c = s.moments;
        for i in [0, 2, 4] {
            let n = c[(i + 1, i)];
            assert!(n.im.abs() < 1e-9 * n.re.abs().max(1.0));
        }
        // <a† b> = conj(<b† a>)
        let lhs = c[(1, 2)];
        let rhs = c[(3, 0)].conj();
        assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1e-12));
        assert!(s.n_c >= 0.0);
    }

    #[test]
    fn unstable_gain_mode_rejected() {
        let p = SystemParams::reference(Case::ActivePassive, 0.05);
        assert!(matches!(
            lyapunov_steady_occupancy(&p, 50.0),
            Err(Error::UnstableSystem { .. })
        ));
    }

    #[test]
    fn gain_noise_is_anti_normally_ordered() {
        let p = SystemParams::reference(Case::ActivePassive, 0.05);
        let d = diffusion_matrix(&p, 0.0);
        assert_eq!(d[(1, 0)].re, p.kappa);
        assert_eq!(d[(0, 1)].re, 0.0);
        let q = SystemParams::reference(Case::PassivePassive, 0.05);
        let d = diffusion_matrix(&q, 0.0);
        assert_eq!(d[(0, 1)].re, q.gamma);
        assert_eq!(d[(1, 0)].re, 0.0);
    }
}
