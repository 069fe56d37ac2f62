//! Supermodes of the coupled gain/loss cavities, the PT transition, and a
//! full three-mode stability check.

use nalgebra::{Matrix2, Matrix6, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::params::SystemParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative window around `J = Γ` classified as the exceptional point.
pub const EP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `J > Γ`: split frequencies, shared linewidth.
    Unbroken,
    /// `J < Γ`: degenerate frequency, split linewidths.
    Broken,
    /// `J = Γ` within [`EP_TOLERANCE`].
    ExceptionalPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupermodePair {
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
    pub regime: Regime,
}

/// Eigenfrequencies `ω± = ω₀ - iχ/2 ± sqrt(J² - Γ²)` of the two degenerate
/// cavities, with linewidth `χ = (γ-κ)/2` and effective loss `Γ = (κ+γ)/4`.
///
/// The square root is the principal branch, so `omega_plus` always carries the
/// root with non-negative real part.
pub fn supermode_frequencies(omega0: f64, kappa: f64, gamma: f64, j: f64) -> SupermodePair {
    let linewidth = (gamma - kappa) / 2.0;
    let big_gamma = (kappa + gamma) / 4.0;
    let root = Complex64::new((j - big_gamma) * (j + big_gamma), 0.0).sqrt();
    let centre = Complex64::new(omega0, -linewidth / 2.0);
    let regime = if (j - big_gamma).abs() <= EP_TOLERANCE * big_gamma.abs() {
        Regime::ExceptionalPoint
    } else if j > big_gamma {
        Regime::Unbroken
    } else {
        Regime::Broken
    };
    SupermodePair {
        omega_plus: centre + root,
        omega_minus: centre - root,
        regime,
    }
}

/// Eigenvalues of the 2×2 effective matrix `[[ω₀ + iκ/2, J], [J, ω₀ - iγ/2]]`
/// by a direct Schur decomposition, independent of the closed form above.
pub fn effective_eigenvalues(omega0: f64, kappa: f64, gamma: f64, j: f64) -> [Complex64; 2] {
    let h = Matrix2::new(
        Complex64::new(omega0, kappa / 2.0),
        Complex64::new(j, 0.0),
        Complex64::new(j, 0.0),
        Complex64::new(omega0, -gamma / 2.0),
    );
    let t = Schur::new(h).unpack().1;
    [t[(0, 0)], t[(1, 1)]]
}

/// Coupling at which the supermodes coalesce, `J_c = (κ+γ)/4`.
pub fn transition_point(kappa: f64, gamma: f64) -> f64 {
    (kappa + gamma) / 4.0
}

/// Optimal inter-cavity coupling once the mechanical mode is no longer a weak
/// perturbation: `sqrt((γ/2)² + 4|G|² γ/γ_m)`. Assumes balanced `κ = γ`.
pub fn optimal_coupling_strong(p: &SystemParams) -> f64 {
    ((p.gamma / 2.0).powi(2) + 4.0 * p.g_abs2() * p.gamma / p.gamma_m).sqrt()
}

/// Drift matrix of the linearized Langevin equations over the basis
/// `(a, a†, b, b†, c, c†)`, i.e. `d/dt v = M v + noise`.
pub fn drift_matrix(p: &SystemParams) -> Matrix6<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let mut m = Matrix6::from_element(z);
    let g = p.g_lin;
    let gc = g.conj();
    let (d, k, gm) = (p.delta_bar, p.kappa, p.gamma);

    // a
    m[(0, 0)] = I * d + k / 2.0;
    m[(0, 2)] = -I * p.j;
    // a†
    m[(1, 1)] = -I * d + k / 2.0;
    m[(1, 3)] = I * p.j;
    // b
    m[(2, 2)] = I * d - gm / 2.0;
    m[(2, 0)] = -I * p.j;
    m[(2, 4)] = -I * g;
    m[(2, 5)] = -I * g;
    // b†
    m[(3, 3)] = -I * d - gm / 2.0;
    m[(3, 1)] = I * p.j;
    m[(3, 4)] = I * gc;
    m[(3, 5)] = I * gc;
    // c
    m[(4, 4)] = -I * p.omega_m - p.gamma_m / 2.0;
    m[(4, 2)] = -I * gc;
    m[(4, 3)] = -I * g;
    // c†
    m[(5, 5)] = I * p.omega_m - p.gamma_m / 2.0;
    m[(5, 2)] = I * gc;
    m[(5, 3)] = I * g;
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Drift-matrix spectrum, sorted by descending real part.
    pub eigenvalues: Vec<Complex64>,
    pub stable: bool,
    /// Spectral abscissa (largest real part).
    pub margin: f64,
}

/// Eigenvalues of an arbitrary 6×6 complex matrix via complex Schur form.
pub(crate) fn eigenvalues6(m: &Matrix6<Complex64>) -> Vec<Complex64> {
    let schur = Schur::new(*m);
    let (_, t) = schur.unpack();
    (0..6).map(|i| t[(i, i)]).collect()
}

pub fn stability_check(p: &SystemParams) -> StabilityReport {
    let mut eigenvalues = eigenvalues6(&drift_matrix(p));
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let margin = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    StabilityReport {
        eigenvalues,
        stable: margin < 0.0,
        margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Case;
    use approx::assert_relative_eq;

    #[test]
    fn unbroken_phase_shares_linewidth() {
        let gamma = 8e6;
        let s = supermode_frequencies(1e9, gamma, gamma, 0.7 * gamma);
        assert_eq!(s.regime, Regime::Unbroken);
        assert!((s.omega_plus.im - s.omega_minus.im).abs() < 1e-9 * gamma);
        assert_eq!(s.omega_plus.im, 0.0);
        let split = 2.0 * ((0.7 * gamma).powi(2) - gamma * gamma / 4.0).sqrt();
        assert_relative_eq!(s.omega_plus.re - s.omega_minus.re, split, max_relative = 1e-12);
    }

    #[test]
    fn broken_phase_shares_frequency() {
        let gamma = 8e6;
        let s = supermode_frequencies(1e9, gamma, gamma, 0.3 * gamma);
        assert_eq!(s.regime, Regime::Broken);
        assert_eq!(s.omega_plus.re, s.omega_minus.re);
        assert!(s.omega_plus.im > 0.0 && s.omega_minus.im < 0.0);
    }

    #[test]
    fn uncoupled_gain_and_loss_branches() {
        let gamma = 8e6;
        let s = supermode_frequencies(0.0, gamma, gamma, 0.0);
        assert!((s.omega_plus - Complex64::new(0.0, gamma / 2.0)).norm() < 1e-9);
        assert!((s.omega_minus - Complex64::new(0.0, -gamma / 2.0)).norm() < 1e-9);
        let mut direct = effective_eigenvalues(0.0, gamma, gamma, 0.0);
        direct.sort_by(|a, b| b.im.total_cmp(&a.im));
        assert!((direct[0] - s.omega_plus).norm() < 1e-12 * gamma);
        assert!((direct[1] - s.omega_minus).norm() < 1e-12 * gamma);
    }

    #[test]
    fn exceptional_point_coalescence() {
        let gamma = 8e6;
        let s = supermode_frequencies(0.0, gamma, gamma, gamma / 2.0);
        assert_eq!(s.regime, Regime::ExceptionalPoint);
        assert!((s.omega_plus - s.omega_minus).norm() < 1e-9 * gamma);
    }

    #[test]
    fn transition_points() {
        let gamma = 8e6;
        assert_eq!(transition_point(gamma, gamma), gamma / 2.0);
        assert_eq!(transition_point(0.0, gamma), gamma / 4.0);
        assert_eq!(transition_point(3.0 * gamma, gamma), gamma);
    }

    #[test]
    fn strong_coupling_optimum() {
        let p = SystemParams::reference(Case::ActivePassive, 0.05);
        assert_eq!(
            optimal_coupling_strong(&p.with_g(Complex64::new(0.0, 0.0))),
            p.gamma / 2.0
        );
        let j = optimal_coupling_strong(&p) / p.gamma;
        let expected = (0.25 + 4.0 * 0.0025 / (p.gamma_m / p.gamma)).sqrt();
        assert_relative_eq!(j, expected, max_relative = 1e-12);
        assert!((j - 7.99).abs() < 0.02, "{j}");
        let mut last = 0.0;
        for k in 0..50 {
            let jj = optimal_coupling_strong(&p.with_g(Complex64::new(k as f64 * 1e4, 0.0)));
            assert!(jj > last);
            last = jj;
        }
    }

    #[test]
    fn isolated_gain_mode_is_unstable() {
        let p = SystemParams::reference(Case::ActivePassive, 0.0).with_j(0.0);
        let r = stability_check(&p);
        assert!(!r.stable);
        assert_relative_eq!(r.margin, p.kappa / 2.0, max_relative = 1e-9);
    }

    #[test]
    fn red_detuned_single_cavity_is_stable() {
        let p = SystemParams::reference(Case::SingleCavity, 0.05).validate().unwrap();
        let r = stability_check(&p);
        assert!(r.stable, "margin {}", r.margin);
        assert_eq!(r.eigenvalues.len(), 6);
    }

    #[test]
    fn drift_spectrum_contains_supermodes_when_mechanics_decouples() {
        let mut p = SystemParams::reference(Case::ActivePassive, 0.0).with_j(0.7 * 8e6);
        p.gamma_m = 0.0;
        let ev = eigenvalues6(&drift_matrix(&p));
        // a evolves as exp(-i ω t) with ω = -Δ̄ ± ..., so λ = -i ω.
        let s = supermode_frequencies(-p.delta_bar, p.kappa, p.gamma, p.j);
        for w in [s.omega_plus, s.omega_minus] {
            let target = -I * w;
            let best = ev.iter().map(|z| (z - target).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10 * target.norm(), "{target} missing, best {best}");
        }
    }
}
