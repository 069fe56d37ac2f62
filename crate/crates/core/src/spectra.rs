//! Frequency-domain response functions, the optical-force noise spectrum and
//! the golden-rule cooling/heating rates derived from it.
//!
//! Spectra are kept in rate units, `S̃(ω) = S_FF(ω) x_zpf² / ħ²`, so that the
//! phonon annihilation and creation rates are simply `A∓ = S̃(±ω_m)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative size below which a denominator is treated as an exact pole.
pub const POLE_EPSILON: f64 = 1e-12;

/// Which response function a [`Susceptibility`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SusceptibilityKind {
    /// Auxiliary (gain or loss) cavity.
    A,
    /// Driven optomechanical cavity.
    B,
    /// Mechanical resonator.
    C,
    /// Dressed response of the coupled cavities.
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Susceptibility {
    pub value: Complex64,
    pub which: SusceptibilityKind,
    pub omega: f64,
    /// Only meaningful for [`SusceptibilityKind::Total`].
    pub backaction: bool,
}

fn checked_inverse(
    denominator: Complex64,
    scale: f64,
    what: &'static str,
    omega: f64,
) -> Result<Complex64> {
    if denominator.norm() <= POLE_EPSILON * scale {
        return Err(Error::PoleSingularity { what, omega });
    }
    Ok(denominator.inv())
}

/// Inverse auxiliary response `-i(ω + Δ̄) - κ/2`.
fn chi_a_inv(omega: f64, p: &SystemParams) -> Complex64 {
    -I * (omega + p.delta_bar) - p.kappa / 2.0
}

fn chi_b_inv(omega: f64, p: &SystemParams) -> Complex64 {
    -I * (omega + p.delta_bar) + p.gamma / 2.0
}

fn chi_c_inv(omega: f64, p: &SystemParams) -> Complex64 {
    -I * (omega - p.omega_m) + p.gamma_m / 2.0
}

/// `χ_a(ω) = 1/(-i(ω+Δ̄) - κ/2)`.
pub fn chi_a(omega: f64, p: &SystemParams) -> Result<Susceptibility> {
    let scale = omega.abs().max(p.delta_bar.abs()).max(p.kappa.abs() / 2.0);
    let value = checked_inverse(chi_a_inv(omega, p), scale, "chi_a", omega)?;
    Ok(Susceptibility {
        value,
        which: SusceptibilityKind::A,
        omega,
        backaction: false,
    })
}

/// `χ_b(ω) = 1/(-i(ω+Δ̄) + γ/2)`.
pub fn chi_b(omega: f64, p: &SystemParams) -> Susceptibility {
    Susceptibility {
        value: chi_b_inv(omega, p).inv(),
        which: SusceptibilityKind::B,
        omega,
        backaction: false,
    }
}

/// `χ_c(ω) = 1/(-i(ω-ω_m) + γ_m/2)`.
pub fn chi_c(omega: f64, p: &SystemParams) -> Susceptibility {
    Susceptibility {
        value: chi_c_inv(omega, p).inv(),
        which: SusceptibilityKind::C,
        omega,
        backaction: false,
    }
}

/// Dressed cavity response.
///
/// Without back-action this is `(χ_b⁻¹ + J²χ_a)⁻¹`; with back-action the
/// mechanical term is added, `χ_b / (1 + |G|²χ_cχ_b + J²χ_aχ_b)`.
pub fn chi_total(omega: f64, p: &SystemParams, backaction: bool) -> Result<Susceptibility> {
    let b_inv = chi_b_inv(omega, p);
    let mut denominator = b_inv;
    let mut scale = b_inv.norm();
    if p.j != 0.0 {
        let aux = p.j * p.j * chi_a(omega, p)?.value;
        denominator += aux;
        scale = scale.max(aux.norm());
    }
    if backaction {
        let mech = p.g_abs2() * chi_c_inv(omega, p).inv();
        denominator += mech;
        scale = scale.max(mech.norm());
    }
    let value = checked_inverse(denominator, scale, "chi_total", omega)?;
    Ok(Susceptibility {
        value,
        which: SusceptibilityKind::Total,
        omega,
        backaction,
    })
}

/// One point of the optical-force spectrum in rate units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub omega: f64,
    /// `S_FF(ω) x_zpf²/ħ²` [rad/s].
    pub s_tilde: f64,
    /// Passive-cavity vacuum noise, `|G|² γ |χ(ω)|²`.
    pub loss_term: f64,
    /// Auxiliary-cavity noise, `|G|² J² κ |χ_a(-ω)|² |χ(-ω)|²`.
    pub gain_term: f64,
}

/// Force-noise spectrum at `omega`.
///
/// The auxiliary contribution is evaluated with the signed `kappa`, so for a
/// lossy auxiliary cavity (`kappa = -gamma`) the gain term is negative.
pub fn force_spectrum(omega: f64, p: &SystemParams, backaction: bool) -> Result<SpectrumSample> {
    let g2 = p.g_abs2();
    let chi_w = chi_total(omega, p, backaction)?.value;
    let loss_term = g2 * p.gamma * chi_w.norm_sqr();
    let gain_term = if p.j == 0.0 {
        0.0
    } else {
        let chi_a_neg = chi_a(-omega, p)?.value;
        let chi_neg = chi_total(-omega, p, backaction)?.value;
        g2 * p.j * p.j * p.kappa * chi_a_neg.norm_sqr() * chi_neg.norm_sqr()
    };
    Ok(SpectrumSample {
        omega,
        s_tilde: loss_term + gain_term,
        loss_term,
        gain_term,
    })
}

/// Golden-rule rates at the mechanical frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingRates {
    /// Phonon annihilation (anti-Stokes) rate, `S̃(+ω_m)`.
    pub a_minus: f64,
    /// Phonon creation (Stokes) rate, `S̃(-ω_m)`.
    pub a_plus: f64,
    /// Net optical damping `a_minus - a_plus`.
    pub gamma_opt: f64,
}

impl CoolingRates {
    pub fn new(a_minus: f64, a_plus: f64) -> Self {
        CoolingRates {
            a_minus,
            a_plus,
            gamma_opt: a_minus - a_plus,
        }
    }

    /// Whether the cooling rate is large enough that first-order perturbation
    /// theory in the optical force is suspect (`A₋ > 0.1 ω_m`).
    pub fn is_nonperturbative(&self, omega_m: f64) -> bool {
        self.a_minus > 0.1 * omega_m
    }
}

pub fn cooling_rates(p: &SystemParams, backaction: bool) -> Result<CoolingRates> {
    let a_minus = force_spectrum(p.omega_m, p, backaction)?.s_tilde;
    let a_plus = force_spectrum(-p.omega_m, p, backaction)?.s_tilde;
    Ok(CoolingRates::new(a_minus, a_plus))
}

/// Weak-coupling, balanced-gain approximation of the cooling rate,
/// `|G|² γ³ / (J² - (γ/2)²)²`.
pub fn simplified_cooling_rate(p: &SystemParams) -> Result<f64> {
    if (p.kappa - p.gamma).abs() > 1e-12 * p.gamma {
        return Err(Error::invalid(
            "kappa",
            format!("simplified rate requires kappa = gamma, got {}", p.kappa),
        ));
    }
    let half = p.gamma / 2.0;
    let detune = p.j * p.j - half * half;
    if detune.abs() <= POLE_EPSILON * half * half {
        return Err(Error::DivergesAtTransition);
    }
    Ok(p.g_abs2() * p.gamma.powi(3) / (detune * detune))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Case;
    use approx::assert_relative_eq;

    fn ap(j_over_gamma: f64) -> SystemParams {
        let p = SystemParams::reference(Case::ActivePassive, 0.05);
        p.with_j(j_over_gamma * p.gamma)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm()
    }

    #[test]
    fn chi_a_on_resonance() {
        let p = ap(0.49);
        let v = chi_a(p.omega_m, &p).unwrap().value;
        assert!(close(v, Complex64::new(-2.0 / p.gamma, 0.0), 1e-14));
    }

    #[test]
    fn chi_a_at_zero_frequency() {
        let p = ap(0.49);
        let v = chi_a(0.0, &p).unwrap().value;
        let expected = Complex64::new(-p.gamma / 2.0, -p.delta_bar).inv();
        assert!(close(v, expected, 1e-14));
        assert_relative_eq!(
            v.norm_sqr(),
            1.0 / (p.delta_bar.powi(2) + p.kappa.powi(2) / 4.0),
            max_relative = 1e-13
        );
    }

    #[test]
    fn chi_a_pole_is_flagged() {
        let p = ap(0.49).with_kappa(0.0);
        let err = chi_a(-p.delta_bar, &p).unwrap_err();
        assert!(matches!(err, Error::PoleSingularity { what: "chi_a", .. }));
    }

    #[test]
    fn lossy_auxiliary_matches_passive_cavity() {
        let p = SystemParams::reference(Case::PassivePassive, 0.05);
        for k in -50..=50 {
            let w = k as f64 * 0.05 * p.omega_m;
            assert_eq!(chi_a(w, &p).unwrap().value, chi_b(w, &p).value);
        }
    }

    #[test]
    fn bare_responses_on_resonance() {
        let p = ap(0.49);
        assert!(close(chi_b(p.omega_m, &p).value, Complex64::new(2.0 / p.gamma, 0.0), 1e-14));
        assert!(close(chi_c(p.omega_m, &p).value, Complex64::new(2.0 / p.gamma_m, 0.0), 1e-14));
        assert_relative_eq!(
            chi_b(-p.omega_m, &p).value.norm_sqr(),
            1.0 / (4.0 * p.omega_m.powi(2) + p.gamma.powi(2) / 4.0),
            max_relative = 1e-13
        );
    }

    #[test]
    fn decoupled_total_is_passive_response() {
        let p = ap(0.0);
        for k in -20..=20 {
            let w = k as f64 * 0.1 * p.omega_m;
            assert_eq!(chi_total(w, &p, false).unwrap().value, chi_b(w, &p).value);
        }
    }

    #[test]
    fn total_on_resonance_below_transition() {
        let p = ap(0.49);
        let v = chi_total(p.omega_m, &p, false).unwrap().value;
        // χ⁻¹ = γ/2 - 2J²/γ
        let expected = 1.0 / (p.gamma / 2.0 - 2.0 * p.j * p.j / p.gamma);
        assert!(close(v, Complex64::new(expected, 0.0), 1e-12));
        assert_relative_eq!(v.re * p.gamma, 1.0 / 0.0198, max_relative = 1e-9);
    }

    #[test]
    fn transition_pole_and_backaction_regularization() {
        let p = ap(0.5);
        let err = chi_total(p.omega_m, &p, false).unwrap_err();
        assert!(err.is_singularity());
        let v = chi_total(p.omega_m, &p, true).unwrap().value;
        let expected = p.gamma_m / (2.0 * p.g_abs2());
        assert!(close(v, Complex64::new(expected, 0.0), 1e-9), "{v} vs {expected}");
    }

    #[test]
    fn single_cavity_sideband_rate() {
        let p = SystemParams::reference(Case::SingleCavity, 0.05).validate().unwrap();
        let s = force_spectrum(p.omega_m, &p, false).unwrap();
        assert_relative_eq!(s.s_tilde, 4.0 * p.g_abs2() / p.gamma, max_relative = 1e-13);
        assert_eq!(s.gain_term, 0.0);
    }

    #[test]
    fn no_coupling_no_force() {
        let p = ap(0.49).with_g(Complex64::new(0.0, 0.0));
        for k in -10..=10 {
            let s = force_spectrum(k as f64 * 0.2 * p.omega_m, &p, false).unwrap();
            assert_eq!(s.s_tilde, 0.0);
        }
        let r = cooling_rates(&p, false).unwrap();
        assert_eq!((r.a_minus, r.a_plus, r.gamma_opt), (0.0, 0.0, 0.0));
    }

    #[test]
    fn active_passive_loss_term_on_resonance() {
        let p = ap(0.49);
        let s = force_spectrum(p.omega_m, &p, false).unwrap();
        let d = p.j * p.j - p.gamma * p.gamma / 4.0;
        let expected = p.g_abs2() * p.gamma.powi(3) / (4.0 * d * d);
        assert_relative_eq!(s.loss_term, expected, max_relative = 1e-10);
        assert_relative_eq!(s.loss_term * p.gamma / p.g_abs2(), 2550.76, max_relative = 1e-5);
        // Auxiliary noise at +ω_m is far off resonance.
        assert!(s.gain_term < 1e-3 * s.loss_term);
    }

    #[test]
    fn single_cavity_rates_closed_form() {
        let p = SystemParams::reference(Case::SingleCavity, 0.05).validate().unwrap();
        let r = cooling_rates(&p, false).unwrap();
        let g2 = p.g_abs2();
        let a_plus = g2 * p.gamma / (4.0 * p.omega_m.powi(2) + p.gamma.powi(2) / 4.0);
        assert_relative_eq!(r.a_minus, 4.0 * g2 / p.gamma, max_relative = 1e-13);
        assert_relative_eq!(r.a_plus, a_plus, max_relative = 1e-12);
        assert_relative_eq!(r.a_minus / p.omega_m, 6.366e-4, max_relative = 1e-3);
        assert_relative_eq!(r.a_plus / p.omega_m, 1.61e-7, max_relative = 5e-3);
        assert_eq!(r.gamma_opt, r.a_minus - r.a_plus);
    }

    #[test]
    fn enhancement_over_single_cavity() {
        let sc = SystemParams::reference(Case::SingleCavity, 0.05).validate().unwrap();
        let a_sc = cooling_rates(&sc, false).unwrap().a_minus;
        for (jr, expected) in [(0.49, 637.7), (0.499, 6.26e4)] {
            let a_ap = cooling_rates(&ap(jr), false).unwrap().a_minus;
            let gamma = sc.gamma;
            let d = (jr * gamma).powi(2) - gamma * gamma / 4.0;
            let oracle = (gamma * gamma / 4.0).powi(2) / (d * d);
            assert_relative_eq!(a_ap / a_sc, oracle, max_relative = 1e-4);
            assert_relative_eq!(a_ap / a_sc, expected, max_relative = 2e-3);
        }
    }

    #[test]
    fn simplified_rate_values() {
        let p = ap(0.49);
        let v = simplified_cooling_rate(&p).unwrap();
        assert_relative_eq!(v * p.gamma / p.g_abs2(), 1.0203e4, max_relative = 1e-4);
        assert!(matches!(simplified_cooling_rate(&ap(0.5)), Err(Error::DivergesAtTransition)));
        assert!(simplified_cooling_rate(&ap(1e4)).unwrap() < 1e-12 * v);
        let sc = SystemParams::reference(Case::SingleCavity, 0.05).validate().unwrap();
        assert!(simplified_cooling_rate(&sc).is_err());
    }

    #[test]
    fn simplified_rate_peaks_at_transition() {
        let base = ap(0.49);
        let mut best = (0.0, f64::MIN);
        for k in 0..=1000 {
            let j = 0.3 * base.gamma + k as f64 * 0.4 * base.gamma / 1000.0;
            if let Ok(v) = simplified_cooling_rate(&base.with_j(j)) {
                if v > best.1 {
                    best = (j, v);
                }
            }
        }
        assert!((best.0 - base.gamma / 2.0).abs() <= 0.4 * base.gamma / 1000.0 + 1e-9);
    }
}
