//! Optomechanical self-energy, optical spring effect and steady-state phonon
//! occupancy.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::spectra::{chi_total, cooling_rates, CoolingRates};
use crate::supermodes::{stability_check, StabilityReport};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfEnergy {
    pub value: Complex64,
    pub omega: f64,
    pub backaction: bool,
}

/// `Σ(ω) = -i|G|² [χ(ω) - χ*(-ω)]`.
pub fn self_energy(omega: f64, p: &SystemParams, backaction: bool) -> Result<SelfEnergy> {
    let plus = chi_total(omega, p, backaction)?.value;
    let minus = chi_total(-omega, p, backaction)?.value;
    Ok(SelfEnergy {
        value: -I * p.g_abs2() * (plus - minus.conj()),
        omega,
        backaction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpringResult {
    /// Mechanical frequency shift `Re Σ(ω_m)`.
    pub delta_omega_m: f64,
    /// Net optical damping `-2 Im Σ(ω_m)`.
    pub gamma_opt: f64,
}

impl From<SelfEnergy> for SpringResult {
    fn from(s: SelfEnergy) -> Self {
        SpringResult {
            delta_omega_m: s.value.re,
            gamma_opt: -2.0 * s.value.im,
        }
    }
}

pub fn spring(p: &SystemParams, backaction: bool) -> Result<SpringResult> {
    self_energy(p.omega_m, p, backaction).map(SpringResult::from)
}

/// Net damping exactly at the balanced transition point (`κ = γ`, `J = γ/2`):
/// `κ|G|² [1/(ω_m+Δ̄)² - 1/(Δ̄-ω_m)²]`.
pub fn net_damping_at_transition(p: &SystemParams) -> Result<f64> {
    if (p.kappa - p.gamma).abs() > 1e-9 * p.gamma {
        return Err(Error::invalid("kappa", "requires balanced gain kappa = gamma"));
    }
    if (p.j - p.gamma / 2.0).abs() > 1e-9 * p.gamma {
        return Err(Error::invalid("J", "requires J = gamma/2"));
    }
    let red = p.omega_m + p.delta_bar;
    let blue = p.delta_bar - p.omega_m;
    let eps = 1e-12 * p.omega_m;
    if red.abs() <= eps || blue.abs() <= eps {
        return Err(Error::DivergesAtResonance {
            delta: p.delta_bar,
        });
    }
    Ok(p.kappa * p.g_abs2() * (1.0 / (red * red) - 1.0 / (blue * blue)))
}

/// Source for one of the rate symbols of the closed-form spring expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateSymbol {
    Kappa,
    Gamma,
    J,
}

impl RateSymbol {
    fn value(self, p: &SystemParams) -> f64 {
        match self {
            RateSymbol::Kappa => p.kappa,
            RateSymbol::Gamma => p.gamma,
            RateSymbol::J => p.j,
        }
    }
}

/// Assignment of `(κ_c, κ_d, g)` in the closed-form spring expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub kappa_c: RateSymbol,
    pub kappa_d: RateSymbol,
    pub g: RateSymbol,
}

impl Default for Interpretation {
    fn default() -> Self {
        Interpretation {
            kappa_c: RateSymbol::Kappa,
            kappa_d: RateSymbol::Gamma,
            g: RateSymbol::J,
        }
    }
}

impl Interpretation {
    /// `κ_c = γ`, `κ_d = κ`: the assignment that reproduces `Re Σ` for any `κ`.
    pub fn swapped() -> Self {
        Interpretation {
            kappa_c: RateSymbol::Gamma,
            kappa_d: RateSymbol::Kappa,
            g: RateSymbol::J,
        }
    }
}

/// Relative deviation above which an interpretation is declared inconsistent.
pub const INTERPRETATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormSpring {
    pub omega: f64,
    pub closed_form: SpringResult,
    /// Same quantities from the general self-energy at `omega`.
    pub reference: SpringResult,
    pub deviation_delta_omega: f64,
    pub deviation_gamma_opt: f64,
    pub consistent: bool,
}

fn rel_dev(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Evaluates the rational closed forms for `δω_m` and `Γ_opt` at `omega`
/// under `interp` and compares them with the self-energy route.
pub fn closed_form_spring(
    p: &SystemParams,
    omega: f64,
    interp: Interpretation,
) -> Result<ClosedFormSpring> {
    let kc = interp.kappa_c.value(p);
    let kd = interp.kappa_d.value(p);
    let g = interp.g.value(p);
    let d = p.delta_bar;
    let g2 = p.g_abs2();
    let diff = kd - kc;

    let l_minus = g * g - kc * kd / 4.0 - d * d - omega * omega - 2.0 * d * omega;
    let l_plus = g * g - kc * kd / 4.0 - d * d - omega * omega + 2.0 * d * omega;
    let xm = d + omega;
    let xp = d - omega;
    let den_m = 4.0 * l_minus * l_minus + xm * xm * diff * diff;
    let den_p = 4.0 * l_plus * l_plus + xp * xp * diff * diff;

    let delta_omega_m = g2 * xm * (kd * diff - 4.0 * l_minus) / den_m
        + g2 * xp * (kd * diff - 4.0 * l_plus) / den_p;
    let gamma_opt = -2.0 * g2 * (kd * l_minus + xm * xm * diff) / den_m
        + 2.0 * g2 * (kd * l_plus + xp * xp * diff) / den_p;

    let closed_form = SpringResult {
        delta_omega_m,
        gamma_opt,
    };
    let reference = SpringResult::from(self_energy(omega, p, false)?);
    let deviation_delta_omega = rel_dev(closed_form.delta_omega_m, reference.delta_omega_m);
    let deviation_gamma_opt = rel_dev(closed_form.gamma_opt, reference.gamma_opt);
    Ok(ClosedFormSpring {
        omega,
        closed_form,
        reference,
        deviation_delta_omega,
        deviation_gamma_opt,
        consistent: deviation_delta_omega.max(deviation_gamma_opt) < INTERPRETATION_TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyResult {
    pub n_f: f64,
    /// `γ_m n_th / (γ_m + Γ_opt)`.
    pub n_f_classical: f64,
    /// `A₊ / (γ_m + Γ_opt)`.
    pub n_f_quantum: f64,
    pub rates: CoolingRates,
    pub stability: StabilityReport,
    /// Set when `A₋ > 0.1 ω_m`.
    pub perturbative_flag: bool,
}

/// Steady-state phonon number `(γ_m n_th + A₊)/(γ_m + Γ_opt)`.
pub fn final_phonon_number(p: &SystemParams, n_th: f64, backaction: bool) -> Result<OccupancyResult> {
    let rates = cooling_rates(p, backaction)?;
    occupancy_from_rates(p, &rates, n_th)
}

pub fn occupancy_from_rates(
    p: &SystemParams,
    rates: &CoolingRates,
    n_th: f64,
) -> Result<OccupancyResult> {
    let total = p.gamma_m + rates.gamma_opt;
    if total.is_nan() || total <= 0.0 {
        return Err(Error::NoSteadyState {
            total_damping: total,
        });
    }
    let n_f_classical = p.gamma_m * n_th / total;
    let n_f_quantum = rates.a_plus / total;
    Ok(OccupancyResult {
        n_f: n_f_classical + n_f_quantum,
        n_f_classical,
        n_f_quantum,
        rates: *rates,
        stability: stability_check(p),
        perturbative_flag: rates.is_nonperturbative(p.omega_m),
    })
}

/// Coupling above which sideband cooling reaches `n_f < 1`:
/// `sqrt(γ γ_m n_th)/2`.
pub fn cooling_threshold(gamma: f64, gamma_m: f64, n_th: f64) -> f64 {
    (gamma * gamma_m * n_th).sqrt() / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetuningOptimum {
    pub delta_star: f64,
    pub n_f_min: f64,
    pub occupancy: OccupancyResult,
}

fn n_f_at(template: &SystemParams, n_th: f64, delta: f64) -> f64 {
    let (rates, p) = {
        let p = template.with_delta(delta);
        match cooling_rates(&p, false) {
            Ok(r) => (r, p),
            Err(_) => return f64::INFINITY,
        }
    };
    let total = p.gamma_m + rates.gamma_opt;
    if total > 0.0 {
        (p.gamma_m * n_th + rates.a_plus) / total
    } else {
        f64::INFINITY
    }
}

/// Minimizes `n_f` over detuning: grid scan, then golden-section refinement
/// to `1e-4 ω_m` inside the bracketing grid cells. Ties go to the smallest
/// detuning.
pub fn min_occupancy_over_detuning(
    template: &SystemParams,
    n_th: f64,
    delta_grid: &[f64],
) -> Result<DetuningOptimum> {
    let values: Vec<f64> = delta_grid
        .par_iter()
        .map(|&d| n_f_at(template, n_th, d))
        .collect();

    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        match best {
            None => best = Some(i),
            Some(b) => {
                let better = *v < values[b] || (*v == values[b] && delta_grid[i] < delta_grid[b]);
                if better {
                    best = Some(i);
                }
            }
        }
    }
    let i = best.ok_or(Error::AllUnstable)?;

    let lo = delta_grid[i.saturating_sub(1)];
    let hi = delta_grid[(i + 1).min(delta_grid.len() - 1)];
    let (lo, hi) = (lo.min(hi), lo.max(hi));
    let f = |d: f64| n_f_at(template, n_th, d);
    let tol = 1e-4 * template.omega_m;
    let (mut delta_star, refined) = golden_section(f, lo, hi, tol);
    if refined.is_nan() || refined > values[i] {
        delta_star = delta_grid[i];
    }

    let occupancy = final_phonon_number(&template.with_delta(delta_star), n_th, false)?;
    Ok(DetuningOptimum {
        delta_star,
        n_f_min: occupancy.n_f,
        occupancy,
    })
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `n` evenly spaced points over `[start, stop]`.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n)
                .map(|k| if k == n - 1 { stop } else { start + k as f64 * step })
                .collect()
        }
    }
}
