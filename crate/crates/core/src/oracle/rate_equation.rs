//! Truncated Fock-space rate equation for the phonon-number distribution and
//! the mean-phonon ODE it closes onto.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::CoolingRates;

/// Largest per-step transition probability accepted by the integrator.
pub const MAX_STEP_PROBABILITY: f64 = 0.1;
/// Tail mass at `n_max` above which a result is rejected.
pub const MAX_TAIL_MASS: f64 = 1e-6;
/// Upper bound for adaptive truncation growth.
pub const N_MAX_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockDistribution {
    /// `P_0 ..= P_{n_max}`.
    pub probabilities: Vec<f64>,
    pub n_max: usize,
    /// Elapsed evolution time [s].
    pub time: f64,
}

impl FockDistribution {
    pub fn fock(n: usize, n_max: usize) -> Self {
        assert!(n <= n_max);
        let mut probabilities = vec![0.0; n_max + 1];
        probabilities[n] = 1.0;
        FockDistribution {
            probabilities,
            n_max,
            time: 0.0,
        }
    }

    /// Geometric (thermal) distribution with mean `n_mean`, renormalized on
    /// the truncated space.
    pub fn thermal(n_mean: f64, n_max: usize) -> Self {
        let ratio = n_mean / (1.0 + n_mean);
        let mut probabilities: Vec<f64> = (0..=n_max)
            .map(|n| ratio.powi(n as i32) / (1.0 + n_mean))
            .collect();
        let total: f64 = probabilities.iter().sum();
        probabilities.iter_mut().for_each(|p| *p /= total);
        FockDistribution {
            probabilities,
            n_max,
            time: 0.0,
        }
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    pub fn tail_mass(&self) -> f64 {
        self.probabilities[self.n_max]
    }

    /// Copy embedded in a larger truncation.
    pub fn extended(&self, n_max: usize) -> Self {
        let mut probabilities = self.probabilities.clone();
        probabilities.resize(n_max + 1, 0.0);
        FockDistribution {
            probabilities,
            n_max,
            time: self.time,
        }
    }
}

/// Birth/death rates of the phonon ladder.
struct Ladder {
    /// `n -> n+1`: `(n+1)(A₊ + γ_m n_th)`.
    up: Vec<f64>,
    /// `n -> n-1`: `n (A₋ + γ_m (n_th+1))`.
    down: Vec<f64>,
}

impl Ladder {
    fn new(rates: &CoolingRates, gamma_m: f64, n_th: f64, n_max: usize) -> Self {
        let heat = rates.a_plus + gamma_m * n_th;
        let cool = rates.a_minus + gamma_m * (n_th + 1.0);
        let mut up: Vec<f64> = (0..=n_max).map(|n| (n as f64 + 1.0) * heat).collect();
        // Reflecting boundary keeps probability on the truncated space.
        up[n_max] = 0.0;
        let down = (0..=n_max).map(|n| n as f64 * cool).collect();
        Ladder { up, down }
    }

    fn max_exit_rate(&self) -> f64 {
        self.up
            .iter()
            .zip(&self.down)
            .map(|(u, d)| u + d)
            .fold(0.0, f64::max)
    }

    fn apply(&self, p: &[f64], out: &mut [f64]) {
        let last = p.len() - 1;
        for n in 0..=last {
            let mut v = -(self.up[n] + self.down[n]) * p[n];
            if n < last {
                v += self.down[n + 1] * p[n + 1];
            }
            if n > 0 {
                v += self.up[n - 1] * p[n - 1];
            }
            out[n] = v;
        }
    }
}

/// Integrates the rate equation with fixed-step RK4 from `dist0` until
/// `t_end` (absolute time, same clock as `dist0.time`).
pub fn rate_equation_evolve(
    rates: &CoolingRates,
    gamma_m: f64,
    n_th: f64,
    dist0: &FockDistribution,
    dt: f64,
    t_end: f64,
) -> Result<FockDistribution> {
    let ladder = Ladder::new(rates, gamma_m, n_th, dist0.n_max);
    let probability = ladder.max_exit_rate() * dt;
    if probability >= MAX_STEP_PROBABILITY {
        return Err(Error::StepTooLarge { probability });
    }

    let len = dist0.n_max + 1;
    let mut p = dist0.probabilities.clone();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; len],
        vec![0.0; len],
        vec![0.0; len],
        vec![0.0; len],
        vec![0.0; len],
    );
    let mut t = dist0.time;
    let steps = ((t_end - t) / dt).ceil().max(0.0) as usize;
    for _ in 0..steps {
        let h = dt.min(t_end - t);
        ladder.apply(&p, &mut k1);
        for i in 0..len {
            tmp[i] = p[i] + 0.5 * h * k1[i];
        }
        ladder.apply(&tmp, &mut k2);
        for i in 0..len {
            tmp[i] = p[i] + 0.5 * h * k2[i];
        }
        ladder.apply(&tmp, &mut k3);
        for i in 0..len {
            tmp[i] = p[i] + h * k3[i];
        }
        ladder.apply(&tmp, &mut k4);
        for i in 0..len {
            p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
        if p[len - 1] > MAX_TAIL_MASS {
            return Err(Error::TruncationBreach {
                tail_mass: p[len - 1],
                n_max: dist0.n_max,
            });
        }
    }
    for v in p.iter_mut() {
        if *v < 0.0 && *v >= -1e-12 {
            *v = 0.0;
        }
    }
    Ok(FockDistribution {
        probabilities: p,
        n_max: dist0.n_max,
        time: t,
    })
}

/// Time step that keeps every per-step transition probability at `fraction`
/// of the allowed maximum.
pub fn stable_step(rates: &CoolingRates, gamma_m: f64, n_th: f64, n_max: usize, fraction: f64) -> f64 {
    let ladder = Ladder::new(rates, gamma_m, n_th, n_max);
    fraction * MAX_STEP_PROBABILITY / ladder.max_exit_rate()
}

/// Evolves a distribution to `t_end`, doubling the truncation on every
/// [`Error::TruncationBreach`] up to [`N_MAX_CAP`]. The initial truncation is
/// `max(50, 8 * ceil(max(<n>_0, n_ss)))` where `n_ss` is the mean-field fixed
/// point.
pub fn evolve_adaptive(
    rates: &CoolingRates,
    gamma_m: f64,
    n_th: f64,
    initial: impl Fn(usize) -> FockDistribution,
    t_end: f64,
) -> Result<FockDistribution> {
    let n_ss = (rates.a_plus + gamma_m * n_th) / (rates.gamma_opt + gamma_m);
    let probe = initial(50);
    let scale = probe.mean().max(if n_ss.is_finite() { n_ss } else { 0.0 });
    let mut n_max = (8.0 * scale.ceil()).max(50.0) as usize;
    loop {
        let n = n_max.min(N_MAX_CAP);
        let dist0 = initial(n);
        let dt = stable_step(rates, gamma_m, n_th, n, 0.9);
        match rate_equation_evolve(rates, gamma_m, n_th, &dist0, dt, t_end) {
            Err(Error::TruncationBreach { .. }) if n < N_MAX_CAP => n_max = 2 * n,
            other => return other,
        }
    }
}

/// Sampled `n̄(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> f64 {
        *self.values.last().expect("trajectory is never empty")
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "time_s,n_mean")?;
        for (t, n) in self.times.iter().zip(&self.values) {
            writeln!(w, "{t:e},{n:e}")?;
        }
        Ok(())
    }
}

/// Relaxation rate and fixed point of `dn̄/dt = (n̄+1)(A₊+γ_m n_th) - n̄(A₋+γ_m(n_th+1))`.
pub fn mean_field_parameters(rates: &CoolingRates, gamma_m: f64, n_th: f64) -> (f64, f64) {
    let rate = rates.gamma_opt + gamma_m;
    let source = rates.a_plus + gamma_m * n_th;
    (rate, source / rate)
}

/// Exact solution of the mean-phonon ODE.
pub fn mean_phonon_closed_form(rates: &CoolingRates, gamma_m: f64, n_th: f64, n0: f64, t: f64) -> f64 {
    let (rate, n_ss) = mean_field_parameters(rates, gamma_m, n_th);
    n_ss + (n0 - n_ss) * (-rate * t).exp()
}

/// Integrates the mean-phonon ODE with fixed-step RK4, `|rate| * h <= 0.01`.
pub fn mean_phonon_ode(rates: &CoolingRates, gamma_m: f64, n_th: f64, n0: f64, t_end: f64) -> Trajectory {
    let heat = rates.a_plus + gamma_m * n_th;
    let cool = rates.a_minus + gamma_m * (n_th + 1.0);
    let f = |n: f64| (n + 1.0) * heat - n * cool;
    let rate = (cool - heat).abs();
    let steps = ((t_end * rate / 0.01).ceil() as usize).max(100);
    let h = t_end / steps as f64;

    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut n = n0;
    times.push(0.0);
    values.push(n);
    for k in 1..=steps {
        let k1 = f(n);
        let k2 = f(n + 0.5 * h * k1);
        let k3 = f(n + 0.5 * h * k2);
        let k4 = f(n + h * k3);
        n += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        times.push(k as f64 * h);
        values.push(n);
    }
    Trajectory { times, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn thermal_bath_is_stationary() {
        let rates = CoolingRates::new(0.0, 0.0);
        let gamma_m = 1.0e3;
        let n_th = 3.0;
        let d0 = FockDistribution::thermal(n_th, 200);
        let dt = stable_step(&rates, gamma_m, n_th, 200, 0.5);
        let d = rate_equation_evolve(&rates, gamma_m, n_th, &d0, dt, 1.0 / gamma_m).unwrap();
        let dev = d
            .probabilities
            .iter()
            .zip(&d0.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-10, "max deviation {dev}");
    }

    #[test]
    fn single_channel_exponential_decay() {
        let a_minus = 5.0e4;
        let gamma_m = 1.0e3;
        let rates = CoolingRates::new(a_minus, 0.0);
        let d0 = FockDistribution::fock(1, 60);
        let dt = stable_step(&rates, gamma_m, 0.0, 60, 0.5);
        for t in [1e-5, 3e-5, 6e-5] {
            let d = rate_equation_evolve(&rates, gamma_m, 0.0, &d0, dt, t).unwrap();
            assert_relative_eq!(d.mean(), (-(a_minus + gamma_m) * t).exp(), max_relative = 1e-9);
        }
    }

    #[test]
    fn probability_is_conserved_per_step() {
        let rates = CoolingRates::new(8.0e4, 20.0);
        let (gamma_m, n_th) = (1256.6, 50.0);
        let mut d = FockDistribution::thermal(5.0, 300);
        let dt = stable_step(&rates, gamma_m, n_th, 300, 0.9);
        for _ in 0..200 {
            let before = d.total();
            let t_next = d.time + dt;
            d = rate_equation_evolve(&rates, gamma_m, n_th, &d, dt, t_next).unwrap();
            assert!((d.total() - before).abs() <= 1e-12);
        }
        assert!((d.total() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn oversized_step_rejected() {
        let rates = CoolingRates::new(8.0e4, 20.0);
        let d0 = FockDistribution::fock(0, 100);
        assert!(matches!(
            rate_equation_evolve(&rates, 1e3, 50.0, &d0, 1e-3, 1e-2),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn truncation_breach_detected_and_adapted() {
        let rates = CoolingRates::new(0.0, 0.0);
        let (gamma_m, n_th) = (1.0e3, 8.0);
        let d0 = FockDistribution::fock(0, 20);
        let dt = stable_step(&rates, gamma_m, n_th, 20, 0.9);
        assert!(matches!(
            rate_equation_evolve(&rates, gamma_m, n_th, &d0, dt, 5.0 / gamma_m),
            Err(Error::TruncationBreach { .. })
        ));
        let d = evolve_adaptive(&rates, gamma_m, n_th, |n| FockDistribution::fock(0, n), 2.0 / gamma_m)
            .unwrap();
        assert!(d.n_max >= 128, "n_max {}", d.n_max);
        assert!(d.tail_mass() < MAX_TAIL_MASS);
    }

    #[test]
    fn ode_fixed_point_is_constant() {
        let rates = CoolingRates::new(8.0e4, 20.0);
        let (gamma_m, n_th) = (1256.6, 50.0);
        let (_, n_ss) = mean_field_parameters(&rates, gamma_m, n_th);
        let tr = mean_phonon_ode(&rates, gamma_m, n_th, n_ss, 1e-3);
        for v in &tr.values {
            assert_relative_eq!(*v, n_ss, max_relative = 1e-12);
        }
    }

    #[test]
    fn ode_matches_closed_form() {
        let rates = CoolingRates::new(8.0e4, 20.0);
        let (gamma_m, n_th) = (1256.6, 50.0);
        let tr = mean_phonon_ode(&rates, gamma_m, n_th, 50.0, 2e-4);
        for (t, v) in tr.times.iter().zip(&tr.values) {
            let exact = mean_phonon_closed_form(&rates, gamma_m, n_th, 50.0, *t);
            assert_relative_eq!(*v, exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn ode_relaxes_to_steady_occupancy() {
        let rates = CoolingRates::new(8.0e4, 20.0);
        let (gamma_m, n_th) = (1256.6, 50.0);
        let tr = mean_phonon_ode(&rates, gamma_m, n_th, 50.0, 1e-2);
        let expected = (gamma_m * n_th + rates.a_plus) / (gamma_m + rates.gamma_opt);
        assert_relative_eq!(tr.last(), expected, max_relative = 1e-10);
    }

    #[test]
    fn trajectory_csv_layout() {
        let rates = CoolingRates::new(1.0, 0.0);
        let tr = mean_phonon_ode(&rates, 0.0, 0.0, 1.0, 1.0);
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("time_s,n_mean\n0e0,1e0\n"));
        assert_eq!(text.lines().count(), tr.times.len() + 1);
    }
}
