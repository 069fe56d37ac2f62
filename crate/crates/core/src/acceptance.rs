//! Quantitative acceptance checks on the reference parameter set.
//!
//! Each check returns a [`CriterionOutcome`]; [`run_all`] evaluates them in
//! order. Tolerances are fixed here and never depend on user configuration.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Config;
use crate::cooling::{cooling_threshold, final_phonon_number, linspace, spring};
use crate::error::Result;
use crate::oracle::{evolve_adaptive, lyapunov_steady_occupancy, FockDistribution};
use crate::params::{occupancy_from_temperature, Case, SystemParams};
use crate::spectra::cooling_rates;
use crate::supermodes::{effective_eigenvalues, stability_check, supermode_frequencies};
use crate::sweep::figures::{run_figure, FigureId};
use crate::sweep::ledger::{discrepancy_report, room_temperature_scan};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CriterionOutcome {
    /// `PASS [ 3] name: detail (0.12 s)`
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

type Check = fn() -> (bool, String);

pub const CRITERIA: [(u8, &str, Check); 13] = [
    (1, "thermal occupancy at 293 K", thermal_occupancy),
    (2, "ground-state cooling threshold", threshold),
    (3, "single-cavity cooling limits", single_cavity_limits),
    (4, "optimal inter-cavity coupling", optimal_coupling),
    (5, "gain enhancement scaling", enhancement_scaling),
    (6, "PT transition structure", pt_transition),
    (7, "spring-effect structure", spring_structure),
    (8, "self-energy vs spectrum damping", cross_formalism),
    (9, "rate-equation oracle", rate_equation_oracle),
    (10, "covariance oracle", lyapunov_oracle),
    (11, "room-temperature ground-state claim", room_temperature),
    (12, "figure determinism", determinism),
    (13, "discrepancy ledger", ledger),
];

pub fn run_criterion(id: u8) -> Option<CriterionOutcome> {
    let (id, name, check) = CRITERIA.iter().copied().find(|(i, _, _)| *i == id)?;
    let t = Instant::now();
    let (passed, detail) = check();
    Some(CriterionOutcome {
        id,
        name,
        passed,
        detail,
        elapsed: t.elapsed(),
    })
}

pub fn run_all() -> Vec<CriterionOutcome> {
    CRITERIA
        .iter()
        .filter_map(|(id, _, _)| run_criterion(*id))
        .collect()
}

fn reference(case: Case, g: f64) -> SystemParams {
    SystemParams::reference(case, g)
        .validate()
        .expect("reference parameters are valid")
}

fn fail(e: impl std::fmt::Display) -> (bool, String) {
    (false, format!("error: {e}"))
}

pub fn thermal_occupancy() -> (bool, String) {
    let n = occupancy_from_temperature(293.0, SystemParams::REFERENCE_OMEGA_M);
    let dev = (n - 305_260.0).abs() / 305_260.0;
    (dev <= 0.005, format!("n_th = {n:.1} (rel. dev {dev:.2e}, tol 5e-3)"))
}

pub fn threshold() -> (bool, String) {
    let p = reference(Case::SingleCavity, 0.05);
    let g = cooling_threshold(p.gamma, p.gamma_m, 50.0) / p.gamma;
    ((0.043..=0.047).contains(&g), format!("G_th/gamma = {g:.5}, want [0.043, 0.047]"))
}

pub fn single_cavity_limits() -> (bool, String) {
    let strong = final_phonon_number(&reference(Case::SingleCavity, 0.05), 50.0, false);
    let weak = final_phonon_number(&reference(Case::SingleCavity, 0.015), 50.0, false);
    match (strong, weak) {
        (Ok(s), Ok(w)) => (
            (s.n_f - 0.78).abs() <= 0.05 && (7.0..=8.5).contains(&w.n_f),
            format!("n_f = {:.4} (G = 0.05 gamma, want 0.78 +/- 0.05), {:.4} (G = 0.015 gamma, want [7, 8.5])", s.n_f, w.n_f),
        ),
        (Err(e), _) | (_, Err(e)) => fail(e),
    }
}

pub fn optimal_coupling() -> (bool, String) {
    let d = match run_figure(FigureId::Fig3, &Config::default()) {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for col in &d.columns {
        let k = d.column_index(col).unwrap();
        let best = d
            .rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r[k].map(|v| (i, v)))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((i, _)) = best else {
            return (false, format!("{col}: no finite values"));
        };
        let x = d.axis_values[i];
        let step = [i.saturating_sub(1), i + 1]
            .iter()
            .filter(|&&j| j < d.axis_values.len() && j != i)
            .map(|&j| (d.axis_values[j] - x).abs())
            .fold(0.0, f64::max);
        let pass = (x - 0.5).abs() <= step && step <= 1e-3;
        ok &= pass;
        parts.push(format!("{col}: argmax J = {x:.5} gamma (step {step:.1e})"));
    }
    (ok, parts.join("; "))
}

/// `A₋(A-P) / A₋(S-C)` at the reference detuning.
pub fn enhancement_ratio(j_over_gamma: f64) -> Result<f64> {
    let sc = reference(Case::SingleCavity, 0.05);
    let ap = reference(Case::ActivePassive, 0.05);
    let a = cooling_rates(&ap.with_j(j_over_gamma * ap.gamma), false)?.a_minus;
    Ok(a / cooling_rates(&sc, false)?.a_minus)
}

pub fn enhancement_scaling() -> (bool, String) {
    let js = [0.49, 0.495, 0.498, 0.499, 0.4995, 0.4999];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &j in &js {
        match enhancement_ratio(j) {
            Ok(r) => {
                xs.push((0.25 - j * j).ln());
                ys.push(r.ln());
            }
            Err(e) => return fail(e),
        }
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let r049 = ys[0].exp();
    let r0499 = ys[3].exp();
    (
        r049 >= 5e2 && r0499 >= 1e4 && (slope + 2.0).abs() <= 0.01,
        format!("ratio {r049:.1} at J = 0.49 gamma, {r0499:.4e} at 0.499 gamma; slope {slope:.5}"),
    )
}

pub fn pt_transition() -> (bool, String) {
    let gamma = SystemParams::reference(Case::ActivePassive, 0.0).gamma;
    let mut ok = true;
    let mut worst_oracle: f64 = 0.0;
    for jg in linspace(0.0, 1.0, 1001) {
        let j = jg * gamma;
        let s = supermode_frequencies(0.0, gamma, gamma, j);
        if jg > 0.5 + 1e-9 {
            ok &= (s.omega_plus.im - s.omega_minus.im).abs() < 1e-9 * gamma;
        } else if jg < 0.5 - 1e-9 {
            ok &= (s.omega_plus.re - s.omega_minus.re).abs() < 1e-9 * gamma;
        } else {
            ok &= (s.omega_plus - s.omega_minus).norm() < 1e-9 * gamma;
        }
        // Eigenvalues are ill-conditioned right at the coalescence.
        if (jg - 0.5).abs() > 1e-3 {
            let ev = effective_eigenvalues(0.0, gamma, gamma, j);
            for w in [s.omega_plus, s.omega_minus] {
                let d = ev.iter().map(|e| (e - w).norm()).fold(f64::INFINITY, f64::min);
                worst_oracle = worst_oracle.max(d / gamma);
            }
        }
    }
    ok &= worst_oracle <= 1e-12;
    (ok, format!("1001 couplings; worst eigen-oracle deviation {worst_oracle:.2e} gamma"))
}

fn local_maxima(x: &[f64], y: &[Option<f64>]) -> Vec<(f64, f64)> {
    (1..y.len() - 1)
        .filter_map(|i| match (y[i - 1], y[i], y[i + 1]) {
            (Some(a), Some(b), Some(c)) if b > a && b >= c => Some((x[i], b)),
            _ => None,
        })
        .collect()
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > tol {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if f(c) >= f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

pub fn spring_structure() -> (bool, String) {
    let d = match run_figure(FigureId::Fig5, &Config::default()) {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    let step = 4.0 / (d.axis_values.len() - 1) as f64;
    let mut ok = true;
    let mut parts = Vec::new();
    for tag in ["ap", "sc"] {
        for g in ["0.015", "0.05"] {
            let col = d.column(&format!("gamma_opt_{tag}_g{g}")).unwrap();
            let finite = || col.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v)));
            let imax = finite().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
            let imin = finite().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
            let (xmax, xmin) = (d.axis_values[imax], d.axis_values[imin]);
            ok &= (xmax + 1.0).abs() <= step + 1e-12 && (xmin - 1.0).abs() <= step + 1e-12;
            parts.push(format!("{tag} G={g}: max at {xmax:.4}, min at {xmin:.4}"));
        }
    }
    for g in [0.015, 0.05] {
        let col = d.column(&format!("gamma_opt_pp_g{g}")).unwrap();
        let near: Vec<(f64, f64)> = local_maxima(&d.axis_values, &col)
            .into_iter()
            .filter(|(x, _)| (x + 1.0).abs() < 0.5)
            .collect();
        if near.len() != 2 {
            ok = false;
            parts.push(format!("pp G={g}: {} peaks near -omega_m", near.len()));
            continue;
        }
        let p = reference(Case::PassivePassive, g);
        let f = |x: f64| spring(&p.with_delta(x * p.omega_m), false).map_or(f64::NEG_INFINITY, |s| s.gamma_opt);
        let peaks: Vec<(f64, f64)> = near
            .iter()
            .map(|(x, _)| golden_max(f, x - step, x + step, 1e-9))
            .collect();
        let rel = (peaks[0].1 - peaks[1].1).abs() / peaks[0].1.max(peaks[1].1);
        ok &= rel <= 0.01;
        parts.push(format!(
            "pp G={g}: peaks at {:.4}, {:.4} (height mismatch {rel:.2e})",
            peaks[0].0, peaks[1].0
        ));
    }
    (ok, parts.join("; "))
}

/// Draws parameter sets with a strictly stable drift matrix.
pub fn random_stable_points(n: usize, seed: u64) -> Vec<SystemParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n && attempts < 200 * n {
        attempts += 1;
        let case = Case::ALL[rng.gen_range(0..3)];
        let mut p = SystemParams::reference(case, rng.gen_range(0.001..0.1));
        p.delta_bar = rng.gen_range(-2.0..2.0) * p.omega_m;
        p.g_lin = Complex64::from_polar(p.g_lin.re, rng.gen_range(0.0..std::f64::consts::TAU));
        match case {
            Case::ActivePassive => {
                p.kappa = rng.gen_range(0.05..1.0) * p.gamma;
                p.j = rng.gen_range(0.0..1.5) * p.gamma;
            }
            Case::PassivePassive => p.j = rng.gen_range(0.0..1.5) * p.gamma,
            Case::SingleCavity => {}
        }
        let Ok(p) = p.validate() else { continue };
        if stability_check(&p).stable {
            out.push(p);
        }
    }
    out
}

pub fn cross_formalism() -> (bool, String) {
    let pts = random_stable_points(1000, 0x5eed);
    if pts.len() < 1000 {
        return (false, format!("only {} stable points drawn", pts.len()));
    }
    let mut worst: f64 = 0.0;
    // Only the default susceptibility satisfies the identity: with the
    // mechanical back-action term, Re χ⁻¹ gains |G|² Re χ_c, which the
    // spectrum does not carry.
    for p in &pts {
        let (Ok(s), Ok(r)) = (spring(p, false), cooling_rates(p, false)) else {
            return (false, "singular point drawn".into());
        };
        let scale = r.gamma_opt.abs().max(1e-300);
        worst = worst.max((s.gamma_opt - r.gamma_opt).abs() / scale);
    }
    (worst <= 1e-10, format!("1000 stable points, worst rel. deviation {worst:.2e}"))
}

pub fn rate_equation_oracle() -> (bool, String) {
    let p = reference(Case::SingleCavity, 0.05);
    let n_th = 50.0;
    let (rates, occ) = match (cooling_rates(&p, false), final_phonon_number(&p, n_th, false)) {
        (Ok(r), Ok(o)) => (r, o),
        (Err(e), _) | (_, Err(e)) => return fail(e),
    };
    let t_end = 25.0 / (p.gamma_m + rates.gamma_opt);
    match evolve_adaptive(&rates, p.gamma_m, n_th, |n_max| FockDistribution::fock(0, n_max), t_end) {
        Ok(d) => {
            let dev = (d.mean() - occ.n_f).abs() / occ.n_f;
            (
                dev <= 0.02,
                format!(
                    "<n> = {:.5} vs n_f = {:.5} (rel. dev {dev:.2e}, n_max = {}, total prob. {:.12})",
                    d.mean(),
                    occ.n_f,
                    d.n_max,
                    d.total()
                ),
            )
        }
        Err(e) => fail(e),
    }
}

pub fn lyapunov_oracle() -> (bool, String) {
    let p = reference(Case::SingleCavity, 0.05);
    let (exact, golden) = match (lyapunov_steady_occupancy(&p, 50.0), final_phonon_number(&p, 50.0, false)) {
        (Ok(s), Ok(o)) => (s.n_c, o.n_f),
        (Err(e), _) | (_, Err(e)) => return fail(e),
    };
    let dev = (exact - golden).abs() / golden;
    let ap = reference(Case::ActivePassive, 0.05);
    let ap_note = match lyapunov_steady_occupancy(&ap, 50.0) {
        Ok(s) => format!("A-P exact {:.4}", s.n_c),
        Err(e) => format!("A-P near transition: {e}"),
    };
    (
        dev <= 0.10,
        format!("S-C exact {exact:.5} vs golden-rule {golden:.5} (rel. dev {dev:.3}); {ap_note} (not gated)"),
    )
}

pub fn room_temperature() -> (bool, String) {
    let p = reference(Case::ActivePassive, 0.05);
    let n_th = occupancy_from_temperature(293.0, p.omega_m);
    let scan = room_temperature_scan(&p, n_th, 0.05);
    let best = scan.best();
    let detail = match best {
        Some(b) => format!(
            "{} couplings scanned; best n_f,min = {:.4} at J = {:.6} gamma (stable: {}, perturbative: {})",
            scan.points.len(),
            b.n_f_min.unwrap(),
            b.j_over_gamma,
            b.stable,
            b.perturbative
        ),
        None => "no coupling admits a steady state".into(),
    };
    match scan.ground_state() {
        Some(g) => (true, format!("n_f,min < 1 at J = {:.6} gamma; {detail}", g.j_over_gamma)),
        None => (false, detail),
    }
}

pub fn determinism() -> (bool, String) {
    let c = Config::default();
    match (run_figure(FigureId::Fig3, &c), run_figure(FigureId::Fig3, &c)) {
        (Ok(a), Ok(b)) => {
            let (x, y) = (a.to_csv(), b.to_csv());
            (x == y, format!("two fig3 runs, {} bytes each, identical: {}", x.len(), x == y))
        }
        (Err(e), _) | (_, Err(e)) => fail(e),
    }
}

pub fn ledger() -> (bool, String) {
    let l = discrepancy_report(&[FigureId::Fig6b], &Config::default());
    let md = l.to_markdown();
    let ok = !l.is_empty() && md.contains("62.9 mK") && md.contains("31.2 mK");
    (ok, format!("{} entries; temperature entry present: {}", l.entries.len(), ok))
}
