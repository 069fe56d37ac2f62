//! Steady-state phonon number and its optimum over detuning.

use ptcool::cooling::{final_phonon_number, linspace, min_occupancy_over_detuning};
use ptcool::params::{Case, SystemParams};

fn main() -> ptcool::Result<()> {
    let n_th = 50.0;
    for g in [0.015, 0.05] {
        for case in [Case::ActivePassive, Case::SingleCavity, Case::PassivePassive] {
            let p = SystemParams::reference(case, g);
            let o = final_phonon_number(&p, n_th, false)?;
            let grid = linspace(-2.0 * p.omega_m, 0.0, 1001);
            let best = min_occupancy_over_detuning(&p, n_th, &grid)?;
            println!(
                "G = {g:.3} gamma  {}  n_f(-w_m) = {:.4} (classical {:.4}, quantum {:.4}, stable {})  min {:.4} at {:+.4} w_m",
                case.label(),
                o.n_f,
                o.n_f_classical,
                o.n_f_quantum,
                o.stability.stable,
                best.n_f_min,
                best.delta_star / p.omega_m
            );
        }
    }
    Ok(())
}
