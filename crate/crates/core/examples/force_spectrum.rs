//! Optical force spectrum for the three cavity configurations.

use ptcool::params::{Case, SystemParams};
use ptcool::spectra::{cooling_rates, force_spectrum};

fn main() -> ptcool::Result<()> {
    for case in [Case::ActivePassive, Case::SingleCavity, Case::PassivePassive] {
        let p = SystemParams::reference(case, 0.05);
        println!("{}  (kappa = {:+.3e}, J = {:.3e})", case.label(), p.kappa, p.j);
        for x in [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5] {
            let s = force_spectrum(x * p.omega_m, &p, false)?;
            println!(
                "  w = {x:+.1} w_m   S = {:+.4e}   loss {:+.4e}   aux {:+.4e}",
                s.s_tilde, s.loss_term, s.gain_term
            );
        }
        let r = cooling_rates(&p, false)?;
        println!("  A- = {:.4e}  A+ = {:.4e}  Gamma_opt = {:.4e}\n", r.a_minus, r.a_plus, r.gamma_opt);
    }
    Ok(())
}
