//! Frequency shift and optical damping from the mechanical self-energy.

use ptcool::cooling::{linspace, spring};
use ptcool::params::{Case, SystemParams};

fn main() {
    for case in [Case::ActivePassive, Case::SingleCavity, Case::PassivePassive] {
        let p = SystemParams::reference(case, 0.05);
        println!("{}", case.label());
        for d in linspace(-2.0, 0.0, 9) {
            match spring(&p.with_delta(d * p.omega_m), false) {
                Ok(s) => println!(
                    "  delta = {d:+.2} w_m   dw = {:+.4e}   Gamma_opt = {:+.4e}",
                    s.delta_omega_m, s.gamma_opt
                ),
                Err(e) => println!("  delta = {d:+.2} w_m   {e}"),
            }
        }
    }
}
