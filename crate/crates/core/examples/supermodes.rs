//! Supermode frequencies across the symmetry-breaking point, and drift stability.

use ptcool::params::{Case, SystemParams};
use ptcool::supermodes::{stability_check, supermode_frequencies, transition_point};

fn main() {
    let p = SystemParams::reference(Case::ActivePassive, 0.05);
    let jt = transition_point(p.kappa, p.gamma);
    println!("transition at J = {:.4} gamma", jt / p.gamma);

    for x in [0.1, 0.3, 0.45, 0.5, 0.55, 0.8, 1.0] {
        let s = supermode_frequencies(0.0, p.kappa, p.gamma, x * p.gamma);
        let stab = stability_check(&p.with_j(x * p.gamma));
        println!(
            "J = {x:.2} gamma  {:?}  w+ = {:+.4e}{:+.4e}i  w- = {:+.4e}{:+.4e}i  margin {:+.3e}",
            s.regime,
            s.omega_plus.re,
            s.omega_plus.im,
            s.omega_minus.re,
            s.omega_minus.im,
            stab.margin
        );
    }
}
