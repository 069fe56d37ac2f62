//! Cooling from the ground state and from the bath with the Fock-ladder rate equation.

use ptcool::cooling::final_phonon_number;
use ptcool::oracle::{evolve_adaptive, mean_phonon_closed_form, FockDistribution};
use ptcool::params::{Case, SystemParams};

fn main() -> ptcool::Result<()> {
    let p = SystemParams::reference(Case::SingleCavity, 0.05);
    let n_th = 50.0;
    let o = final_phonon_number(&p, n_th, false)?;
    let r = o.rates;
    let tau = 1.0 / (p.gamma_m + r.gamma_opt);

    for k in [1.0, 3.0, 10.0, 25.0] {
        let t = k * tau;
        let from_bath = evolve_adaptive(&r, p.gamma_m, n_th, |n| FockDistribution::thermal(n_th, n), t)?;
        let closed = mean_phonon_closed_form(&r, p.gamma_m, n_th, n_th, t);
        println!("t = {k:>4} tau   <n> = {:.6}   closed form {:.6}", from_bath.mean(), closed);
    }
    let ground = evolve_adaptive(&r, p.gamma_m, n_th, |n| FockDistribution::fock(0, n), 25.0 * tau)?;
    println!("from |0>: {:.8}   golden rule n_f = {:.8}", ground.mean(), o.n_f);
    Ok(())
}
