//! Exact steady-state covariance of the three linear modes.

use ptcool::cooling::final_phonon_number;
use ptcool::oracle::lyapunov_steady_occupancy;
use ptcool::params::{Case, SystemParams};

fn main() {
    let n_th = 50.0;
    for case in [Case::SingleCavity, Case::PassivePassive, Case::ActivePassive] {
        let p = SystemParams::reference(case, 0.05);
        let golden = final_phonon_number(&p, n_th, false).map(|o| o.n_f);
        match lyapunov_steady_occupancy(&p, n_th) {
            Ok(c) => println!(
                "{}  <c+c> = {:.5}  <a+a> = {:.4e}  <b+b> = {:.4e}  residual {:.1e}  golden rule {:?}",
                case.label(),
                c.n_c,
                c.n_a,
                c.n_b,
                c.residual,
                golden
            ),
            Err(e) => println!("{}  {e}  (golden rule {:?})", case.label(), golden),
        }
    }
}
