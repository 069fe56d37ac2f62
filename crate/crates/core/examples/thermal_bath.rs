//! Bath temperature versus mean phonon occupancy at 20 MHz.

use ptcool::cooling::cooling_threshold;
use ptcool::params::{occupancy_from_temperature, temperature_from_occupancy, SystemParams};

fn main() {
    let w = SystemParams::REFERENCE_OMEGA_M;
    for t in [0.001, 0.0312, 0.063, 1.0, 4.2, 77.0, 293.0] {
        let n = occupancy_from_temperature(t, w);
        println!("T = {t:>8.4} K  ->  n_th = {n:>12.4}");
    }
    for n in [1.0, 32.0, 65.0, 305_256.0] {
        println!("n_th = {n:>10}  ->  T = {:.4e} K", temperature_from_occupancy(n, w));
    }

    let p = SystemParams::reference(ptcool::params::Case::SingleCavity, 0.05);
    let g_th = cooling_threshold(p.gamma, p.gamma_m, 50.0);
    println!("coupling needed for n_f = 1 at n_th = 50: G = {:.5} gamma", g_th / p.gamma);
}
