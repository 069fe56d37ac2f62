//! Loads a parameter file (or `$PTCOOL_CONFIG`) and reports the resolved model.
//!
//! `cargo run --example config_file -- examples/specs/pp_config.json`

use std::path::PathBuf;

use ptcool::config::load_or_default;
use ptcool::cooling::final_phonon_number;

fn main() -> ptcool::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from);
    let c = load_or_default(path.as_deref())?;
    let p = &c.params;
    println!("case {}", p.case.label());
    println!("omega_m = {:.6e} rad/s, gamma = {:.6e}, kappa = {:+.6e}, J = {:.6e}", p.omega_m, p.gamma, p.kappa, p.j);
    println!("G = {:.4e}, delta = {:.4} omega_m", p.g_lin, p.delta_bar / p.omega_m);
    println!("T = {:.4e} K, n_th = {:.4}", c.thermal.temperature, c.thermal.n_th);
    let o = final_phonon_number(p, c.thermal.n_th, c.backaction)?;
    println!("n_f = {:.5}", o.n_f);
    Ok(())
}
