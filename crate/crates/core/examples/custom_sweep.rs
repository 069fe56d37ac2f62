//! Runs a JSON sweep spec against a JSON config and prints the CSV.
//!
//! `cargo run --example custom_sweep -- examples/specs/kappa_scan.json [config.json]`

use std::path::Path;

use ptcool::config::load_or_default;
use ptcool::sweep::{run_sweep, SweepSpec};

fn main() -> ptcool::Result<()> {
    let mut args = std::env::args().skip(1);
    let spec_path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/specs/kappa_scan.json").into());
    let config_path = args.next();
    let config = load_or_default(config_path.as_deref().map(Path::new))?;

    let text = std::fs::read_to_string(&spec_path)?;
    let d = run_sweep(&SweepSpec::from_json(&text)?, &config)?;
    print!("{}", d.to_csv());
    eprintln!("{} rows, {} flagged", d.rows.len(), d.flagged_rows());
    Ok(())
}
