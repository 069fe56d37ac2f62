//! Writes every figure dataset and the discrepancy ledger.
//!
//! `cargo run --release --example figures -- out_dir`

use std::path::PathBuf;

use ptcool::config::Config;
use ptcool::sweep::{discrepancy_report, run_figure, FigureId};

fn main() -> ptcool::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    let config = Config::default();
    for id in FigureId::ALL {
        let d = run_figure(id, &config)?;
        let (csv, _) = d.write_to(&dir)?;
        println!("{id}: {} rows x {} columns, {} flagged -> {}", d.rows.len(), d.columns.len(), d.flagged_rows(), csv.display());
    }
    let ledger = discrepancy_report(&FigureId::ALL, &config);
    std::fs::write(dir.join("ledger.md"), ledger.to_markdown())?;
    println!("{} ledger entries", ledger.entries.len());
    Ok(())
}
