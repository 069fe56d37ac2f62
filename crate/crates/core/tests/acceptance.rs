//! One line per acceptance criterion; exits non-zero if any fails.

use ptcool::acceptance::{run_criterion, CRITERIA};

fn main() {
    let mut failed = Vec::new();
    for (id, _, _) in CRITERIA {
        let o = run_criterion(id).expect("criterion is registered");
        println!("{}", o.line());
        if !o.passed {
            failed.push(o.id);
        }
    }
    println!(
        "\nacceptance: {} passed, {} failed{}",
        CRITERIA.len() - failed.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" ({failed:?})") }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
