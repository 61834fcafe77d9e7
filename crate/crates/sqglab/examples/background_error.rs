//! How long does the frozen cutoff arrangement describe its own evolution?
//! Evolves the background and tracks the error against the time-independent
//! pseudosolution, plus a zoomed sweep showing the error shrink with the
//! inner frequency.

use sqglab::config::preset_small;
use sqglab::experiments::background;

fn main() -> sqglab::Result<()> {
    let report = background::run_experiment(&preset_small())?;
    println!("{}", report.summary());
    for check in &report.checks {
        println!(
            "  {}: {:.4e} (need {}) {}",
            check.name,
            check.value,
            check.requirement,
            if check.pass { "ok" } else { "FAILED" }
        );
    }
    for note in &report.notes {
        println!("  note: {note}");
    }
    Ok(())
}
