//! Weak coupling of nested rings: evolve the two-ring glued datum and the
//! rings separately, and measure how far the joint run drifts from the
//! superposition. Heavy (a 4096^2 grid); takes several minutes.

use sqglab::config::preset_small;
use sqglab::experiments::gluing;

fn main() -> sqglab::Result<()> {
    let report = gluing::run_experiment(&preset_small())?;
    println!("{}", report.summary());
    for check in &report.checks {
        println!(
            "  {}: {:.4} (need {}) {}",
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
