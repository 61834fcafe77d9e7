//! The full norm-inflation pipeline: measure the hyperbolic strain of the
//! background, evolve background and background+perturbation in lockstep,
//! extract the perturbation, and fit its Sobolev norm growth rates against
//! beta * sigma. Takes a couple of minutes.
//!
//! Usage: cargo run --release --example saddle_inflation [small|medium]

use sqglab::config::preset_by_name;
use sqglab::experiments::inflation;

fn main() -> sqglab::Result<()> {
    let preset_name = std::env::args().nth(1).unwrap_or_else(|| "small".into());
    let preset = preset_by_name(&preset_name)?;
    let report = inflation::run_experiment(&preset)?;
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
