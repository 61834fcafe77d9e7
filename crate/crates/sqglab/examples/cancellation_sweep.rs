//! Self-cancellation of the oscillator transport term: sweep the inner
//! frequency and fit the decay exponents of the surviving terms.

use sqglab::config::preset_small;
use sqglab::experiments::cancellation;

fn main() -> sqglab::Result<()> {
    let report = cancellation::run_experiment(&preset_small())?;
    println!("{}", report.summary());
    for check in &report.checks {
        println!("  {}: {:.4e} ({})", check.name, check.value, check.requirement);
    }
    Ok(())
}
