//! Near-origin decay of P-fold symmetric data: the velocity of a P-fold
//! field with zero circular means decays like r^(P-1), and the 1-fold case
//! shows the bound is sharp.

use sqglab::config::preset_small;
use sqglab::experiments::decay;

fn main() -> sqglab::Result<()> {
    let report = decay::run_experiment(&preset_small())?;
    println!("{}", report.summary());
    for fit in &report.fits {
        println!("  {}: slope {:.3} (r2 {:.4})", fit.name, fit.slope, fit.r2);
    }
    for note in &report.notes {
        println!("  {note}");
    }
    Ok(())
}
