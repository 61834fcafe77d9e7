//! Desk-scale regularity-loss profile: evolve a three-ring glued datum and
//! trace beta*(t), the largest Sobolev order whose summed per-ring masses
//! still fit a fixed budget. Informational; heavy (a 4096^2 grid).

use sqglab::config::preset_small;
use sqglab::experiments::loss_profile;

fn main() -> sqglab::Result<()> {
    let report = loss_profile::run_experiment(&preset_small())?;
    println!("{}", report.summary());
    if let (Some(t), Some(bs)) = (report.series.column("t"), report.series.column("beta_star")) {
        for (ti, bi) in t.iter().zip(&bs) {
            println!("  t={ti:.3}  beta*={bi:.4}");
        }
    }
    for note in &report.notes {
        println!("  note: {note}");
    }
    Ok(())
}
