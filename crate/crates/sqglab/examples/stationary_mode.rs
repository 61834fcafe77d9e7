//! The product mode is a steady state of the SQG flow: its velocity runs
//! along the level sets, so the transport term cancels identically. Evolve
//! it for a unit of time and watch nothing happen.

use sqglab::field::ScalarField;
use sqglab::grid::Grid;
use sqglab::solver::{run, SolverConfig, VelocityMode};

fn main() -> sqglab::Result<()> {
    let grid = Grid::new(128, std::f64::consts::TAU)?;
    let q = 8.0;
    let theta0 = ScalarField::from_fn(grid, |x, y| (q * x).sin() * (q * y).sin());
    let config = SolverConfig::new(0.02, 1.0, VelocityMode::Sqg);
    let out = run(&theta0, &config)?;
    let l2_drift = (out.state.l2_norm() - theta0.l2_norm()).abs() / theta0.l2_norm();
    let sup_drift = out
        .state
        .values()
        .iter()
        .zip(theta0.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("evolved sin({q}x1)sin({q}x2) to t={}", out.t);
    println!("relative L2 drift:  {l2_drift:.3e}");
    println!("pointwise sup drift: {sup_drift:.3e}");
    Ok(())
}
