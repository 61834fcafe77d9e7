//! Transport under a prescribed hyperbolic (saddle) flow, compared against
//! the exact affine pushforward, with the gradient growing like exp(sigma t).

use sqglab::grid::Grid;
use sqglab::field::ScalarField;
use sqglab::solver::{run_prescribed, AffineVelocity};
use sqglab::spectral;

fn main() -> sqglab::Result<()> {
    let grid = Grid::new(256, std::f64::consts::TAU)?;
    let w = 0.16;
    let f0 = move |x: f64, y: f64| (-(x * x + y * y) / (w * w)).exp();
    let sigma = 1.0;
    let mut aff = AffineVelocity::saddle(sigma);
    aff.taper_start = 0.75;
    let t_end = 1.0;
    let (out, _analytic, sup_err) = run_prescribed(&f0, grid, aff, 0.0025, t_end)?;
    println!("saddle sigma={sigma}, t={t_end}: sup error vs pushforward {sup_err:.3e}");

    let f0_field = ScalarField::from_fn(grid, |x, y| f0(grid.min_image(x), grid.min_image(y)));
    let g0 = spectral::gradient(&f0_field)?;
    let g1 = spectral::gradient(&out.state)?;
    let growth = g1.x.max_abs().max(g1.y.max_abs()) / g0.x.max_abs().max(g0.y.max_abs());
    println!(
        "max gradient growth {growth:.4} vs exp(sigma t) = {:.4}",
        (sigma * t_end).exp()
    );
    Ok(())
}
