//! The product mode `sin(q x1) sin(q x2)` has the closed-form velocity
//! `2^(-1/2) (-sin(q x1) cos(q x2), cos(q x1) sin(q x2))`. This demo checks
//! the identity at several frequencies and prints the resolved sign
//! convention of the Riesz multiplier.

use sqglab::field::ScalarField;
use sqglab::grid::Grid;
use sqglab::spectral;

fn main() -> sqglab::Result<()> {
    let grid = Grid::new(128, std::f64::consts::TAU)?;
    println!("riesz sign convention: {:+}", spectral::riesz_sign());
    for q in [4.0f64, 8.0, 16.0] {
        let theta = ScalarField::from_fn(grid, |x, y| (q * x).sin() * (q * y).sin());
        let v = spectral::riesz_velocity(&theta)?;
        let target_x =
            ScalarField::from_fn(grid, |x, y| -(q * x).sin() * (q * y).cos() / 2f64.sqrt());
        let target_y =
            ScalarField::from_fn(grid, |x, y| (q * x).cos() * (q * y).sin() / 2f64.sqrt());
        let err = v
            .x
            .values()
            .iter()
            .zip(target_x.values())
            .chain(v.y.values().iter().zip(target_y.values()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        println!("q={q:>4}: max identity error {err:.3e}");
    }
    Ok(())
}
