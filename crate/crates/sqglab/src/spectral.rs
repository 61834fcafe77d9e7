//! Spectral backbone: transforms, Fourier multipliers, derivatives, the
//! Riesz/Biot-Savart velocity and 2/3-rule dealiasing.

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{ScalarField, SpectralField, VectorField};
use crate::grid::Grid;
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::OnceLock;

/// Exact discrete Fourier analysis; rejects non-finite samples.
pub fn to_spectral(f: &ScalarField) -> Result<SpectralField> {
    f.check_finite()?;
    let n = f.grid().n();
    let coeffs = fft::forward(f.values(), n);
    SpectralField::from_coeffs(f.grid(), coeffs)
}

/// Exact discrete Fourier synthesis (real part).
pub fn to_physical(f: &SpectralField) -> ScalarField {
    let n = f.grid().n();
    let values = fft::inverse_real(f.coeffs(), n);
    ScalarField::from_values(f.grid(), values).expect("length preserved")
}

/// Synthesize two real fields with a single packed transform. Both inputs
/// must be Hermitian-symmetric (spectra of real data).
pub fn to_physical_pair(a: &SpectralField, b: &SpectralField) -> (ScalarField, ScalarField) {
    debug_assert_eq!(a.grid(), b.grid());
    let n = a.grid().n();
    let (va, vb) = fft::inverse_real_pair(a.coeffs(), b.coeffs(), n);
    (
        ScalarField::from_values(a.grid(), va).expect("sized"),
        ScalarField::from_values(b.grid(), vb).expect("sized"),
    )
}

/// Apply `coeff(k) -> m(k) * coeff(k)` where `m` receives integer frequencies.
/// Fails naming the first mode at which the multiplier is non-finite.
pub fn apply_multiplier(
    f: &SpectralField,
    m: impl Fn(i64, i64) -> Complex64 + Sync,
) -> Result<SpectralField> {
    let grid = f.grid();
    let n = grid.n();
    let mut out = f.clone();
    let bad: Vec<(i64, i64)> = out
        .coeffs_mut()
        .par_chunks_mut(n)
        .enumerate()
        .flat_map(|(iy, row)| {
            let ky = grid.freq_index(iy);
            let mut bad_here = Vec::new();
            for (ix, c) in row.iter_mut().enumerate() {
                let kx = grid.freq_index(ix);
                let mv = m(kx, ky);
                if !(mv.re.is_finite() && mv.im.is_finite()) {
                    bad_here.push((kx, ky));
                } else {
                    *c *= mv;
                }
            }
            bad_here
        })
        .collect();
    if let Some(&(kx, ky)) = bad.first() {
        return Err(Error::MultiplierNonFinite { kx, ky });
    }
    Ok(out)
}

/// Zero all modes with `max(|kx|, |ky|) > n/3` (2/3 rule).
pub fn dealias(f: &SpectralField) -> SpectralField {
    let grid = f.grid();
    let cutoff = grid.dealias_cutoff();
    let n = grid.n();
    let mut out = f.clone();
    out.coeffs_mut()
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(iy, row)| {
            let ky = grid.freq_index(iy);
            if ky.abs() > cutoff {
                row.fill(Complex64::default());
            } else {
                for (ix, c) in row.iter_mut().enumerate() {
                    if grid.freq_index(ix).abs() > cutoff {
                        *c = Complex64::default();
                    }
                }
            }
        });
    out
}

/// Global sign of the Riesz multiplier, fixed once by checking the velocity
/// of the product mode `sin(q x1) sin(q x2)` against its closed form
/// `2^(-1/2) (-sin cos, cos sin)`. The resolved value is recorded in
/// diagnostics headers.
pub fn riesz_sign() -> f64 {
    static SIGN: OnceLock<f64> = OnceLock::new();
    *SIGN.get_or_init(|| {
        let grid = Grid::new(32, 2.0 * std::f64::consts::PI).expect("static grid");
        let q = 4.0;
        let theta = ScalarField::from_fn(grid, |x, y| (q * x).sin() * (q * y).sin());
        let v = riesz_velocity_with_sign(&theta, 1.0).expect("finite input");
        let target =
            ScalarField::from_fn(grid, |x, y| -(q * x).sin() * (q * y).cos() / 2f64.sqrt());
        let err_plus = v
            .x
            .values()
            .iter()
            .zip(target.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let err_minus = v
            .x
            .values()
            .iter()
            .zip(target.values())
            .map(|(a, b)| (a + b).abs())
            .fold(0.0f64, f64::max);
        let sign = if err_plus <= err_minus { 1.0 } else { -1.0 };
        assert!(
            err_plus.min(err_minus) < 1e-10,
            "product-mode identity check failed: {} / {}",
            err_plus,
            err_minus
        );
        sign
    })
}

fn riesz_multipliers_with_sign(
    hat: &SpectralField,
    sign: f64,
) -> Result<(SpectralField, SpectralField)> {
    let vx_hat = apply_multiplier(hat, |kx, ky| {
        if kx == 0 && ky == 0 {
            Complex64::default()
        } else {
            let norm = ((kx * kx + ky * ky) as f64).sqrt();
            Complex64::new(0.0, sign * (-ky as f64) / norm)
        }
    })?;
    let vy_hat = apply_multiplier(hat, |kx, ky| {
        if kx == 0 && ky == 0 {
            Complex64::default()
        } else {
            let norm = ((kx * kx + ky * ky) as f64).sqrt();
            Complex64::new(0.0, sign * (kx as f64) / norm)
        }
    })?;
    Ok((vx_hat, vy_hat))
}

fn riesz_velocity_with_sign(theta: &ScalarField, sign: f64) -> Result<VectorField> {
    let hat = to_spectral(theta)?;
    let (vx_hat, vy_hat) = riesz_multipliers_with_sign(&hat, sign)?;
    VectorField::new(to_physical(&vx_hat), to_physical(&vy_hat))
}

/// Spectral coefficients of the Biot-Savart velocity (multiplier only, no
/// transforms).
pub fn riesz_velocity_spectral(hat: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    riesz_multipliers_with_sign(hat, riesz_sign())
}

/// Biot-Savart velocity from existing coefficients (one packed transform).
pub fn riesz_velocity_from_hat(hat: &SpectralField) -> Result<VectorField> {
    let (vx_hat, vy_hat) = riesz_velocity_spectral(hat)?;
    let (vx, vy) = to_physical_pair(&vx_hat, &vy_hat);
    VectorField::new(vx, vy)
}

/// Biot-Savart velocity `v = R^perp theta`, i.e. `v^(k) = i k^perp/|k| theta^(k)`
/// with `k^perp = (-k2, k1)` and the zero mode removed.
pub fn riesz_velocity(theta: &ScalarField) -> Result<VectorField> {
    riesz_velocity_with_sign(theta, riesz_sign())
}

/// Spectral gradient, exact for band-limited data.
pub fn gradient(f: &ScalarField) -> Result<VectorField> {
    let hat = to_spectral(f)?;
    gradient_spectral(&hat)
}

pub fn gradient_spectral(hat: &SpectralField) -> Result<VectorField> {
    let base = hat.grid().k_base();
    let gx = apply_multiplier(hat, |kx, _| Complex64::new(0.0, kx as f64 * base))?;
    let gy = apply_multiplier(hat, |_, ky| Complex64::new(0.0, ky as f64 * base))?;
    let (px, py) = to_physical_pair(&gx, &gy);
    VectorField::new(px, py)
}

/// Spectral divergence of a vector field.
pub fn divergence(v: &VectorField) -> Result<ScalarField> {
    let base = v.grid().k_base();
    let vx_hat = to_spectral(&v.x)?;
    let vy_hat = to_spectral(&v.y)?;
    let dx = apply_multiplier(&vx_hat, |kx, _| Complex64::new(0.0, kx as f64 * base))?;
    let dy = apply_multiplier(&vy_hat, |_, ky| Complex64::new(0.0, ky as f64 * base))?;
    let mut out = to_physical(&dx);
    out.axpy(1.0, &to_physical(&dy));
    Ok(out)
}

/// Relative spectral divergence residual, `||div v||_L2 / (|k|_max ||v||_L2)`.
pub fn divergence_residual(v: &VectorField) -> Result<f64> {
    let div = divergence(v)?;
    let n = v.grid().n() as f64;
    let kmax = v.grid().k_base() * n / 2.0;
    let vnorm = (v.x.l2_norm().powi(2) + v.y.l2_norm().powi(2)).sqrt();
    if vnorm == 0.0 {
        return Ok(0.0);
    }
    Ok(div.l2_norm() / (kmax * vnorm))
}

/// Evaluate the trigonometric interpolant at an arbitrary point (exact
/// off-grid evaluation of band-limited data). `O(n^2)` per call.
pub fn eval_at(hat: &SpectralField, x: f64, y: f64) -> f64 {
    let grid = hat.grid();
    let n = grid.n();
    let base = grid.k_base();
    let partials: Vec<Complex64> = hat
        .coeffs()
        .par_chunks(n)
        .enumerate()
        .map(|(iy, row)| {
            let ky = grid.freq_index(iy) as f64 * base;
            let mut acc = Complex64::default();
            for (ix, c) in row.iter().enumerate() {
                let kx = grid.freq_index(ix) as f64 * base;
                acc += c * Complex64::from_polar(1.0, kx * x);
            }
            acc * Complex64::from_polar(1.0, ky * y)
        })
        .collect();
    partials.iter().sum::<Complex64>().re
}

/// Point evaluator keeping only modes above a relative threshold; exact and
/// fast for effectively band-limited fields.
pub struct SparseEvaluator {
    modes: Vec<(f64, f64, Complex64)>,
}

impl SparseEvaluator {
    pub fn new(hat: &SpectralField, rel_threshold: f64) -> Self {
        let grid = hat.grid();
        let n = grid.n();
        let base = grid.k_base();
        let max = hat
            .coeffs()
            .iter()
            .fold(0.0f64, |m, c| m.max(c.norm()));
        let cut = rel_threshold * max;
        let mut modes = Vec::new();
        for iy in 0..n {
            let ky = grid.freq_index(iy) as f64 * base;
            for ix in 0..n {
                let c = hat.coeffs()[iy * n + ix];
                if c.norm() > cut {
                    modes.push((grid.freq_index(ix) as f64 * base, ky, c));
                }
            }
        }
        SparseEvaluator { modes }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.modes
            .iter()
            .map(|(kx, ky, c)| (c * Complex64::from_polar(1.0, kx * x + ky * y)).re)
            .sum()
    }
}

/// Gradient of the interpolant at a point.
pub fn eval_grad_at(hat: &SpectralField, x: f64, y: f64) -> (f64, f64) {
    let grid = hat.grid();
    let n = grid.n();
    let base = grid.k_base();
    let partials: Vec<(Complex64, Complex64)> = hat
        .coeffs()
        .par_chunks(n)
        .enumerate()
        .map(|(iy, row)| {
            let ky = grid.freq_index(iy) as f64 * base;
            let mut gx = Complex64::default();
            let mut acc = Complex64::default();
            for (ix, c) in row.iter().enumerate() {
                let kx = grid.freq_index(ix) as f64 * base;
                let term = c * Complex64::from_polar(1.0, kx * x);
                acc += term;
                gx += term * Complex64::new(0.0, kx);
            }
            let phase = Complex64::from_polar(1.0, ky * y);
            (gx * phase, acc * phase * Complex64::new(0.0, ky))
        })
        .collect();
    let gx: Complex64 = partials.iter().map(|p| p.0).sum();
    let gy: Complex64 = partials.iter().map(|p| p.1).sum();
    (gx.re, gy.re)
}

/// Radius (integer frequency) of the smallest centered square holding the
/// requested fraction of the weighted spectral mass `|k|^(2*beta) |f^|^2`.
pub fn spectral_radius(hat: &SpectralField, beta: f64, fraction: f64) -> i64 {
    let grid = hat.grid();
    let n = grid.n();
    let half = (n / 2) as i64;
    let mut mass = vec![0.0f64; half as usize + 1];
    for iy in 0..n {
        let ky = grid.freq_index(iy);
        for ix in 0..n {
            let kx = grid.freq_index(ix);
            let ring = kx.abs().max(ky.abs());
            let k2 = (kx * kx + ky * ky) as f64;
            if ring == 0 {
                continue;
            }
            let w = k2.powf(beta) * hat.coeffs()[iy * n + ix].norm_sqr();
            mass[ring as usize] += w;
        }
    }
    let total: f64 = mass.iter().sum();
    if total == 0.0 {
        return 0;
    }
    let mut acc = 0.0;
    for (r, &m) in mass.iter().enumerate() {
        acc += m;
        if acc >= fraction * total {
            return r as i64;
        }
    }
    half
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU: f64 = std::f64::consts::TAU;

    fn grid(n: usize) -> Grid {
        Grid::new(n, TAU).unwrap()
    }

    #[test]
    fn constant_mode() {
        let f = ScalarField::from_fn(grid(16), |_, _| 1.0);
        let hat = to_spectral(&f).unwrap();
        assert!((hat.mode(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let off: f64 = hat
            .coeffs()
            .iter()
            .skip(1)
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-14);
    }

    #[test]
    fn single_mode_sine() {
        // sin(x1) has coefficients -i/2 at (1,0) and +i/2 at (-1,0)
        let f = ScalarField::from_fn(grid(16), |x, _| x.sin());
        let hat = to_spectral(&f).unwrap();
        assert!((hat.mode(1, 0) - Complex64::new(0.0, -0.5)).norm() < 1e-14);
        assert!((hat.mode(-1, 0) - Complex64::new(0.0, 0.5)).norm() < 1e-14);
        assert!(hat.hermitian_residual() < 1e-14);
    }

    #[test]
    fn multiplier_identity_and_abs_k() {
        let f = ScalarField::from_fn(grid(32), |x, _| x.sin());
        let hat = to_spectral(&f).unwrap();
        let same = apply_multiplier(&hat, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(hat.coeffs(), same.coeffs());

        // |k| on sin(x1) is the identity on that mode
        let absk = apply_multiplier(&hat, |kx, ky| {
            Complex64::new(((kx * kx + ky * ky) as f64).sqrt(), 0.0)
        })
        .unwrap();
        let back = to_physical(&absk);
        let worst = back
            .values()
            .iter()
            .zip(f.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-13);
    }

    #[test]
    fn half_power_multiplier_on_sin_2x() {
        let f = ScalarField::from_fn(grid(32), |x, _| (2.0 * x).sin());
        let hat = to_spectral(&f).unwrap();
        let m = apply_multiplier(&hat, |kx, ky| {
            Complex64::new(((kx * kx + ky * ky) as f64).sqrt().sqrt(), 0.0)
        })
        .unwrap();
        let back = to_physical(&m);
        let target = ScalarField::from_fn(grid(32), |x, _| 2f64.sqrt() * (2.0 * x).sin());
        let worst = back
            .values()
            .iter()
            .zip(target.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-13);
    }

    #[test]
    fn multiplier_nonfinite_names_mode() {
        let f = ScalarField::from_fn(grid(16), |x, _| x.sin());
        let hat = to_spectral(&f).unwrap();
        let err = apply_multiplier(&hat, |kx, ky| {
            if kx == 2 && ky == -3 {
                Complex64::new(f64::NAN, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .unwrap_err();
        match err {
            Error::MultiplierNonFinite { kx, ky } => {
                assert_eq!((kx, ky), (2, -3));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn riesz_product_mode_identity() {
        for &q in &[2.0f64, 4.0] {
            let g = grid(64);
            let theta = ScalarField::from_fn(g, |x, y| (q * x).sin() * (q * y).sin());
            let v = riesz_velocity(&theta).unwrap();
            let vx = ScalarField::from_fn(g, |x, y| -(q * x).sin() * (q * y).cos() / 2f64.sqrt());
            let vy = ScalarField::from_fn(g, |x, y| (q * x).cos() * (q * y).sin() / 2f64.sqrt());
            let ex = v
                .x
                .values()
                .iter()
                .zip(vx.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            let ey = v
                .y
                .values()
                .iter()
                .zip(vy.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(ex < 1e-12 && ey < 1e-12, "q={q} ex={ex} ey={ey}");
        }
    }

    #[test]
    fn riesz_of_zero_and_single_sine() {
        let g = grid(32);
        let zero = ScalarField::zeros(g);
        let v = riesz_velocity(&zero).unwrap();
        assert_eq!(v.max_speed(), 0.0);

        // Two-mode analysis: sin(k x1) -> (0, cos(k x1)) under this convention.
        let k = 3.0;
        let theta = ScalarField::from_fn(g, |x, _| (k * x).sin());
        let v = riesz_velocity(&theta).unwrap();
        assert!(v.x.max_abs() < 1e-13);
        let target = ScalarField::from_fn(g, |x, _| (k * x).cos());
        let worst = v
            .y
            .values()
            .iter()
            .zip(target.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-13);
    }

    #[test]
    fn velocity_zero_mode_is_zero() {
        let g = grid(32);
        let theta = ScalarField::from_fn(g, |x, y| 0.7 + (x).sin() * (2.0 * y).cos());
        let v = riesz_velocity(&theta).unwrap();
        let vx_hat = to_spectral(&v.x).unwrap();
        let vy_hat = to_spectral(&v.y).unwrap();
        assert!(vx_hat.mode(0, 0).norm() < 1e-14);
        assert!(vy_hat.mode(0, 0).norm() < 1e-14);
    }

    #[test]
    fn dealias_zeroes_only_high_modes() {
        let g = grid(32); // cutoff 10
        let f = ScalarField::from_fn(g, |x, y| (12.0 * x).sin() + (10.0 * x).sin() + (y).cos());
        let hat = to_spectral(&f).unwrap();
        let cut = dealias(&hat);
        assert!(cut.mode(12, 0).norm() < 1e-15, "mode 12 should be removed");
        assert!((cut.mode(10, 0) - hat.mode(10, 0)).norm() < 1e-15);
        assert!((cut.mode(0, 1) - hat.mode(0, 1)).norm() < 1e-15);
        // retained band untouched -> retained energy unchanged
        let kept: f64 = hat
            .coeffs()
            .iter()
            .zip(cut.coeffs())
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(a, _)| a.norm_sqr())
            .sum();
        let total_cut: f64 = cut.coeffs().iter().map(|c| c.norm_sqr()).sum();
        assert!((kept - total_cut).abs() < 1e-15);
    }

    #[test]
    fn gradient_analytic() {
        let g = grid(64);
        let f = ScalarField::from_fn(g, |x, y| (3.0 * x).sin() * (5.0 * y).sin());
        let grad = gradient(&f).unwrap();
        let target = ScalarField::from_fn(g, |x, y| 3.0 * (3.0 * x).cos() * (5.0 * y).sin());
        let worst = grad
            .x
            .values()
            .iter()
            .zip(target.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-10, "max gradient error {worst}");

        let c = ScalarField::from_fn(g, |_, _| 4.2);
        let gc = gradient(&c).unwrap();
        assert!(gc.max_speed() < 1e-13);
    }

    #[test]
    fn riesz_isometry_off_mean() {
        let g = grid(64);
        let theta = ScalarField::from_fn(g, |x, y| {
            1.3 + (x).sin() + 0.4 * (3.0 * x).cos() * (2.0 * y).sin()
        });
        let v = riesz_velocity(&theta).unwrap();
        let vl2 = (v.x.l2_norm().powi(2) + v.y.l2_norm().powi(2)).sqrt();
        let mean = theta.mean();
        let mut centered = theta.clone();
        centered
            .values_mut()
            .iter_mut()
            .for_each(|v| *v -= mean);
        let tl2 = centered.l2_norm();
        assert!(
            crate::util::relative_error(vl2, tl2) < 1e-10,
            "{vl2} vs {tl2}"
        );
    }

    #[test]
    fn divergence_free() {
        let g = grid(64);
        let theta = ScalarField::from_fn(g, |x, y| (2.0 * x).sin() * (3.0 * y).cos() + (5.0 * y).sin());
        let v = riesz_velocity(&theta).unwrap();
        assert!(divergence_residual(&v).unwrap() < 1e-12);
    }
}
