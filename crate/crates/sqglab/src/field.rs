//! Scalar, spectral and vector fields on a periodic grid.

use crate::error::{Error, Result};
use crate::grid::Grid;
use num_complex::Complex64;

/// Real samples of a scalar on the grid, row-major (`iy*n + ix`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(grid.n(), (values.len() as f64).sqrt() as usize));
        }
        Ok(ScalarField { grid, values })
    }

    /// Evaluate `f(x, y)` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        use rayon::prelude::*;
        let n = grid.n();
        let dx = grid.dx();
        let mut values = vec![0.0; grid.len()];
        values
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(iy, row)| {
                let y = iy as f64 * dx;
                for (ix, v) in row.iter_mut().enumerate() {
                    *v = f(ix as f64 * dx, y);
                }
            });
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.n() + ix]
    }

    pub fn check_finite(&self) -> Result<()> {
        for (i, &v) in self.values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i, value: v });
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Grid mean, i.e. the zero mode.
    pub fn mean(&self) -> f64 {
        crate::util::det_sum(&self.values) / self.values.len() as f64
    }

    /// L2 norm by quadrature, `(sum f^2 dx^2)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        let dx2 = self.grid.dx() * self.grid.dx();
        (crate::util::det_sum_by(&self.values, |v| v * v) * dx2).sqrt()
    }

    /// In-place `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &ScalarField) {
        use rayon::prelude::*;
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .par_iter_mut()
            .zip(other.values.par_iter())
            .for_each(|(a, &b)| *a += c * b);
    }

    pub fn scale(&mut self, c: f64) {
        use rayon::prelude::*;
        self.values.par_iter_mut().for_each(|a| *a *= c);
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Bilinear interpolation at a physical point, with periodic wrap.
    pub fn interp(&self, x: f64, y: f64) -> f64 {
        let n = self.grid.n();
        let dx = self.grid.dx();
        let l = self.grid.domain_length();
        let fx = (x.rem_euclid(l)) / dx;
        let fy = (y.rem_euclid(l)) / dx;
        let ix = fx.floor() as usize % n;
        let iy = fy.floor() as usize % n;
        let tx = fx - fx.floor();
        let ty = fy - fy.floor();
        let ix1 = (ix + 1) % n;
        let iy1 = (iy + 1) % n;
        let f00 = self.values[iy * n + ix];
        let f10 = self.values[iy * n + ix1];
        let f01 = self.values[iy1 * n + ix];
        let f11 = self.values[iy1 * n + ix1];
        f00 * (1.0 - tx) * (1.0 - ty) + f10 * tx * (1.0 - ty) + f01 * (1.0 - tx) * ty + f11 * tx * ty
    }

    /// Radial extent of the set `{ |f| > threshold }` measured from the origin
    /// with minimal-image distance. Returns `(r_min, r_max)`, or `None` when
    /// the field is below threshold everywhere.
    pub fn support_radii(&self, threshold: f64) -> Option<(f64, f64)> {
        let n = self.grid.n();
        let dx = self.grid.dx();
        let mut rmin = f64::INFINITY;
        let mut rmax: f64 = 0.0;
        let mut any = false;
        for iy in 0..n {
            let y = self.grid.min_image(iy as f64 * dx);
            for ix in 0..n {
                if self.values[iy * n + ix].abs() > threshold {
                    let x = self.grid.min_image(ix as f64 * dx);
                    let r = x.hypot(y);
                    rmin = rmin.min(r);
                    rmax = rmax.max(r);
                    any = true;
                }
            }
        }
        if any {
            Some((rmin, rmax))
        } else {
            None
        }
    }
}

/// Complex Fourier coefficients; `coeffs[ky_idx*n + kx_idx]` is the amplitude
/// of `exp(i(kx*x + ky*y))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(grid.n(), (coeffs.len() as f64).sqrt() as usize));
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of the mode with integer frequencies `(kx, ky)`.
    pub fn mode(&self, kx: i64, ky: i64) -> Complex64 {
        let n = self.grid.n() as i64;
        let ix = kx.rem_euclid(n) as usize;
        let iy = ky.rem_euclid(n) as usize;
        self.coeffs[iy * self.grid.n() + ix]
    }

    /// In-place `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &SpectralField) {
        use rayon::prelude::*;
        debug_assert_eq!(self.grid, other.grid);
        self.coeffs
            .par_iter_mut()
            .zip(other.coeffs.par_iter())
            .for_each(|(a, &b)| *a += c * b);
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn check_finite(&self) -> Result<()> {
        for (i, c) in self.coeffs.iter().enumerate() {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::NonFinite {
                    index: i,
                    value: c.re,
                });
            }
        }
        Ok(())
    }

    /// Max deviation from Hermitian symmetry `coeff(-k) = conj(coeff(k))`.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.grid.n();
        let mut worst: f64 = 0.0;
        for iy in 0..n {
            let jy = (n - iy) % n;
            for ix in 0..n {
                let jx = (n - ix) % n;
                let a = self.coeffs[iy * n + ix];
                let b = self.coeffs[jy * n + jx].conj();
                worst = worst.max((a - b).norm());
            }
        }
        worst
    }
}

/// Two-component velocity field.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        VectorField {
            x: ScalarField::zeros(grid),
            y: ScalarField::zeros(grid),
        }
    }

    pub fn new(x: ScalarField, y: ScalarField) -> Result<Self> {
        x.grid().same_as(&y.grid())?;
        Ok(VectorField { x, y })
    }

    pub fn grid(&self) -> Grid {
        self.x.grid()
    }

    pub fn max_speed(&self) -> f64 {
        self.x
            .values()
            .iter()
            .zip(self.y.values())
            .fold(0.0f64, |m, (&u, &v)| m.max(u.hypot(v)))
    }

    /// Bilinear interpolation of both components.
    pub fn interp(&self, x: f64, y: f64) -> (f64, f64) {
        (self.x.interp(x, y), self.y.interp(x, y))
    }
}
