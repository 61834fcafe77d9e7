//! Periodic square grid descriptor and wavenumber layout.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform n-by-n grid on the periodic square `[0, L)^2`.
///
/// Sample `(ix, iy)` sits at `(ix*dx, iy*dx)` and is stored row-major at
/// `iy*n + ix`. Wavenumbers follow the usual FFT layout: integer index
/// `0..n/2, -n/2..-1`, scaled by `2*pi/L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    domain_length: f64,
}

impl Grid {
    pub fn new(n: usize, domain_length: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::BadGridSize(n));
        }
        if !(domain_length.is_finite() && domain_length > 0.0) {
            return Err(Error::BadDomainLength(domain_length));
        }
        Ok(Grid { n, domain_length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    pub fn dx(&self) -> f64 {
        self.domain_length / self.n as f64
    }

    /// Base wavenumber `2*pi/L`.
    pub fn k_base(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.domain_length
    }

    /// Signed integer frequency for storage index `i`.
    pub fn freq_index(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Physical wavenumber component for storage index `i`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.freq_index(i) as f64 * self.k_base()
    }

    /// Physical coordinates of sample `(ix, iy)`.
    pub fn point(&self, ix: usize, iy: usize) -> (f64, f64) {
        (ix as f64 * self.dx(), iy as f64 * self.dx())
    }

    /// Signed displacement with minimal-image convention, in `[-L/2, L/2)`.
    pub fn min_image(&self, d: f64) -> f64 {
        let l = self.domain_length;
        let mut d = d % l;
        if d < -0.5 * l {
            d += l;
        } else if d >= 0.5 * l {
            d -= l;
        }
        d
    }

    /// Largest integer frequency kept by the 2/3 dealiasing rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    pub fn same_as(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(self.n, other.n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(8, 1.0).is_err());
        assert!(Grid::new(48, 1.0).is_err());
        assert!(Grid::new(17, 1.0).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        assert!(Grid::new(16, f64::NAN).is_err());
        assert!(Grid::new(16, 1.0).is_ok());
    }

    #[test]
    fn wavenumber_layout() {
        let g = Grid::new(16, 2.0 * std::f64::consts::PI).unwrap();
        assert_eq!(g.freq_index(0), 0);
        assert_eq!(g.freq_index(1), 1);
        assert_eq!(g.freq_index(8), 8);
        assert_eq!(g.freq_index(9), -7);
        assert_eq!(g.freq_index(15), -1);
        assert!((g.wavenumber(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn min_image_wraps() {
        let g = Grid::new(16, 10.0).unwrap();
        assert!((g.min_image(6.0) - (-4.0)).abs() < 1e-12);
        assert!((g.min_image(-6.0) - 4.0).abs() < 1e-12);
        assert!((g.min_image(2.0) - 2.0).abs() < 1e-12);
    }
}
