//! Hyperbolic stagnation point tracking.
//!
//! Locates a velocity zero near an expected position by damped 2D Newton on
//! the spectrally evaluated velocity (exact off-grid interpolation), with the
//! Jacobian from the analytic spectral gradient. Accumulates the deformation
//! matrix `A(t) = int grad v(saddle(s)) ds` by trapezoid.

use crate::error::{Error, Result};
use crate::field::{SpectralField, VectorField};
use crate::spectral;
use serde::Serialize;

/// Spectral view of a velocity field for point-accurate evaluation.
pub struct SpectralVelocity {
    pub vx: SpectralField,
    pub vy: SpectralField,
}

impl SpectralVelocity {
    pub fn of(v: &VectorField) -> Result<Self> {
        Ok(SpectralVelocity {
            vx: spectral::to_spectral(&v.x)?,
            vy: spectral::to_spectral(&v.y)?,
        })
    }

    /// Velocity coefficients straight from the scalar's coefficients
    /// (Riesz multipliers; no transforms).
    pub fn from_theta_hat(hat: &SpectralField) -> Result<Self> {
        let (vx, vy) = spectral::riesz_velocity_spectral(hat)?;
        Ok(SpectralVelocity { vx, vy })
    }

    pub fn value(&self, p: [f64; 2]) -> [f64; 2] {
        [
            spectral::eval_at(&self.vx, p[0], p[1]),
            spectral::eval_at(&self.vy, p[0], p[1]),
        ]
    }

    /// `[[d1 v1, d2 v1], [d1 v2, d2 v2]]` at a point.
    pub fn grad(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        let (a, b) = spectral::eval_grad_at(&self.vx, p[0], p[1]);
        let (c, d) = spectral::eval_grad_at(&self.vy, p[0], p[1]);
        [[a, b], [c, d]]
    }
}

/// One located saddle with its gradient.
#[derive(Debug, Clone, Serialize)]
pub struct SaddleSample {
    pub t: f64,
    pub position: [f64; 2],
    pub grad: [[f64; 2]; 2],
}

impl SaddleSample {
    /// Hyperbolic strain `(|d1v1| + |d2v2|)/2`.
    pub fn strength(&self) -> f64 {
        0.5 * (self.grad[0][0].abs() + self.grad[1][1].abs())
    }

    pub fn offdiag_ratio(&self) -> f64 {
        let diag = self.grad[0][0].abs().max(self.grad[1][1].abs());
        let off = self.grad[0][1].abs().max(self.grad[1][0].abs());
        if diag == 0.0 {
            f64::INFINITY
        } else {
            off / diag
        }
    }
}

/// Damped Newton for `v = 0` from `guess`, constrained to stay within
/// `radius` of it. Tolerance `1e-10 * L` on the position update.
pub fn find_stagnation_point(
    sv: &SpectralVelocity,
    guess: [f64; 2],
    radius: f64,
    t: f64,
) -> Result<[f64; 2]> {
    let l = sv.vx.grid().domain_length();
    let tol = 1e-10 * l;
    let mut p = guess;
    let mut fv = sv.value(p);
    let mut fnorm = fv[0].hypot(fv[1]);
    for _ in 0..60 {
        let j = sv.grad(p);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return Err(Error::SaddleLost { t, radius });
        }
        let step = [
            -(j[1][1] * fv[0] - j[0][1] * fv[1]) / det,
            -(-j[1][0] * fv[0] + j[0][0] * fv[1]) / det,
        ];
        let step_len = step[0].hypot(step[1]);
        let mut damp = 1.0f64;
        let mut advanced = false;
        while damp >= 1.0 / 256.0 {
            let q = [p[0] + damp * step[0], p[1] + damp * step[1]];
            if (q[0] - guess[0]).hypot(q[1] - guess[1]) <= radius {
                let fq = sv.value(q);
                let fq_norm = fq[0].hypot(fq[1]);
                if fq_norm < fnorm || damp <= 1.0 / 256.0 {
                    p = q;
                    fv = fq;
                    fnorm = fq_norm;
                    advanced = true;
                    break;
                }
            }
            damp *= 0.5;
        }
        if !advanced {
            return Err(Error::SaddleLost { t, radius });
        }
        if step_len * damp < tol {
            return Ok(p);
        }
    }
    // accept a stagnant iterate only if the residual is tiny relative to the
    // local strain
    let j = sv.grad(p);
    let strain = j[0][0].abs().max(j[1][1].abs()).max(1e-300);
    if fnorm < 1e-8 * strain * l {
        Ok(p)
    } else {
        Err(Error::SaddleLost { t, radius })
    }
}

/// Deformation-matrix accumulator along a run.
#[derive(Debug, Clone, Serialize)]
pub struct SaddleTrack {
    pub samples: Vec<SaddleSample>,
    pub a_accum: [[f64; 2]; 2],
    /// Set when tracking stopped before the run ended.
    pub lost_at: Option<f64>,
    pub search_radius: f64,
    home: [f64; 2],
}

impl SaddleTrack {
    pub fn new(home: [f64; 2], search_radius: f64) -> Self {
        SaddleTrack {
            samples: Vec::new(),
            a_accum: [[0.0; 2]; 2],
            lost_at: None,
            search_radius,
            home,
        }
    }

    /// Locate the saddle in the current velocity and accumulate `A(t)`.
    pub fn observe(&mut self, t: f64, v: &VectorField) -> Result<()> {
        if self.lost_at.is_some() {
            return Ok(());
        }
        let sv = SpectralVelocity::of(v)?;
        self.observe_spectral(t, &sv)
    }

    /// Same, from velocity coefficients already in hand.
    pub fn observe_spectral(&mut self, t: f64, sv: &SpectralVelocity) -> Result<()> {
        if self.lost_at.is_some() {
            return Ok(());
        }
        let guess = self
            .samples
            .last()
            .map(|s| s.position)
            .unwrap_or(self.home);
        match find_stagnation_point(sv, guess, self.search_radius, t) {
            Ok(p) => {
                let drift = (p[0] - self.home[0]).hypot(p[1] - self.home[1]);
                if drift > self.search_radius {
                    self.lost_at = Some(t);
                    return Ok(());
                }
                let g = sv.grad(p);
                if let Some(prev) = self.samples.last() {
                    let dt = t - prev.t;
                    for i in 0..2 {
                        for j in 0..2 {
                            self.a_accum[i][j] += 0.5 * (prev.grad[i][j] + g[i][j]) * dt;
                        }
                    }
                }
                self.samples.push(SaddleSample {
                    t,
                    position: p,
                    grad: g,
                });
            }
            Err(_) => {
                self.lost_at = Some(t);
            }
        }
        Ok(())
    }

    pub fn last_strength(&self) -> Option<f64> {
        self.samples.last().map(|s| s.strength())
    }

    /// Off-diagonal vs diagonal ratio of the accumulated deformation.
    pub fn accum_offdiag_ratio(&self) -> f64 {
        let diag = self.a_accum[0][0].abs().max(self.a_accum[1][1].abs());
        let off = self.a_accum[0][1].abs().max(self.a_accum[1][0].abs());
        if diag == 0.0 {
            0.0
        } else {
            off / diag
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{raw_oscillator, BackgroundParams};
    use crate::cutoff::CutoffSpec;
    use crate::grid::Grid;

    const TAU: f64 = std::f64::consts::TAU;

    #[test]
    fn exact_saddle_of_constant_cutoff_piece() {
        let grid = Grid::new(512, TAU).unwrap();
        let p = BackgroundParams::new(1.7, 1.0, 4, 32.0, grid).unwrap();
        let z = p.center_offset();
        let theta = raw_oscillator(
            grid,
            &CutoffSpec::One,
            p.lambda,
            p.osc,
            p.amplitude(),
            z,
            true,
        );
        let v = crate::spectral::riesz_velocity(&theta).unwrap();
        let sv = SpectralVelocity::of(&v).unwrap();
        let found =
            find_stagnation_point(&sv, [z[0] + 0.005, 0.003], 0.05, 0.0).unwrap();
        assert!(
            (found[0] - z[0]).hypot(found[1]) < 1e-9,
            "saddle should sit at the piece center, found {found:?}"
        );
        let g = sv.grad(found);
        let sigma = p.saddle_strength();
        assert!(
            crate::util::relative_error(-g[0][0], sigma) < 1e-7,
            "d1v1 {} vs {}",
            g[0][0],
            -sigma
        );
        assert!(crate::util::relative_error(g[1][1], sigma) < 1e-7);
        assert!(g[0][1].abs() < 1e-9 * sigma && g[1][0].abs() < 1e-9 * sigma);
    }

    #[test]
    fn no_saddle_in_rotationally_symmetric_field() {
        let grid = Grid::new(128, TAU).unwrap();
        let theta = crate::field::ScalarField::from_fn(grid, |x, y| {
            let (xm, ym) = (grid.min_image(x), grid.min_image(y));
            (-3.0 * (xm * xm + ym * ym)).exp()
        });
        let v = crate::spectral::riesz_velocity(&theta).unwrap();
        let sv = SpectralVelocity::of(&v).unwrap();
        let result = find_stagnation_point(&sv, [0.4, 0.0], 0.1, 0.0);
        assert!(
            result.is_err(),
            "radial vortex has no stagnation point at r=0.4"
        );
    }

    #[test]
    fn track_accumulates_diagonal_deformation() {
        let grid = Grid::new(512, TAU).unwrap();
        let p = BackgroundParams::new(1.7, 1.0, 4, 32.0, grid).unwrap();
        let z = p.center_offset();
        let theta = raw_oscillator(
            grid,
            &CutoffSpec::One,
            p.lambda,
            p.osc,
            p.amplitude(),
            z,
            true,
        );
        let v = crate::spectral::riesz_velocity(&theta).unwrap();
        let mut track = SaddleTrack::new(z, 0.05);
        for i in 0..=4 {
            track.observe(i as f64 * 0.25, &v).unwrap();
        }
        assert!(track.lost_at.is_none());
        let sigma = p.saddle_strength();
        // A(1) = diag(-sigma, sigma) for the frozen exact field
        assert!(crate::util::relative_error(-track.a_accum[0][0], sigma) < 1e-7);
        assert!(crate::util::relative_error(track.a_accum[1][1], sigma) < 1e-7);
        assert!(track.accum_offdiag_ratio() < 1e-8);
    }
}
