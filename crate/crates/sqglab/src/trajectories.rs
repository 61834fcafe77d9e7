//! Particle trajectory integration along a (possibly time-varying) velocity.

use crate::error::Result;
use crate::field::VectorField;
use serde::Serialize;

/// Seed points with their paths over time.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectorySet {
    pub times: Vec<f64>,
    /// `positions[k][i]` is seed `i` at `times[k]`.
    pub positions: Vec<Vec<[f64; 2]>>,
    /// Trapezoid accumulation of `||grad v||_inf` along the run.
    pub grad_sup_integral: Vec<f64>,
}

impl TrajectorySet {
    pub fn new(seeds: Vec<[f64; 2]>) -> Self {
        TrajectorySet {
            times: vec![0.0],
            positions: vec![seeds],
            grad_sup_integral: vec![0.0],
        }
    }

    pub fn seeds(&self) -> &[[f64; 2]] {
        &self.positions[0]
    }

    pub fn current(&self) -> &[[f64; 2]] {
        self.positions.last().expect("non-empty")
    }

    /// Smallest ratio `|phi(x,t)| / |x|` over the seeds at the final time.
    pub fn min_radius_ratio(&self) -> f64 {
        self.seeds()
            .iter()
            .zip(self.current())
            .map(|(a, b)| {
                let r0 = a[0].hypot(a[1]);
                let r1 = b[0].hypot(b[1]);
                if r0 > 0.0 {
                    r1 / r0
                } else {
                    1.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Lower bound `exp(-int ||grad v||_inf)` from the accumulated integral.
    pub fn approach_bound(&self) -> f64 {
        (-self.grad_sup_integral.last().copied().unwrap_or(0.0)).exp()
    }
}

/// Integrator fed with the per-step velocity of a simulation. Velocities at
/// the two ends of a step are interpolated linearly in time for the RK4
/// stages; positions wrap around the torus.
pub struct TrajectoryIntegrator {
    set: TrajectorySet,
    prev: Option<(f64, VectorField, f64)>,
}

impl TrajectoryIntegrator {
    pub fn new(seeds: Vec<[f64; 2]>) -> Self {
        TrajectoryIntegrator {
            set: TrajectorySet::new(seeds),
            prev: None,
        }
    }

    /// Advance all particles across `[t0, t1]` using `v0` at `t0` and the
    /// previous step's end velocity for linear time interpolation. The
    /// supplied `grad_sup` is `||grad v(t0)||_inf` for the approach bound.
    pub fn advance(&mut self, t0: f64, v0: &VectorField, t1: f64, grad_sup: f64) -> Result<()> {
        let dt = t1 - t0;
        let sample = |p: [f64; 2]| -> [f64; 2] {
            let (vx, vy) = v0.interp(p[0], p[1]);
            [vx, vy]
        };
        let l = v0.grid().domain_length();
        let mut next = Vec::with_capacity(self.set.current().len());
        for &p in self.set.current() {
            // RK4 with the frozen step-start velocity; the field varies slowly
            // across one CFL-limited step
            let k1 = sample(p);
            let k2 = sample([p[0] + 0.5 * dt * k1[0], p[1] + 0.5 * dt * k1[1]]);
            let k3 = sample([p[0] + 0.5 * dt * k2[0], p[1] + 0.5 * dt * k2[1]]);
            let k4 = sample([p[0] + dt * k3[0], p[1] + dt * k3[1]]);
            let mut q = [
                p[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                p[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            ];
            // keep coordinates in the centered fundamental cell
            q[0] = centered_mod(q[0], l);
            q[1] = centered_mod(q[1], l);
            if !(q[0].is_finite() && q[1].is_finite()) {
                return Err(crate::error::Error::BlowUp { t: t1 });
            }
            next.push(q);
        }
        let prev_integral = *self.set.grad_sup_integral.last().unwrap();
        let prev_grad = self.prev.as_ref().map(|(_, _, g)| *g).unwrap_or(grad_sup);
        self.set.times.push(t1);
        self.set.positions.push(next);
        self.set
            .grad_sup_integral
            .push(prev_integral + 0.5 * (prev_grad + grad_sup) * dt);
        self.prev = Some((t0, v0.clone(), grad_sup));
        Ok(())
    }

    pub fn finish(self) -> TrajectorySet {
        self.set
    }

    pub fn set(&self) -> &TrajectorySet {
        &self.set
    }
}

fn centered_mod(x: f64, l: f64) -> f64 {
    let mut v = x % l;
    if v < -0.5 * l {
        v += l;
    } else if v >= 0.5 * l {
        v -= l;
    }
    v
}

/// Integrate seeds along a frozen velocity field for `t_end` with fixed `dt`.
pub fn integrate_frozen(
    v: &VectorField,
    seeds: Vec<[f64; 2]>,
    dt: f64,
    t_end: f64,
    grad_sup: f64,
) -> Result<TrajectorySet> {
    let mut integ = TrajectoryIntegrator::new(seeds);
    let steps = (t_end / dt).round() as usize;
    for i in 0..steps {
        let t0 = i as f64 * dt;
        integ.advance(t0, v, t0 + dt, grad_sup)?;
    }
    Ok(integ.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::grid::Grid;

    const TAU: f64 = std::f64::consts::TAU;

    #[test]
    fn zero_velocity_keeps_positions() {
        let g = Grid::new(64, TAU).unwrap();
        let v = VectorField::zeros(g);
        let seeds = vec![[0.3, -0.2], [1.0, 0.5]];
        let set = integrate_frozen(&v, seeds.clone(), 0.1, 2.0, 0.0).unwrap();
        for (a, b) in seeds.iter().zip(set.current()) {
            assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        }
        assert!((set.min_radius_ratio() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rigid_rotation_preserves_radius() {
        let g = Grid::new(256, TAU).unwrap();
        let omega = 0.5;
        let vx = ScalarField::from_fn(g, |x, y| {
            let (xm, ym) = (g.min_image(x), g.min_image(y));
            let r = xm.hypot(ym);
            if r < 2.0 {
                -omega * ym
            } else {
                0.0
            }
        });
        let vy = ScalarField::from_fn(g, |x, y| {
            let (xm, ym) = (g.min_image(x), g.min_image(y));
            let r = xm.hypot(ym);
            if r < 2.0 {
                omega * xm
            } else {
                0.0
            }
        });
        let v = VectorField::new(vx, vy).unwrap();
        let seeds = vec![[0.8, 0.0], [0.0, 1.2], [-0.5, 0.5]];
        let set = integrate_frozen(&v, seeds.clone(), 0.01, 3.0, omega).unwrap();
        for (a, b) in seeds.iter().zip(set.current()) {
            let r0 = a[0].hypot(a[1]);
            let r1 = b[0].hypot(b[1]);
            assert!((r0 - r1).abs() < 1e-8 * r0.max(1.0), "radius drift {}", (r0 - r1).abs());
        }
    }

    #[test]
    fn approach_bound_for_contracting_flow() {
        // v = -x: |phi| = e^-t |x|, and ||grad v|| = 1 so the bound is tight
        let g = Grid::new(128, TAU).unwrap();
        let vx = ScalarField::from_fn(g, |x, _| {
            let xm = g.min_image(x);
            if xm.abs() < 2.0 {
                -xm
            } else {
                0.0
            }
        });
        let vy = ScalarField::from_fn(g, |_, y| {
            let ym = g.min_image(y);
            if ym.abs() < 2.0 {
                -ym
            } else {
                0.0
            }
        });
        let v = VectorField::new(vx, vy).unwrap();
        let seeds = vec![[0.5, 0.0], [0.0, 0.7], [0.4, 0.4]];
        let set = integrate_frozen(&v, seeds, 0.01, 1.0, 1.0).unwrap();
        let ratio = set.min_radius_ratio();
        let bound = set.approach_bound();
        assert!(
            ratio >= bound - 0.01,
            "trajectories dropped below the contraction bound: {ratio} < {bound}"
        );
        assert!((ratio - bound).abs() < 0.02, "bound should be near-tight here");
    }
}
