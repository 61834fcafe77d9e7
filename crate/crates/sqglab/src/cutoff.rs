//! Smooth compactly supported cutoff profiles.

use serde::{Deserialize, Serialize};

/// Radial cutoff profile: identically 1 on `r <= 1/2`, identically 0 on
/// `r >= 1`, smooth in between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CutoffSpec {
    /// `exp(-1/t)`-type bridge; all derivatives vanish at both ends.
    #[default]
    Bump,
    /// No cutoff at all (`g == 1` everywhere). Turns the background into an
    /// exact stationary product mode; used by the identity checks.
    One,
}

impl CutoffSpec {
    /// Evaluate at radius `r >= 0`.
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            CutoffSpec::One => 1.0,
            CutoffSpec::Bump => {
                if r <= 0.5 {
                    1.0
                } else if r >= 1.0 {
                    0.0
                } else {
                    // partition-of-unity bridge on (1/2, 1)
                    let t = (r - 0.5) * 2.0;
                    let a = bump_side(1.0 - t);
                    let b = bump_side(t);
                    a / (a + b)
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CutoffSpec::Bump => "bump",
            CutoffSpec::One => "one",
        }
    }
}

fn bump_side(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_support_and_range() {
        let g = CutoffSpec::Bump;
        assert_eq!(g.eval(0.0), 1.0);
        assert_eq!(g.eval(0.5), 1.0);
        assert_eq!(g.eval(1.0), 0.0);
        assert_eq!(g.eval(2.0), 0.0);
        for i in 0..=100 {
            let r = i as f64 / 100.0 * 1.5;
            let v = g.eval(r);
            assert!((0.0..=1.0).contains(&v), "g({r}) = {v}");
        }
        // strictly decreasing across the bridge
        let mut prev = 1.0;
        for i in 1..100 {
            let v = g.eval(0.5 + 0.005 * i as f64);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn bridge_is_smooth_at_the_seams() {
        // finite-difference derivatives stay tiny approaching r=1/2 and r=1
        let g = CutoffSpec::Bump;
        let h = 1e-4;
        let d_at = |r: f64| (g.eval(r + h) - g.eval(r - h)) / (2.0 * h);
        assert!(d_at(0.5 + 1e-6).abs() < 1e-2);
        assert!(d_at(1.0 - 1e-6).abs() < 1e-2);
    }
}
