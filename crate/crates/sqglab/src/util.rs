//! Small numeric helpers shared across modules.

use rayon::prelude::*;

/// Parallel sum with a fixed chunking, so the result does not depend on the
/// scheduler. Chunk partials are reduced sequentially in index order.
pub fn det_sum(values: &[f64]) -> f64 {
    det_sum_by(values, |v| v)
}

pub fn det_sum_by(values: &[f64], f: impl Fn(f64) -> f64 + Sync) -> f64 {
    const CHUNK: usize = 4096;
    let partials: Vec<f64> = values
        .par_chunks(CHUNK)
        .map(|c| c.iter().map(|&v| f(v)).sum())
        .collect();
    partials.iter().sum()
}

pub fn relative_error(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        value.abs()
    } else {
        (value - reference).abs() / reference.abs()
    }
}

/// 2x2 matrix exponential by scaling-and-squaring on the power series.
pub fn expm2(a: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let norm = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    let mut squarings = 0u32;
    let mut b = a;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
        let scale = 0.5f64.powi(squarings as i32);
        for row in b.iter_mut() {
            for v in row.iter_mut() {
                *v *= scale;
            }
        }
    }
    // exp(b) by Taylor series; ||b|| <= 0.5 so ~20 terms reach f64 accuracy
    let mut result = [[1.0, 0.0], [0.0, 1.0]];
    let mut term = [[1.0, 0.0], [0.0, 1.0]];
    for k in 1..24 {
        term = mat_mul(term, b);
        let c = 1.0 / k as f64;
        for i in 0..2 {
            for j in 0..2 {
                term[i][j] *= c;
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mat_mul(result, result);
    }
    result
}

pub fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat_vec(a: [[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

/// Counterclockwise rotation by `angle`.
pub fn rotation(angle: f64) -> [[f64; 2]; 2] {
    let (s, c) = angle.sin_cos();
    [[c, -s], [s, c]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_diagonal() {
        let m = expm2([[-0.7, 0.0], [0.0, 1.3]]);
        assert!((m[0][0] - (-0.7f64).exp()).abs() < 1e-14);
        assert!((m[1][1] - (1.3f64).exp()).abs() < 1e-14);
        assert!(m[0][1].abs() < 1e-15 && m[1][0].abs() < 1e-15);
    }

    #[test]
    fn expm_rotation_generator() {
        // exp of [[0,-t],[t,0]] is rotation by t
        let t = 0.8;
        let m = expm2([[0.0, -t], [t, 0.0]]);
        let r = rotation(t);
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j] - r[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn det_sum_matches_sequential() {
        let v: Vec<f64> = (0..100_000).map(|i| (i as f64 * 0.37).sin()).collect();
        let seq: f64 = v.iter().sum();
        assert!((det_sum(&v) - seq).abs() < 1e-9);
        // repeated calls produce an identical bit pattern
        assert_eq!(det_sum(&v).to_bits(), det_sum(&v).to_bits());
    }
}
