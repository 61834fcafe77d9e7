//! Planned 2D complex FFTs over row-major buffers.
//!
//! Plans are cached per grid size. Rows are transformed in parallel; the
//! column pass goes through an explicit transpose so both passes run on
//! contiguous data.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone)]
struct Plan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plan_for(n: usize) -> Plan {
    static CACHE: OnceLock<Mutex<HashMap<usize, Plan>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Plan {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            }
        })
        .clone()
}

fn transform_rows(data: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    data.par_chunks_mut(n).for_each_init(
        || vec![Complex64::default(); fft.get_inplace_scratch_len()],
        |scratch, row| fft.process_with_scratch(row, scratch),
    );
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const BLOCK: usize = 64;
    dst.par_chunks_mut(n * BLOCK)
        .enumerate()
        .for_each(|(band, out)| {
            let row0 = band * BLOCK;
            let rows = BLOCK.min(n - row0);
            for jb in (0..n).step_by(BLOCK) {
                let cols = BLOCK.min(n - jb);
                for i in 0..rows {
                    for j in 0..cols {
                        out[i * n + jb + j] = src[(jb + j) * n + row0 + i];
                    }
                }
            }
        });
}

fn fft2_inplace(data: &mut Vec<Complex64>, n: usize, fft: &Arc<dyn Fft<f64>>) {
    transform_rows(data, n, fft);
    let mut tmp = vec![Complex64::default(); data.len()];
    transpose(data, &mut tmp, n);
    transform_rows(&mut tmp, n, fft);
    transpose(&tmp, data, n);
}

/// Forward DFT of real samples, normalized so the coefficient of
/// `exp(i k.x)` equals its amplitude.
pub fn forward(values: &[f64], n: usize) -> Vec<Complex64> {
    let plan = plan_for(n);
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2_inplace(&mut data, n, &plan.forward);
    let scale = 1.0 / (n * n) as f64;
    data.par_iter_mut().for_each(|c| *c *= scale);
    data
}

/// Inverse DFT; returns the real parts of the synthesis sum.
pub fn inverse_real(coeffs: &[Complex64], n: usize) -> Vec<f64> {
    let plan = plan_for(n);
    let mut data = coeffs.to_vec();
    fft2_inplace(&mut data, n, &plan.inverse);
    data.par_iter().map(|c| c.re).collect()
}

/// Inverse DFT keeping complex values (used by autocorrelation evaluators).
pub fn inverse_complex(coeffs: &[Complex64], n: usize) -> Vec<Complex64> {
    let plan = plan_for(n);
    let mut data = coeffs.to_vec();
    fft2_inplace(&mut data, n, &plan.inverse);
    data
}

/// Inverse DFT of two Hermitian-symmetric spectra in one pass: the packed
/// field `a + i b` transforms to `A + i B` with both `A`, `B` real.
pub fn inverse_real_pair(
    a: &[Complex64],
    b: &[Complex64],
    n: usize,
) -> (Vec<f64>, Vec<f64>) {
    let plan = plan_for(n);
    let mut data: Vec<Complex64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| Complex64::new(x.re - y.im, x.im + y.re))
        .collect();
    fft2_inplace(&mut data, n, &plan.inverse);
    let first = data.par_iter().map(|c| c.re).collect();
    let second = data.par_iter().map(|c| c.im).collect();
    (first, second)
}

/// Translate every row by its own offset: `out(x, y_i) = in(x - d(i), y_i)`,
/// exactly for band-limited rows (phase shift in Fourier space).
pub fn translate_rows(values: &[f64], n: usize, k_base: f64, d: impl Fn(usize) -> f64 + Sync) -> Vec<f64> {
    let plan = plan_for(n);
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    data.par_chunks_mut(n).enumerate().for_each_init(
        || vec![Complex64::default(); plan.forward.get_inplace_scratch_len()],
        |scratch, (iy, row)| {
            plan.forward.process_with_scratch(row, scratch);
            let shift = d(iy);
            for (ix, c) in row.iter_mut().enumerate() {
                let k = if ix <= n / 2 {
                    ix as f64
                } else {
                    ix as f64 - n as f64
                } * k_base;
                *c *= Complex64::from_polar(1.0 / n as f64, -k * shift);
            }
            plan.inverse.process_with_scratch(row, scratch);
        },
    );
    data.par_iter().map(|c| c.re).collect()
}

/// Column counterpart of [`translate_rows`].
pub fn translate_cols(values: &[f64], n: usize, k_base: f64, d: impl Fn(usize) -> f64 + Sync) -> Vec<f64> {
    let mut t = vec![0.0; values.len()];
    // transpose, shift rows, transpose back
    for iy in 0..n {
        for ix in 0..n {
            t[ix * n + iy] = values[iy * n + ix];
        }
    }
    let shifted = translate_rows(&t, n, k_base, d);
    let mut out = vec![0.0; values.len()];
    for iy in 0..n {
        for ix in 0..n {
            out[ix * n + iy] = shifted[iy * n + ix];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct quadratic-cost DFT used as the independent reference.
    fn naive_forward(values: &[f64], n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); n * n];
        for ky in 0..n {
            for kx in 0..n {
                let mut acc = Complex64::default();
                for iy in 0..n {
                    for ix in 0..n {
                        let phase = -2.0 * std::f64::consts::PI
                            * ((kx * ix) as f64 + (ky * iy) as f64)
                            / n as f64;
                        acc += Complex64::from_polar(values[iy * n + ix], phase);
                    }
                }
                out[ky * n + kx] = acc / (n * n) as f64;
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft_n16() {
        let n = 16;
        let values: Vec<f64> = (0..n * n)
            .map(|i| ((i * 7919 % 1031) as f64 / 1031.0 - 0.5) * 2.0)
            .collect();
        let fast = forward(&values, n);
        let slow = naive_forward(&values, n);
        let worst = fast
            .iter()
            .zip(&slow)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-13, "worst coeff error {worst}");
    }

    #[test]
    fn round_trip() {
        let n = 32;
        let values: Vec<f64> = (0..n * n)
            .map(|i| ((i * 2654435761u64 as usize) % 1000) as f64 / 500.0 - 1.0)
            .collect();
        let back = inverse_real(&forward(&values, n), n);
        let max = values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let worst = values
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-12 * max.max(1.0));
    }
}
