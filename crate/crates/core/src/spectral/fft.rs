//! Multidimensional complex FFTs over the lattice, one axis at a time.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::{Field, GridSpec, SpectralCoeffs};
use crate::error::{Error, Result};

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> Plans {
    static CACHE: OnceLock<Mutex<HashMap<usize, Plans>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Lines per parallel task.
const LINES_PER_TASK: usize = 8;

fn fft_block(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    let d = grid.d();
    let (fwd, inv) = plans(n);
    let plan = if inverse { inv } else { fwd };
    let total = grid.size();
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        if stride == 1 {
            data.par_chunks_mut(n * LINES_PER_TASK).for_each(|chunk| plan.process(chunk));
            continue;
        }
        // gather strided lines into contiguous rows, transform, scatter back
        let lines = total / n;
        let mut buf = vec![Complex64::new(0.0, 0.0); total];
        let line_start = |l: usize| (l / stride) * stride * n + l % stride;
        buf.par_chunks_mut(n).enumerate().for_each(|(l, row)| {
            let s = line_start(l);
            for (j, v) in row.iter_mut().enumerate() {
                *v = data[s + j * stride];
            }
        });
        buf.par_chunks_mut(n * LINES_PER_TASK).for_each(|chunk| plan.process(chunk));
        for l in 0..lines {
            let s = line_start(l);
            let row = &buf[l * n..(l + 1) * n];
            for (j, v) in row.iter().enumerate() {
                data[s + j * stride] = *v;
            }
        }
    }
}

/// Forward transform, normalized by `1/n^d`.
pub fn transform(f: &Field) -> Result<SpectralCoeffs> {
    let grid = *f.grid();
    let total = grid.size();
    if f.values().len() != f.components() * total {
        return Err(Error::SizeMismatch { expected: f.components() * total, found: f.values().len() });
    }
    let scale = 1.0 / total as f64;
    let mut coeffs: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for block in coeffs.chunks_mut(total) {
        fft_block(&grid, block, false);
        block.iter_mut().for_each(|c| *c *= scale);
    }
    SpectralCoeffs::new(grid, f.components(), coeffs)
}

/// Inverse transform; the imaginary part, which is round-off for spectra of
/// real fields, is dropped.
pub fn inverse_transform(spec: &SpectralCoeffs) -> Result<Field> {
    let grid = *spec.grid();
    let total = grid.size();
    let mut work = spec.coeffs().to_vec();
    for block in work.chunks_mut(total) {
        fft_block(&grid, block, true);
    }
    Field::new(grid, spec.components(), work.into_iter().map(|c| c.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_cosine_mode() {
        let g = GridSpec::new(2, 16, 2.0 * PI).unwrap();
        let f = Field::from_fn(g, 1, |_, x| x[0].cos());
        let s = transform(&f).unwrap();
        let nonzero: Vec<usize> =
            (0..g.size()).filter(|&i| s.coeffs()[i].norm() > 1e-14).collect();
        assert_eq!(nonzero.len(), 2);
        for i in nonzero {
            let k = g.wave_vector(i);
            assert_eq!(k[0].abs(), 1);
            assert_eq!(k[1], 0);
            assert!((s.coeffs()[i].re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn three_d_round_trip() {
        let g = GridSpec::new(3, 16, 1.0).unwrap();
        let f = Field::from_fn(g, 3, |c, x| ((c + 1) as f64 * x[0] + 3.0 * x[1] * x[2]).sin());
        let back = inverse_transform(&transform(&f).unwrap()).unwrap();
        assert!(back.sub(&f).unwrap().max_abs() < 1e-13);
    }
}
