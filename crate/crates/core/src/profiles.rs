//! Analytic and seeded random initial data on the torus.
//!
//! Every profile is returned band-limited to the 2/3 band; vector profiles
//! are Leray-projected so they are divergence-free to round-off.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{dealias, inverse_transform, leray_project, transform, Field, GridSpec, SpectralCoeffs};

fn finish(spec: SpectralCoeffs) -> Result<Field> {
    let mut spec = spec;
    dealias(&mut spec);
    if spec.components() > 1 {
        spec = leray_project(&spec)?;
    }
    inverse_transform(&spec)
}

/// Periodic distance from `x` to the box centre, squared.
fn dist2_to_centre(grid: &GridSpec, x: [f64; 3]) -> f64 {
    let l = grid.box_length();
    (0..grid.d())
        .map(|a| {
            let mut dx = x[a] - 0.5 * l;
            dx -= l * (dx / l).round();
            dx * dx
        })
        .sum()
}

/// `amplitude · exp(-|x - x_c|^2 / (2 width^2))` centred in the box.
pub fn gaussian(grid: &GridSpec, amplitude: f64, width: f64) -> Result<Field> {
    if !(width > 0.0) {
        return Err(Error::InvalidArgument(format!("gaussian width {width}")));
    }
    let f = Field::from_fn(*grid, 1, |_, x| amplitude * (-dist2_to_centre(grid, x) / (2.0 * width * width)).exp());
    finish(transform(&f)?)
}

/// Divergence-free vortex: the rotated gradient `(-∂_2 ψ, ∂_1 ψ, 0)` of a
/// Gaussian stream function, scaled so the peak speed is `amplitude`.
pub fn vortex(grid: &GridSpec, amplitude: f64, width: f64) -> Result<Field> {
    if grid.d() < 2 {
        return Err(Error::InvalidArgument("a vortex needs d >= 2".into()));
    }
    let psi = gaussian(grid, 1.0, width)?;
    let g = crate::spectral::gradient(&psi)?;
    let n = grid.size();
    let mut values = vec![0.0; grid.d() * n];
    for i in 0..n {
        values[i] = -g.component(1)[i];
        values[n + i] = g.component(0)[i];
    }
    let u = finish(transform(&Field::new(*grid, grid.d(), values)?)?)?;
    let peak = u.magnitude().iter().fold(0.0f64, |m, &v| m.max(v));
    Ok(if peak > 0.0 { u.scaled(amplitude / peak) } else { u })
}

/// `amplitude · cos(ξ·x)` for the integer wave vector `k`; vector fields get
/// the profile in component `component` before projection.
pub fn single_mode(grid: &GridSpec, components: usize, amplitude: f64, k: [i64; 3], component: usize) -> Result<Field> {
    if component >= components {
        return Err(Error::InvalidArgument(format!("component {component} of {components}")));
    }
    let unit = grid.xi_unit();
    let f = Field::from_fn(*grid, components, |c, x| {
        if c != component {
            return 0.0;
        }
        let phase: f64 = (0..grid.d()).map(|a| k[a] as f64 * unit * x[a]).sum();
        amplitude * phase.cos()
    });
    finish(transform(&f)?)
}

/// Seeded random field with modes `|k_i| <= kmax`, normalized to peak
/// magnitude `amplitude`. `mean_zero` removes the constant mode.
pub fn random_band_limited(
    grid: &GridSpec,
    components: usize,
    amplitude: f64,
    kmax: i64,
    seed: u64,
    mean_zero: bool,
) -> Result<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..components * grid.size()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut spec = transform(&Field::new(*grid, components, values)?)?;
    let n = grid.size();
    for (idx, c) in spec.coeffs_mut().iter_mut().enumerate() {
        let k = grid.wave_vector(idx % n);
        if k.iter().any(|ki| ki.abs() > kmax) || (mean_zero && idx % n == 0) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    let f = finish(spec)?;
    let peak = f.magnitude().iter().fold(0.0f64, |m, &v| m.max(v));
    Ok(if peak > 0.0 { f.scaled(amplitude / peak) } else { f })
}
