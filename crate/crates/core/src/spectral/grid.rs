use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform periodic lattice `[0, L)^d` with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    d: usize,
    n: usize,
    box_length: f64,
}

impl GridSpec {
    pub fn new(d: usize, n: usize, box_length: f64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidArgument(format!("dimension {d} not in 1..=3")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("n = {n} must be a power of two >= 16")));
        }
        if !(box_length > 0.0) || !box_length.is_finite() {
            return Err(Error::InvalidArgument(format!("box length {box_length} must be positive")));
        }
        if n.checked_pow(d as u32).is_none() {
            return Err(Error::InvalidArgument("mode count overflows".into()));
        }
        Ok(Self { d, n, box_length })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Number of lattice points, `n^d`.
    pub fn size(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Grid spacing `L / n`.
    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Cell volume `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    /// Frequency unit `2π / L`.
    pub fn xi_unit(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.box_length
    }

    /// Signed integer wavenumber of FFT index `i`; the Nyquist index maps to `-n/2`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Per-axis indices of a flat (row-major, last axis fastest) position.
    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        let mut rem = flat;
        for a in (0..self.d).rev() {
            idx[a] = rem % self.n;
            rem /= self.n;
        }
        idx
    }

    /// Integer wave vector of a flat position (unused axes are 0).
    pub fn wave_vector(&self, flat: usize) -> [i64; 3] {
        let idx = self.unravel(flat);
        let mut k = [0i64; 3];
        for a in 0..self.d {
            k[a] = self.wavenumber(idx[a]);
        }
        k
    }

    /// `|k|^2` as an integer.
    pub fn k_squared(&self, flat: usize) -> usize {
        let k = self.wave_vector(flat);
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as usize
    }

    /// Frequency vector `ξ = (2π/L) k`.
    pub fn xi(&self, flat: usize) -> [f64; 3] {
        let k = self.wave_vector(flat);
        let u = self.xi_unit();
        [k[0] as f64 * u, k[1] as f64 * u, k[2] as f64 * u]
    }

    /// `ξ` with Nyquist components set to zero, used for odd symbols
    /// (derivatives, Riesz transforms) so that real fields stay real.
    pub fn xi_odd(&self, flat: usize) -> [f64; 3] {
        let k = self.wave_vector(flat);
        let u = self.xi_unit();
        let nyq = -(self.n as i64) / 2;
        let mut out = [0.0; 3];
        for a in 0..self.d {
            if k[a] != nyq {
                out[a] = k[a] as f64 * u;
            }
        }
        out
    }

    /// Largest `|k|^2` on the lattice.
    pub fn max_k_squared(&self) -> usize {
        self.d * (self.n / 2) * (self.n / 2)
    }

    /// Physical coordinates of a lattice point.
    pub fn coords(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let h = self.spacing();
        [idx[0] as f64 * h, idx[1] as f64 * h, idx[2] as f64 * h]
    }

    /// Flat position of the mode with integer wave vector `k`.
    pub fn flat_of_wave_vector(&self, k: [i64; 3]) -> usize {
        let mut flat = 0;
        for &ka in k.iter().take(self.d) {
            flat = flat * self.n + ka.rem_euclid(self.n as i64) as usize;
        }
        flat
    }
}

/// Orders (α, β) of the time derivative and the fractional Laplacian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams {
    pub alpha: f64,
    pub beta: f64,
}

impl FracParams {
    /// The standing range `0 < α < 1`, `1 < β < 2`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) || !(beta > 1.0 && beta < 2.0) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < alpha < 1 and 1 < beta < 2, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Also admits the closed ends `α = 1` and `β = 2`, where the system
    /// reduces to the classical chemotaxis-Navier-Stokes model.
    pub fn with_limits(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) || !(beta > 1.0 && beta <= 2.0) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < alpha <= 1 and 1 < beta <= 2, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }
}

/// Real samples of a scalar or vector field; component blocks are stored
/// one after another, each row-major over the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    components: usize,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: GridSpec, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 || components > 5 {
            return Err(Error::Shape(format!("{components} components")));
        }
        let expected = components * grid.size();
        if values.len() != expected {
            return Err(Error::SizeMismatch { expected, found: values.len() });
        }
        Ok(Self { grid, components, values })
    }

    pub fn zeros(grid: GridSpec, components: usize) -> Self {
        Self { grid, components, values: vec![0.0; components * grid.size()] }
    }

    /// Samples `f(component, x)` at every lattice point.
    pub fn from_fn(grid: GridSpec, components: usize, f: impl Fn(usize, [f64; 3]) -> f64) -> Self {
        let n = grid.size();
        let mut values = Vec::with_capacity(components * n);
        for c in 0..components {
            for i in 0..n {
                values.push(f(c, grid.coords(i)));
            }
        }
        Self { grid, components, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn is_vector(&self) -> bool {
        self.components == self.grid.d && self.components > 1
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

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.size();
        &self.values[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.size();
        &mut self.values[c * n..(c + 1) * n]
    }

    /// Scalar field holding component `c`.
    pub fn extract(&self, c: usize) -> Field {
        Field { grid: self.grid, components: 1, values: self.component(c).to_vec() }
    }

    /// Concatenate the components of fields on one grid.
    pub fn stack(parts: &[Field]) -> Result<Field> {
        let grid = parts.first().ok_or_else(|| Error::Shape("no components".into()))?.grid;
        let mut values = Vec::with_capacity(parts.len() * grid.size());
        for p in parts {
            if p.grid != grid {
                return Err(Error::Shape("stack needs fields on one grid".into()));
            }
            values.extend_from_slice(&p.values);
        }
        let components = values.len() / grid.size();
        Field::new(grid, components, values)
    }

    /// Pointwise Euclidean magnitude over components.
    pub fn magnitude(&self) -> Vec<f64> {
        let n = self.grid.size();
        (0..n)
            .map(|i| {
                (0..self.components)
                    .map(|c| self.values[c * n + i].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// Discrete `L^p` norm `(h^d Σ |f|^p)^{1/p}` of the magnitude; `p = ∞` allowed.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let mag = self.magnitude();
        if p.is_infinite() {
            return mag.iter().fold(0.0, |m, &v| m.max(v));
        }
        let s: f64 = mag.iter().map(|v| v.powf(p)).sum();
        (s * self.grid.cell_volume()).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v * v).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Mean of each component.
    pub fn means(&self) -> Vec<f64> {
        let n = self.grid.size() as f64;
        (0..self.components)
            .map(|c| self.component(c).iter().sum::<f64>() / n)
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Field {
        Field {
            grid: self.grid,
            components: self.components,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    fn check_same(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::Shape("fields live on different grids or shapes".into()));
        }
        Ok(())
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Field { grid: self.grid, components: self.components, values })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Field { grid: self.grid, components: self.components, values })
    }

    /// Relative `L^2` distance `‖self - other‖ / ‖other‖` (absolute when `other = 0`).
    pub fn rel_l2_distance(&self, other: &Field) -> Result<f64> {
        let diff = self.sub(other)?.l2_norm();
        let base = other.l2_norm();
        Ok(if base > 0.0 { diff / base } else { diff })
    }
}

/// Normalized Fourier coefficients `F_k = (1/N) Σ_x f(x) e^{-i k·x 2π/L}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs {
    grid: GridSpec,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralCoeffs {
    pub fn new(grid: GridSpec, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = components * grid.size();
        if components == 0 || components > 5 {
            return Err(Error::Shape(format!("{components} components")));
        }
        if coeffs.len() != expected {
            return Err(Error::SizeMismatch { expected, found: coeffs.len() });
        }
        Ok(Self { grid, components, coeffs })
    }

    pub fn zeros(grid: GridSpec, components: usize) -> Self {
        Self { grid, components, coeffs: vec![Complex64::new(0.0, 0.0); components * grid.size()] }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.size();
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.size();
        &mut self.coeffs[c * n..(c + 1) * n]
    }

    pub fn extract(&self, c: usize) -> SpectralCoeffs {
        SpectralCoeffs { grid: self.grid, components: 1, coeffs: self.component(c).to_vec() }
    }

    pub fn stack(parts: &[SpectralCoeffs]) -> Result<SpectralCoeffs> {
        let grid = parts.first().ok_or_else(|| Error::Shape("no components".into()))?.grid;
        let mut coeffs = Vec::with_capacity(parts.len() * grid.size());
        for p in parts {
            if p.grid != grid {
                return Err(Error::Shape("stack needs one grid".into()));
            }
            coeffs.extend_from_slice(&p.coeffs);
        }
        let components = coeffs.len() / grid.size();
        SpectralCoeffs::new(grid, components, coeffs)
    }

    /// `sqrt(Σ |F_k|^2)`.
    pub fn l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_k |F_k - conj(F_{-k})| / max_k |F_k|`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.grid.size();
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for c in 0..self.components {
            let block = self.component(c);
            for i in 0..n {
                let k = self.grid.wave_vector(i);
                let j = self.grid.flat_of_wave_vector([-k[0], -k[1], -k[2]]);
                worst = worst.max((block[i] - block[j].conj()).norm());
            }
        }
        worst / scale
    }

    pub fn scaled(&self, s: f64) -> SpectralCoeffs {
        SpectralCoeffs {
            grid: self.grid,
            components: self.components,
            coeffs: self.coeffs.iter().map(|v| v * s).collect(),
        }
    }

    pub fn sub(&self, other: &SpectralCoeffs) -> Result<SpectralCoeffs> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::Shape("spectra of different shapes".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(SpectralCoeffs { grid: self.grid, components: self.components, coeffs })
    }

    pub fn add(&self, other: &SpectralCoeffs) -> Result<SpectralCoeffs> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::Shape("spectra of different shapes".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(SpectralCoeffs { grid: self.grid, components: self.components, coeffs })
    }
}
