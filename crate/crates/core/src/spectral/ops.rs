//! Fourier multipliers and the differential operators built from them.

use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::{inverse_transform, transform};
use super::grid::{Field, GridSpec, SpectralCoeffs};
use crate::error::{Error, Result};

/// What a multiplier does to the `ξ = 0` coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroModePolicy {
    /// Set the mean to zero.
    Zero,
    /// Leave the mean unchanged.
    Identity,
    /// Multiply the mean by a fixed value.
    Value(Complex64),
}

type SymbolResult<T> = std::result::Result<T, String>;

/// Symbol of a Fourier multiplier, evaluated at lattice frequencies only.
pub enum Symbol<'a> {
    /// `σ(ξ)` from the frequency vector (length `d`).
    Scalar(Box<dyn Fn(&[f64]) -> SymbolResult<Complex64> + Sync + 'a>),
    /// `σ(|ξ|)`; evaluated once per distinct `|k|^2`.
    Radial(Box<dyn Fn(f64) -> SymbolResult<f64> + Sync + 'a>),
    /// `d × d` matrix `σ_{jk}(ξ)` in row-major order, for vector fields.
    Matrix(Box<dyn Fn(&[f64]) -> SymbolResult<Vec<Complex64>> + Sync + 'a>),
}

pub struct MultiplierSpec<'a> {
    pub symbol: Symbol<'a>,
    pub zero_mode: ZeroModePolicy,
}

impl<'a> MultiplierSpec<'a> {
    pub fn scalar(f: impl Fn(&[f64]) -> SymbolResult<Complex64> + Sync + 'a, zero_mode: ZeroModePolicy) -> Self {
        Self { symbol: Symbol::Scalar(Box::new(f)), zero_mode }
    }

    pub fn radial(f: impl Fn(f64) -> SymbolResult<f64> + Sync + 'a, zero_mode: ZeroModePolicy) -> Self {
        Self { symbol: Symbol::Radial(Box::new(f)), zero_mode }
    }

    pub fn matrix(f: impl Fn(&[f64]) -> SymbolResult<Vec<Complex64>> + Sync + 'a, zero_mode: ZeroModePolicy) -> Self {
        Self { symbol: Symbol::Matrix(Box::new(f)), zero_mode }
    }
}

fn zero_mode_factor(policy: ZeroModePolicy) -> Complex64 {
    match policy {
        ZeroModePolicy::Zero => Complex64::new(0.0, 0.0),
        ZeroModePolicy::Identity => Complex64::new(1.0, 0.0),
        ZeroModePolicy::Value(v) => v,
    }
}

/// Values of a radial symbol indexed by `|k|^2`, computed for the distinct
/// squared lengths present on the grid.
pub fn radial_table(
    grid: &GridSpec,
    f: &(dyn Fn(f64) -> SymbolResult<f64> + Sync),
) -> Result<Vec<f64>> {
    let max = grid.max_k_squared();
    let mut present = vec![false; max + 1];
    for i in 0..grid.size() {
        present[grid.k_squared(i)] = true;
    }
    let unit = grid.xi_unit();
    let values: Vec<Result<f64>> = (0..=max)
        .into_par_iter()
        .map(|k2| {
            if k2 == 0 || !present[k2] {
                return Ok(0.0);
            }
            let r = unit * (k2 as f64).sqrt();
            f(r).map_err(|message| Error::Symbol { freq: vec![r], message })
        })
        .collect();
    values.into_iter().collect()
}

/// Multiply each coefficient by a radial table entry; the zero mode follows `policy`.
pub(crate) fn apply_radial_table(spec: &SpectralCoeffs, table: &[f64], policy: ZeroModePolicy) -> SpectralCoeffs {
    let grid = *spec.grid();
    let n = grid.size();
    let z = zero_mode_factor(policy);
    let mut out = spec.clone();
    out.coeffs_mut().par_iter_mut().enumerate().for_each(|(idx, c)| {
        let i = idx % n;
        if i == 0 {
            *c *= z;
        } else {
            *c *= table[grid.k_squared(i)];
        }
    });
    out
}

/// `σ(D) F`: pointwise product in frequency space.
pub fn apply_multiplier(spec: &SpectralCoeffs, m: &MultiplierSpec<'_>) -> Result<SpectralCoeffs> {
    let grid = *spec.grid();
    let d = grid.d();
    let n = grid.size();
    let z = zero_mode_factor(m.zero_mode);
    match &m.symbol {
        Symbol::Radial(f) => {
            let table = radial_table(&grid, f.as_ref())?;
            Ok(apply_radial_table(spec, &table, m.zero_mode))
        }
        Symbol::Scalar(f) => {
            let sym: Vec<Result<Complex64>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    if i == 0 {
                        return Ok(z);
                    }
                    let xi = grid.xi(i);
                    f(&xi[..d]).map_err(|message| Error::Symbol { freq: xi[..d].to_vec(), message })
                })
                .collect();
            let sym: Vec<Complex64> = sym.into_iter().collect::<Result<_>>()?;
            let mut out = spec.clone();
            for c in 0..spec.components() {
                out.component_mut(c).iter_mut().zip(&sym).for_each(|(v, s)| *v *= s);
            }
            Ok(out)
        }
        Symbol::Matrix(f) => {
            if spec.components() != d {
                return Err(Error::Shape(format!(
                    "matrix symbol needs a {d}-component field, got {}",
                    spec.components()
                )));
            }
            let mut out = SpectralCoeffs::zeros(grid, d);
            let results: Vec<Result<Vec<Complex64>>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    if i == 0 {
                        return Ok((0..d).map(|c| z * spec.component(c)[0]).collect());
                    }
                    let xi = grid.xi(i);
                    let m = f(&xi[..d])
                        .map_err(|message| Error::Symbol { freq: xi[..d].to_vec(), message })?;
                    if m.len() != d * d {
                        return Err(Error::Symbol {
                            freq: xi[..d].to_vec(),
                            message: format!("matrix symbol returned {} entries", m.len()),
                        });
                    }
                    Ok((0..d)
                        .map(|r| (0..d).map(|c| m[r * d + c] * spec.component(c)[i]).sum())
                        .collect())
                })
                .collect();
            for (i, r) in results.into_iter().enumerate() {
                for (c, v) in r?.into_iter().enumerate() {
                    out.component_mut(c)[i] = v;
                }
            }
            Ok(out)
        }
    }
}

/// `(-Δ)^{order/2}` on spectra. Negative orders require [`ZeroModePolicy::Zero`].
pub fn frac_laplacian_spec(spec: &SpectralCoeffs, order: f64, policy: ZeroModePolicy) -> Result<SpectralCoeffs> {
    if order < 0.0 && policy != ZeroModePolicy::Zero {
        return Err(Error::ZeroModePolicy);
    }
    if order == 0.0 {
        return Ok(apply_radial_table(spec, &vec![1.0; spec.grid().max_k_squared() + 1], policy));
    }
    let m = MultiplierSpec::radial(move |r| Ok(r.powf(order)), policy);
    apply_multiplier(spec, &m)
}

pub fn frac_laplacian(f: &Field, order: f64, policy: ZeroModePolicy) -> Result<Field> {
    inverse_transform(&frac_laplacian_spec(&transform(f)?, order, policy)?)
}

/// `∂_j` on spectra: multiply by `i ξ_j` (Nyquist components dropped).
pub fn partial_spec(spec: &SpectralCoeffs, axis: usize) -> Result<SpectralCoeffs> {
    let grid = *spec.grid();
    if axis >= grid.d() {
        return Err(Error::Shape(format!("axis {axis} on a {}-d grid", grid.d())));
    }
    let n = grid.size();
    let mut out = spec.clone();
    out.coeffs_mut().par_iter_mut().enumerate().for_each(|(idx, c)| {
        let xi = grid.xi_odd(idx % n)[axis];
        *c *= Complex64::new(0.0, xi);
    });
    Ok(out)
}

pub fn gradient_spec(spec: &SpectralCoeffs) -> Result<SpectralCoeffs> {
    if spec.components() != 1 {
        return Err(Error::Shape("gradient of a non-scalar field".into()));
    }
    let parts = (0..spec.grid().d())
        .map(|a| partial_spec(spec, a))
        .collect::<Result<Vec<_>>>()?;
    SpectralCoeffs::stack(&parts)
}

pub fn divergence_spec(spec: &SpectralCoeffs) -> Result<SpectralCoeffs> {
    let d = spec.grid().d();
    if spec.components() != d {
        return Err(Error::Shape(format!("divergence needs {d} components, got {}", spec.components())));
    }
    let mut acc = SpectralCoeffs::zeros(*spec.grid(), 1);
    for a in 0..d {
        acc = acc.add(&partial_spec(&spec.extract(a), a)?)?;
    }
    Ok(acc)
}

pub fn gradient(f: &Field) -> Result<Field> {
    inverse_transform(&gradient_spec(&transform(f)?)?)
}

pub fn divergence(f: &Field) -> Result<Field> {
    inverse_transform(&divergence_spec(&transform(f)?)?)
}

/// Zero every mode with some `|k_i| >= n/3` (2/3 rule).
pub fn dealias(spec: &mut SpectralCoeffs) {
    let grid = *spec.grid();
    let n = grid.size();
    let cut = grid.n() as i64 / 3;
    spec.coeffs_mut().par_iter_mut().enumerate().for_each(|(idx, c)| {
        let k = grid.wave_vector(idx % n);
        if k.iter().any(|&ki| ki.abs() > cut) {
            *c = Complex64::new(0.0, 0.0);
        }
    });
}

/// True when every mode outside the 2/3 band is already zero.
pub fn is_dealiased(spec: &SpectralCoeffs) -> bool {
    let mut s = spec.clone();
    dealias(&mut s);
    s == *spec
}

/// Spectrum of the pointwise product `a_i b_j` for all component pairs,
/// dealiased; component `i * b.components() + j`.
pub fn product_spec(a: &Field, b: &Field) -> Result<SpectralCoeffs> {
    if a.grid() != b.grid() {
        return Err(Error::Shape("product of fields on different grids".into()));
    }
    let grid = *a.grid();
    let mut parts = Vec::new();
    for i in 0..a.components() {
        for j in 0..b.components() {
            let v: Vec<f64> = a.component(i).iter().zip(b.component(j)).map(|(x, y)| x * y).collect();
            parts.push(Field::new(grid, 1, v)?);
        }
    }
    let mut spec = transform(&Field::stack(&parts)?)?;
    dealias(&mut spec);
    Ok(spec)
}

/// `(U·∇) f` for a vector field `U` and scalar or vector `f`, formed
/// pointwise in real space and dealiased; returned as a spectrum.
pub fn advect_spec(u: &Field, f: &Field) -> Result<SpectralCoeffs> {
    let d = u.grid().d();
    if u.components() != d {
        return Err(Error::Shape("advecting field must be a vector field".into()));
    }
    let grid = *u.grid();
    let n = grid.size();
    let fs = transform(f)?;
    let mut parts = Vec::with_capacity(f.components());
    for c in 0..f.components() {
        let grad = inverse_transform(&gradient_spec(&fs.extract(c))?)?;
        let mut v = vec![0.0; n];
        for a in 0..d {
            for (acc, (x, y)) in v.iter_mut().zip(u.component(a).iter().zip(grad.component(a))) {
                *acc += x * y;
            }
        }
        parts.push(Field::new(grid, 1, v)?);
    }
    let mut spec = transform(&Field::stack(&parts)?)?;
    dealias(&mut spec);
    Ok(spec)
}

pub fn advect(u: &Field, f: &Field) -> Result<Field> {
    inverse_transform(&advect_spec(u, f)?)
}

/// `∇·(U ⊗ f)`, i.e. component `c` is `Σ_a ∂_a (U_a f_c)`; dealiased.
pub fn conservative_advect_spec(u: &Field, f: &Field) -> Result<SpectralCoeffs> {
    let d = u.grid().d();
    if u.components() != d {
        return Err(Error::Shape("advecting field must be a vector field".into()));
    }
    let prod = product_spec(u, f)?;
    let fc = f.components();
    let mut parts = Vec::with_capacity(fc);
    for c in 0..fc {
        let mut acc = SpectralCoeffs::zeros(*u.grid(), 1);
        for a in 0..d {
            acc = acc.add(&partial_spec(&prod.extract(a * fc + c), a)?)?;
        }
        parts.push(acc);
    }
    SpectralCoeffs::stack(&parts)
}

/// Fourier interpolation (or truncation) onto another grid with the same
/// dimension and box. Modes that do not exist on both grids, and Nyquist
/// modes, are dropped.
pub fn resample(f: &Field, target: &GridSpec) -> Result<Field> {
    let src = *f.grid();
    if src.d() != target.d() || src.box_length() != target.box_length() {
        return Err(Error::Shape("resampling needs the same dimension and box length".into()));
    }
    let spec = transform(f)?;
    let comps = f.components();
    let mut out = SpectralCoeffs::zeros(*target, comps);
    let half = (src.n().min(target.n()) / 2) as i64;
    let ns = src.size();
    let nt = target.size();
    for i in 0..ns {
        let k = src.wave_vector(i);
        if k.iter().any(|ki| ki.abs() >= half) {
            continue;
        }
        let j = target.flat_of_wave_vector(k);
        for c in 0..comps {
            out.coeffs_mut()[c * nt + j] = spec.coeffs()[c * ns + i];
        }
    }
    inverse_transform(&out)
}

/// Leray projector `δ_jk - ξ_j ξ_k / |ξ|^2` (Nyquist components of `ξ`
/// dropped); the mean is left unchanged.
pub fn leray_project(spec: &SpectralCoeffs) -> Result<SpectralCoeffs> {
    let grid = *spec.grid();
    let d = grid.d();
    if spec.components() != d || d < 2 {
        return Err(Error::Shape(format!(
            "Leray projection needs a {d}-component vector field (d >= 2), got {} components",
            spec.components()
        )));
    }
    let n = grid.size();
    let mut out = spec.clone();
    let proj: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = grid.xi_odd(i);
            let k2: f64 = xi[..d].iter().map(|x| x * x).sum();
            let v: Vec<Complex64> = (0..d).map(|c| spec.component(c)[i]).collect();
            if k2 == 0.0 {
                return v;
            }
            let dot: Complex64 = (0..d).map(|c| v[c] * xi[c]).sum();
            (0..d).map(|c| v[c] - dot * (xi[c] / k2)).collect()
        })
        .collect();
    for (i, v) in proj.into_iter().enumerate() {
        for (c, x) in v.into_iter().enumerate() {
            out.component_mut(c)[i] = x;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid2() -> GridSpec {
        GridSpec::new(2, 32, 2.0 * PI).unwrap()
    }

    #[test]
    fn identity_symbol_is_bit_exact() {
        let g = grid2();
        let f = Field::from_fn(g, 1, |_, x| (x[0] + 2.0 * x[1]).sin() + 0.3);
        let s = transform(&f).unwrap();
        let m = MultiplierSpec::scalar(|_| Ok(Complex64::new(1.0, 0.0)), ZeroModePolicy::Identity);
        assert_eq!(apply_multiplier(&s, &m).unwrap(), s);
    }

    #[test]
    fn symbol_errors_carry_frequency() {
        let g = grid2();
        let s = transform(&Field::zeros(g, 1)).unwrap();
        let m = MultiplierSpec::radial(|r| if r > 3.5 { Err("too big".into()) } else { Ok(1.0) }, ZeroModePolicy::Zero);
        match apply_multiplier(&s, &m) {
            Err(Error::Symbol { freq, .. }) => assert!(freq[0] > 3.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_order_needs_zero_policy() {
        let g = grid2();
        let f = Field::from_fn(g, 1, |_, x| x[0].sin());
        assert_eq!(frac_laplacian(&f, -0.5, ZeroModePolicy::Identity), Err(Error::ZeroModePolicy));
    }

    #[test]
    fn leray_rejects_scalars() {
        let g = grid2();
        let s = transform(&Field::zeros(g, 1)).unwrap();
        assert!(leray_project(&s).is_err());
    }

    #[test]
    fn dealias_band() {
        let g = grid2();
        let f = Field::from_fn(g, 1, |_, x| (11.0 * x[0]).cos() + (10.0 * x[1]).cos());
        let mut s = transform(&f).unwrap();
        dealias(&mut s);
        let back = inverse_transform(&s).unwrap();
        let expect = Field::from_fn(g, 1, |_, x| (10.0 * x[1]).cos());
        assert!(back.sub(&expect).unwrap().max_abs() < 1e-13);
    }
}
