//! Littlewood-Paley shells and discrete Morrey, Sobolev-Morrey and
//! Besov-Morrey norms on the torus, plus ratio probes for the embedding,
//! product and multiplier inequalities between them.
//!
//! The Morrey supremum over balls is sampled: centres on a sublattice, radii
//! dyadic from `L/2` down to four cells, balls wrapped periodically. One extra
//! ball of radius `(L/2)√d` covers the whole torus, so `λ = 0` reproduces the
//! discrete `L^p` norm.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{
    apply_multiplier, frac_laplacian, inverse_transform, radial_table, transform, Field, GridSpec,
    MultiplierSpec, SpectralCoeffs, ZeroModePolicy,
};

/// Exponents of the Morrey space `M_{p,λ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorreyParams {
    pub p: f64,
    pub lambda: f64,
}

impl MorreyParams {
    /// `p >= 1` finite and `λ >= 0`; `λ < d` is checked against the grid.
    pub fn new(p: f64, lambda: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("Morrey exponent p = {p} must be in [1, inf)")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("Morrey lambda = {lambda} must be >= 0")));
        }
        Ok(MorreyParams { p, lambda })
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if self.lambda < d as f64 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("Morrey lambda = {} must be below d = {d}", self.lambda)))
        }
    }
}

/// Exponents of the homogeneous Besov-Morrey space `N^s_{p,λ,r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub lambda: f64,
    /// `f64::INFINITY` selects the supremum over shells.
    pub r: f64,
}

impl BesovParams {
    pub fn new(s: f64, p: f64, lambda: f64, r: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidArgument(format!("Besov smoothness s = {s}")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("Besov exponent p = {p} must be in (1, inf)")));
        }
        if !(r >= 1.0) {
            return Err(Error::InvalidArgument(format!("Besov sum index r = {r} must be in [1, inf]")));
        }
        MorreyParams::new(p, lambda)?;
        Ok(BesovParams { s, p, lambda, r })
    }

    pub fn morrey(&self) -> MorreyParams {
        MorreyParams { p: self.p, lambda: self.lambda }
    }
}

fn transition(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Unnormalized bump, smooth and positive exactly on `(2/3, 3)`.
pub fn bump(r: f64) -> f64 {
    transition(r - 2.0 / 3.0) * transition(3.0 - r)
}

/// Dyadic shell multipliers `φ̂_k`, normalized so that they sum to one at
/// every nonzero lattice frequency.
#[derive(Debug, Clone)]
pub struct LPBank {
    grid: GridSpec,
    k_min: i32,
    k_max: i32,
    /// One table per shell, indexed by `|k|^2`.
    tables: Vec<Vec<f64>>,
}

/// Shells needed to cover all nonzero lattice frequencies of `grid`.
fn shell_range(grid: &GridSpec) -> (i32, i32) {
    let lo = grid.xi_unit();
    let hi = lo * (grid.max_k_squared() as f64).sqrt();
    let k_min = (lo / 3.0).log2().floor() as i32 + 1;
    let k_max = (1.5 * hi).log2().ceil() as i32 - 1;
    (k_min, k_max)
}

pub fn lp_bank(grid: &GridSpec) -> Result<LPBank> {
    let (k_min, k_max) = shell_range(grid);
    // shells whose whole annulus lies inside the lattice band
    let lo = grid.xi_unit();
    let hi = lo * (grid.max_k_squared() as f64).sqrt();
    let resolved = (k_min..=k_max)
        .filter(|&k| {
            let s = 2f64.powi(k);
            2.0 / 3.0 * s >= lo && 3.0 * s <= hi
        })
        .count();
    if resolved < 3 {
        return Err(Error::BandTooNarrow { shells: resolved });
    }
    let raw: Vec<Vec<f64>> = (k_min..=k_max)
        .map(|k| radial_table(grid, &|r: f64| Ok(bump(r * 2f64.powi(-k)))))
        .collect::<Result<_>>()?;
    let len = raw[0].len();
    let mut tables = raw.clone();
    for k2 in 1..len {
        let total: f64 = raw.iter().map(|t| t[k2]).sum();
        if total > 0.0 {
            for t in tables.iter_mut() {
                t[k2] /= total;
            }
        }
    }
    Ok(LPBank { grid: *grid, k_min, k_max, tables })
}

impl LPBank {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn k_min(&self) -> i32 {
        self.k_min
    }

    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    pub fn shells(&self) -> impl Iterator<Item = i32> {
        self.k_min..=self.k_max
    }

    fn table(&self, k: i32) -> Result<&[f64]> {
        if k < self.k_min || k > self.k_max {
            return Err(Error::ShellOutOfRange { k, min: self.k_min, max: self.k_max });
        }
        Ok(&self.tables[(k - self.k_min) as usize])
    }

    /// `φ̂_k` at a lattice frequency with integer squared length `k2`.
    pub fn value(&self, k: i32, k2: usize) -> Result<f64> {
        Ok(self.table(k)?.get(k2).copied().unwrap_or(0.0))
    }

    fn project_spec(&self, spec: &SpectralCoeffs, k: i32) -> Result<SpectralCoeffs> {
        let table = self.table(k)?;
        let grid = *spec.grid();
        let n = grid.size();
        let mut out = spec.clone();
        out.coeffs_mut().par_iter_mut().enumerate().for_each(|(idx, c)| {
            *c *= table[grid.k_squared(idx % n)];
        });
        Ok(out)
    }
}

/// `Δ_k f`.
pub fn lp_project(f: &Field, k: i32, bank: &LPBank) -> Result<Field> {
    if f.grid() != bank.grid() {
        return Err(Error::Shape("field and Littlewood-Paley bank live on different grids".into()));
    }
    inverse_transform(&bank.project_spec(&transform(f)?, k)?)
}

/// Where the Morrey supremum is sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct MorreySampling {
    /// Centres are lattice points whose indices are all multiples of this.
    pub center_stride: usize,
    pub radii: Vec<f64>,
}

impl MorreySampling {
    /// Stride 4 and dyadic radii `L/2, L/4, ...` down to four cells.
    pub fn standard(grid: &GridSpec) -> Self {
        let min = 4.0 * grid.spacing();
        let mut radii = Vec::new();
        let mut r = 0.5 * grid.box_length();
        while r >= min * (1.0 - 1e-12) {
            radii.push(r);
            r *= 0.5;
        }
        MorreySampling { center_stride: 4.min(grid.n()), radii }
    }

    /// The first `count` dyadic radii starting at `L/2`.
    pub fn dyadic(grid: &GridSpec, center_stride: usize, count: usize) -> Self {
        let radii = (1..=count).map(|m| grid.box_length() * 2f64.powi(-(m as i32))).collect();
        MorreySampling { center_stride, radii }
    }

    fn check(&self, grid: &GridSpec) -> Result<()> {
        if self.center_stride == 0 || grid.n() % self.center_stride != 0 {
            return Err(Error::InvalidArgument(format!(
                "centre stride {} must divide n = {}",
                self.center_stride,
                grid.n()
            )));
        }
        let limit = 0.5 * grid.box_length();
        for &r in &self.radii {
            if !(r > 0.0) {
                return Err(Error::InvalidArgument(format!("Morrey radius {r} must be positive")));
            }
            if r > limit * (1.0 + 1e-12) {
                return Err(Error::RadiusTooLarge { radius: r, limit });
            }
        }
        Ok(())
    }
}

/// Integrals of `g` over every periodic ball of radius `r`, one per lattice centre.
fn ball_integrals(g_hat: &SpectralCoeffs, r: f64) -> Result<Vec<f64>> {
    let grid = *g_hat.grid();
    let l = grid.box_length();
    let d = grid.d();
    let mask = Field::from_fn(grid, 1, |_, x| {
        let d2: f64 = (0..d)
            .map(|a| {
                let dx = x[a] - l * (x[a] / l).round();
                dx * dx
            })
            .sum();
        if d2 <= r * r * (1.0 + 1e-12) {
            1.0
        } else {
            0.0
        }
    });
    let m_hat = transform(&mask)?;
    let scale = grid.size() as f64 * grid.cell_volume();
    let mut prod = g_hat.clone();
    prod.coeffs_mut().iter_mut().zip(m_hat.coeffs()).for_each(|(a, b)| *a *= b * scale);
    Ok(inverse_transform(&prod)?.into_values())
}

/// Sampled `sup_{x0} sup_R R^{-λ/p} (∫_{B(x0,R)} |f|^p)^{1/p}`.
pub fn morrey_norm(f: &Field, mp: MorreyParams, sampling: &MorreySampling) -> Result<f64> {
    let grid = *f.grid();
    mp.check_dim(grid.d())?;
    sampling.check(&grid)?;
    let p = mp.p;
    let g: Vec<f64> = f.magnitude().into_iter().map(|m| m.powf(p)).collect();
    let total: f64 = g.iter().sum::<f64>() * grid.cell_volume();
    let cover = 0.5 * grid.box_length() * (grid.d() as f64).sqrt();
    let mut best = cover.powf(-mp.lambda / p) * total.powf(1.0 / p);
    // every ball integral is at most the total, so λ = 0 is plain L^p
    if total == 0.0 || sampling.radii.is_empty() || mp.lambda == 0.0 {
        return Ok(best);
    }
    let g_hat = transform(&Field::new(grid, 1, g)?)?;
    let centres: Vec<usize> = (0..grid.size())
        .filter(|&i| grid.unravel(i)[..grid.d()].iter().all(|&c| c % sampling.center_stride == 0))
        .collect();
    for &r in &sampling.radii {
        let balls = ball_integrals(&g_hat, r)?;
        let peak = centres.iter().fold(0.0f64, |m, &i| m.max(balls[i]));
        best = best.max(r.powf(-mp.lambda / p) * peak.max(0.0).powf(1.0 / p));
    }
    Ok(best)
}

/// `‖(-Δ)^{s/2} f‖_{p,λ}`; for `s < 0` the mean is projected out first.
pub fn sobolev_morrey_norm(f: &Field, s: f64, mp: MorreyParams, sampling: &MorreySampling) -> Result<f64> {
    if s == 0.0 {
        return morrey_norm(f, mp, sampling);
    }
    morrey_norm(&frac_laplacian(f, s, ZeroModePolicy::Zero)?, mp, sampling)
}

/// Per-shell terms `2^{ks} ‖Δ_k f‖_{p,λ}`, in shell order.
pub fn besov_shell_terms(f: &Field, bp: BesovParams, bank: &LPBank, sampling: &MorreySampling) -> Result<Vec<f64>> {
    if f.grid() != bank.grid() {
        return Err(Error::Shape("field and Littlewood-Paley bank live on different grids".into()));
    }
    let spec = transform(f)?;
    bank.shells()
        .map(|k| {
            let part = inverse_transform(&bank.project_spec(&spec, k)?)?;
            Ok(2f64.powf(k as f64 * bp.s) * morrey_norm(&part, bp.morrey(), sampling)?)
        })
        .collect()
}

/// `ℓ^r` norm of a nonnegative sequence.
pub fn sequence_norm(terms: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        terms.iter().fold(0.0f64, |m, &t| m.max(t))
    } else {
        terms.iter().map(|t| t.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

pub fn besov_morrey_norm(f: &Field, bp: BesovParams, bank: &LPBank, sampling: &MorreySampling) -> Result<f64> {
    Ok(sequence_norm(&besov_shell_terms(f, bp, bank, sampling)?, bp.r))
}

/// Worst and best norm ratios over a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub ratios: Vec<f64>,
    pub max: f64,
    pub min: f64,
}

impl RatioReport {
    fn from_ratios(ratios: Vec<f64>) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::InvalidArgument("empty corpus".into()));
        }
        let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(RatioReport { ratios, max, min })
    }
}

/// Pairs of spaces related by a continuous embedding `source ↪ target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Embedding {
    /// `N^{s1}_{p1,λ,r} ↪ N^{s2}_{p2,λ,r}`.
    Besov { s1: f64, p1: f64, s2: f64, p2: f64, lambda: f64, r: f64 },
    /// `M^{s1}_{p1,λ} ↪ M^{s2}_{p2,λ}`.
    SobolevMorrey { s1: f64, p1: f64, s2: f64, p2: f64, lambda: f64 },
    /// `N^0_{p,λ,1} ↪ M_{p,λ}`.
    BesovOneIntoMorrey { p: f64, lambda: f64 },
    /// `M_{p,λ} ↪ N^0_{p,λ,∞}`.
    MorreyIntoBesovInf { p: f64, lambda: f64 },
}

fn check_lift(d: usize, s1: f64, p1: f64, s2: f64, p2: f64, lambda: f64) -> Result<()> {
    let dl = d as f64 - lambda;
    if !(s1 > s2) {
        return Err(Error::Constraint(format!("embedding needs s1 > s2, got {s1} <= {s2}")));
    }
    let gap = (s1 - dl / p1) - (s2 - dl / p2);
    if gap.abs() > 1e-12 {
        return Err(Error::Constraint(format!(
            "embedding needs s1 - (d-λ)/p1 = s2 - (d-λ)/p2, off by {gap:e}"
        )));
    }
    Ok(())
}

impl Embedding {
    fn check(&self, d: usize) -> Result<()> {
        match *self {
            Embedding::Besov { s1, p1, s2, p2, lambda, r } => {
                BesovParams::new(s1, p1, lambda, r)?;
                BesovParams::new(s2, p2, lambda, r)?;
                check_lift(d, s1, p1, s2, p2, lambda)
            }
            Embedding::SobolevMorrey { s1, p1, s2, p2, lambda } => {
                MorreyParams::new(p1, lambda)?;
                MorreyParams::new(p2, lambda)?;
                check_lift(d, s1, p1, s2, p2, lambda)
            }
            Embedding::BesovOneIntoMorrey { p, lambda } | Embedding::MorreyIntoBesovInf { p, lambda } => {
                BesovParams::new(0.0, p, lambda, 1.0).map(|_| ())
            }
        }
    }

    /// `(source, target)` norms of `f`.
    pub fn norms(&self, f: &Field, bank: &LPBank, sampling: &MorreySampling) -> Result<(f64, f64)> {
        self.check(f.grid().d())?;
        match *self {
            Embedding::Besov { s1, p1, s2, p2, lambda, r } => Ok((
                besov_morrey_norm(f, BesovParams { s: s1, p: p1, lambda, r }, bank, sampling)?,
                besov_morrey_norm(f, BesovParams { s: s2, p: p2, lambda, r }, bank, sampling)?,
            )),
            Embedding::SobolevMorrey { s1, p1, s2, p2, lambda } => Ok((
                sobolev_morrey_norm(f, s1, MorreyParams { p: p1, lambda }, sampling)?,
                sobolev_morrey_norm(f, s2, MorreyParams { p: p2, lambda }, sampling)?,
            )),
            Embedding::BesovOneIntoMorrey { p, lambda } => Ok((
                besov_morrey_norm(f, BesovParams { s: 0.0, p, lambda, r: 1.0 }, bank, sampling)?,
                morrey_norm(f, MorreyParams { p, lambda }, sampling)?,
            )),
            Embedding::MorreyIntoBesovInf { p, lambda } => Ok((
                morrey_norm(f, MorreyParams { p, lambda }, sampling)?,
                besov_morrey_norm(f, BesovParams { s: 0.0, p, lambda, r: f64::INFINITY }, bank, sampling)?,
            )),
        }
    }
}

/// Ratios `‖f‖_target / ‖f‖_source` over `corpus`.
pub fn embedding_probe(
    corpus: &[Field],
    relation: Embedding,
    bank: &LPBank,
    sampling: &MorreySampling,
) -> Result<RatioReport> {
    let d = corpus.first().ok_or_else(|| Error::InvalidArgument("empty corpus".into()))?.grid().d();
    relation.check(d)?;
    let ratios = corpus
        .iter()
        .map(|f| {
            let (src, tgt) = relation.norms(f, bank, sampling)?;
            Ok(tgt / src)
        })
        .collect::<Result<Vec<_>>>()?;
    RatioReport::from_ratios(ratios)
}

/// Ratios `‖fg‖_{p3,λ} / (‖f‖_{p1,λ} ‖g‖_{p2,λ})` with `1/p3 = 1/p1 + 1/p2`.
pub fn holder_probe(
    pairs: &[(Field, Field)],
    p1: f64,
    p2: f64,
    lambda: f64,
    sampling: &MorreySampling,
) -> Result<RatioReport> {
    let p3 = 1.0 / (1.0 / p1 + 1.0 / p2);
    let m1 = MorreyParams::new(p1, lambda)?;
    let m2 = MorreyParams::new(p2, lambda)?;
    let m3 = MorreyParams::new(p3, lambda)
        .map_err(|_| Error::Constraint(format!("product exponent p3 = {p3} falls below 1")))?;
    let ratios = pairs
        .iter()
        .map(|(f, g)| {
            if f.components() != 1 || g.components() != 1 {
                return Err(Error::Shape("Hölder probe takes scalar fields".into()));
            }
            let fg: Vec<f64> = f.values().iter().zip(g.values()).map(|(a, b)| a * b).collect();
            let fg = Field::new(*f.grid(), 1, fg)?;
            Ok(morrey_norm(&fg, m3, sampling)?
                / (morrey_norm(f, m1, sampling)? * morrey_norm(g, m2, sampling)?))
        })
        .collect::<Result<Vec<_>>>()?;
    RatioReport::from_ratios(ratios)
}

/// Ratios `‖σ(D) f‖_{M^{s-l}_{p,λ}} / ‖f‖_{M^s_{p,λ}}` for
/// `σ(ξ) = |ξ|^l · angular(ξ/|ξ|)`.
pub fn multiplier_probe(
    corpus: &[Field],
    l: f64,
    angular: &(dyn Fn(&[f64]) -> f64 + Sync),
    s: f64,
    mp: MorreyParams,
    sampling: &MorreySampling,
) -> Result<RatioReport> {
    let symbol = MultiplierSpec::scalar(
        |xi: &[f64]| {
            let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
            let unit: Vec<f64> = xi.iter().map(|x| x / r).collect();
            Ok(Complex64::new(r.powf(l) * angular(&unit), 0.0))
        },
        ZeroModePolicy::Zero,
    );
    let ratios = corpus
        .iter()
        .map(|f| {
            let g = inverse_transform(&apply_multiplier(&transform(f)?, &symbol)?)?;
            Ok(sobolev_morrey_norm(&g, s - l, mp, sampling)? / sobolev_morrey_norm(f, s, mp, sampling)?)
        })
        .collect::<Result<Vec<_>>>()?;
    RatioReport::from_ratios(ratios)
}

/// Log-convexity of `ω ↦ ‖f‖_{N^ω_{p,λ,r}}` at `ω = θω1 + (1-θ)ω2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationReport {
    pub log_norms: [f64; 3],
    /// `log‖f‖_ω - θ log‖f‖_{ω1} - (1-θ) log‖f‖_{ω2}`; never positive.
    pub defect: f64,
}

pub fn interpolation_probe(
    f: &Field,
    omega1: f64,
    omega2: f64,
    theta: f64,
    template: BesovParams,
    bank: &LPBank,
    sampling: &MorreySampling,
) -> Result<InterpolationReport> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, 1]")));
    }
    // the shell Morrey norms do not depend on ω; compute them once
    let base = besov_shell_terms(f, BesovParams { s: 0.0, ..template }, bank, sampling)?;
    let at = |omega: f64| -> f64 {
        let terms: Vec<f64> = bank.shells().zip(&base).map(|(k, t)| 2f64.powf(k as f64 * omega) * t).collect();
        sequence_norm(&terms, template.r).ln()
    };
    let omega = theta * omega1 + (1.0 - theta) * omega2;
    let log_norms = [at(omega1), at(omega2), at(omega)];
    let defect = log_norms[2] - theta * log_norms[0] - (1.0 - theta) * log_norms[1];
    Ok(InterpolationReport { log_norms, defect })
}
