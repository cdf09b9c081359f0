//! Fractional heat semigroup, the solution operators S(t), P(t), their
//! subordination representation, and exact Duhamel weights.

use rayon::prelude::*;

use super::fft::{inverse_transform, transform};
use super::grid::{FracParams, Field, GridSpec, SpectralCoeffs};
use super::ops::{apply_radial_table, radial_table, ZeroModePolicy};
use crate::error::{Error, Result};
use crate::specfun::{mainardi_wright, mittag_leffler, rgamma};

/// Which solution operator: `S` uses `E_{α,1}`, `P` uses `E_{α,α}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    S,
    P,
}

impl OperatorKind {
    fn ml_beta(self, alpha: f64) -> f64 {
        match self {
            OperatorKind::S => 1.0,
            OperatorKind::P => alpha,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTime(t))
    }
}

fn order_policy(theta_order: f64, zero_value: f64) -> ZeroModePolicy {
    if theta_order > 0.0 {
        ZeroModePolicy::Zero
    } else {
        ZeroModePolicy::Value(zero_value.into())
    }
}

/// Per-`|k|^2` table of `|ξ|^ϑ e^{-t |ξ|^β}`.
pub fn heat_table(grid: &GridSpec, t: f64, beta: f64, theta_order: f64) -> Result<Vec<f64>> {
    check_time(t)?;
    radial_table(grid, &|r: f64| Ok(r.powf(theta_order) * (-t * r.powf(beta)).exp()))
}

pub fn heat_op_spec(spec: &SpectralCoeffs, t: f64, beta: f64, theta_order: f64) -> Result<SpectralCoeffs> {
    let table = heat_table(spec.grid(), t, beta, theta_order)?;
    Ok(apply_radial_table(spec, &table, order_policy(theta_order, 1.0)))
}

/// `(-Δ)^{ϑ/2} e^{-t(-Δ)^{β/2}} f`.
pub fn heat_op(f: &Field, t: f64, beta: f64, theta_order: f64) -> Result<Field> {
    if theta_order < 0.0 {
        return Err(Error::InvalidArgument(format!("theta_order {theta_order} must be >= 0")));
    }
    inverse_transform(&heat_op_spec(&transform(f)?, t, beta, theta_order)?)
}

/// Convolution kernel of [`heat_op`]: the operator applied to the discrete
/// delta `h^{-d}` at the origin.
pub fn heat_kernel(grid: &GridSpec, t: f64, beta: f64, theta_order: f64) -> Result<Field> {
    let mut delta = Field::zeros(*grid, 1);
    delta.values_mut()[0] = 1.0 / grid.cell_volume();
    heat_op(&delta, t, beta, theta_order)
}

/// Per-`|k|^2` table of `|ξ|^ϑ E_{α,·}(-t^α |ξ|^β)`.
pub fn solution_table(
    grid: &GridSpec,
    t: f64,
    params: FracParams,
    kind: OperatorKind,
    theta_order: f64,
) -> Result<Vec<f64>> {
    check_time(t)?;
    let a = params.alpha;
    let b = kind.ml_beta(a);
    let ta = t.powf(a);
    radial_table(grid, &|r: f64| {
        mittag_leffler(a, b, -ta * r.powf(params.beta))
            .map(|e| r.powf(theta_order) * e)
            .map_err(|e| e.to_string())
    })
}

/// Zero-mode factor of a solution operator: `E_{α,·}(0)` for `ϑ = 0`.
fn solution_zero_mode(params: FracParams, kind: OperatorKind, theta_order: f64) -> ZeroModePolicy {
    order_policy(theta_order, rgamma(kind.ml_beta(params.alpha)))
}

pub fn solution_op_spec(
    spec: &SpectralCoeffs,
    t: f64,
    params: FracParams,
    kind: OperatorKind,
    theta_order: f64,
) -> Result<SpectralCoeffs> {
    let table = solution_table(spec.grid(), t, params, kind, theta_order)?;
    Ok(apply_radial_table(spec, &table, solution_zero_mode(params, kind, theta_order)))
}

/// `(-Δ)^{ϑ/2} S(t) f` or `(-Δ)^{ϑ/2} P(t) f` by per-mode Mittag-Leffler evaluation.
pub fn solution_op(f: &Field, t: f64, params: FracParams, kind: OperatorKind, theta_order: f64) -> Result<Field> {
    if theta_order < 0.0 {
        return Err(Error::InvalidArgument(format!("theta_order {theta_order} must be >= 0")));
    }
    inverse_transform(&solution_op_spec(&transform(f)?, t, params, kind, theta_order)?)
}

/// Trapezoid settings for the θ-integral of the subordination formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubordinationQuad {
    /// Initial step in `s = ln θ`.
    pub step: f64,
    /// Agreement required between two successive halvings, relative to the
    /// largest multiplier.
    pub rel_tol: f64,
    pub max_halvings: usize,
}

impl Default for SubordinationQuad {
    fn default() -> Self {
        Self { step: 0.125, rel_tol: 1e-10, max_halvings: 4 }
    }
}

/// Nodes `e^{s_i}` and weights `h · w(θ_i) θ_i` of the mapped trapezoid rule,
/// where `w = M_α` for S and `w = α θ M_α` for P.
fn subordination_rule(alpha: f64, kind: OperatorKind, h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let weight = |theta: f64| -> Result<f64> {
        let m = mainardi_wright(alpha, theta)?;
        Ok(match kind {
            OperatorKind::S => m * theta,
            OperatorKind::P => alpha * m * theta * theta,
        })
    };
    let m0 = mainardi_wright(alpha, 0.0)?;
    let s_lo = match kind {
        OperatorKind::S => (1e-17 / m0).ln(),
        OperatorKind::P => 0.5 * (1e-17 / (alpha * m0)).ln(),
    };
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut s = s_lo;
    loop {
        let th = s.exp();
        let w = weight(th)?;
        nodes.push(th);
        weights.push(h * w);
        if s > 0.0 && w < 1e-18 {
            break;
        }
        if s > 12.0 {
            return Err(Error::Quadrature("Mainardi-Wright tail did not decay by θ = e^12".into()));
        }
        s += h;
    }
    Ok((nodes, weights))
}

/// Per-`|k|^2` table of `∫ w(θ) e^{-θ t^α |ξ|^β} dθ`; index 0 holds the
/// `ξ = 0` value (the total mass of the weight).
pub fn subordination_table(
    grid: &GridSpec,
    t: f64,
    params: FracParams,
    kind: OperatorKind,
    quad: SubordinationQuad,
) -> Result<Vec<f64>> {
    check_time(t)?;
    let max = grid.max_k_squared();
    let mut present = vec![false; max + 1];
    for i in 0..grid.size() {
        present[grid.k_squared(i)] = true;
    }
    let ta = t.powf(params.alpha);
    let unit = grid.xi_unit();
    let rates: Vec<f64> = (0..=max)
        .map(|k2| ta * (unit * (k2 as f64).sqrt()).powf(params.beta))
        .collect();
    let evaluate = |h: f64| -> Result<Vec<f64>> {
        let (nodes, weights) = subordination_rule(params.alpha, kind, h)?;
        Ok(rates
            .par_iter()
            .enumerate()
            .map(|(k2, &c)| {
                if !present[k2] {
                    return 0.0;
                }
                nodes.iter().zip(&weights).map(|(th, w)| w * (-th * c).exp()).sum()
            })
            .collect())
    };
    let mut h = quad.step;
    let mut prev = evaluate(h)?;
    for _ in 0..quad.max_halvings {
        h *= 0.5;
        let cur = evaluate(h)?;
        let scale = cur.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = cur.iter().zip(&prev).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if diff <= quad.rel_tol * scale {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!(
        "subordination integral not converged after {} halvings",
        quad.max_halvings
    )))
}

/// Total mass `∫_0^∞ w(θ) dθ` of the subordination weight, by the same rule.
pub fn subordination_mass(alpha: f64, kind: OperatorKind, quad: SubordinationQuad) -> Result<f64> {
    let (_, weights) = subordination_rule(alpha, kind, quad.step / 2f64.powi(quad.max_halvings as i32))?;
    Ok(weights.iter().sum())
}

/// `S(t) f` or `P(t) f` as the Mainardi-Wright average of heat semigroups.
pub fn subordinate_apply(
    f: &Field,
    t: f64,
    params: FracParams,
    kind: OperatorKind,
    quad: SubordinationQuad,
) -> Result<Field> {
    let table = subordination_table(f.grid(), t, params, kind, quad)?;
    let spec = transform(f)?;
    let zero = ZeroModePolicy::Value(table[0].into());
    inverse_transform(&apply_radial_table(&spec, &table, zero))
}

/// `G(τ) = τ^α E_{α,α+1}(-λ τ^α) = ∫_0^τ s^{α-1} E_{α,α}(-λ s^α) ds`.
pub fn duhamel_primitive(alpha: f64, lambda: f64, tau: f64) -> Result<f64> {
    if tau == 0.0 {
        return Ok(0.0);
    }
    let ta = tau.powf(alpha);
    Ok(ta * mittag_leffler(alpha, alpha + 1.0, -lambda * ta)?)
}

/// Exact integral of the scalar Duhamel kernel over the lag interval
/// `[lag_a, lag_b]` for a single decay rate `λ`.
pub fn duhamel_weight(alpha: f64, lambda: f64, lag_a: f64, lag_b: f64) -> Result<f64> {
    if !(lag_a >= 0.0 && lag_b > lag_a) {
        return Err(Error::InvalidArgument(format!("lags must satisfy 0 <= a < b, got ({lag_a}, {lag_b})")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) || !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha}, lambda = {lambda}")));
    }
    Ok(duhamel_primitive(alpha, lambda, lag_b)? - duhamel_primitive(alpha, lambda, lag_a)?)
}

/// Weights for lattice frequency magnitudes `xi`, with `λ = |ξ|^β`.
pub fn duhamel_weights(lag_a: f64, lag_b: f64, params: FracParams, xi: &[f64]) -> Result<Vec<f64>> {
    xi.par_iter()
        .map(|&r| duhamel_weight(params.alpha, r.abs().powf(params.beta), lag_a, lag_b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_nonpositive_time() {
        let g = GridSpec::new(1, 16, 1.0).unwrap();
        let f = Field::zeros(g, 1);
        assert_eq!(heat_op(&f, 0.0, 1.5, 0.0), Err(Error::NonPositiveTime(0.0)));
        let p = FracParams::new(0.5, 1.5).unwrap();
        assert!(solution_op(&f, -1.0, p, OperatorKind::S, 0.0).is_err());
    }

    #[test]
    fn zero_symbol_weight() {
        let w = duhamel_weight(0.6, 0.0, 0.0, 0.1).unwrap();
        let exact = 0.1f64.powf(0.6) / crate::specfun::gamma_fn(1.6).unwrap();
        assert!((w - exact).abs() < 1e-14);
    }

    #[test]
    fn classical_weight() {
        let w = duhamel_weight(1.0, 3.0, 0.2, 0.5).unwrap();
        let exact = ((-0.6f64).exp() - (-1.5f64).exp()) / 3.0;
        assert!((w - exact).abs() < 1e-15);
    }

    #[test]
    fn gaussian_kernel_peak() {
        // symmetric-convention kernel value (2π)^{1/2} K_1(0) = 1/√2 for β = 2, d = 1
        let g = GridSpec::new(1, 256, 40.0 * PI).unwrap();
        let k = heat_kernel(&g, 1.0, 2.0, 0.0).unwrap();
        let v = (2.0 * PI).sqrt() * k.values()[0];
        assert!((v - 0.5f64.sqrt()).abs() < 1e-10, "{v}");
    }
}
