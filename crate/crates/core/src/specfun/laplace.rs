use super::gamma::rgamma;
use super::mittag_leffler::mittag_leffler;
use crate::error::{Error, Result};
use crate::quad;

const TAIL_TOL: f64 = 1e-10;

/// `|∫_0^T e^{-st} t^{β-1} E_{α,β}(-a t^α) dt - s^{α-β} / (s^α + a)|`.
///
/// `T` is doubled from 1 until a bound on the neglected tail is below 1e-10.
/// The integral is taken in the variable `u = t^β`, which removes the
/// endpoint singularity of `t^{β-1}`.
pub fn laplace_identity_residual(alpha: f64, beta: f64, a: f64, s: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) || !(beta > 0.0) || !(a > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "laplace residual needs 0 < alpha <= 1, beta > 0, a > 0 (got {alpha}, {beta}, {a})"
        )));
    }
    if !(s > a.powf(1.0 / alpha)) {
        return Err(Error::InvalidArgument(format!("s = {s} must exceed a^(1/alpha)")));
    }
    // E_{α,β}(-x) is completely monotone for β >= α, so bounded by 1/Γ(β)
    let bound = if beta >= alpha { rgamma(beta).abs().max(1e-300) } else { 2.0 };
    let tail = |t: f64| -> f64 {
        let rate = s - ((beta - 1.0) / t).max(0.0);
        if rate <= 0.0 {
            return f64::INFINITY;
        }
        bound * t.powf(beta - 1.0) * (-s * t).exp() / rate
    };
    let mut t_end = 1.0;
    while tail(t_end) > TAIL_TOL {
        t_end *= 2.0;
        if t_end > 1e6 {
            return Err(Error::Quadrature(format!(
                "no truncation time gives a tail below {TAIL_TOL:e} (s = {s})"
            )));
        }
    }
    let inv_b = 1.0 / beta;
    let mut failure = None;
    let integrand = |u: f64| -> f64 {
        if u == 0.0 {
            return inv_b * rgamma(beta);
        }
        let t = u.powf(inv_b);
        match mittag_leffler(alpha, beta, -a * t.powf(alpha)) {
            Ok(e) => inv_b * (-s * t).exp() * e,
            Err(err) => {
                failure.get_or_insert(err);
                f64::NAN
            }
        }
    };
    let u_end = t_end.powf(beta);
    // breaks on a geometric ladder help the e^{-st} decay
    let breaks: Vec<f64> = (0..12).map(|k| u_end * 0.5f64.powi(k)).collect();
    let lhs = quad::integrate(integrand, 0.0, u_end, &breaks, 1e-12, 1e-11, 2000);
    if let Some(err) = failure {
        return Err(err);
    }
    let rhs = s.powf(alpha - beta) / (s.powf(alpha) + a);
    Ok((lhs? - rhs).abs())
}
