//! The exponent conditions on `(r_j, q_j)` and the derived `β_j`, `χ_j`.

use crate::error::{Error, Result};

/// Exponent tuple of the solution space together with its validity verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleExponents {
    pub d: usize,
    pub lambda: f64,
    pub beta: f64,
    pub alpha: f64,
    pub r: [f64; 3],
    pub q: [f64; 3],
    /// Besov smoothness indices `β_j` (the spaces use `-β_j`).
    pub beta_sub: [f64; 3],
    /// Time weights `χ_j`; norms carry `t^{χ_j/2}`.
    pub chi: [f64; 3],
    pub valid: bool,
    pub violations: Vec<String>,
}

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

pub fn admissible_params(d: usize, lambda: f64, beta: f64, alpha: f64, r: [f64; 3], q: [f64; 3]) -> Result<AdmissibleExponents> {
    if !(1..=3).contains(&d) {
        return Err(Error::InvalidArgument(format!("dimension d = {d} not in {{1, 2, 3}}")));
    }
    if !(lambda >= 0.0 && lambda < d as f64) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} not in [0, {d})")));
    }
    if !(beta > 1.0 && beta < 2.0) {
        return Err(Error::InvalidArgument(format!("beta = {beta} not in (1, 2)")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} not in (0, 1)")));
    }
    if r.iter().chain(&q).any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::InvalidArgument(format!("exponents r = {r:?}, q = {q:?} must be positive")));
    }
    let dl = d as f64 - lambda;
    let sub = ["₁", "₂", "₃"];
    let mut violations = Vec::new();
    let mut need = |ok: bool, text: String| {
        if !ok {
            violations.push(text);
        }
    };

    let b1 = dl / (beta - 1.0);
    let b2 = dl / (2.0 * beta - 2.0);
    let b3 = dl / (2.0 - beta);
    need(r[0] > b1, format!("r₁ > (d−λ)/(β−1) = {}", num(b1)));
    need(r[1] > b2, format!("r₂ > (d−λ)/(2β−2) = {}", num(b2)));
    need(r[2] > dl, format!("r₃ > d−λ = {}", num(dl)));
    need(q[0] > b1, format!("q₁ > (d−λ)/(β−1) = {}", num(b1)));
    need(q[1] > b2, format!("q₂ > (d−λ)/(2β−2) = {}", num(b2)));
    need(q[1] < b1, format!("q₂ < (d−λ)/(β−1) = {}", num(b1)));
    need(q[2] > dl, format!("q₃ > d−λ = {}", num(dl)));
    need(q[2] < b3, format!("q₃ < (d−λ)/(2−β) = {}", num(b3)));
    for j in 0..3 {
        need(r[j] > 1.0, format!("r{} > 1", sub[j]));
        need(r[j] <= q[j], format!("r{s} ≤ q{s}", s = sub[j]));
    }
    let (i1, i2, i3) = (1.0 / q[0], 1.0 / q[1], 1.0 / q[2]);
    need(i1 + i2 > (2.0 * beta - 2.0) / dl, format!("1/q₁ + 1/q₂ > (2β−2)/(d−λ) = {}", num((2.0 * beta - 2.0) / dl)));
    need(i1 + i2 < (3.0 * beta - 3.0) / dl, format!("1/q₁ + 1/q₂ < (3β−3)/(d−λ) = {}", num((3.0 * beta - 3.0) / dl)));
    need(i2 + i3 > 1.0 / dl, format!("1/q₂ + 1/q₃ > 1/(d−λ) = {}", num(1.0 / dl)));
    need(i2 + i3 < (2.0 * beta - 1.0) / dl, format!("1/q₂ + 1/q₃ < (2β−1)/(d−λ) = {}", num((2.0 * beta - 1.0) / dl)));
    need(i2 - i1 < (beta - 1.0) / dl, format!("1/q₂ − 1/q₁ < (β−1)/(d−λ) = {}", num((beta - 1.0) / dl)));
    need(i2 - i3 < (2.0 * beta - 3.0) / dl, format!("1/q₂ − 1/q₃ < (2β−3)/(d−λ) = {}", num((2.0 * beta - 3.0) / dl)));

    let beta_sub = [beta - 1.0 - dl / r[0], 2.0 * beta - 2.0 - dl / r[1], 1.0 - dl / r[2]];
    let a = alpha;
    let chi = [
        2.0 * a - 2.0 * a / beta - 2.0 * a * dl / (beta * q[0]),
        4.0 * a - 4.0 * a / beta - 2.0 * a * dl / (beta * q[1]),
        2.0 * a / beta - 2.0 * a * dl / (beta * q[2]),
    ];
    // exponents the contraction estimate divides by
    let e2 = 2.0 * a - 2.0 * a / beta - a * dl / (beta * q[1]);
    need(chi[0] > 0.0 && chi[0] < 1.0, format!("0 < χ₁ < 1 (χ₁ = {})", num(chi[0])));
    need(e2 > 0.0 && e2 < 1.0, format!("0 < 2α − 2α/β − α(d−λ)/(βq₂) < 1 (value {})", num(e2)));

    Ok(AdmissibleExponents {
        d,
        lambda,
        beta,
        alpha,
        r,
        q,
        beta_sub,
        chi,
        valid: violations.is_empty(),
        violations,
    })
}

impl AdmissibleExponents {
    /// The tuple itself when valid, otherwise a constraint error naming every violation.
    pub fn require(self) -> Result<Self> {
        self.check()?;
        Ok(self)
    }

    pub fn check(&self) -> Result<()> {
        if self.valid {
            Ok(())
        } else {
            Err(Error::Constraint(format!("inadmissible exponents: {}", self.violations.join("; "))))
        }
    }
}
