use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation, g = 607/128, 15 terms (Godfrey).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_189e-5,
    4.652_362_892_704_858e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_125e-4,
    -2.102_644_417_241_049e-4,
    2.174_396_181_152_126_4e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_275e-5,
    -2.619_083_840_158_141e-5,
    3.689_918_265_953_162_4e-6,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Γ(x) for x in [1, 2].
fn gamma_unit(x: f64) -> f64 {
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * sum
}

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if x == x.trunc() {
        return 0.0;
    }
    // reduce to r in [-1, 1]; the subtraction is exact in binary floating point
    let r = x - 2.0 * (0.5 * x).round();
    if r.abs() <= 0.25 {
        (PI * r).sin()
    } else if r > 0.0 && r <= 0.75 {
        (PI * (0.5 - r)).cos()
    } else if r < 0.0 && r >= -0.75 {
        -(PI * (0.5 + r)).cos()
    } else if r > 0.0 {
        (PI * (1.0 - r)).sin()
    } else {
        -(PI * (1.0 + r)).sin()
    }
}

/// The Gamma function.
///
/// Relative error is about 1e-14 or better on [-170, 170]; product
/// recursion is used above 2 so that no `exp` of a large argument is taken.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::InvalidArgument("gamma of NaN".into()));
    }
    if x <= 0.0 && x == x.trunc() {
        return Err(Error::Pole { x });
    }
    let v = gamma_unchecked(x);
    if !v.is_finite() {
        return Err(Error::Overflow { x });
    }
    Ok(v)
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x >= 1.0 && x <= 30.0 && x == x.trunc() {
        // exact factorials as far as they are representable
        return (1..x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    if x < 0.5 {
        let s = sin_pi(x);
        return PI / (s * gamma_unchecked(1.0 - x));
    }
    if x < 1.0 {
        return gamma_unit(x + 1.0) / x;
    }
    if x <= 2.0 {
        return gamma_unit(x);
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let m = (x.floor() - 1.0) as usize;
    let f = x - m as f64;
    let mut acc = gamma_unit(f);
    for i in 0..m {
        acc *= f + i as f64;
    }
    acc
}

/// 1/Γ(x), zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.trunc() {
        return 0.0;
    }
    if x < 0.5 {
        // reflection keeps large negative arguments finite
        return sin_pi(x) * gamma_unchecked(1.0 - x) / PI;
    }
    1.0 / gamma_unchecked(x)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 12.0 {
        return gamma_unchecked(x).ln();
    }
    // Stirling series; six correction terms are ample for x >= 12
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2 * (-1.0 / 1680.0 + inv2 * (1.0 / 1188.0 - inv2 * 691.0 / 360_360.0)))));
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 1e-13);
        assert!((gamma_fn(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn poles_and_overflow() {
        assert!(matches!(gamma_fn(0.0), Err(Error::Pole { .. })));
        assert!(matches!(gamma_fn(-3.0), Err(Error::Pole { .. })));
        assert!(matches!(gamma_fn(180.0), Err(Error::Overflow { .. })));
        assert_eq!(rgamma(-4.0), 0.0);
    }

    #[test]
    fn factorials_exact_range() {
        let mut f = 1.0f64;
        for n in 1..=30u32 {
            let g = gamma_fn(n as f64 + 1.0).unwrap();
            f *= n as f64;
            assert!((g - f).abs() <= 2e-15 * f, "n = {n}");
        }
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.3, 1.7, 11.9, 12.0, 25.5, 100.25, 170.0] {
            let a = ln_gamma(x);
            let b = gamma_unchecked(x).ln();
            assert!((a - b).abs() < 1e-13 * b.abs().max(1.0), "x = {x}: {a} vs {b}");
        }
    }

    #[test]
    fn sin_pi_reduction() {
        for &x in &[0.1, 0.3, 0.6, 0.9, 1.2, -0.4, -1.7, 7.25, -33.5] {
            assert!((sin_pi(x) - (PI * x).sin()).abs() < 1e-13, "x = {x}");
        }
    }
}
