use std::f64::consts::PI;

/// Scaled complementary error function e^{x²} erfc(x) for x >= 0.
///
/// Maclaurin series of erf below 2, Lentz continued fraction above. Used to
/// cross-check E_{1/2,1}(-x) = erfcx(x) when emitting golden tables.
pub fn erfcx(x: f64) -> f64 {
    assert!(x >= 0.0, "erfcx is only provided for x >= 0");
    if x == 0.0 {
        return 1.0;
    }
    if x < 2.0 {
        // erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x2 / n;
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        let erf = 2.0 / PI.sqrt() * sum;
        return (1.0 - erf) * x2.exp();
    }
    // erfc(x) e^{x^2} = (1/sqrt(pi)) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / (PI.sqrt() * f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        // e * erfc(1)
        assert!((erfcx(1.0) - 0.427_583_576_155_807).abs() < 1e-14);
        assert!((erfcx(0.0) - 1.0).abs() < 1e-16);
        // large-x asymptote 1/(x sqrt(pi)) (1 - 1/(2x^2))
        let x = 1e4;
        let a = 1.0 / (x * PI.sqrt()) * (1.0 - 0.5 / (x * x));
        assert!((erfcx(x) - a).abs() < 1e-14 * a);
    }

    #[test]
    fn continuous_at_switch() {
        let lo = erfcx(2.0 - 1e-12);
        let hi = erfcx(2.0);
        assert!((lo - hi).abs() < 1e-12);
    }
}
