//! Special functions and discrete fractional calculus.
//!
//! Everything here is a pure function of its arguments and safe to call from
//! any number of threads.

mod erf;
mod fractional;
mod gamma;
pub mod golden;
mod laplace;
mod mittag_leffler;
mod wright;

use crate::error::{Error, Result};

pub use erf::erfcx;
pub use fractional::{caputo_l1, caputo_l1_weights, rl_integral, TimeSeries};
pub use gamma::{gamma_fn, ln_gamma, rgamma, sin_pi};
pub use laplace::laplace_identity_residual;
pub use mittag_leffler::{
    mittag_leffler, mittag_leffler_with, regime, taylor_radius, MlRegime, ASYMPTOTIC_BELOW, Z_MAX,
};
pub use wright::{mainardi_wright, wright_moment, wright_moment_exact, ALPHA_MAX};

/// Error targets for series and quadrature based evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyBudget {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl AccuracyBudget {
    pub fn new(abs_tol: f64, rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol >= 0.0 && rel_tol >= 0.0) || abs_tol + rel_tol <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "accuracy budget needs abs_tol + rel_tol > 0 (got {abs_tol}, {rel_tol})"
            )));
        }
        if max_terms < 16 {
            return Err(Error::InvalidArgument(format!("max_terms = {max_terms} is below 16")));
        }
        Ok(Self { abs_tol, rel_tol, max_terms })
    }
}

impl Default for AccuracyBudget {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_terms: 5000 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_invariants() {
        assert!(AccuracyBudget::new(0.0, 0.0, 100).is_err());
        assert!(AccuracyBudget::new(1e-12, 0.0, 15).is_err());
        assert!(AccuracyBudget::new(1e-12, 0.0, 16).is_ok());
    }
}
