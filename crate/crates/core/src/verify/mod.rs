//! Numerical checks of the decay estimates, the exponent conditions, the
//! contraction of the fixed-point map and the asymptotic equivalence of two
//! solutions.

mod admissible;
mod asymptotics;
mod contraction;
mod decay;
mod smallness;

pub use admissible::{admissible_params, AdmissibleExponents};
pub use asymptotics::{asymptotics_experiment, AsymptoticsOptions, AsymptoticsReport, SeriesSummary};
pub use contraction::{contraction_probe, ContractionReport, KappaRun};
pub use decay::{decay_exponent, log_log_slope, DecayKind, DecayReport, DecaySetup, DecayWindow, TargetNorm};
pub use smallness::{scale_to_kappa, smallness_norm};
