//! Periodic-torus spectral engine.

mod evolution;
mod fft;
mod grid;
mod ops;
pub mod snapshot;

pub use evolution::{
    duhamel_primitive, duhamel_weight, duhamel_weights, heat_kernel, heat_op, heat_op_spec, heat_table,
    solution_op, solution_op_spec, solution_table, subordinate_apply, subordination_mass,
    subordination_table, OperatorKind, SubordinationQuad,
};
pub use fft::{inverse_transform, transform};
pub use grid::{FracParams, Field, GridSpec, SpectralCoeffs};
pub use ops::{
    advect, advect_spec, apply_multiplier, conservative_advect_spec, dealias, divergence, divergence_spec,
    frac_laplacian, frac_laplacian_spec, gradient, gradient_spec, is_dealiased, leray_project, partial_spec,
    product_spec, radial_table, resample, MultiplierSpec, Symbol, ZeroModePolicy,
};
