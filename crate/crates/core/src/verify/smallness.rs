use crate::error::{Error, Result};
use crate::solver::SolverState;
use crate::spaces::{besov_morrey_norm, morrey_norm, sobolev_morrey_norm, BesovParams, LPBank, MorreyParams, MorreySampling};
use crate::spectral::{gradient, Field};

use super::AdmissibleExponents;

/// Size of the data in the small-data condition:
/// `‖u₀‖_{N^{-β₁}_{r₁,λ,∞}} + ‖v₀‖_{N^{-β₂}_{r₂,λ,∞}} + ‖∇w₀‖_{N^{-β₃}_{r₃,λ,∞}}
///  + ‖w₀‖_{M^{2-β}_{(d-λ)/(2-β),λ}} + ‖∇φ‖_{M_{d-λ,λ}}`.
pub fn smallness_norm(
    state: &SolverState,
    potential: &Field,
    exps: &AdmissibleExponents,
    bank: &LPBank,
    sampling: &MorreySampling,
) -> Result<f64> {
    let gw = gradient(&state.w)?;
    let fields = [&state.u, &state.v, &gw];
    let mut total = 0.0;
    for (j, f) in fields.iter().enumerate() {
        let bp = BesovParams::new(-exps.beta_sub[j], exps.r[j], exps.lambda, f64::INFINITY)?;
        total += besov_morrey_norm(f, bp, bank, sampling)?;
    }
    let dl = exps.d as f64 - exps.lambda;
    let pw = dl / (2.0 - exps.beta);
    total += sobolev_morrey_norm(&state.w, 2.0 - exps.beta, MorreyParams::new(pw, exps.lambda)?, sampling)?;
    total += morrey_norm(&gradient(potential)?, MorreyParams::new(dl, exps.lambda)?, sampling)?;
    Ok(total)
}

/// Rescales data and potential by one common factor so that [`smallness_norm`]
/// equals `kappa`. Returns the scaled pair and the factor.
pub fn scale_to_kappa(
    state: &SolverState,
    potential: &Field,
    exps: &AdmissibleExponents,
    bank: &LPBank,
    sampling: &MorreySampling,
    kappa: f64,
) -> Result<(SolverState, Field, f64)> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!("kappa = {kappa} must be finite and >= 0")));
    }
    let norm = smallness_norm(state, potential, exps, bank, sampling)?;
    let factor = if kappa == 0.0 {
        0.0
    } else if norm > 0.0 {
        kappa / norm
    } else {
        return Err(Error::Gate("data has zero norm and cannot be scaled to a positive kappa".into()));
    };
    Ok((state.scaled(factor, factor, factor), potential.scaled(factor), factor))
}
