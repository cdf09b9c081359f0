use crate::error::Result;
use crate::solver::{picard_solve, PicardIterate, SolverConfig, SolverState};
use crate::spaces::{lp_bank, MorreySampling};

use super::{scale_to_kappa, AdmissibleExponents};

#[derive(Debug, Clone, PartialEq)]
pub struct KappaRun {
    pub kappa: f64,
    pub log: Vec<PicardIterate>,
    pub converged: bool,
    pub failure: Option<String>,
    /// Largest recorded ratio; infinite when the run blew up, absent when no
    /// ratio was defined (zero data, or convergence after one sweep).
    pub max_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub runs: Vec<KappaRun>,
    /// First κ in the list whose largest ratio reaches 1.
    pub threshold: Option<f64>,
    /// Largest ratios never decrease along the list.
    pub monotone: bool,
    /// Every ratio of the first run is below 1/2.
    pub smallest_below_half: bool,
}

/// Runs the Picard iteration with the data rescaled to each κ in turn.
pub fn contraction_probe(
    config: &SolverConfig,
    base: &SolverState,
    exps: &AdmissibleExponents,
    kappas: &[f64],
) -> Result<ContractionReport> {
    exps.check()?;
    let bank = lp_bank(&config.grid)?;
    let sampling = MorreySampling::standard(&config.grid);
    let mut runs = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        let (state, potential, _) = scale_to_kappa(base, &config.potential, exps, &bank, &sampling, kappa)?;
        let mut cfg = config.clone();
        cfg.potential = potential;
        let run = picard_solve(&cfg, &state)?;
        let mut max_ratio = run.log.iter().filter_map(|l| l.ratio).fold(None, |m: Option<f64>, r| {
            Some(match m {
                Some(m) if !(r > m) => m,
                _ => r,
            })
        });
        if run.failure.is_some() {
            max_ratio = Some(f64::INFINITY);
        }
        runs.push(KappaRun { kappa, log: run.log, converged: run.converged, failure: run.failure, max_ratio });
    }
    let threshold = runs.iter().find(|r| r.max_ratio.is_some_and(|m| !(m < 1.0))).map(|r| r.kappa);
    let defined: Vec<f64> = runs.iter().filter_map(|r| r.max_ratio).collect();
    let monotone = defined.windows(2).all(|w| w[1] >= w[0]);
    let smallest_below_half = runs
        .first()
        .is_some_and(|r| r.failure.is_none() && r.log.iter().all(|l| l.ratio.is_none_or(|x| x < 0.5)));
    Ok(ContractionReport { runs, threshold, monotone, smallest_below_half })
}

impl ContractionReport {
    /// `kappa,iter,ratio`, one row per Picard iteration; undefined ratios print as `nan`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kappa,iter,ratio\n");
        for r in &self.runs {
            for l in &r.log {
                let ratio = l.ratio.map_or("nan".to_string(), |x| format!("{x:.12e}"));
                s.push_str(&format!("{:.6e},{},{}\n", r.kappa, l.iter, ratio));
            }
        }
        s
    }
}
