use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solver::{linear_propagate, picard_solve, FNormSurrogate, SolverConfig, SolverState, FNORM_TERMS};
use crate::spaces::{lp_bank, MorreySampling};

use super::{smallness_norm, AdmissibleExponents};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticsOptions {
    /// Both data triples must have smallness norm at most this.
    pub gate: f64,
    pub tol_f: f64,
    pub tol_g: f64,
    /// Trailing fraction of `[0, T]` taken as the final window.
    pub final_fraction: f64,
}

impl Default for AsymptoticsOptions {
    fn default() -> Self {
        AsymptoticsOptions { gate: 1e-2, tol_f: 0.05, tol_g: 0.05, final_fraction: 0.25 }
    }
}

/// Summary of one of the two series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSummary {
    pub peak_index: usize,
    pub peak: f64,
    /// Non-increasing from the peak to the end.
    pub monotone_after_peak: bool,
    /// Largest value in the final window.
    pub final_max: f64,
    /// `final_max / peak`, zero for an identically zero series.
    pub final_ratio: f64,
}

impl SeriesSummary {
    fn of(totals: &[f64], window_start: usize) -> Self {
        let (peak_index, peak) = totals
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, b), (i, &v)| if v > b { (i, v) } else { (bi, b) });
        let monotone_after_peak = totals[peak_index..].windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
        let final_max = totals[window_start..].iter().copied().fold(0.0, f64::max);
        let final_ratio = if peak > 0.0 { final_max / peak } else { 0.0 };
        SeriesSummary { peak_index, peak, monotone_after_peak, final_max, final_ratio }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    pub times: Vec<f64>,
    /// Five summands of `f` per node.
    pub f: Vec<[f64; 5]>,
    pub g: Vec<[f64; 5]>,
    pub f_summary: SeriesSummary,
    pub g_summary: SeriesSummary,
    /// `f` small in the final window implies `g` small there.
    pub forward_holds: bool,
    /// `g` small in the final window implies `f` small there.
    pub reverse_holds: bool,
    /// `max f/g` and `max g/f` over the final window (where defined).
    pub c_fg: f64,
    pub c_gf: f64,
}

impl AsymptoticsReport {
    pub fn f_total(&self) -> Vec<f64> {
        self.f.iter().map(|x| x.iter().sum()).collect()
    }

    pub fn g_total(&self) -> Vec<f64> {
        self.g.iter().map(|x| x.iter().sum()).collect()
    }

    /// `t,f_total,g_total,f_1..f_5,g_1..g_5`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,f_total,g_total");
        for k in 1..=5 {
            s.push_str(&format!(",f_{k}"));
        }
        for k in 1..=5 {
            s.push_str(&format!(",g_{k}"));
        }
        s.push('\n');
        let (ft, gt) = (self.f_total(), self.g_total());
        for n in 0..self.times.len() {
            s.push_str(&format!("{:.12e},{:.12e},{:.12e}", self.times[n], ft[n], gt[n]));
            for v in self.f[n].iter().chain(&self.g[n]) {
                s.push_str(&format!(",{v:.12e}"));
            }
            s.push('\n');
        }
        s
    }
}

/// The five summands from the seven surrogate terms: the three weighted
/// Morrey norms, the Sobolev-Morrey norm of `w`, and the Besov-Morrey sum.
fn summands(t: &[f64; FNORM_TERMS]) -> [f64; 5] {
    [t[3], t[4], t[5], t[6], t[0] + t[1] + t[2]]
}

fn difference(a: &SolverState, b: &SolverState) -> Result<SolverState> {
    SolverState::new(a.t_index, a.u.sub(&b.u)?, a.v.sub(&b.v)?, a.w.sub(&b.w)?)
}

/// Solves from both data triples and compares the linear evolution of the
/// data difference (`f`) with the difference of the solutions (`g`).
pub fn asymptotics_experiment(
    config: &SolverConfig,
    a: &SolverState,
    b: &SolverState,
    exps: &AdmissibleExponents,
    opts: AsymptoticsOptions,
) -> Result<AsymptoticsReport> {
    exps.check()?;
    if !(opts.final_fraction > 0.0 && opts.final_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("final fraction {} not in (0, 1)", opts.final_fraction)));
    }
    let grid = config.grid;
    let bank = lp_bank(&grid)?;
    let sampling = MorreySampling::standard(&grid);
    for (name, s) in [("first", a), ("second", b)] {
        let n = smallness_norm(s, &config.potential, exps, &bank, &sampling)?;
        if !(n <= opts.gate) {
            return Err(Error::Gate(format!("{name} data has smallness norm {n:.4e} above {:.4e}", opts.gate)));
        }
    }
    let run_a = picard_solve(config, a)?;
    let run_b = picard_solve(config, b)?;
    for (name, r) in [("first", &run_a), ("second", &run_b)] {
        if !r.converged {
            return Err(Error::AccuracyNotMet {
                what: "asymptotics_experiment",
                detail: format!("{name} run did not converge ({:?})", r.failure),
            });
        }
    }
    let sur = FNormSurrogate::new(&grid, exps.clone())?;
    let times = config.times();
    let ta = &run_a.trajectory.states;
    let tb = &run_b.trajectory.states;
    let d0 = difference(&ta[0], &tb[0])?;
    let rows: Vec<([f64; 5], [f64; 5])> = times
        .par_iter()
        .enumerate()
        .map(|(n, &t)| {
            let lin = linear_propagate(&d0, t, config.params)?;
            let f = summands(&sur.terms(&lin, t)?);
            let g = summands(&sur.terms(&difference(&ta[n], &tb[n])?, t)?);
            Ok((f, g))
        })
        .collect::<Result<_>>()?;
    let (f, g): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let ft: Vec<f64> = f.iter().map(|x| x.iter().sum()).collect();
    let gt: Vec<f64> = g.iter().map(|x| x.iter().sum()).collect();
    let t_end = config.final_time;
    let window_start = times.iter().position(|&t| t >= (1.0 - opts.final_fraction) * t_end * (1.0 - 1e-12)).unwrap_or(0);
    let f_summary = SeriesSummary::of(&ft, window_start);
    let g_summary = SeriesSummary::of(&gt, window_start);
    let ratio_max = |num: &[f64], den: &[f64]| {
        num[window_start..]
            .iter()
            .zip(&den[window_start..])
            .filter(|(_, &q)| q > 0.0)
            .map(|(&p, &q)| p / q)
            .fold(0.0, f64::max)
    };
    let c_fg = ratio_max(&ft, &gt);
    let c_gf = ratio_max(&gt, &ft);
    let f_small = f_summary.final_ratio < opts.tol_f;
    let g_small = g_summary.final_ratio < opts.tol_g;
    Ok(AsymptoticsReport {
        times,
        f,
        g,
        f_summary,
        g_summary,
        forward_holds: !f_small || g_small,
        reverse_holds: !g_small || f_small,
        c_fg,
        c_gf,
    })
}
