use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spaces::{besov_morrey_norm, lp_bank, sobolev_morrey_norm, BesovParams, MorreyParams, MorreySampling};
use crate::spectral::{heat_op, solution_op, FracParams, Field, OperatorKind};

/// Which smoothing family is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayKind {
    /// `e^{-t(-Δ)^{β/2}}`.
    Heat,
    S,
    P,
}

impl DecayKind {
    pub fn name(self) -> &'static str {
        match self {
            DecayKind::Heat => "heat",
            DecayKind::S => "S",
            DecayKind::P => "P",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "heat" => Ok(DecayKind::Heat),
            "S" | "s" => Ok(DecayKind::S),
            "P" | "p" => Ok(DecayKind::P),
            _ => Err(Error::InvalidArgument(format!("unknown decay kind `{s}` (heat, S, P)"))),
        }
    }
}

/// Norm in which the evolved field is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetNorm {
    /// `‖(-Δ)^{s/2} ·‖_{p,λ}`.
    SobolevMorrey { s: f64, mp: MorreyParams },
    Besov(BesovParams),
}

impl TargetNorm {
    fn parts(&self) -> (f64, f64, f64) {
        match *self {
            TargetNorm::SobolevMorrey { s, mp } => (s, mp.p, mp.lambda),
            TargetNorm::Besov(bp) => (bp.s, bp.p, bp.lambda),
        }
    }

    fn describe(&self) -> String {
        match *self {
            TargetNorm::SobolevMorrey { s, mp } => format!("M^{s}_{{{},{}}}", mp.p, mp.lambda),
            TargetNorm::Besov(bp) => format!("N^{}_{{{},{},{}}}", bp.s, bp.p, bp.lambda, bp.r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySetup {
    pub kind: DecayKind,
    /// Order `ϑ` of the extra `(-Δ)^{ϑ/2}`.
    pub theta_order: f64,
    pub params: FracParams,
    /// Smoothness `s₁` and integrability `p₁` of the space the data is measured in.
    pub data_s: f64,
    pub data_p: f64,
    pub target: TargetNorm,
}

impl DecaySetup {
    /// `ϑ + s₂ - s₁ + (d-λ)/p₁ - (d-λ)/p₂`.
    pub fn exponent_sum(&self, d: usize) -> f64 {
        let (s2, p2, lambda) = self.target.parts();
        let dl = d as f64 - lambda;
        self.theta_order + s2 - self.data_s + dl / self.data_p - dl / p2
    }

    /// Predicted log-log slope: `-(α/β)·sum`, with α replaced by 1 for the heat kernel.
    pub fn predicted_slope(&self, d: usize) -> f64 {
        let a = if self.kind == DecayKind::Heat { 1.0 } else { self.params.alpha };
        -a / self.params.beta * self.exponent_sum(d)
    }

    /// Rejects configurations on or beyond the admissible boundary
    /// (`sum < β` for heat and S, `sum < 2β` for P).
    pub fn check(&self, d: usize) -> Result<()> {
        let e = self.exponent_sum(d);
        let beta = self.params.beta;
        let bound = if self.kind == DecayKind::P { 2.0 * beta } else { beta };
        if !(e < bound) {
            return Err(Error::Constraint(format!(
                "exponent sum {e} must stay below {bound} for the {} operator",
                self.kind.name()
            )));
        }
        if !(self.data_p >= 1.0) || !(self.theta_order >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need p₁ >= 1 and ϑ >= 0, got p₁ = {}, ϑ = {}",
                self.data_p, self.theta_order
            )));
        }
        Ok(())
    }
}

/// Log-spaced sample times `t_a .. t_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayWindow {
    pub t_a: f64,
    pub t_b: f64,
    pub samples: usize,
}

impl DecayWindow {
    /// The widest window allowed on the field's grid.
    pub fn widest(field: &Field, kind: DecayKind, params: FracParams, samples: usize) -> Self {
        let g = field.grid();
        let beta = params.beta;
        let tau_a = 4.0 * g.spacing().powf(beta);
        let tau_b = (g.box_length() / 8.0).powf(beta);
        let a = if kind == DecayKind::Heat { 1.0 } else { params.alpha };
        DecayWindow { t_a: tau_a.powf(1.0 / a), t_b: tau_b.powf(1.0 / a), samples }
    }

    pub fn times(&self) -> Vec<f64> {
        let (la, lb) = (self.t_a.ln(), self.t_b.ln());
        let m = self.samples;
        (0..m).map(|i| (la + (lb - la) * i as f64 / (m - 1) as f64).exp()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub operator: String,
    pub norm: String,
    pub t_a: f64,
    pub t_b: f64,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub measured_slope: f64,
    pub predicted_slope: f64,
    pub rel_err: f64,
}

/// Least-squares slope of `ln y` against `ln t`.
pub fn log_log_slope(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() {
        return Err(Error::SizeMismatch { expected: times.len(), found: values.len() });
    }
    if times.len() < 8 {
        return Err(Error::Regression(format!("{} samples, need at least 8", times.len())));
    }
    if times.iter().chain(values).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Regression("non-positive or non-finite sample".into()));
    }
    let x: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let m = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    // less than a tenth of a decade of spread cannot pin a slope
    if sxx / m < 1e-3 {
        return Err(Error::Regression(format!("time spread too small (var ln t = {})", sxx / m)));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}

/// Evolves `f` under the chosen operator and measures its norm over the window.
///
/// The window must keep the smoothing scale `τ^{1/β}` between the grid and
/// the box: `τ_b^{1/β} <= L/8` and `τ_a >= 4h^β`, with `τ = t` for the heat
/// kernel and `τ = t^α` for `S` and `P`.
pub fn decay_exponent(setup: &DecaySetup, f: &Field, window: DecayWindow) -> Result<DecayReport> {
    let grid = *f.grid();
    let d = grid.d();
    setup.check(d)?;
    check_window(setup, f, &window)?;
    if f.components() != 1 {
        return Err(Error::Shape("decay measurements take a scalar field".into()));
    }
    let times = window.times();
    let sampling = MorreySampling::standard(&grid);
    let bank = match setup.target {
        TargetNorm::Besov(_) => Some(lp_bank(&grid)?),
        _ => None,
    };
    let fp = setup.params;
    let norms: Vec<f64> = times
        .par_iter()
        .map(|&t| {
            let g = match setup.kind {
                DecayKind::Heat => heat_op(f, t, fp.beta, setup.theta_order)?,
                DecayKind::S => solution_op(f, t, fp, OperatorKind::S, setup.theta_order)?,
                DecayKind::P => solution_op(f, t, fp, OperatorKind::P, setup.theta_order)?,
            };
            match setup.target {
                TargetNorm::SobolevMorrey { s, mp } => sobolev_morrey_norm(&g, s, mp, &sampling),
                TargetNorm::Besov(bp) => besov_morrey_norm(&g, bp, bank.as_ref().expect("bank built"), &sampling),
            }
        })
        .collect::<Result<_>>()?;
    let measured = log_log_slope(&times, &norms)?;
    let predicted = setup.predicted_slope(d);
    let rel_err = if predicted == 0.0 { measured.abs() } else { ((measured - predicted) / predicted).abs() };
    Ok(DecayReport {
        operator: format!("{}(ϑ = {}, α = {}, β = {})", setup.kind.name(), setup.theta_order, fp.alpha, fp.beta),
        norm: setup.target.describe(),
        t_a: window.t_a,
        t_b: window.t_b,
        times,
        norms,
        measured_slope: measured,
        predicted_slope: predicted,
        rel_err,
    })
}

fn check_window(setup: &DecaySetup, f: &Field, w: &DecayWindow) -> Result<()> {
    if w.samples < 8 {
        return Err(Error::Window(format!("{} samples, need at least 8", w.samples)));
    }
    if !(w.t_a > 0.0 && w.t_b > w.t_a && w.t_b.is_finite()) {
        return Err(Error::Window(format!("need 0 < t_a < t_b, got [{}, {}]", w.t_a, w.t_b)));
    }
    let g = f.grid();
    let beta = setup.params.beta;
    let a = if setup.kind == DecayKind::Heat { 1.0 } else { setup.params.alpha };
    let slack = 1.0 + 1e-9;
    let upper = w.t_b.powf(a / beta);
    if upper > g.box_length() / 8.0 * slack {
        return Err(Error::Window(format!("smoothing scale {upper} at t_b exceeds L/8 = {}", g.box_length() / 8.0)));
    }
    let lower = w.t_a.powf(a);
    let floor = 4.0 * g.spacing().powf(beta);
    if lower * slack < floor {
        return Err(Error::Window(format!("scaled time {lower} at t_a is below 4h^β = {floor}")));
    }
    Ok(())
}

impl DecayReport {
    /// CSV with header `t,norm,log_t,log_norm`, then a summary header and row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,norm,log_t,log_norm\n");
        for (t, n) in self.times.iter().zip(&self.norms) {
            s.push_str(&format!("{t:.12e},{n:.12e},{:.12e},{:.12e}\n", t.ln(), n.ln()));
        }
        s.push_str("measured_slope,predicted_slope,rel_err\n");
        s.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", self.measured_slope, self.predicted_slope, self.rel_err));
        s
    }
}
