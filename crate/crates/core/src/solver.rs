//! Mild-form time stepper for the coupled velocity / density / concentration
//! system and the Picard iteration built on it.
//!
//! The memory integral is discretized on a uniform mesh with the nonlinearity
//! frozen at the left end of each subinterval; the kernel
//! `s^{α-1} E_{α,α}(-|ξ|^β s^α)` is integrated exactly per mode, so a run
//! needs one table of lag weights per distinct `|k|^2`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spaces::{
    besov_morrey_norm, lp_bank, morrey_norm, sobolev_morrey_norm, BesovParams, LPBank, MorreyParams, MorreySampling,
};
use crate::spectral::{
    advect_spec, conservative_advect_spec, dealias, divergence, divergence_spec, duhamel_primitive,
    frac_laplacian, gradient, inverse_transform, leray_project, product_spec, radial_table, solution_op_spec, transform,
    FracParams, Field, GridSpec, OperatorKind, SpectralCoeffs, ZeroModePolicy,
};
use crate::specfun::{caputo_l1_weights, gamma_fn, mittag_leffler};
use crate::verify::AdmissibleExponents;

/// Convergence test applied to successive Picard trajectories.
#[derive(Debug, Clone, PartialEq)]
pub enum StoppingRule {
    /// Largest L² change over the mesh relative to the largest L² norm.
    RelativeL2,
    /// Weighted Morrey plus Besov-Morrey change, relative to the same norm
    /// of the new iterate.
    FNorm(AdmissibleExponents),
}

/// Sign of `((-Δ)^{(2-β)/2} w) v` inside the subtracted memory integral of
/// the `w` equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReactionSign {
    /// `+`, i.e. consumption of `w` by `v`.
    Consumption,
    /// `-`, i.e. production.
    Production,
}

impl ReactionSign {
    fn factor(self) -> f64 {
        match self {
            ReactionSign::Consumption => 1.0,
            ReactionSign::Production => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub params: FracParams,
    pub grid: GridSpec,
    pub final_time: f64,
    pub n_steps: usize,
    pub picard_max: usize,
    pub picard_tol: f64,
    /// Truncate the initial data to the 2/3 band.
    pub dealias: bool,
    /// Time-independent potential `φ`.
    pub potential: Field,
    pub stopping: StoppingRule,
    pub reaction: ReactionSign,
    /// `false` switches every nonlinear term off.
    pub nonlinear: bool,
}

impl SolverConfig {
    /// Defaults: 20 Picard sweeps, tolerance 1e-10, dealiasing on, `φ = 0`,
    /// relative L² stopping, consumption sign, nonlinear terms on.
    pub fn new(params: FracParams, grid: GridSpec, final_time: f64, n_steps: usize) -> Result<Self> {
        let cfg = SolverConfig {
            params,
            grid,
            final_time,
            n_steps,
            picard_max: 20,
            picard_tol: 1e-10,
            dealias: true,
            potential: Field::zeros(grid, 1),
            stopping: StoppingRule::RelativeL2,
            reaction: ReactionSign::Consumption,
            nonlinear: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.d() < 2 {
            return Err(Error::InvalidArgument("the solver needs d >= 2".into()));
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return Err(Error::NonPositiveTime(self.final_time));
        }
        if self.n_steps == 0 || self.picard_max == 0 {
            return Err(Error::InvalidArgument("n_steps and picard_max must be positive".into()));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::InvalidArgument(format!("picard_tol = {} must be positive", self.picard_tol)));
        }
        if *self.potential.grid() != self.grid || self.potential.components() != 1 {
            return Err(Error::Shape("potential must be a scalar field on the solver grid".into()));
        }
        let p = self.params;
        if !(p.alpha > 0.0 && p.alpha <= 1.0 && p.beta > 0.0 && p.beta <= 2.0) {
            return Err(Error::InvalidArgument(format!("orders alpha = {}, beta = {}", p.alpha, p.beta)));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.final_time / self.n_steps as f64
    }

    /// Mesh times `t_0 = 0, ..., t_N = T`.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|n| n as f64 * self.dt()).collect()
    }
}

/// `(u, v, w)` at mesh node `t_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub t_index: usize,
    pub u: Field,
    pub v: Field,
    pub w: Field,
}

impl SolverState {
    pub fn new(t_index: usize, u: Field, v: Field, w: Field) -> Result<Self> {
        let g = *u.grid();
        if u.components() != g.d() || v.components() != 1 || w.components() != 1 {
            return Err(Error::Shape("state needs a d-component u and scalar v, w".into()));
        }
        if *v.grid() != g || *w.grid() != g {
            return Err(Error::Shape("state fields live on different grids".into()));
        }
        Ok(SolverState { t_index, u, v, w })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        SolverState {
            t_index: 0,
            u: Field::zeros(grid, grid.d()),
            v: Field::zeros(grid, 1),
            w: Field::zeros(grid, 1),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    /// All components stacked: `u_1..u_d, v, w`.
    fn stacked(&self) -> Result<Field> {
        Field::stack(&[self.u.clone(), self.v.clone(), self.w.clone()])
    }

    fn from_stacked(t_index: usize, f: &Field) -> Self {
        let d = f.grid().d();
        let parts: Vec<Field> = (0..d + 2).map(|c| f.extract(c)).collect();
        SolverState {
            t_index,
            u: Field::stack(&parts[..d]).expect("same grid"),
            v: parts[d].clone(),
            w: parts[d + 1].clone(),
        }
    }

    pub fn scaled(&self, su: f64, sv: f64, sw: f64) -> Self {
        SolverState { t_index: self.t_index, u: self.u.scaled(su), v: self.v.scaled(sv), w: self.w.scaled(sw) }
    }

    /// `‖div u‖_∞`.
    pub fn div_u(&self) -> Result<f64> {
        Ok(divergence(&self.u)?.max_abs())
    }
}

/// Spectra of the three nonlinearities.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearSpectra {
    pub u: SpectralCoeffs,
    pub v: SpectralCoeffs,
    pub w: SpectralCoeffs,
}

impl NonlinearSpectra {
    fn stacked(&self) -> Result<SpectralCoeffs> {
        SpectralCoeffs::stack(&[self.u.clone(), self.v.clone(), self.w.clone()])
    }
}

fn check_finite(spec: &SpectralCoeffs, what: &'static str, t_index: usize) -> Result<()> {
    if spec.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what, t_index })
    }
}

/// `N_u = ℙ(∇·(u⊗u) + v∇φ)`, `N_v = u·∇v + ∇·(v∇B(w))` with
/// `B = (-Δ)^{(β-2)/2}`, and `N_w = u·∇w ± ((-Δ)^{(2-β)/2} w) v`.
pub fn nonlinear_terms(
    state: &SolverState,
    potential: &Field,
    params: FracParams,
    reaction: ReactionSign,
) -> Result<NonlinearSpectra> {
    let beta = params.beta;
    let (u, v, w) = (&state.u, &state.v, &state.w);
    let nu = conservative_advect_spec(u, u)?.add(&product_spec(v, &gradient(potential)?)?)?;
    let nu = leray_project(&nu)?;

    let bw = frac_laplacian(w, beta - 2.0, ZeroModePolicy::Zero)?;
    let flux = product_spec(v, &gradient(&bw)?)?;
    let nv = advect_spec(u, v)?.add(&divergence_spec(&flux)?)?;

    let lift_policy = if beta < 2.0 { ZeroModePolicy::Zero } else { ZeroModePolicy::Identity };
    let lw = frac_laplacian(w, 2.0 - beta, lift_policy)?;
    let nw = advect_spec(u, w)?.add(&product_spec(&lw, v)?.scaled(reaction.factor()))?;

    check_finite(&nu, "N_u", state.t_index)?;
    check_finite(&nv, "N_v", state.t_index)?;
    check_finite(&nw, "N_w", state.t_index)?;
    Ok(NonlinearSpectra { u: nu, v: nv, w: nw })
}

fn configured_terms(config: &SolverConfig, state: &SolverState) -> Result<NonlinearSpectra> {
    if !config.nonlinear {
        let g = config.grid;
        let z = |c| SpectralCoeffs::zeros(g, c);
        return Ok(NonlinearSpectra { u: z(g.d()), v: z(1), w: z(1) });
    }
    nonlinear_terms(state, &config.potential, config.params, config.reaction)
}

/// `S(t)` applied to each component of `initial`; `t = 0` returns it unchanged.
pub fn linear_propagate(initial: &SolverState, t: f64, params: FracParams) -> Result<SolverState> {
    if t == 0.0 {
        return Ok(initial.clone());
    }
    let spec = transform(&initial.stacked()?)?;
    let out = inverse_transform(&solution_op_spec(&spec, t, params, OperatorKind::S, 0.0)?)?;
    Ok(SolverState::from_stacked(initial.t_index, &out))
}

/// Nonlinearity spectra for nodes `0..len`, stacked like the state.
#[derive(Debug, Clone, Default)]
pub struct NonlinearHistory {
    entries: Vec<SpectralCoeffs>,
}

impl NonlinearHistory {
    pub fn new() -> Self {
        NonlinearHistory::default()
    }

    pub fn push(&mut self, n: &NonlinearSpectra) -> Result<()> {
        self.entries.push(n.stacked()?);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn from_entries(entries: Vec<SpectralCoeffs>) -> Self {
        NonlinearHistory { entries }
    }
}

/// Per-`|k|^2` propagator values `E_{α,1}(-λ t_m^α)` and lag weights
/// `G(mΔt) - G((m-1)Δt)`, `G(τ) = τ^α E_{α,α+1}(-λ τ^α)`.
#[derive(Debug, Clone)]
struct ModeTables {
    slot_of_k2: Vec<usize>,
    stride: usize,
    s: Vec<f64>,
    w: Vec<f64>,
}

impl ModeTables {
    fn build(grid: &GridSpec, params: FracParams, dt: f64, n_steps: usize) -> Result<Self> {
        let max = grid.max_k_squared();
        let mut present = vec![false; max + 1];
        for i in 0..grid.size() {
            present[grid.k_squared(i)] = true;
        }
        let mut slot_of_k2 = vec![usize::MAX; max + 1];
        let mut k2s = Vec::new();
        for (k2, &p) in present.iter().enumerate() {
            if p {
                slot_of_k2[k2] = k2s.len();
                k2s.push(k2);
            }
        }
        let a = params.alpha;
        let unit = grid.xi_unit();
        let stride = n_steps + 1;
        let rows: Vec<Result<(Vec<f64>, Vec<f64>)>> = k2s
            .par_iter()
            .map(|&k2| {
                let lam = (unit * (k2 as f64).sqrt()).powf(params.beta);
                let mut s = Vec::with_capacity(stride);
                let mut g = Vec::with_capacity(stride);
                for m in 0..stride {
                    let t = m as f64 * dt;
                    s.push(if m == 0 { 1.0 } else { mittag_leffler(a, 1.0, -lam * t.powf(a))? });
                    g.push(duhamel_primitive(a, lam, t)?);
                }
                let w = (0..stride).map(|m| if m == 0 { 0.0 } else { g[m] - g[m - 1] }).collect();
                Ok((s, w))
            })
            .collect();
        let mut s = Vec::with_capacity(k2s.len() * stride);
        let mut w = Vec::with_capacity(k2s.len() * stride);
        for r in rows {
            let (rs, rw) = r?;
            s.extend(rs);
            w.extend(rw);
        }
        Ok(ModeTables { slot_of_k2, stride, s, w })
    }
}

/// A solver bound to one configuration, with its weight tables built.
#[derive(Debug, Clone)]
pub struct Solver {
    config: SolverConfig,
    tables: ModeTables,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let tables = ModeTables::build(&config.grid, config.params, config.dt(), config.n_steps)?;
        Ok(Solver { config, tables })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn nonlinear_terms(&self, state: &SolverState) -> Result<NonlinearSpectra> {
        configured_terms(&self.config, state)
    }

    fn initial_spec(&self, initial: &SolverState) -> Result<SpectralCoeffs> {
        if initial.grid() != &self.config.grid {
            return Err(Error::Shape("initial data is not on the solver grid".into()));
        }
        let mut spec = transform(&initial.stacked()?)?;
        if self.config.dealias {
            dealias(&mut spec);
        }
        project_velocity(&spec)
    }

    fn step_spec(&self, history: &NonlinearHistory, y0: &SpectralCoeffs, n: usize) -> Result<SpectralCoeffs> {
        if n > self.config.n_steps {
            return Err(Error::InvalidArgument(format!("node {n} beyond the mesh end {}", self.config.n_steps)));
        }
        if history.len() < n {
            return Err(Error::MissingHistory { needed: n, have: history.len() });
        }
        let grid = *y0.grid();
        let size = grid.size();
        let comps = y0.components();
        let st = self.tables.stride;
        let mut out = y0.clone();
        out.coeffs_mut().par_chunks_mut(size).enumerate().for_each(|(c, chunk)| {
            for (i, val) in chunk.iter_mut().enumerate() {
                let base = self.tables.slot_of_k2[grid.k_squared(i)] * st;
                let mut acc = *val * self.tables.s[base + n];
                for j in 0..n {
                    acc -= history.entries[j].coeffs()[c * size + i] * self.tables.w[base + n - j];
                }
                *val = acc;
            }
        });
        debug_assert_eq!(comps, grid.d() + 2);
        project_velocity(&out)
    }

    /// State at node `n` from the initial data and the nonlinearities at nodes `0..n`.
    pub fn step(&self, history: &NonlinearHistory, initial: &SolverState, n: usize) -> Result<SolverState> {
        let y0 = self.initial_spec(initial)?;
        let y = self.step_spec(history, &y0, n)?;
        Ok(SolverState::from_stacked(n, &inverse_transform(&y)?))
    }

    fn sweep(&self, y0: &SpectralCoeffs, traj: &[SpectralCoeffs]) -> Result<Vec<SpectralCoeffs>> {
        let n_steps = self.config.n_steps;
        let entries: Vec<SpectralCoeffs> = (0..n_steps)
            .into_par_iter()
            .map(|j| {
                let state = SolverState::from_stacked(j, &inverse_transform(&traj[j])?);
                self.nonlinear_terms(&state)?.stacked()
            })
            .collect::<Result<_>>()?;
        let history = NonlinearHistory::from_entries(entries);
        (0..=n_steps).into_par_iter().map(|n| self.step_spec(&history, y0, n)).collect()
    }

    /// Picard iteration on whole trajectories, starting from the linear evolution.
    pub fn picard_solve(&self, initial: &SolverState) -> Result<PicardRun> {
        let cfg = &self.config;
        let y0 = self.initial_spec(initial)?;
        let empty = NonlinearHistory::from_entries(vec![SpectralCoeffs::zeros(cfg.grid, y0.components()); cfg.n_steps]);
        let mut traj: Vec<SpectralCoeffs> =
            (0..=cfg.n_steps).into_par_iter().map(|n| self.step_spec(&empty, &y0, n)).collect::<Result<_>>()?;
        let mut log = Vec::new();
        let mut converged = false;
        let mut failure = None;
        let mut prev_change: Option<f64> = None;
        let metric = Metric::new(cfg)?;
        for iter in 1..=cfg.picard_max {
            let next = match self.sweep(&y0, &traj) {
                Ok(t) => t,
                Err(e @ Error::NonFinite { .. }) => {
                    failure = Some(e.to_string());
                    break;
                }
                Err(e) => return Err(e),
            };
            let diff: Vec<SpectralCoeffs> =
                next.iter().zip(&traj).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
            let change = metric.measure(&diff, cfg)?;
            let scale = metric.measure(&next, cfg)?;
            let rel = if scale > 0.0 { change / scale } else { change };
            let ratio = prev_change.filter(|&p| p > 0.0).map(|p| change / p);
            log.push(PicardIterate { iter, change, rel_change: rel, ratio });
            prev_change = Some(change);
            if !change.is_finite() || next.iter().any(|s| s.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite())) {
                failure = Some(format!("non-finite iterate at Picard iteration {iter}"));
                break;
            }
            traj = next;
            if rel < cfg.picard_tol {
                converged = true;
                break;
            }
        }
        let states = traj
            .iter()
            .enumerate()
            .map(|(n, s)| Ok(SolverState::from_stacked(n, &inverse_transform(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PicardRun {
            trajectory: Trajectory { params: cfg.params, grid: cfg.grid, times: cfg.times(), states },
            log,
            converged,
            failure,
        })
    }
}

fn project_velocity(spec: &SpectralCoeffs) -> Result<SpectralCoeffs> {
    let d = spec.grid().d();
    let u = SpectralCoeffs::stack(&(0..d).map(|c| spec.extract(c)).collect::<Vec<_>>())?;
    let mut parts = vec![leray_project(&u)?];
    parts.push(spec.extract(d));
    parts.push(spec.extract(d + 1));
    SpectralCoeffs::stack(&parts)
}

fn spec_l2(spec: &SpectralCoeffs) -> f64 {
    let g = spec.grid();
    spec.l2() * (g.box_length().powi(g.d() as i32)).sqrt()
}

enum Metric {
    L2,
    FNorm(Box<FNormSurrogate>),
}

impl Metric {
    fn new(cfg: &SolverConfig) -> Result<Self> {
        Ok(match &cfg.stopping {
            StoppingRule::RelativeL2 => Metric::L2,
            StoppingRule::FNorm(e) => Metric::FNorm(Box::new(FNormSurrogate::new(&cfg.grid, e.clone())?)),
        })
    }

    fn measure(&self, traj: &[SpectralCoeffs], cfg: &SolverConfig) -> Result<f64> {
        match self {
            Metric::L2 => Ok(traj.iter().map(spec_l2).fold(0.0, f64::max)),
            Metric::FNorm(f) => {
                let states = traj
                    .iter()
                    .enumerate()
                    .map(|(n, s)| Ok(SolverState::from_stacked(n, &inverse_transform(s)?)))
                    .collect::<Result<Vec<_>>>()?;
                f.norm(&states, &cfg.times())
            }
        }
    }
}

pub const FNORM_TERMS: usize = 7;

/// Discrete stand-in for the solution-space norm: suprema over mesh times of
/// Besov-Morrey norms of `u, v, ∇w` plus time-weighted Morrey norms.
#[derive(Debug, Clone)]
pub struct FNormSurrogate {
    exps: AdmissibleExponents,
    bank: LPBank,
    sampling: MorreySampling,
}

impl FNormSurrogate {
    pub fn new(grid: &GridSpec, exps: AdmissibleExponents) -> Result<Self> {
        Ok(FNormSurrogate { bank: lp_bank(grid)?, sampling: MorreySampling::standard(grid), exps })
    }

    /// The per-node terms `[N_u, N_v, N_∇w, M_u, M_v, M_∇w, W]`: Besov-Morrey
    /// norms, time-weighted Morrey norms, and `w` in `M^{2-β}_{(d-λ)/(2-β)}`.
    pub fn terms(&self, state: &SolverState, t: f64) -> Result<[f64; FNORM_TERMS]> {
        let e = &self.exps;
        let gw = gradient(&state.w)?;
        let fields = [&state.u, &state.v, &gw];
        let mut out = [0.0; FNORM_TERMS];
        for j in 0..3 {
            let bp = BesovParams::new(-e.beta_sub[j], e.r[j], e.lambda, f64::INFINITY)?;
            out[j] = besov_morrey_norm(fields[j], bp, &self.bank, &self.sampling)?;
            let m = morrey_norm(fields[j], MorreyParams::new(e.q[j], e.lambda)?, &self.sampling)?;
            out[3 + j] = if t > 0.0 { t.powf(0.5 * e.chi[j]) * m } else { 0.0 };
        }
        let beta = e.beta;
        let pw = (e.d as f64 - e.lambda) / (2.0 - beta);
        out[6] = sobolev_morrey_norm(&state.w, 2.0 - beta, MorreyParams::new(pw, e.lambda)?, &self.sampling)?;
        Ok(out)
    }

    /// Sum over terms of the supremum over nodes.
    pub fn norm(&self, states: &[SolverState], times: &[f64]) -> Result<f64> {
        let per: Vec<[f64; FNORM_TERMS]> =
            states.par_iter().zip(times).map(|(s, &t)| self.terms(s, t)).collect::<Result<_>>()?;
        Ok((0..FNORM_TERMS).map(|k| per.iter().map(|p| p[k]).fold(0.0, f64::max)).sum())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardIterate {
    pub iter: usize,
    /// Size of the change between successive trajectories under the stopping metric.
    pub change: f64,
    pub rel_change: f64,
    /// `change_k / change_{k-1}`; absent for the first sweep and after a zero change.
    pub ratio: Option<f64>,
}

/// States at every mesh node.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: FracParams,
    pub grid: GridSpec,
    pub times: Vec<f64>,
    pub states: Vec<SolverState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardRun {
    pub trajectory: Trajectory,
    pub log: Vec<PicardIterate>,
    pub converged: bool,
    /// Why the iteration stopped early, if it blew up.
    pub failure: Option<String>,
}

/// Build the solver and run the Picard iteration.
pub fn picard_solve(config: &SolverConfig, initial: &SolverState) -> Result<PicardRun> {
    Solver::new(config.clone())?.picard_solve(initial)
}

/// Per-node L² norms of `∂^α y + (-Δ)^{β/2} y + N(y)` for the three equations,
/// with the Caputo derivative from the L1 rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub per_node: Vec<[f64; 3]>,
    /// Maximum over nodes with `t >= T/2`.
    pub window_max: [f64; 3],
}

pub fn caputo_residual(traj: &Trajectory, config: &SolverConfig) -> Result<ResidualReport> {
    let nodes = traj.states.len();
    if nodes < 2 || traj.times.len() != nodes {
        return Err(Error::InvalidArgument("a residual needs at least two mesh nodes".into()));
    }
    let h = traj.times[1] - traj.times[0];
    for (k, w) in traj.times.windows(2).enumerate() {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
            return Err(Error::NonuniformMesh { index: k + 1 });
        }
    }
    let grid = traj.grid;
    let d = grid.d();
    let alpha = traj.params.alpha;
    let specs: Vec<SpectralCoeffs> =
        traj.states.par_iter().map(|s| transform(&s.stacked()?)).collect::<Result<_>>()?;
    let b = caputo_l1_weights(alpha, nodes);
    let c = h.powf(-alpha) / gamma_fn(2.0 - alpha)?;
    let beta = traj.params.beta;
    let lift = radial_table(&grid, &|r: f64| Ok(r.powf(beta)))?;
    let per_node: Vec<[f64; 3]> = (0..nodes)
        .into_par_iter()
        .map(|n| {
            if n == 0 {
                return Ok([0.0; 3]);
            }
            let nl = configured_terms(config, &traj.states[n])?.stacked()?;
            let mut r = specs[n].clone();
            let size = grid.size();
            for (idx, v) in r.coeffs_mut().iter_mut().enumerate() {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += (specs[n - j].coeffs()[idx] - specs[n - j - 1].coeffs()[idx]) * b[j];
                }
                *v = acc * c + *v * lift[grid.k_squared(idx % size)] + nl.coeffs()[idx];
            }
            let part = |lo: usize, hi: usize| -> Result<f64> {
                let s = SpectralCoeffs::stack(&(lo..hi).map(|k| r.extract(k)).collect::<Vec<_>>())?;
                Ok(spec_l2(&s))
            };
            Ok([part(0, d)?, part(d, d + 1)?, part(d + 1, d + 2)?])
        })
        .collect::<Result<_>>()?;
    let half = 0.5 * traj.times[nodes - 1];
    let mut window_max = [0.0f64; 3];
    for (n, r) in per_node.iter().enumerate() {
        if n > 0 && traj.times[n] >= half * (1.0 - 1e-12) {
            for k in 0..3 {
                window_max[k] = window_max[k].max(r[k]);
            }
        }
    }
    Ok(ResidualReport { per_node, window_max })
}

/// Relative L² discrepancies between run `b` and the rescaled run `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub per_node: Vec<[f64; 3]>,
    pub max: f64,
}

/// Configuration and initial data of the rescaled problem: box `L/λ`, final
/// time `T/λ^{β/α}`, `u·λ^{β-1}`, `v·λ^{2β-2}`, `w` and `φ` unchanged as samples.
pub fn scaled_problem(config: &SolverConfig, initial: &SolverState, lambda: f64) -> Result<(SolverConfig, SolverState)> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale {lambda} must be positive")));
    }
    let g = config.grid;
    let grid = GridSpec::new(g.d(), g.n(), g.box_length() / lambda)?;
    let beta = config.params.beta;
    let mut cfg = config.clone();
    cfg.grid = grid;
    cfg.final_time = config.final_time / lambda.powf(beta / config.params.alpha);
    cfg.potential = Field::new(grid, 1, config.potential.values().to_vec())?;
    let rebox = |f: &Field, s: f64| Field::new(grid, f.components(), f.values().iter().map(|x| x * s).collect());
    let state = SolverState::new(
        initial.t_index,
        rebox(&initial.u, lambda.powf(beta - 1.0))?,
        rebox(&initial.v, lambda.powf(2.0 * beta - 2.0))?,
        rebox(&initial.w, 1.0)?,
    )?;
    Ok((cfg, state))
}

pub fn scaling_family_check(a: &Trajectory, b: &Trajectory, lambda: f64) -> Result<ScalingReport> {
    let (ga, gb) = (a.grid, b.grid);
    let beta = a.params.beta;
    let tscale = lambda.powf(beta / a.params.alpha);
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1e-300);
    if a.params != b.params
        || ga.d() != gb.d()
        || ga.n() != gb.n()
        || !close(ga.box_length() / lambda, gb.box_length())
        || a.states.len() != b.states.len()
        || a.times.iter().zip(&b.times).any(|(&ta, &tb)| !close(ta / tscale, tb) && ta != tb)
    {
        return Err(Error::Mismatch("runs are not related by the requested rescaling".into()));
    }
    let factors = [lambda.powf(beta - 1.0), lambda.powf(2.0 * beta - 2.0), 1.0];
    let rel = |fa: &Field, fb: &Field, s: f64| -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for (x, y) in fa.values().iter().zip(fb.values()) {
            num += (y - s * x) * (y - s * x);
            den += y * y;
        }
        if den > 0.0 {
            (num / den).sqrt()
        } else {
            num.sqrt()
        }
    };
    let per_node: Vec<[f64; 3]> = a
        .states
        .iter()
        .zip(&b.states)
        .map(|(sa, sb)| [rel(&sa.u, &sb.u, factors[0]), rel(&sa.v, &sb.v, factors[1]), rel(&sa.w, &sb.w, factors[2])])
        .collect();
    let max = per_node.iter().flatten().copied().fold(0.0, f64::max);
    Ok(ScalingReport { per_node, max })
}
