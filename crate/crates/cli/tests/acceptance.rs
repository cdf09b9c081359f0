//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;

use fracks::config::RunConfig;
use fracks::profiles::{gaussian, random_band_limited, single_mode, vortex};
use fracks::solver::{caputo_residual, picard_solve, SolverConfig, SolverState};
use fracks::spaces::{
    besov_morrey_norm, embedding_probe, lp_bank, morrey_norm, BesovParams, Embedding, MorreyParams, MorreySampling,
};
use fracks::specfun::{
    erfcx, laplace_identity_residual, mittag_leffler, wright_moment, wright_moment_exact,
};
use fracks::spectral::{
    dealias, duhamel_weight, duhamel_weights, inverse_transform, resample, solution_op, subordinate_apply,
    transform, FracParams, Field, GridSpec, OperatorKind, SpectralCoeffs, SubordinationQuad,
};
use fracks::verify::{
    asymptotics_experiment, decay_exponent, AsymptoticsOptions, DecayKind, DecaySetup, DecayWindow, TargetNorm,
};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn torus(n: usize) -> GridSpec {
    GridSpec::new(2, n, 2.0 * PI).unwrap()
}

fn bundled_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/small2d.cfg")
}

fn special_functions() -> Check {
    let mut worst_exp = 0.0f64;
    for i in 0..=330 {
        let z = -30.0 + 0.1 * i as f64;
        let v = mittag_leffler(1.0, 1.0, z).map_err(e)?;
        worst_exp = worst_exp.max((v / z.exp() - 1.0).abs());
    }
    let mut worst_erfc = 0.0f64;
    for i in 0..=1000 {
        let x = 0.01 * i as f64;
        worst_erfc = worst_erfc.max((mittag_leffler(0.5, 1.0, -x).map_err(e)? - erfcx(x)).abs());
    }
    let mut worst_moment = 0.0f64;
    for a in [0.3, 0.5, 0.7] {
        for rho in [0.0, 0.5, 1.0, 2.0] {
            let exact = wright_moment_exact(a, rho);
            worst_moment = worst_moment.max((wright_moment(a, rho, 64).map_err(e)? / exact - 1.0).abs());
        }
    }
    let mut worst_laplace = 0.0f64;
    for (a, b, lam, s) in [(1.0, 1.0, 1.0, 2.0), (0.5, 1.0, 1.0, 2.0), (0.7, 0.7, 2.0, 3.0)] {
        worst_laplace = worst_laplace.max(laplace_identity_residual(a, b, lam, s).map_err(e)?);
    }
    ensure(
        worst_exp < 1e-10 && worst_erfc < 1e-8 && worst_moment < 1e-6 && worst_laplace <= 1e-6,
        format!(
            "exp rel {worst_exp:.1e}, erfc abs {worst_erfc:.1e}, moments rel {worst_moment:.1e}, laplace {worst_laplace:.1e}"
        ),
    )
}

fn operator_cross_validation() -> Check {
    let g = torus(64);
    let f = random_band_limited(&g, 1, 1.0, 16, 5, false).map_err(e)?;
    let mut worst = 0.0f64;
    for alpha in [0.3, 0.5, 0.8] {
        for beta in [1.2, 1.6, 2.0] {
            let p = FracParams::with_limits(alpha, beta).map_err(e)?;
            for kind in [OperatorKind::S, OperatorKind::P] {
                let a = solution_op(&f, 0.5, p, kind, 0.0).map_err(e)?;
                let b = subordinate_apply(&f, 0.5, p, kind, SubordinationQuad::default()).map_err(e)?;
                worst = worst.max(b.rel_l2_distance(&a).map_err(e)?);
            }
        }
    }
    ensure(worst < 1e-6, format!("max relative L2 discrepancy {worst:.2e} over 9 pairs, S and P"))
}

fn duhamel_exactness() -> Check {
    let mut worst = 0.0f64;
    let mut count = 0;
    for alpha in [0.2, 0.4, 0.6, 0.8, 0.95] {
        for (lam, a, b) in [(0.5, 0.0, 0.1), (4.0, 0.3, 0.4), (30.0, 0.0, 0.05), (200.0, 1.0, 1.02)] {
            let w = duhamel_weight(alpha, lam, a, b).map_err(e)?;
            // s = x^{1/α} removes the endpoint singularity: ∫ (1/α) E_{α,α}(-λ x) dx over [a^α, b^α]
            let q = quadrature::double_exponential::integrate(
                |x| mittag_leffler(alpha, alpha, -lam * x).unwrap() / alpha,
                f64::powf(a, alpha),
                f64::powf(b, alpha),
                1e-14,
            );
            worst = worst.max((w - q.integral).abs());
            count += 1;
        }
    }
    let p = FracParams::new(0.7, 1.6).map_err(e)?;
    let xi = [0.0, 1.0, 2.5, 7.0, 20.0];
    let whole = duhamel_weights(0.0, 1.0, p, &xi).map_err(e)?;
    let mut sum = vec![0.0; xi.len()];
    for j in 0..10 {
        let part = duhamel_weights(j as f64 / 10.0, (j + 1) as f64 / 10.0, p, &xi).map_err(e)?;
        sum.iter_mut().zip(part).for_each(|(s, v)| *s += v);
    }
    let tele = whole.iter().zip(&sum).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(
        worst < 1e-9 && tele < 1e-10 && count == 20,
        format!("{count} triples, max |weight - quadrature| {worst:.1e}; telescoping {tele:.1e}"),
    )
}

fn decay_exponents() -> Check {
    let g = torus(128);
    let mut spike = Field::zeros(g, 1);
    spike.values_mut()[0] = 1.0 / g.cell_volume();
    let mut lines = Vec::new();
    let mut ok = true;
    for (beta, alpha) in [(1.5, 0.5), (1.9, 0.8), (2.0, 1.0)] {
        let p = FracParams::with_limits(alpha, beta).map_err(e)?;
        let tol = if alpha == 1.0 { 0.05 } else { 0.10 };
        for kind in [DecayKind::Heat, DecayKind::S] {
            let setup = DecaySetup {
                kind,
                theta_order: 0.0,
                params: p,
                data_s: 0.0,
                data_p: 1.0,
                target: TargetNorm::SobolevMorrey { s: 0.0, mp: MorreyParams::new(2.0, 0.0).map_err(e)? },
            };
            let r = decay_exponent(&setup, &spike, DecayWindow::widest(&spike, kind, p, 16)).map_err(e)?;
            ok &= r.rel_err < tol;
            lines.push(format!("({beta},{alpha}) {} {:.3}/{:.3}", kind.name(), r.measured_slope, r.predicted_slope));
        }
    }
    ensure(ok, lines.join("; "))
}

/// `N(y)` for `α = 1, β = 2` assembled from pointwise products, for the
/// stacked spectrum `(u_1, u_2, v, w)` on a 2-D torus.
struct ClassicalRhs {
    grid: GridSpec,
    grad_phi: [Vec<f64>; 2],
}

impl ClassicalRhs {
    fn new(phi: &Field) -> Self {
        let g = *phi.grid();
        let s = transform(phi).unwrap();
        let d: Vec<Field> = (0..2).map(|a| inverse_transform(&Self::deriv(&s, a)).unwrap()).collect();
        ClassicalRhs { grid: g, grad_phi: [d[0].values().to_vec(), d[1].values().to_vec()] }
    }

    fn deriv(s: &SpectralCoeffs, axis: usize) -> SpectralCoeffs {
        let g = *s.grid();
        let n = g.size();
        let mut out = s.clone();
        for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
            let k = g.wave_vector(idx % n)[axis] as f64 * g.xi_unit();
            // the Nyquist row has no odd derivative
            let k = if g.wave_vector(idx % n)[axis].unsigned_abs() as usize * 2 == g.n() { 0.0 } else { k };
            *c *= Complex64::new(0.0, k);
        }
        out
    }

    fn phys(&self, s: &SpectralCoeffs) -> Vec<f64> {
        inverse_transform(s).unwrap().into_values()
    }

    fn spec(&self, v: Vec<f64>) -> SpectralCoeffs {
        let mut s = transform(&Field::new(self.grid, 1, v).unwrap()).unwrap();
        dealias(&mut s);
        s
    }

    fn eval(&self, y: &SpectralCoeffs) -> SpectralCoeffs {
        let g = self.grid;
        let n = g.size();
        let comp = |c: usize| y.extract(c);
        let (u1, u2, v, w) = (comp(0), comp(1), comp(2), comp(3));
        let pu = [self.phys(&u1), self.phys(&u2)];
        let pv = self.phys(&v);
        let pw = self.phys(&w);
        let dx = |s: &SpectralCoeffs, a| self.phys(&Self::deriv(s, a));
        let adv = |s: &SpectralCoeffs| -> Vec<f64> {
            let (a, b) = (dx(s, 0), dx(s, 1));
            (0..n).map(|i| pu[0][i] * a[i] + pu[1][i] * b[i]).collect()
        };
        // u·∇u + v∇φ, then the Leray projection by hand
        let mut fu: Vec<SpectralCoeffs> = (0..2)
            .map(|c| {
                let a = adv(if c == 0 { &u1 } else { &u2 });
                self.spec((0..n).map(|i| a[i] + pv[i] * self.grad_phi[c][i]).collect())
            })
            .collect();
        for idx in 0..n {
            let k = g.wave_vector(idx);
            let (k1, k2) = (k[0] as f64, k[1] as f64);
            let kk = k1 * k1 + k2 * k2;
            if kk == 0.0 {
                continue;
            }
            let (a, b) = (fu[0].coeffs()[idx], fu[1].coeffs()[idx]);
            let dot = a * k1 + b * k2;
            fu[0].coeffs_mut()[idx] = a - dot * (k1 / kk);
            fu[1].coeffs_mut()[idx] = b - dot * (k2 / kk);
        }
        // u·∇v + ∇·(v∇w)
        let (wx, wy) = (dx(&w, 0), dx(&w, 1));
        let fx = self.spec((0..n).map(|i| pv[i] * wx[i]).collect());
        let fy = self.spec((0..n).map(|i| pv[i] * wy[i]).collect());
        let av = self.spec(adv(&v));
        let fv = av.add(&Self::deriv(&fx, 0)).unwrap().add(&Self::deriv(&fy, 1)).unwrap();
        // u·∇w + w v
        let aw = adv(&w);
        let fw = self.spec((0..n).map(|i| aw[i] + pw[i] * pv[i]).collect());
        SpectralCoeffs::stack(&[fu[0].clone(), fu[1].clone(), fv, fw]).unwrap()
    }
}

/// Fourth-order exponential Runge-Kutta (Cox-Matthews) for `y' = -|k|² y - N(y)`.
fn etdrk4(rhs: &ClassicalRhs, y0: &SpectralCoeffs, t_end: f64, steps: usize) -> SpectralCoeffs {
    let g = rhs.grid;
    let n = g.size();
    let h = t_end / steps as f64;
    // φ-function coefficients per |k|², by contour averaging
    let max = g.max_k_squared();
    let contour = 64;
    let coef: Vec<[f64; 5]> = (0..=max)
        .map(|k2| {
            let l = -(k2 as f64) * g.xi_unit() * g.xi_unit();
            let mut acc = [0.0; 5];
            for j in 0..contour {
                let r = Complex64::from_polar(1.0, PI * (j as f64 + 0.5) / contour as f64);
                let z = r + h * l;
                let ez = z.exp();
                let ez2 = (z / 2.0).exp();
                let terms = [
                    h * (ez2 - 1.0) / z,
                    h * (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z.powi(3),
                    h * (2.0 + z + ez * (z - 2.0)) / z.powi(3),
                    h * (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z.powi(3),
                    0.0.into(),
                ];
                for (a, t) in acc.iter_mut().zip(terms) {
                    *a += t.re / contour as f64;
                }
            }
            acc[4] = (h * l / 2.0).exp();
            acc
        })
        .collect();
    let lin = |s: &SpectralCoeffs, half: bool| -> SpectralCoeffs {
        let mut o = s.clone();
        for (idx, c) in o.coeffs_mut().iter_mut().enumerate() {
            let e2 = coef[g.k_squared(idx % n)][4];
            *c *= if half { e2 } else { e2 * e2 };
        }
        o
    };
    let combine = |base: &SpectralCoeffs, parts: &[(&SpectralCoeffs, usize)]| -> SpectralCoeffs {
        let mut o = base.clone();
        for (idx, c) in o.coeffs_mut().iter_mut().enumerate() {
            let row = &coef[g.k_squared(idx % n)];
            for (p, which) in parts {
                *c -= p.coeffs()[idx] * row[*which];
            }
        }
        o
    };
    let mut y = y0.clone();
    for _ in 0..steps {
        let nu = rhs.eval(&y);
        let a = combine(&lin(&y, true), &[(&nu, 0)]);
        let na = rhs.eval(&a);
        let b = combine(&lin(&y, true), &[(&na, 0)]);
        let nb = rhs.eval(&b);
        let c = {
            let mut t = lin(&a, true);
            let d = nb.scaled(2.0).sub(&nu).unwrap();
            for (idx, x) in t.coeffs_mut().iter_mut().enumerate() {
                *x -= d.coeffs()[idx] * coef[g.k_squared(idx % n)][0];
            }
            t
        };
        let nc = rhs.eval(&c);
        let mut next = lin(&y, false);
        for (idx, x) in next.coeffs_mut().iter_mut().enumerate() {
            let row = &coef[g.k_squared(idx % n)];
            *x -= nu.coeffs()[idx] * row[1]
                + (na.coeffs()[idx] + nb.coeffs()[idx]) * (2.0 * row[2])
                + nc.coeffs()[idx] * row[3];
        }
        y = next;
    }
    y
}

fn classical_reduction() -> Check {
    let g = torus(64);
    let amp = 0.2;
    let phi = gaussian(&g, 1.0, 0.8).map_err(e)?;
    let init = SolverState::new(
        0,
        vortex(&g, amp, 0.6).map_err(e)?,
        gaussian(&g, amp, 0.5).map_err(e)?,
        gaussian(&g, amp, 0.7).map_err(e)?,
    )
    .map_err(e)?;
    let t_end = 0.5;
    let mut cfg = SolverConfig::new(FracParams::with_limits(1.0, 2.0).map_err(e)?, g, t_end, 400).map_err(e)?;
    cfg.potential = phi.clone();
    cfg.picard_tol = 1e-13;
    cfg.picard_max = 40;
    let run = picard_solve(&cfg, &init).map_err(e)?;
    if !run.converged {
        return Err(format!("Picard did not converge: {:?}", run.failure));
    }
    let last = run.trajectory.states.last().unwrap();
    let got = Field::stack(&[last.u.clone(), last.v.clone(), last.w.clone()]).map_err(e)?;

    let y0 = transform(&run.trajectory.states[0].u.clone()).map_err(e)?;
    let y0 = SpectralCoeffs::stack(&[
        y0,
        transform(&run.trajectory.states[0].v).map_err(e)?,
        transform(&run.trajectory.states[0].w).map_err(e)?,
    ])
    .map_err(e)?;
    let rhs = ClassicalRhs::new(&phi);
    let reference = inverse_transform(&etdrk4(&rhs, &y0, t_end, 200)).map_err(e)?;
    let err = got.rel_l2_distance(&reference).map_err(e)?;
    let lin_state = fracks::solver::linear_propagate(&run.trajectory.states[0], t_end, cfg.params).map_err(e)?;
    let lin = Field::stack(&[lin_state.u, lin_state.v, lin_state.w]).map_err(e)?;
    let signal = lin.rel_l2_distance(&reference).map_err(e)?;
    ensure(
        err < 1e-4 && signal > 10.0 * err,
        format!("rel L2 error {err:.2e}; nonlinear part of the reference {signal:.2e}"),
    )
}

fn contraction() -> Check {
    let cfg = RunConfig::load(&bundled_path()).map_err(e)?;
    let p = cfg.realize(Path::new("."), 0).map_err(e)?;
    let run = picard_solve(&p.solver, &p.initial).map_err(e)?;
    let ratios: Vec<f64> = run.log.iter().skip(1).filter_map(|l| l.ratio).collect();
    let max = ratios.iter().copied().fold(0.0, f64::max);
    ensure(
        run.converged && run.log.len() <= 8 && ratios.len() + 1 == run.log.len() && max < 0.5,
        format!("kappa 1e-3: {} iterations, max ratio {max:.2e}", run.log.len()),
    )
}

fn consistency() -> Check {
    let alpha = 0.6;
    let g = torus(16);
    let mut s = SolverState::zeros(g);
    s.v = single_mode(&g, 1, 1.0, [1, 0, 0], 0).map_err(e)?;
    let mut res = Vec::new();
    for steps in [32usize, 64, 128] {
        let mut cfg = SolverConfig::new(FracParams::new(alpha, 1.5).map_err(e)?, g, 2.0, steps).map_err(e)?;
        cfg.nonlinear = false;
        let run = picard_solve(&cfg, &s).map_err(e)?;
        res.push(caputo_residual(&run.trajectory, &cfg).map_err(e)?.window_max[1]);
    }
    let orders: Vec<f64> = res.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    ensure(
        res.windows(2).all(|w| w[1] < w[0]) && orders.iter().all(|o| (o - (2.0 - alpha)).abs() < 0.3),
        format!("residuals {:.2e} {:.2e} {:.2e}, orders {:.3} {:.3} (target {})", res[0], res[1], res[2], orders[0], orders[1], 2.0 - alpha),
    )
}

fn asymptotics() -> Check {
    let cfg = RunConfig::load(&bundled_path()).map_err(e)?;
    let p = cfg.realize(Path::new("."), 0).map_err(e)?;
    let mut sc = p.solver.clone();
    sc.final_time = 8.0;
    let a = p.initial.clone();
    let mut b = a.clone();
    b.u = b.u.add(&single_mode(&sc.grid, 2, 1e-4, [0, 4, 0], 0).map_err(e)?).map_err(e)?;
    let r = asymptotics_experiment(&sc, &a, &b, &p.exponents, AsymptoticsOptions::default()).map_err(e)?;
    let (f, g) = (r.f_summary, r.g_summary);
    ensure(
        f.monotone_after_peak
            && g.monotone_after_peak
            && f.final_ratio < 0.05
            && g.final_ratio < 0.05
            && r.forward_holds
            && r.reverse_holds,
        format!(
            "peaks at nodes {}/{}, final/peak f {:.3e} g {:.3e}, c_fg {:.4} c_gf {:.4}",
            f.peak_index, g.peak_index, f.final_ratio, g.final_ratio, r.c_fg, r.c_gf
        ),
    )
}

fn norm_toolkit() -> Check {
    let g = torus(64);
    let s = MorreySampling::standard(&g);
    let bank = lp_bank(&g).map_err(e)?;
    let corpus: Vec<Field> = (0..20).map(|k| random_band_limited(&g, 1, 1.0, 10, 100 + k, true).unwrap()).collect();
    let mut lp_err = 0.0f64;
    let mut ordering = true;
    for f in &corpus {
        for p in [1.0, 2.0, 3.5] {
            let m = morrey_norm(f, MorreyParams::new(p, 0.0).map_err(e)?, &s).map_err(e)?;
            lp_err = lp_err.max((m / f.lp_norm(p) - 1.0).abs());
        }
        let inf = besov_morrey_norm(f, BesovParams::new(0.5, 2.0, 1.0, f64::INFINITY).map_err(e)?, &bank, &s).map_err(e)?;
        let one = besov_morrey_norm(f, BesovParams::new(0.5, 2.0, 1.0, 1.0).map_err(e)?, &bank, &s).map_err(e)?;
        ordering &= inf <= one;
    }
    let half = GridSpec::new(2, 64, PI).map_err(e)?;
    let f = &corpus[0];
    let f2 = Field::new(half, 1, f.values().to_vec()).map_err(e)?;
    let mut scale_err = 0.0f64;
    for (p, lam) in [(2.0, 0.0), (2.0, 1.0), (3.0, 1.5)] {
        let mp = MorreyParams::new(p, lam).map_err(e)?;
        let a = morrey_norm(f, mp, &s).map_err(e)?;
        let b = morrey_norm(&f2, mp, &MorreySampling::standard(&half)).map_err(e)?;
        scale_err = scale_err.max((b / a / 2f64.powf(-(2.0 - lam) / p) - 1.0).abs());
    }
    let fine = torus(128);
    let (bf, sf) = (lp_bank(&fine).map_err(e)?, MorreySampling::standard(&fine));
    let base: Vec<Field> = (0..50).map(|k| random_band_limited(&g, 1, 1.0, 10, 100 + k, true).unwrap()).collect();
    let refined: Vec<Field> = base.iter().map(|f| resample(f, &fine).unwrap()).collect();
    let mut spread = 0.0f64;
    for rel in [
        Embedding::MorreyIntoBesovInf { p: 2.0, lambda: 1.0 },
        Embedding::BesovOneIntoMorrey { p: 2.0, lambda: 1.0 },
        Embedding::SobolevMorrey { s1: 0.5, p1: 2.0, s2: 0.0, p2: 4.0, lambda: 0.0 },
    ] {
        let a = embedding_probe(&base, rel, &bank, &s).map_err(e)?;
        let b = embedding_probe(&refined, rel, &bf, &sf).map_err(e)?;
        spread = spread.max((b.max / a.max - 1.0).abs());
    }
    ensure(
        lp_err < 1e-10 && ordering && scale_err < 0.02 && spread < 0.10,
        format!("L^p {lp_err:.1e}, l^inf <= l^1 {ordering}, scaling {scale_err:.2e}, embedding spread {spread:.3}"),
    )
}

fn determinism() -> Check {
    let dirs = [tempfile::TempDir::new().map_err(e)?, tempfile::TempDir::new().map_err(e)?];
    let mut csvs = Vec::new();
    for d in &dirs {
        let o = Command::new(env!("CARGO_BIN_EXE_fracks"))
            .args(["solve", "--threads", "2", "--config"])
            .arg(bundled_path())
            .arg("--out")
            .arg(d.path())
            .output()
            .map_err(e)?;
        if !o.status.success() {
            return Err(String::from_utf8_lossy(&o.stderr).into_owned());
        }
        csvs.push(std::fs::read(d.path().join("run.csv")).map_err(e)?);
    }
    ensure(csvs[0] == csvs[1], format!("two runs with 2 threads, {} CSV bytes each, identical: {}", csvs[0].len(), csvs[0] == csvs[1]))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("special functions", special_functions),
        ("operator cross-validation", operator_cross_validation),
        ("Duhamel weights", duhamel_exactness),
        ("decay exponents", decay_exponents),
        ("classical reduction", classical_reduction),
        ("contraction", contraction),
        ("residual order", consistency),
        ("asymptotic equivalence", asymptotics),
        ("norm toolkit", norm_toolkit),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {} {name}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {} {name}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
