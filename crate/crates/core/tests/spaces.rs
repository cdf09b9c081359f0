use std::f64::consts::PI;

use fracks::profiles::random_band_limited;
use fracks::spaces::*;
use fracks::spectral::{gradient, resample, Field, GridSpec};
use fracks::Error;

fn torus(n: usize) -> GridSpec {
    GridSpec::new(2, n, 2.0 * PI).unwrap()
}

fn mode(g: &GridSpec, k: [f64; 2], phase: f64) -> Field {
    Field::from_fn(*g, 1, |_, x| (k[0] * x[0] + k[1] * x[1] + phase).cos())
}

fn corpus(g: &GridSpec, count: u64, kmax: i64) -> Vec<Field> {
    (0..count).map(|s| random_band_limited(g, 1, 1.0, kmax, 100 + s, true).unwrap()).collect()
}

#[test]
fn shells_at_dyadic_frequency() {
    let g = torus(64);
    let bank = lp_bank(&g).unwrap();
    for j in 0..4 {
        let k2 = 1usize << (2 * j);
        let live: Vec<i32> = bank.shells().filter(|&k| bank.value(k, k2).unwrap() > 0.0).collect();
        assert!(!live.is_empty() && live.len() <= 3, "{live:?}");
        assert!(live.windows(2).all(|w| w[1] == w[0] + 1));
    }
}

#[test]
fn projection_basics() {
    let g = torus(64);
    let bank = lp_bank(&g).unwrap();
    let f = mode(&g, [1.0, 0.0], 0.3);
    let far = lp_project(&f, bank.k_max(), &bank).unwrap();
    assert!(far.max_abs() < 1e-14);
    assert!(matches!(lp_project(&f, bank.k_max() + 1, &bank), Err(Error::ShellOutOfRange { .. })));

    let h = random_band_limited(&g, 1, 1.0, 12, 3, false).unwrap();
    let mean = h.means()[0];
    let mut sum = Field::zeros(g, 1);
    for k in bank.shells() {
        let part = lp_project(&h, k, &bank).unwrap();
        assert!(part.l2_norm() <= h.l2_norm() * (1.0 + 1e-14));
        sum = sum.add(&part).unwrap();
    }
    let centred = Field::from_fn(g, 1, |_, _| -mean).add(&h).unwrap();
    assert!(sum.sub(&centred).unwrap().max_abs() < 1e-10);
}

#[test]
fn morrey_reduces_to_lebesgue() {
    let g = torus(64);
    let s = MorreySampling::standard(&g);
    for (i, f) in corpus(&g, 5, 10).iter().enumerate() {
        for &p in &[1.0, 2.0, 3.5] {
            let m = morrey_norm(f, MorreyParams::new(p, 0.0).unwrap(), &s).unwrap();
            let lp = f.lp_norm(p);
            assert!((m - lp).abs() <= 1e-10 * lp, "field {i}, p = {p}: {m} vs {lp}");
        }
    }
}

#[test]
fn morrey_of_constant() {
    let g = torus(64);
    let one = Field::from_fn(g, 1, |_, _| 1.0);
    let v = morrey_norm(&one, MorreyParams::new(2.0, 1.0).unwrap(), &MorreySampling::standard(&g)).unwrap();
    // R^{-1/2} (π R^2)^{1/2} at R = π
    assert!((v - PI).abs() < 0.01 * PI, "{v}");
}

#[test]
fn morrey_scaling_under_resampling() {
    let coarse = torus(64);
    let fine = GridSpec::new(2, 64, PI).unwrap();
    let f = random_band_limited(&coarse, 1, 1.0, 8, 11, false).unwrap();
    // f(2x) sampled on the half-size box is the same sample array
    let f2 = Field::new(fine, 1, f.values().to_vec()).unwrap();
    for &(p, lam) in &[(2.0, 0.0), (2.0, 1.0), (3.0, 1.5)] {
        let mp = MorreyParams::new(p, lam).unwrap();
        let a = morrey_norm(&f, mp, &MorreySampling::standard(&coarse)).unwrap();
        let b = morrey_norm(&f2, mp, &MorreySampling::standard(&fine)).unwrap();
        let expect = 2f64.powf(-(2.0 - lam) / p);
        assert!((b / a / expect - 1.0).abs() < 0.02, "p {p} lambda {lam}: {}", b / a);
    }
}

#[test]
fn morrey_is_a_norm() {
    let g = GridSpec::new(2, 32, 2.0 * PI).unwrap();
    let s = MorreySampling::standard(&g);
    let mp = MorreyParams::new(2.5, 0.7).unwrap();
    let fs = corpus(&g, 20, 8);
    for (i, f) in fs.iter().enumerate() {
        let a = morrey_norm(f, mp, &s).unwrap();
        assert!((morrey_norm(&f.scaled(-3.0), mp, &s).unwrap() - 3.0 * a).abs() <= 1e-14 * a);
        for gf in &fs[i..] {
            let b = morrey_norm(gf, mp, &s).unwrap();
            let sum = morrey_norm(&f.add(gf).unwrap(), mp, &s).unwrap();
            assert!(sum <= a + b + 1e-12);
        }
    }
}

#[test]
fn morrey_sampling_is_monotone() {
    let g = torus(64);
    let f = random_band_limited(&g, 1, 1.0, 10, 5, false).unwrap();
    let mp = MorreyParams::new(2.0, 1.2).unwrap();
    let strides = [16, 8, 4, 2];
    let table: Vec<Vec<f64>> = (1..=4)
        .map(|count| {
            strides
                .iter()
                .map(|&st| morrey_norm(&f, mp, &MorreySampling::dyadic(&g, st, count)).unwrap())
                .collect()
        })
        .collect();
    for c in 0..4 {
        for s in 0..4 {
            if c > 0 {
                assert!(table[c][s] >= table[c - 1][s]);
            }
            if s > 0 {
                assert!(table[c][s] >= table[c][s - 1]);
            }
        }
    }
}

#[test]
fn sobolev_morrey_gradient() {
    let g = torus(64);
    let f = Field::from_fn(g, 1, |_, x| x[0].sin());
    let s = MorreySampling::standard(&g);
    let v = sobolev_morrey_norm(&f, 1.0, MorreyParams::new(2.0, 0.0).unwrap(), &s).unwrap();
    let grad = gradient(&f).unwrap().l2_norm();
    assert!((v - grad).abs() < 1e-10 * grad);
}

#[test]
fn besov_sequence_ordering() {
    let g = torus(64);
    let bank = lp_bank(&g).unwrap();
    let s = MorreySampling::standard(&g);
    for f in corpus(&g, 6, 20) {
        for &sm in &[-0.5, 0.0, 0.7] {
            let inf = besov_morrey_norm(&f, BesovParams::new(sm, 2.0, 1.0, f64::INFINITY).unwrap(), &bank, &s).unwrap();
            let one = besov_morrey_norm(&f, BesovParams::new(sm, 2.0, 1.0, 1.0).unwrap(), &bank, &s).unwrap();
            assert!(inf <= one);
        }
    }
}

#[test]
fn besov_single_mode_closed_form() {
    let g = torus(64);
    let bank = lp_bank(&g).unwrap();
    let s = MorreySampling::standard(&g);
    let f = mode(&g, [4.0, 0.0], 0.0);
    // |ξ| = 4 sits in shells 2 and 1 with raw weights g(1), g(2)
    let (a, b) = (bump(1.0), bump(2.0));
    let (a, b) = (a / (a + b), b / (a + b));
    let mp = MorreyParams::new(2.0, 0.5).unwrap();
    let m = morrey_norm(&f, mp, &s).unwrap();
    for &sm in &[-1.0, 0.0, 0.5] {
        let v = besov_morrey_norm(&f, BesovParams::new(sm, 2.0, 0.5, 1.0).unwrap(), &bank, &s).unwrap();
        let expect = (4f64.powf(sm) * a + 2f64.powf(sm) * b) * m;
        assert!((v - expect).abs() < 1e-10 * expect, "s = {sm}: {v} vs {expect}");
    }
}

fn ratio_spread(coarse: &RatioReport, fine: &RatioReport) -> f64 {
    (fine.max / coarse.max - 1.0).abs()
}

#[test]
fn embeddings_are_refinement_stable() {
    let coarse = torus(64);
    let fine = torus(128);
    let (bc, bf) = (lp_bank(&coarse).unwrap(), lp_bank(&fine).unwrap());
    let (sc, sf) = (MorreySampling::standard(&coarse), MorreySampling::standard(&fine));
    let base = corpus(&coarse, 50, 10);
    let refined: Vec<Field> = base.iter().map(|f| resample(f, &fine).unwrap()).collect();
    let relations = [
        Embedding::MorreyIntoBesovInf { p: 2.0, lambda: 1.0 },
        Embedding::BesovOneIntoMorrey { p: 2.0, lambda: 1.0 },
        Embedding::SobolevMorrey { s1: 0.5, p1: 2.0, s2: 0.0, p2: 4.0, lambda: 0.0 },
    ];
    for rel in relations {
        let a = embedding_probe(&base, rel, &bc, &sc).unwrap();
        let b = embedding_probe(&refined, rel, &bf, &sf).unwrap();
        assert!(a.max.is_finite() && a.min > 0.0);
        assert!(ratio_spread(&a, &b) < 0.10, "{rel:?}: {} vs {}", a.max, b.max);
    }
}

#[test]
fn embedding_constraints() {
    let g = torus(64);
    let bank = lp_bank(&g).unwrap();
    let s = MorreySampling::standard(&g);
    let c = corpus(&g, 1, 4);
    let bad = Embedding::SobolevMorrey { s1: 0.5, p1: 2.0, s2: 0.0, p2: 3.0, lambda: 0.0 };
    assert!(matches!(embedding_probe(&c, bad, &bank, &s), Err(Error::Constraint(_))));
    let reversed = Embedding::Besov { s1: 0.0, p1: 4.0, s2: 0.5, p2: 2.0, lambda: 0.0, r: 2.0 };
    assert!(matches!(embedding_probe(&c, reversed, &bank, &s), Err(Error::Constraint(_))));
}

#[test]
fn holder_and_multiplier_probes() {
    let coarse = torus(64);
    let fine = torus(128);
    let base = corpus(&coarse, 12, 8);
    let pairs: Vec<(Field, Field)> = base.chunks(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    let fine_pairs: Vec<(Field, Field)> = pairs
        .iter()
        .map(|(a, b)| (resample(a, &fine).unwrap(), resample(b, &fine).unwrap()))
        .collect();
    let (sc, sf) = (MorreySampling::standard(&coarse), MorreySampling::standard(&fine));
    let h1 = holder_probe(&pairs, 4.0, 4.0, 0.5, &sc).unwrap();
    let h2 = holder_probe(&fine_pairs, 4.0, 4.0, 0.5, &sf).unwrap();
    assert!(h1.max <= 1.0 + 1e-12, "{h1:?}");
    assert!(ratio_spread(&h1, &h2) < 0.10);

    let angular = |u: &[f64]| 1.0 + 0.5 * u[0] * u[0];
    let mp = MorreyParams::new(2.0, 1.0).unwrap();
    let refined: Vec<Field> = base.iter().map(|f| resample(f, &fine).unwrap()).collect();
    let m1 = multiplier_probe(&base, 0.8, &angular, 0.0, mp, &sc).unwrap();
    let m2 = multiplier_probe(&refined, 0.8, &angular, 0.0, mp, &sf).unwrap();
    assert!(m1.max < 10.0 && m1.min > 0.1);
    assert!(ratio_spread(&m1, &m2) < 0.10);
}

#[test]
fn interpolation_log_convexity() {
    let g = torus(64);
    let bank = lp_bank(&g).unwrap();
    let s = MorreySampling::standard(&g);
    let template = BesovParams::new(0.0, 2.0, 1.0, f64::INFINITY).unwrap();
    for f in corpus(&g, 4, 20) {
        for &theta in &[0.0, 0.25, 0.5, 1.0] {
            for r in [1.0, 2.0, f64::INFINITY] {
                let rep = interpolation_probe(&f, -1.0, 1.5, theta, BesovParams { r, ..template }, &bank, &s).unwrap();
                assert!(rep.defect <= 1e-10, "{rep:?}");
            }
        }
    }
    // equal endpoints leave nothing to interpolate
    let m = mode(&g, [4.0, 0.0], 0.0);
    let rep = interpolation_probe(&m, 0.0, 0.0, 0.3, template, &bank, &s).unwrap();
    assert!(rep.defect.abs() < 1e-12);
}
