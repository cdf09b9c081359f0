use std::path::{Path, PathBuf};

use fracks::config::{Profile, RunConfig, StoppingName};
use fracks::solver::StoppingRule;
use fracks::spaces::{lp_bank, MorreySampling};
use fracks::spectral::snapshot::{write_snapshot, SnapshotHeader};
use fracks::verify::smallness_norm;
use fracks::Error;

fn bundled_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/small2d.cfg")
}

fn bundled() -> RunConfig {
    RunConfig::load(&bundled_path()).unwrap()
}

#[test]
fn bundled_config_round_trips() {
    let cfg = bundled();
    let text = cfg.to_toml_string().unwrap();
    let again = RunConfig::from_toml_str(&text).unwrap();
    assert_eq!(cfg, again);
    assert_eq!(again.to_toml_string().unwrap(), text);
}

#[test]
fn optional_sections_default() {
    let text = std::fs::read_to_string(bundled_path()).unwrap();
    let cut = text.find("[model]").unwrap();
    let cfg = RunConfig::from_toml_str(&text[..cut]).unwrap();
    assert!(cfg.model.nonlinear && cfg.model.dealias);
    assert_eq!(cfg.verify.decay_n, 128);
}

#[test]
fn rejects_bad_documents() {
    let text = std::fs::read_to_string(bundled_path()).unwrap();
    let err = RunConfig::from_toml_str(&text.replace("schema_version = 1", "schema_version = 2")).unwrap_err();
    assert!(matches!(err, Error::Config(ref m) if m.contains("schema_version")), "{err}");
    let err = RunConfig::from_toml_str(&text.replace("box_length = 10.0", "box_length = 10.0\nspacing = 1")).unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");
    let err = RunConfig::from_toml_str(&text.replace("n = 32", "n = 30")).unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");
    let err = RunConfig::from_toml_str(&text.replace("alpha = 0.8", "alpha = 1.2")).unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");
}

#[test]
fn inadmissible_exponents_are_named() {
    let mut cfg = bundled();
    cfg.exponents.q[2] = 12.0;
    let e = cfg.exponents().unwrap();
    assert!(!e.valid);
    assert!(e.violations.iter().any(|v| v == "q₃ < (d−λ)/(2−β) = 10"), "{:?}", e.violations);
    let err = cfg.realize(Path::new("."), 0).unwrap_err();
    assert!(matches!(err, Error::Constraint(ref m) if m.contains("q₃")), "{err}");
}

#[test]
fn kappa_rescaling_hits_the_target() {
    let cfg = bundled();
    let p = cfg.realize(Path::new("."), 0).unwrap();
    let g = p.solver.grid;
    let n = smallness_norm(&p.initial, &p.solver.potential, &p.exponents, &lp_bank(&g).unwrap(), &MorreySampling::standard(&g))
        .unwrap();
    assert!((n - 1e-3).abs() < 1e-15, "{n}");
    assert!(p.kappa_factor > 0.0);

    let mut zero = cfg.clone();
    zero.initial.kappa = Some(0.0);
    let z = zero.realize(Path::new("."), 0).unwrap();
    assert_eq!(z.initial.u.max_abs(), 0.0);
    assert_eq!(z.solver.potential.max_abs(), 0.0);
}

#[test]
fn profiles_and_seeds() {
    let mut cfg = bundled();
    cfg.initial.kappa = None;
    cfg.initial.v = Profile::Random { amplitude: 1.0, kmax: 4, seed: None, mean_zero: true };
    let a = cfg.realize(Path::new("."), 5).unwrap();
    let b = cfg.realize(Path::new("."), 5).unwrap();
    let c = cfg.realize(Path::new("."), 6).unwrap();
    assert_eq!(a.initial, b.initial);
    assert_ne!(a.initial.v, c.initial.v);

    cfg.initial.u = Profile::Gaussian { amplitude: 1.0, width: 1.0 };
    assert!(matches!(cfg.realize(Path::new("."), 0), Err(Error::Config(_))));

    let mut f = bundled();
    f.picard.stopping_rule = StoppingName::FNorm;
    assert!(matches!(f.realize(Path::new("."), 0).unwrap().solver.stopping, StoppingRule::FNorm(_)));
}

#[test]
fn snapshot_profiles() {
    let dir = std::env::temp_dir().join(format!("fracks-config-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut cfg = bundled();
    cfg.initial.kappa = None;
    cfg.initial.w = Profile::Snapshot { path: "w0.ftcf".into() };
    assert_eq!(cfg.referenced_files(&dir), vec![dir.join("w0.ftcf")]);
    assert!(matches!(cfg.realize(&dir, 0), Err(Error::Config(ref m)) if m.contains("does not exist")));

    let reference = bundled();
    let mut plain = reference.clone();
    plain.initial.kappa = None;
    let p = plain.realize(&dir, 0).unwrap();
    let h = SnapshotHeader::for_field(&p.initial.w, 0.0, 0.8, 1.8, "w");
    write_snapshot(&dir.join("w0.ftcf"), &h, &p.initial.w).unwrap();
    let q = cfg.realize(&dir, 0).unwrap();
    assert_eq!(q.initial.w, p.initial.w);
    std::fs::remove_dir_all(&dir).unwrap();
}
