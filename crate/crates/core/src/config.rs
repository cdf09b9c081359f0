//! Run configuration: a versioned TOML document describing one problem.
//!
//! ```toml
//! schema_version = 1
//!
//! [fractional]
//! alpha = 0.8
//! beta = 1.8
//!
//! [grid]
//! d = 2
//! n = 32
//! box_length = 10.0
//!
//! [time]
//! final_time = 1.0
//! n_steps = 32
//!
//! [exponents]
//! lambda = 0.0
//! r = [3.0, 2.0, 4.0]
//! q = [3.0, 2.0, 4.0]
//!
//! [initial]
//! kappa = 1e-3
//! u = { profile = "vortex", amplitude = 1.0, width = 1.0 }
//! v = { profile = "gaussian", amplitude = 1.0, width = 1.0 }
//! w = { profile = "gaussian", amplitude = 1.0, width = 1.2 }
//! phi = { profile = "gaussian", amplitude = 1.0, width = 1.5 }
//!
//! [picard]
//! max_iter = 20
//! tol = 1e-10
//! stopping_rule = "relative_l2"
//!
//! [output]
//! directory = "out"
//! snapshot_every = 0
//! ```
//!
//! Sections `[model]` and `[verify]` are optional.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{gaussian, random_band_limited, single_mode, vortex};
use crate::solver::{ReactionSign, SolverConfig, SolverState, StoppingRule};
use crate::spaces::{lp_bank, MorreySampling};
use crate::spectral::snapshot::read_snapshot;
use crate::spectral::{FracParams, Field, GridSpec};
use crate::verify::{admissible_params, scale_to_kappa, AdmissibleExponents};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub fractional: FractionalSection,
    pub grid: GridSection,
    pub time: TimeSection,
    pub exponents: ExponentSection,
    pub initial: InitialSection,
    pub picard: PicardSection,
    pub output: OutputSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub verify: VerifySection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FractionalSection {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub d: usize,
    pub n: usize,
    pub box_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub final_time: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentSection {
    pub lambda: f64,
    pub r: [f64; 3],
    pub q: [f64; 3],
}

/// Named initial profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Profile {
    Zero,
    Gaussian {
        amplitude: f64,
        width: f64,
    },
    Vortex {
        amplitude: f64,
        width: f64,
    },
    SingleMode {
        amplitude: f64,
        k: [i64; 3],
        #[serde(default)]
        component: usize,
    },
    /// Falls back to the run seed when `seed` is absent.
    Random {
        amplitude: f64,
        kmax: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default)]
        mean_zero: bool,
    },
    /// Path relative to the configuration file.
    Snapshot {
        path: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// Rescale data and potential so the small-data norm equals this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    pub u: Profile,
    pub v: Profile,
    pub w: Profile,
    pub phi: Profile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingName {
    RelativeL2,
    FNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardSection {
    pub max_iter: usize,
    pub tol: f64,
    pub stopping_rule: StoppingName,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: String,
    /// Write snapshots every this many steps; 0 writes only the final state.
    #[serde(default)]
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReactionName {
    Consumption,
    Production,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub reaction: ReactionName,
    pub nonlinear: bool,
    pub dealias: bool,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection { reaction: ReactionName::Consumption, nonlinear: true, dealias: true }
    }
}

/// Parameters of the `verify` experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub kappas: Vec<f64>,
    /// Lattice size for decay measurements (same box as the run).
    pub decay_n: usize,
    pub decay_samples: usize,
    /// Target integrability for decay; the data is a point mass (`p₁ = 1`).
    pub decay_p: f64,
    /// Extra single-mode velocity perturbation for the asymptotics experiment.
    pub perturbation_amplitude: f64,
    pub perturbation_mode: [i64; 3],
    pub asymptotics_final_time: f64,
    /// Lattice size for the operator cross-check.
    pub operators_n: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            kappas: vec![0.0, 1e-3, 1e-2, 1e-1, 1.0, 10.0],
            decay_n: 128,
            decay_samples: 16,
            decay_p: 2.0,
            perturbation_amplitude: 1e-4,
            perturbation_mode: [0, 4, 0],
            asymptotics_final_time: 8.0,
            operators_n: 64,
        }
    }
}

/// Everything needed to run the solver.
#[derive(Debug, Clone)]
pub struct Problem {
    pub solver: SolverConfig,
    pub initial: SolverState,
    pub exponents: AdmissibleExponents,
    /// Factor applied by the `kappa` rescaling (1 when absent).
    pub kappa_factor: f64,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Structural checks; exponent admissibility is left to [`RunConfig::exponents`].
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.params()?;
        self.grid_spec()?;
        if !(self.time.final_time > 0.0 && self.time.final_time.is_finite()) || self.time.n_steps == 0 {
            return Err(Error::Config(format!(
                "need final_time > 0 and n_steps >= 1, got {} and {}",
                self.time.final_time, self.time.n_steps
            )));
        }
        if self.picard.max_iter == 0 || !(self.picard.tol > 0.0) {
            return Err(Error::Config("picard.max_iter must be >= 1 and picard.tol > 0".into()));
        }
        if let Some(k) = self.initial.kappa {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::Config(format!("initial.kappa = {k} must be >= 0")));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<FracParams> {
        FracParams::with_limits(self.fractional.alpha, self.fractional.beta).map_err(config_err)
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.d, self.grid.n, self.grid.box_length).map_err(config_err)
    }

    /// The exponent tuple evaluated against the fractional orders (may be invalid).
    pub fn exponents(&self) -> Result<AdmissibleExponents> {
        let e = &self.exponents;
        admissible_params(self.grid.d, e.lambda, self.fractional.beta, self.fractional.alpha, e.r, e.q)
            .map_err(config_err)
    }

    /// Builds the solver configuration and initial data. Snapshot paths are
    /// resolved against `base_dir`; `seed` feeds random profiles without one.
    pub fn realize(&self, base_dir: &Path, seed: u64) -> Result<Problem> {
        self.validate()?;
        let grid = self.grid_spec()?;
        let exponents = self.exponents()?;
        let mut solver = SolverConfig::new(self.params()?, grid, self.time.final_time, self.time.n_steps)?;
        solver.picard_max = self.picard.max_iter;
        solver.picard_tol = self.picard.tol;
        solver.dealias = self.model.dealias;
        solver.nonlinear = self.model.nonlinear;
        solver.reaction = match self.model.reaction {
            ReactionName::Consumption => ReactionSign::Consumption,
            ReactionName::Production => ReactionSign::Production,
        };
        solver.stopping = match self.picard.stopping_rule {
            StoppingName::RelativeL2 => StoppingRule::RelativeL2,
            StoppingName::FNorm => StoppingRule::FNorm(exponents.clone().require()?),
        };
        let d = grid.d();
        let u = build(&self.initial.u, &grid, d, base_dir, seed, "u")?;
        let v = build(&self.initial.v, &grid, 1, base_dir, seed.wrapping_add(1), "v")?;
        let w = build(&self.initial.w, &grid, 1, base_dir, seed.wrapping_add(2), "w")?;
        let phi = build(&self.initial.phi, &grid, 1, base_dir, seed.wrapping_add(3), "phi")?;
        let mut initial = SolverState::new(0, u, v, w)?;
        solver.potential = phi;
        let mut kappa_factor = 1.0;
        if let Some(kappa) = self.initial.kappa {
            exponents.check()?;
            let bank = lp_bank(&grid)?;
            let sampling = MorreySampling::standard(&grid);
            let (s, p, f) = scale_to_kappa(&initial, &solver.potential, &exponents, &bank, &sampling, kappa)?;
            initial = s;
            solver.potential = p;
            kappa_factor = f;
        }
        Ok(Problem { solver, initial, exponents, kappa_factor })
    }

    /// Snapshot files named by the profiles, resolved against `base_dir`.
    pub fn referenced_files(&self, base_dir: &Path) -> Vec<PathBuf> {
        [&self.initial.u, &self.initial.v, &self.initial.w, &self.initial.phi]
            .into_iter()
            .filter_map(|p| match p {
                Profile::Snapshot { path } => Some(base_dir.join(path)),
                _ => None,
            })
            .collect()
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::InvalidArgument(m) => Error::Config(m),
        other => other,
    }
}

fn build(profile: &Profile, grid: &GridSpec, components: usize, base_dir: &Path, seed: u64, name: &str) -> Result<Field> {
    let vector = components > 1;
    let field = match *profile {
        Profile::Zero => Field::zeros(*grid, components),
        Profile::Gaussian { amplitude, width } if !vector => gaussian(grid, amplitude, width)?,
        Profile::Vortex { amplitude, width } if vector => vortex(grid, amplitude, width)?,
        Profile::SingleMode { amplitude, k, component } => single_mode(grid, components, amplitude, k, component)?,
        Profile::Random { amplitude, kmax, seed: s, mean_zero } => {
            random_band_limited(grid, components, amplitude, kmax, s.unwrap_or(seed), mean_zero)?
        }
        Profile::Snapshot { ref path } => {
            let full = base_dir.join(path);
            if !full.exists() {
                return Err(Error::Config(format!("{name}: snapshot {} does not exist", full.display())));
            }
            let (_, f) = read_snapshot(&full)?;
            if f.grid() != grid || f.components() != components {
                return Err(Error::Config(format!("{name}: snapshot {} does not match the grid", full.display())));
            }
            f
        }
        _ => {
            let kind = if vector { "vector" } else { "scalar" };
            return Err(Error::Config(format!("{name}: profile {profile:?} cannot build a {kind} field")));
        }
    };
    Ok(field)
}
