use std::fs;
use std::path::{Path, PathBuf};

use fracks::Error;

/// A failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn nonconvergence(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Failure { code: 4, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_)
            | Error::Config(_)
            | Error::Constraint(_)
            | Error::Format(_)
            | Error::Io(_)
            | Error::Window(_)
            | Error::Mismatch(_)
            | Error::Gate(_)
            | Error::BandTooNarrow { .. }
            | Error::RadiusTooLarge { .. } => 2,
            Error::AccuracyNotMet { .. } | Error::NonFinite { .. } => 3,
            _ => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

/// `{:.12e}`, with `nan` for missing values.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.12e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), num)
}

pub fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create output directory {}: {e}", dir.display())))
}

pub fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

/// Output directory: `--out`, else the configured directory next to the config file.
pub fn out_dir(flag: &Option<PathBuf>, configured: &str, base: &Path) -> PathBuf {
    flag.clone().unwrap_or_else(|| base.join(configured))
}
