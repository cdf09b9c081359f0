//! Plain-text golden tables: one record per line, `name alpha beta z expected abs_tol`.
//!
//! Recognized names and the meaning of the `z` column:
//!
//! | name | value |
//! |------|-------|
//! | `gamma` | Γ(z) |
//! | `mittag_leffler` | E_{α,β}(z) |
//! | `mainardi_wright` | M_α(z) |
//! | `wright_moment` | ∫ M_α(θ) θ^z dθ |
//!
//! Lines starting with `#` and blank lines are ignored.

use std::fmt::Write as _;

use super::{gamma_fn, mainardi_wright, mittag_leffler, wright_moment};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRecord {
    pub name: String,
    pub alpha: f64,
    pub beta: f64,
    pub z: f64,
    pub expected: f64,
    pub abs_tol: f64,
}

impl GoldenRecord {
    /// Value of the named function computed by this library.
    pub fn evaluate(&self) -> Result<f64> {
        match self.name.as_str() {
            "gamma" => gamma_fn(self.z),
            "mittag_leffler" => mittag_leffler(self.alpha, self.beta, self.z),
            "mainardi_wright" => mainardi_wright(self.alpha, self.z),
            "wright_moment" => wright_moment(self.alpha, self.z, 64),
            other => Err(Error::Format(format!("unknown golden function `{other}`"))),
        }
    }
}

pub fn parse_table(text: &str) -> Result<Vec<GoldenRecord>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 6 {
            return Err(Error::Format(format!(
                "line {}: expected 6 columns, found {}",
                lineno + 1,
                cols.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            cols[i]
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("line {}: column {}: {e}", lineno + 1, i + 1)))
        };
        out.push(GoldenRecord {
            name: cols[0].to_string(),
            alpha: num(1)?,
            beta: num(2)?,
            z: num(3)?,
            expected: num(4)?,
            abs_tol: num(5)?,
        });
    }
    Ok(out)
}

pub fn write_table(records: &[GoldenRecord]) -> String {
    let mut s = String::from("# name alpha beta z expected abs_tol\n");
    for r in records {
        // {:?} prints the shortest string that round-trips
        let _ = writeln!(
            s,
            "{} {:?} {:?} {:?} {:?} {:e}",
            r.name, r.alpha, r.beta, r.z, r.expected, r.abs_tol
        );
    }
    s
}
