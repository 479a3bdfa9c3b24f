//! Bayesian cost functions C(u, θ) and their gradients in u.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// The closed set of supported costs. The MAP indicator cost has no usable
/// gradient and is rejected at parse time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostSpec {
    /// ‖u − θ‖²
    SquaredError,
    /// ‖u − θ‖₁
    AbsoluteError,
}

impl CostSpec {
    pub fn cost(self, u: &[f64], theta: &[f64]) -> Result<f64> {
        check_len("cost", u.len(), theta.len())?;
        Ok(self.cost_unchecked(u, theta))
    }

    pub fn grad_u(self, u: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
        check_len("cost gradient", u.len(), theta.len())?;
        let mut g = vec![0.0; u.len()];
        self.grad_u_into(u, theta, &mut g);
        Ok(g)
    }

    pub(crate) fn cost_unchecked(self, u: &[f64], theta: &[f64]) -> f64 {
        let diffs = u.iter().zip(theta).map(|(a, b)| a - b);
        match self {
            CostSpec::SquaredError => diffs.map(|d| d * d).sum(),
            CostSpec::AbsoluteError => diffs.map(f64::abs).sum(),
        }
    }

    /// Writes ∇ᵤC into `out`; the absolute-error subgradient is 0 at ties.
    pub(crate) fn grad_u_into(self, u: &[f64], theta: &[f64], out: &mut [f64]) {
        for ((o, a), b) in out.iter_mut().zip(u).zip(theta) {
            let d = a - b;
            *o = match self {
                CostSpec::SquaredError => 2.0 * d,
                CostSpec::AbsoluteError => sign(d),
            };
        }
    }
}

pub(crate) fn sign(d: f64) -> f64 {
    if d > 0.0 {
        1.0
    } else if d < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl FromStr for CostSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "squared" | "squared_error" | "squared-error" | "mse" | "mmse" => {
                Ok(CostSpec::SquaredError)
            }
            "absolute" | "absolute_error" | "absolute-error" | "mae" | "mmae" => {
                Ok(CostSpec::AbsoluteError)
            }
            "map" | "indicator" => Err(Error::InvalidConfig(
                "the MAP indicator cost is not supported: its gradient is 0 almost everywhere \
                 and infinite on the boundary, so gradient-based estimators cannot use it"
                    .into(),
            )),
            other => Err(Error::InvalidConfig(format!(
                "unknown cost {other:?} (expected squared or absolute)"
            ))),
        }
    }
}

impl fmt::Display for CostSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostSpec::SquaredError => "squared",
            CostSpec::AbsoluteError => "absolute",
        })
    }
}
