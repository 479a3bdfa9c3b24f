//! Base densities g₀ with a location shift, and the information quantities
//! used to bound the translation experiment.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::distributions::Open01;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Laplace,
    Cauchy,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Gaussian, Family::Laplace, Family::Cauchy];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Laplace => "laplace",
            Family::Cauchy => "cauchy",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Family::Gaussian => "Gaussian",
            Family::Laplace => "Laplace",
            Family::Cauchy => "Cauchy",
        }
    }

    /// Fisher information of the unit-scale base density for a location parameter.
    pub fn fisher_information(self) -> f64 {
        match self {
            Family::Gaussian => 1.0,
            Family::Laplace => 1.0,
            Family::Cauchy => 0.5,
        }
    }

    pub fn variance(self) -> ExtReal {
        match self {
            Family::Gaussian => ExtReal::Finite(1.0),
            Family::Laplace => ExtReal::Finite(2.0),
            Family::Cauchy => ExtReal::Infinite,
        }
    }

    /// log g₀(w) for the zero-location base density.
    pub fn base_log_density(self, w: f64) -> f64 {
        match self {
            Family::Gaussian => -0.5 * w * w - 0.5 * (2.0 * PI).ln(),
            Family::Laplace => -w.abs() + 0.5f64.ln(),
            Family::Cauchy => -(1.0 + w * w).ln() - PI.ln(),
        }
    }

    /// d/dw log g₀(w); the Laplace kink at 0 maps to 0.
    pub fn base_score(self, w: f64) -> f64 {
        match self {
            Family::Gaussian => -w,
            Family::Laplace => {
                if w > 0.0 {
                    -1.0
                } else if w < 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Family::Cauchy => -2.0 * w / (1.0 + w * w),
        }
    }

    /// One draw from the zero-location base density.
    pub fn sample_base<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Family::Gaussian => rng.sample(StandardNormal),
            Family::Laplace => {
                let u: f64 = rng.sample::<f64, _>(Open01) - 0.5;
                -u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
            Family::Cauchy => {
                let u: f64 = rng.sample(Open01);
                (PI * (u - 0.5)).tan()
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(Family::Gaussian),
            "laplace" => Ok(Family::Laplace),
            "cauchy" => Ok(Family::Cauchy),
            other => Err(Error::InvalidInput(format!(
                "unknown family {other:?} (expected gaussian, laplace or cauchy)"
            ))),
        }
    }
}

/// A unit-scale base density shifted to `location`: g(z) = g₀(z − location).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub family: Family,
    pub location: f64,
}

impl DistributionSpec {
    pub fn new(family: Family, location: f64) -> Self {
        Self { family, location }
    }

    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        (0..count)
            .map(|_| self.location + self.family.sample_base(rng))
            .collect()
    }

    pub fn log_density(&self, w: f64) -> f64 {
        self.family.base_log_density(w - self.location)
    }

    pub fn density(&self, w: f64) -> f64 {
        self.log_density(w).exp()
    }

    pub fn score(&self, w: f64) -> f64 {
        self.family.base_score(w - self.location)
    }

    pub fn fisher_information(&self) -> f64 {
        self.family.fisher_information()
    }

    pub fn variance(&self) -> ExtReal {
        self.family.variance()
    }
}

/// Cramér–Rao bound for the two-dataset translation problem: (1/FI)(1/n + 1/m).
pub fn crlb(fi: f64, n: usize, m: usize) -> Result<f64> {
    if !(fi > 0.0) || !fi.is_finite() {
        return Err(Error::InvalidInput(format!(
            "Fisher information must be positive and finite, got {fi}"
        )));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidInput("sample sizes must be positive".into()));
    }
    Ok((1.0 / fi) * (1.0 / n as f64 + 1.0 / m as f64))
}
