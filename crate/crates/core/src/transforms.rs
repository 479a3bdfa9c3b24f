//! Parametric deterministic maps T(z, θ) that define f(x | θ) indirectly as
//! the law of T(Z, θ) for Z ~ g.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    /// z + θ
    Translation,
    /// θ ⊙ z
    #[serde(rename = "scale")]
    ElementwiseScale,
    /// Θ z with Θ stored row-major in the parameter vector.
    Matrix,
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "translation" | "shift" => Ok(TransformKind::Translation),
            "scale" | "elementwise-scale" => Ok(TransformKind::ElementwiseScale),
            "matrix" => Ok(TransformKind::Matrix),
            other => Err(Error::InvalidInput(format!(
                "unknown transform {other:?} (expected translation, scale or matrix)"
            ))),
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformKind::Translation => "translation",
            TransformKind::ElementwiseScale => "scale",
            TransformKind::Matrix => "matrix",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformSpec {
    kind: TransformKind,
    input_dim: usize,
    output_dim: usize,
}

impl TransformSpec {
    pub fn translation(dim: usize) -> Result<Self> {
        Self::new(TransformKind::Translation, dim, dim)
    }

    pub fn scale(dim: usize) -> Result<Self> {
        Self::new(TransformKind::ElementwiseScale, dim, dim)
    }

    pub fn matrix(input_dim: usize, output_dim: usize) -> Result<Self> {
        Self::new(TransformKind::Matrix, input_dim, output_dim)
    }

    pub fn new(kind: TransformKind, input_dim: usize, output_dim: usize) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 {
            return Err(Error::InvalidConfig(
                "transform dimensions must be positive".into(),
            ));
        }
        if kind != TransformKind::Matrix && input_dim != output_dim {
            return Err(Error::InvalidConfig(format!(
                "{kind} transform requires input_dim == output_dim (got {input_dim} and {output_dim})"
            )));
        }
        Ok(Self {
            kind,
            input_dim,
            output_dim,
        })
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn param_dim(&self) -> usize {
        match self.kind {
            TransformKind::Translation | TransformKind::ElementwiseScale => self.input_dim,
            TransformKind::Matrix => self.input_dim * self.output_dim,
        }
    }

    fn check(&self, z: &[f64], theta: &[f64]) -> Result<()> {
        check_len("transform input", self.input_dim, z.len())?;
        check_len("transform parameter", self.param_dim(), theta.len())
    }

    pub fn apply(&self, z: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
        self.check(z, theta)?;
        let mut out = vec![0.0; self.output_dim];
        self.apply_into(z, theta, &mut out);
        Ok(out)
    }

    /// Unchecked form of [`apply`](Self::apply) writing into `out`.
    ///
    /// Panics if the slice lengths disagree with the spec.
    pub fn apply_into(&self, z: &[f64], theta: &[f64], out: &mut [f64]) {
        assert_eq!(out.len(), self.output_dim);
        match self.kind {
            TransformKind::Translation => {
                for ((o, zi), ti) in out.iter_mut().zip(z).zip(theta) {
                    *o = zi + ti;
                }
            }
            TransformKind::ElementwiseScale => {
                for ((o, zi), ti) in out.iter_mut().zip(z).zip(theta) {
                    *o = ti * zi;
                }
            }
            TransformKind::Matrix => {
                for (o, row) in out.iter_mut().zip(theta.chunks_exact(self.input_dim)) {
                    *o = row.iter().zip(z).map(|(a, b)| a * b).sum();
                }
            }
        }
    }

    /// ∂T(z, θ)/∂θ as a row-major `output_dim × param_dim` matrix.
    pub fn jacobian_theta(&self, z: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
        self.check(z, theta)?;
        let p = self.param_dim();
        let mut jac = vec![0.0; self.output_dim * p];
        match self.kind {
            TransformKind::Translation => {
                for i in 0..self.output_dim {
                    jac[i * p + i] = 1.0;
                }
            }
            TransformKind::ElementwiseScale => {
                for i in 0..self.output_dim {
                    jac[i * p + i] = z[i];
                }
            }
            TransformKind::Matrix => {
                for i in 0..self.output_dim {
                    let start = i * p + i * self.input_dim;
                    jac[start..start + self.input_dim].copy_from_slice(z);
                }
            }
        }
        Ok(jac)
    }

    /// Computes Jᵀ v for the Jacobian at `z`, accumulating `scale · Jᵀ v` into `acc`.
    ///
    /// All three kinds are linear in θ, so the Jacobian depends on `z` only.
    pub(crate) fn accumulate_jt_vec(&self, z: &[f64], v: &[f64], scale: f64, acc: &mut [f64]) {
        match self.kind {
            TransformKind::Translation => {
                for (a, vi) in acc.iter_mut().zip(v) {
                    *a += scale * vi;
                }
            }
            TransformKind::ElementwiseScale => {
                for ((a, vi), zi) in acc.iter_mut().zip(v).zip(z) {
                    *a += scale * vi * zi;
                }
            }
            TransformKind::Matrix => {
                for (row, vi) in acc.chunks_exact_mut(self.input_dim).zip(v) {
                    for (a, zj) in row.iter_mut().zip(z) {
                        *a += scale * vi * zj;
                    }
                }
            }
        }
    }
}
