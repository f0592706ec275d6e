//! Pointwise geometry of a frontal with a tangent moving base.
//!
//! All signed quantities (normal, `II_Ω`, `μ`, `H_Ω`) are relative to the
//! supplied column order of `Ω`; the normal is never flipped automatically.

mod base;
mod forms;
mod spec;
mod special;

pub use base::{base_from_normal, orthonormalize};
pub use forms::{christoffel_decomposition_check, evaluate, sample_jets, FormBundle, FormJets};
pub use spec::{Domain, FrontalSpec};
pub use special::{special_form, SpecialForm};

use crate::exprmap::EvalError;
use thiserror::Error;

pub const DEFAULT_TOL_SING: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontalError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("moving base has rank < 2 at (u, v) = ({u}, {v})")]
    RankDeficientBase { u: f64, v: f64 },
    #[error("normal vector too short (norm {norm})")]
    DegenerateNormal { norm: f64 },
    #[error("singular point at (u, v) = ({u}, {v})")]
    SingularPoint { u: f64, v: f64 },
    #[error("no reduced base pattern has a non-vanishing minor on the whole grid")]
    NoGlobalForm,
    #[error("Dx is not in the span of the base at (u, v) = ({u}, {v}); residual {residual:e}")]
    NotTangent { u: f64, v: f64, residual: f64 },
}

impl FrontalSpec {
    /// Checks that `Dx = ΩΛᵀ` holds on the grid; returns the largest
    /// residual.
    pub fn check_tangent(&self, grid: &crate::GridSpec) -> Result<f64, FrontalError> {
        let mut worst: f64 = 0.0;
        for j in sample_jets(self, grid) {
            let j = j?;
            let r = j.decomposition_residual();
            let scale = j.dx.max_abs().max(1.0);
            if r > 1e-9 * scale {
                return Err(FrontalError::NotTangent { u: j.point.0, v: j.point.1, residual: r });
            }
            worst = worst.max(r);
        }
        Ok(worst)
    }
}
