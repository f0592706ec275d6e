use super::{FrontalError, FrontalSpec};
use crate::exprmap::{eval_scalar, seed3, Jet1, Jet2, Scalar};
use crate::grid::GridSpec;
use crate::linalg::{cross, Mat2, Mat3x2, Vec3};
use rayon::prelude::*;

/// Every pointwise field as a second-order jet.
///
/// Primitives are evaluated one order higher than stored, so `dx` holds the
/// jets of `x_u`, `x_v` (exact up to third derivatives of `x`) and
/// `omega_u`, `omega_v` the jets of `Ω_u`, `Ω_v`.
#[derive(Clone, Debug)]
pub struct FormJets {
    pub point: (f64, f64),
    pub x: Vec3<Jet2>,
    pub dx: Mat3x2<Jet2>,
    pub omega: Mat3x2<Jet2>,
    pub omega_u: Mat3x2<Jet2>,
    pub omega_v: Mat3x2<Jet2>,
    pub i_omega: Mat2<Jet2>,
    pub i_omega_inv: Mat2<Jet2>,
    pub lambda: Mat2<Jet2>,
    pub normal: Vec3<Jet2>,
    /// Classical first fundamental form `I = DxᵀDx`.
    pub first: Mat2<Jet2>,
    /// `II_Ω` in the `(n·w₁u, n·w₁v; n·w₂u, n·w₂v)` layout.
    pub ii_omega: Mat2<Jet2>,
    pub theta1: Mat2<Jet2>,
    pub theta2: Mat2<Jet2>,
    pub mu: Mat2<Jet2>,
}

/// Values of all matrix fields at one parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct FormBundle {
    pub point: (f64, f64),
    pub x: Vec3,
    pub dx: Mat3x2,
    pub omega: Mat3x2,
    pub lambda: Mat2,
    pub lambda_u: Mat2,
    pub lambda_v: Mat2,
    pub lambda_det: f64,
    pub n: Vec3,
    /// Classical `I`.
    pub first: Mat2,
    /// Classical `II = −DxᵀDn`.
    pub second: Mat2,
    pub i_omega: Mat2,
    pub ii_omega: Mat2,
    pub mu: Mat2,
    pub theta1: Mat2,
    pub theta2: Mat2,
    pub gamma1: Option<Mat2>,
    pub gamma2: Option<Mat2>,
}

fn dual_mat(m: &Mat2<Jet2>) -> Mat2<Jet1> {
    m.map(Jet2::to_dual)
}

impl FormJets {
    pub fn new(spec: &FrontalSpec, u: f64, v: f64) -> Result<Self, FrontalError> {
        let (su, sv) = seed3(u, v);
        let at = (u, v);
        let mut x = Vec3([Jet2::default(); 3]);
        let mut dx = Mat3x2::zero();
        for i in 0..3 {
            let r = eval_scalar(&spec.x[i], su, sv, at)?;
            x.0[i] = r.v;
            dx.m[i] = [r.du, r.dv];
        }
        let mut omega = Mat3x2::zero();
        let mut omega_u = Mat3x2::zero();
        let mut omega_v = Mat3x2::zero();
        for i in 0..3 {
            for j in 0..2 {
                let r = eval_scalar(&spec.omega[i][j], su, sv, at)?;
                omega.m[i][j] = r.v;
                omega_u.m[i][j] = r.du;
                omega_v.m[i][j] = r.dv;
            }
        }
        Self::from_primitives(at, x, dx, omega, omega_u, omega_v)
    }

    /// Derived fields from jets of `x`, `Dx`, `Ω`, `Ω_u`, `Ω_v`.
    pub fn from_primitives(
        point: (f64, f64),
        x: Vec3<Jet2>,
        dx: Mat3x2<Jet2>,
        omega: Mat3x2<Jet2>,
        omega_u: Mat3x2<Jet2>,
        omega_v: Mat3x2<Jet2>,
    ) -> Result<Self, FrontalError> {
        let i_omega = omega.tr_mul(&omega);
        let d = i_omega.det().value;
        let scale = i_omega.m[0][0].value * i_omega.m[1][1].value;
        if !(d > 1e-14 * scale) || !(d > 0.0) {
            return Err(FrontalError::RankDeficientBase { u: point.0, v: point.1 });
        }
        let inv = i_omega.inverse().expect("positive determinant");
        let lambda = dx.tr_mul(&omega) * inv;
        let c = cross(&omega.col(0), &omega.col(1));
        let normal = c.scale(c.norm().recip());
        let ii_omega = Mat2::new(
            normal.dot(&omega_u.col(0)),
            normal.dot(&omega_v.col(0)),
            normal.dot(&omega_u.col(1)),
            normal.dot(&omega_v.col(1)),
        );
        let theta1 = omega_u.tr_mul(&omega) * inv;
        let theta2 = omega_v.tr_mul(&omega) * inv;
        let mu = -(ii_omega.transpose() * inv);
        let first = dx.tr_mul(&dx);
        Ok(FormJets {
            point,
            x,
            dx,
            omega,
            omega_u,
            omega_v,
            i_omega,
            i_omega_inv: inv,
            lambda,
            normal,
            first,
            ii_omega,
            theta1,
            theta2,
            mu,
        })
    }

    pub fn lambda_det(&self) -> Jet2 {
        self.lambda.det()
    }

    /// `Dn` as first-order jets; column `a` is `∂_a n`.
    pub fn dn(&self) -> Mat3x2<Jet1> {
        Mat3x2::from_cols(&self.normal.map(Jet2::d_u), &self.normal.map(Jet2::d_v))
    }

    /// Classical `II = −DxᵀDn` with first derivatives.
    pub fn second_form(&self) -> Mat2<Jet1> {
        -(self.dx.map(Jet2::to_dual).tr_mul(&self.dn()))
    }

    /// `II_Ω = −ΩᵀDn`, the alternative to the stored `ii_omega`.
    pub fn ii_omega_from_dn(&self) -> Mat2 {
        -(self.omega.values().tr_mul(&self.dn().map(|d| d.v)))
    }

    /// Classical Christoffel matrices `(Γ₁, Γ₂)` from the jets of `I`, or
    /// `None` where `det I` vanishes.
    pub fn christoffel(&self) -> Option<(Mat2<Jet1>, Mat2<Jet1>)> {
        let first = dual_mat(&self.first);
        if first.det().v <= 0.0 {
            return None;
        }
        let inv = first.inverse()?;
        let (e, f, g) = (self.first.m[0][0], self.first.m[0][1], self.first.m[1][1]);
        let half = |j: Jet1| j.scale(0.5);
        let g1 = Mat2::new(
            half(e.d_u()),
            f.d_u() - half(e.d_v()),
            half(e.d_v()),
            half(g.d_u()),
        ) * inv;
        let g2 = Mat2::new(
            half(e.d_v()),
            half(g.d_u()),
            f.d_v() - half(g.d_u()),
            half(g.d_v()),
        ) * inv;
        Some((g1, g2))
    }

    /// Largest entry of `Dx − ΩΛᵀ`.
    pub fn decomposition_residual(&self) -> f64 {
        let om = self.omega.values();
        (self.dx.values() - om.mul2(&self.lambda.values().transpose())).max_abs()
    }

    pub fn bundle(&self, tol_sing: f64) -> FormBundle {
        let lambda_det = self.lambda_det().value;
        let (gamma1, gamma2) = match self.christoffel() {
            Some((g1, g2)) if lambda_det.abs() > tol_sing => {
                (Some(g1.map(|d| d.v)), Some(g2.map(|d| d.v)))
            }
            _ => (None, None),
        };
        FormBundle {
            point: self.point,
            x: self.x.map(|j| j.value),
            dx: self.dx.values(),
            omega: self.omega.values(),
            lambda: self.lambda.values(),
            lambda_u: self.lambda.map(|j| j.du),
            lambda_v: self.lambda.map(|j| j.dv),
            lambda_det,
            n: self.normal.map(|j| j.value),
            first: self.first.values(),
            second: self.second_form().map(|d| d.v),
            i_omega: self.i_omega.values(),
            ii_omega: self.ii_omega.values(),
            mu: self.mu.values(),
            theta1: self.theta1.values(),
            theta2: self.theta2.values(),
            gamma1,
            gamma2,
        }
    }
}

/// All pointwise fields at `(u, v)`; Christoffel matrices only where
/// `|λ_Ω| > tol_sing`.
pub fn evaluate(spec: &FrontalSpec, u: f64, v: f64, tol_sing: f64) -> Result<FormBundle, FrontalError> {
    Ok(FormJets::new(spec, u, v)?.bundle(tol_sing))
}

/// [`FormJets`] at every grid node, in grid order.
pub fn sample_jets(spec: &FrontalSpec, grid: &GridSpec) -> Vec<Result<FormJets, FrontalError>> {
    (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (u, v) = grid.point(k);
            FormJets::new(spec, u, v)
        })
        .collect()
}

/// Max of `‖Γ₁ − (ΛΘ₁+Λ_u)Λ⁻¹‖` and its `v` counterpart.
pub fn christoffel_decomposition_check(bundle: &FormBundle) -> Result<f64, FrontalError> {
    let (u, v) = bundle.point;
    let (Some(g1), Some(g2)) = (bundle.gamma1, bundle.gamma2) else {
        return Err(FrontalError::SingularPoint { u, v });
    };
    let inv = bundle.lambda.inverse().ok_or(FrontalError::SingularPoint { u, v })?;
    let d1 = (bundle.lambda * bundle.theta1 + bundle.lambda_u) * inv;
    let d2 = (bundle.lambda * bundle.theta2 + bundle.lambda_v) * inv;
    Ok((g1 - d1).max_abs().max((g2 - d2).max_abs()))
}
