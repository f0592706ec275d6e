use super::FrontalError;
use crate::exprmap::Scalar;
use crate::linalg::{Mat3x2, Vec3};

/// A base of the plane orthogonal to `nu`.
///
/// With `k` the index of the largest `|ν_k|` and `i < j` the other two,
/// `w₁ = ν_i e_k − ν_k e_i` and `w₂ = ν_j e_k − ν_k e_j`.
pub fn base_from_normal(nu: &Vec3) -> Result<Mat3x2, FrontalError> {
    if nu.norm() < 0.5 {
        return Err(FrontalError::DegenerateNormal { norm: nu.norm() });
    }
    let k = (0..3)
        .max_by(|&a, &b| nu.0[a].abs().total_cmp(&nu.0[b].abs()))
        .expect("three entries");
    let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    let (i, j) = (others[0], others[1]);
    let mut w1 = Vec3::zero();
    w1.0[k] = nu.0[i];
    w1.0[i] = -nu.0[k];
    let mut w2 = Vec3::zero();
    w2.0[k] = nu.0[j];
    w2.0[j] = -nu.0[k];
    Ok(Mat3x2::from_cols(&w1, &w2))
}

/// Gram-Schmidt on the two columns; keeps the span and the orientation of
/// `w₁ × w₂`.
pub fn orthonormalize<S: Scalar>(omega: &Mat3x2<S>) -> Result<Mat3x2<S>, FrontalError> {
    let w1 = omega.col(0);
    let w2 = omega.col(1);
    let a = w1.dot(&w1);
    if !(a.re() > 0.0) {
        return Err(FrontalError::RankDeficientBase { u: f64::NAN, v: f64::NAN });
    }
    let e1 = w1.scale(a.sqrt().recip());
    let p = w2 - e1.scale(e1.dot(&w2));
    let pn = p.dot(&p);
    if !(pn.re() > 1e-28 * a.re().max(w2.dot(&w2).re())) {
        return Err(FrontalError::RankDeficientBase { u: f64::NAN, v: f64::NAN });
    }
    let e2 = p.scale(pn.sqrt().recip());
    Ok(Mat3x2::from_cols(&e1, &e2))
}
