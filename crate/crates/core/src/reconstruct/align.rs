use super::ReconstructError;
use crate::linalg::{Mat3, Vec3};
use nalgebra::{Matrix3, SymmetricEigen, Vector3};

/// Proper rigid motion `x ↦ Rx + t` taking one point set onto another.
#[derive(Clone, Debug, PartialEq)]
pub struct AlignmentResult {
    pub rotation: Mat3,
    pub translation: Vec3,
    pub rms_error: f64,
    pub max_error: f64,
}

fn na(v: &Vec3) -> Vector3<f64> {
    Vector3::new(v.0[0], v.0[1], v.0[2])
}

/// Least-squares proper rigid motion with `R·a + t ≈ b` (Kabsch, with the
/// reflection removed).
pub fn align_rigid(a: &[Vec3], b: &[Vec3]) -> Result<AlignmentResult, ReconstructError> {
    if a.len() != b.len() {
        return Err(ReconstructError::DegenerateCloud(format!("{} points against {}", a.len(), b.len())));
    }
    if a.len() < 3 {
        return Err(ReconstructError::DegenerateCloud(format!("{} points", a.len())));
    }
    let n = a.len() as f64;
    let ca = a.iter().map(na).sum::<Vector3<f64>>() / n;
    let cb = b.iter().map(na).sum::<Vector3<f64>>() / n;
    let mut h = Matrix3::zeros();
    let mut spread = Matrix3::zeros();
    for (p, q) in a.iter().zip(b) {
        let (p, q) = (na(p) - ca, na(q) - cb);
        h += p * q.transpose();
        spread += p * p.transpose();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(spread).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    if !(ev[0] > 0.0) || ev[1] <= 1e-20 * ev[0] {
        return Err(ReconstructError::DegenerateCloud("points are coincident or collinear".into()));
    }
    let svd = h.svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let d = (vt.transpose() * u.transpose()).determinant().signum();
    let r = vt.transpose() * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * u.transpose();
    let t = cb - r * ca;
    let (mut sum, mut max) = (0.0, 0.0f64);
    for (p, q) in a.iter().zip(b) {
        let e = (r * na(p) + t - na(q)).norm();
        sum += e * e;
        max = max.max(e);
    }
    let rotation = Mat3::from_rows(std::array::from_fn(|i| std::array::from_fn(|j| r[(i, j)])));
    Ok(AlignmentResult {
        rotation,
        translation: Vec3::new(t[0], t[1], t[2]),
        rms_error: (sum / n).sqrt(),
        max_error: max,
    })
}
