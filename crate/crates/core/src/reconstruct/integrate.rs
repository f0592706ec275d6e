use super::{align_rigid, build_pq, build_tau_theta, frobenius_residual, AlignmentResult, ReconstructError,
    ReconstructionData, TauTheta};
use crate::frontal::{sample_jets, FormBundle, FrontalSpec};
use crate::grid::GridSpec;
use crate::linalg::{Mat2, Mat3, Mat3x2, Vec3};
use rayon::prelude::*;
use std::ops::Add;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum IntegrationOrder {
    /// Along the origin row in `u`, then up every column in `v`.
    #[default]
    UFirst,
    VFirst,
}

/// Values that can be combined linearly along a grid line.
pub trait LineField: Copy + Add<Output = Self> + Send + Sync {
    fn times(self, k: f64) -> Self;
    fn finite(&self) -> bool;
}

impl LineField for Mat3 {
    fn times(self, k: f64) -> Self {
        self.scale(k)
    }
    fn finite(&self) -> bool {
        self.m.iter().flatten().all(|x| x.is_finite())
    }
}

impl LineField for Vec3 {
    fn times(self, k: f64) -> Self {
        self.scale(k)
    }
    fn finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

/// Cubic interpolant halfway between nodes `i` and `i + 1`.
fn midpoint<T: LineField>(f: &[T], i: usize) -> T {
    let n = f.len();
    let w = |c: [f64; 4], b: usize| {
        f[b].times(c[0] / 16.0) + f[b + 1].times(c[1] / 16.0) + f[b + 2].times(c[2] / 16.0) + f[b + 3].times(c[3] / 16.0)
    };
    if i == 0 {
        w([5.0, 15.0, -5.0, 1.0], 0)
    } else if i + 2 == n {
        w([1.0, -5.0, 15.0, 5.0], n - 4)
    } else {
        w([-1.0, 9.0, 9.0, -1.0], i - 1)
    }
}

/// Integrates `y' = a(t) y` along one line from node `start` in both
/// directions with classical RK4.
fn rk4_line(a: &[Mat3], start: usize, y0: Mat3, h: f64) -> Vec<Mat3> {
    let n = a.len();
    let mut y = vec![y0; n];
    let step = |y: Mat3, a0: Mat3, am: Mat3, a1: Mat3, s: f64| {
        let k1 = a0 * y;
        let k2 = am * (y + k1.scale(s / 2.0));
        let k3 = am * (y + k2.scale(s / 2.0));
        let k4 = a1 * (y + k3.scale(s));
        y + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(s / 6.0)
    };
    for i in start..n - 1 {
        y[i + 1] = step(y[i], a[i], midpoint(a, i), a[i + 1], h);
    }
    for i in (1..=start).rev() {
        y[i - 1] = step(y[i], a[i], midpoint(a, i - 1), a[i - 1], -h);
    }
    y
}

/// Integrates `x' = f(t)` along one line from node `start` (Simpson's rule
/// with the cubic midpoint).
fn quadrature_line(f: &[Vec3], start: usize, x0: Vec3, h: f64) -> Vec<Vec3> {
    let n = f.len();
    let mut x = vec![x0; n];
    for i in start..n - 1 {
        x[i + 1] = x[i] + (f[i] + midpoint(f, i).scale(4.0) + f[i + 1]).scale(h / 6.0);
    }
    for i in (1..=start).rev() {
        x[i - 1] = x[i] - (f[i] + midpoint(f, i - 1).scale(4.0) + f[i - 1]).scale(h / 6.0);
    }
    x
}

/// Runs `line` along the base line through `origin` and then along every
/// transversal line, returning values in grid order.
fn two_pass<T: LineField, A: Copy + Send + Sync>(
    grid: &GridSpec,
    origin: (usize, usize),
    order: IntegrationOrder,
    along_u: &[A],
    along_v: &[A],
    y0: T,
    line: impl Fn(&[A], usize, T, f64) -> Vec<T> + Sync,
) -> Result<Vec<T>, ReconstructError> {
    let g = grid;
    let (i0, j0) = origin;
    let mut out = vec![y0; g.len()];
    match order {
        IntegrationOrder::UFirst => {
            let row: Vec<A> = (0..g.nu).map(|i| along_u[g.index(i, j0)]).collect();
            let base = line(&row, i0, y0, g.hu());
            let cols: Vec<Vec<T>> = (0..g.nu)
                .into_par_iter()
                .map(|i| {
                    let col: Vec<A> = (0..g.nv).map(|j| along_v[g.index(i, j)]).collect();
                    line(&col, j0, base[i], g.hv())
                })
                .collect();
            for (i, c) in cols.into_iter().enumerate() {
                for (j, y) in c.into_iter().enumerate() {
                    out[g.index(i, j)] = y;
                }
            }
        }
        IntegrationOrder::VFirst => {
            let col: Vec<A> = (0..g.nv).map(|j| along_v[g.index(i0, j)]).collect();
            let base = line(&col, j0, y0, g.hv());
            let rows: Vec<Vec<T>> = (0..g.nv)
                .into_par_iter()
                .map(|j| {
                    let row: Vec<A> = (0..g.nu).map(|i| along_u[g.index(i, j)]).collect();
                    line(&row, i0, base[j], g.hu())
                })
                .collect();
            for (j, r) in rows.into_iter().enumerate() {
                for (i, y) in r.into_iter().enumerate() {
                    out[g.index(i, j)] = y;
                }
            }
        }
    }
    if let Some(k) = out.iter().position(|y| !y.finite()) {
        let (u, v) = g.point(k);
        return Err(ReconstructError::StepFailure { u, v });
    }
    Ok(out)
}

/// The upper-triangular frame with `W₀ᵀW₀ = blockdiag(I_Ω, 1)` and positive
/// diagonal, or `None` if `I_Ω` is not positive definite.
pub fn frame_from_gram(io: &Mat2) -> Option<Mat3> {
    let (e, f, g) = (io.m[0][0], io.m[0][1], io.m[1][1]);
    if !(e > 0.0 && e * g - f * f > 0.0) {
        return None;
    }
    let a = e.sqrt();
    let b = f / a;
    let c = (g - b * b).sqrt();
    Some(Mat3::from_rows([[a, b, 0.0], [0.0, c, 0.0], [0.0, 0.0, 1.0]]))
}

/// [`frame_from_gram`] at the data origin.
pub fn init_frame(data: &ReconstructionData) -> Result<Mat3, ReconstructError> {
    let (i, j) = data.origin;
    let k = data.grid.index(i, j);
    frame_from_gram(&data.i_omega[k].values()).ok_or_else(|| {
        let (u, v) = data.grid.point(k);
        ReconstructError::NotPositiveDefinite { u, v }
    })
}

/// `W` at every node from `W_uᵀ = PWᵀ`, `W_vᵀ = QWᵀ` and `W(origin) = w0`.
pub fn integrate_frame(
    p: &[Mat3],
    q: &[Mat3],
    w0: &Mat3,
    grid: &GridSpec,
    origin: (usize, usize),
    order: IntegrationOrder,
) -> Result<Vec<Mat3>, ReconstructError> {
    assert!(grid.nu >= 4 && grid.nv >= 4, "integration needs at least 4×4 nodes");
    let yt = two_pass(grid, origin, order, p, q, w0.transpose(), rk4_line)?;
    Ok(yt.iter().map(Mat3::transpose).collect())
}

/// `x` at every node from `Dx = ΩΛᵀ` with `Ω` the first two columns of `W`
/// and `x(origin) = q`.
pub fn integrate_position(
    w: &[Mat3],
    lambda: &[Mat2],
    q: Vec3,
    grid: &GridSpec,
    origin: (usize, usize),
    order: IntegrationOrder,
) -> Result<Vec<Vec3>, ReconstructError> {
    let comb = |k: usize, r: usize| {
        let l = &lambda[k];
        w[k].col(0).scale(l.m[r][0]) + w[k].col(1).scale(l.m[r][1])
    };
    let xu: Vec<Vec3> = (0..grid.len()).map(|k| comb(k, 0)).collect();
    let xv: Vec<Vec3> = (0..grid.len()).map(|k| comb(k, 1)).collect();
    two_pass(grid, origin, order, &xu, &xv, q, quadrature_line)
}

/// A realization of coefficient data together with its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameField {
    pub grid: GridSpec,
    /// `(w₁ w₂ n)` at every node.
    pub w: Vec<Mat3>,
    pub x: Vec<Vec3>,
    pub p: Vec<Mat3>,
    pub q: Vec<Mat3>,
    pub tau_theta: TauTheta,
    pub frobenius_residual: f64,
    pub frobenius_argmax: (f64, f64),
    /// Largest entry of `W_UFirst − W_VFirst`.
    pub mixed_partial_residual: f64,
    /// Largest coordinate of `x_UFirst − x_VFirst`.
    pub position_discrepancy: f64,
    /// Largest entry of `WᵀW − blockdiag(I_Ω, 1)`.
    pub gram_defect: f64,
    /// Largest coordinate of `n − w₁×w₂/‖w₁×w₂‖`.
    pub normal_defect: f64,
    pub min_det: f64,
}

impl FrameField {
    /// Bundles of the realized frontal, for classification. Fields that
    /// need derivatives of the realization (`Γ`) are left empty.
    pub fn bundles(&self, data: &ReconstructionData) -> Vec<FormBundle> {
        (0..self.grid.len())
            .map(|k| {
                let w = &self.w[k];
                let omega = Mat3x2::from_cols(&w.col(0), &w.col(1));
                let lam = data.lambda[k].values();
                let ii = data.ii_omega[k].values();
                let dx = omega.mul2(&lam.transpose());
                FormBundle {
                    point: self.grid.point(k),
                    x: self.x[k],
                    dx,
                    omega,
                    lambda: lam,
                    lambda_u: data.lambda[k].map(|x| x.du),
                    lambda_v: data.lambda[k].map(|x| x.dv),
                    lambda_det: lam.det(),
                    n: w.col(2),
                    first: dx.tr_mul(&dx),
                    second: lam * ii,
                    i_omega: omega.tr_mul(&omega),
                    ii_omega: ii,
                    mu: data.mu(k),
                    theta1: self.tau_theta.theta1[k],
                    theta2: self.tau_theta.theta2[k],
                    gamma1: None,
                    gamma2: None,
                }
            })
            .collect()
    }
}

fn max_diff<T>(a: &[T], b: &[T], d: impl Fn(&T, &T) -> f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| d(x, y)).fold(0.0, f64::max)
}

/// Builds `τ`, `Θ`, `P`, `Q`, integrates the frame and position in both
/// orders and reports the diagnostics. `w0` defaults to [`init_frame`].
pub fn reconstruct(data: &ReconstructionData, w0: Option<Mat3>) -> Result<FrameField, ReconstructError> {
    let g = &data.grid;
    let tt = build_tau_theta(data)?;
    let (p, q) = build_pq(data, &tt);
    let (frob, frob_at) = frobenius_residual(&p, &q, g);
    let w0 = match w0 {
        Some(w) => w,
        None => init_frame(data)?,
    };
    let w = integrate_frame(&p, &q, &w0, g, data.origin, IntegrationOrder::UFirst)?;
    let w_alt = integrate_frame(&p, &q, &w0, g, data.origin, IntegrationOrder::VFirst)?;
    let lam: Vec<Mat2> = data.lambda.iter().map(|l| l.values()).collect();
    let x = integrate_position(&w, &lam, data.seed, g, data.origin, IntegrationOrder::UFirst)?;
    let x_alt = integrate_position(&w, &lam, data.seed, g, data.origin, IntegrationOrder::VFirst)?;

    let mut gram_defect = 0.0f64;
    let mut normal_defect = 0.0f64;
    let mut min_det = f64::INFINITY;
    for (k, wk) in w.iter().enumerate() {
        let target = Mat3::block_diag(&data.i_omega[k].values(), 1.0);
        gram_defect = gram_defect.max((wk.transpose() * *wk - target).max_abs());
        let c = wk.col(0).cross(&wk.col(1));
        normal_defect = normal_defect.max((wk.col(2) - c.scale(1.0 / c.norm())).max_abs());
        min_det = min_det.min(wk.det());
    }
    Ok(FrameField {
        grid: *g,
        mixed_partial_residual: max_diff(&w, &w_alt, |a, b| (*a - *b).max_abs()),
        position_discrepancy: max_diff(&x, &x_alt, |a, b| (*a - *b).max_abs()),
        w,
        x,
        p,
        q,
        tau_theta: tt,
        frobenius_residual: frob,
        frobenius_argmax: frob_at,
        gram_defect,
        normal_defect,
        min_det,
    })
}

/// Derive, reconstruct and align against the sampled original.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundTrip {
    pub data: ReconstructionData,
    pub original: Vec<Vec3>,
    pub frame: FrameField,
    /// Maps the reconstruction onto the original.
    pub alignment: AlignmentResult,
}

pub fn roundtrip(spec: &FrontalSpec, grid: &GridSpec) -> Result<RoundTrip, ReconstructError> {
    let jets = sample_jets(spec, grid).into_iter().collect::<Result<Vec<_>, _>>()?;
    let original: Vec<Vec3> = jets.iter().map(|j| j.x.map(|c| c.value)).collect();
    let data = super::data_from_jets(grid, &jets);
    let frame = reconstruct(&data, None)?;
    let alignment = align_rigid(&frame.x, &original)?;
    Ok(RoundTrip { data, original, frame, alignment })
}
