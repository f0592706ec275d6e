//! Realizing coefficient data as a frontal: connection matrices, the
//! integrability residual, frame and position integration, and rigid
//! alignment of two realizations.

mod align;
mod integrate;

pub use align::{align_rigid, AlignmentResult};
pub use integrate::{
    frame_from_gram, init_frame, integrate_frame, integrate_position, reconstruct, roundtrip, FrameField,
    IntegrationOrder, LineField, RoundTrip,
};

use crate::compat::{n_from_forms, theta_from_tau};
use crate::exprmap::Jet2;
use crate::frontal::{sample_jets, FormJets, FrontalError, FrontalSpec};
use crate::grid::GridSpec;
use crate::linalg::{Mat2, Mat3, Vec3};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructError {
    #[error(transparent)]
    Frontal(#[from] FrontalError),
    #[error("I_Ω is not positive definite at (u, v) = ({u}, {v})")]
    NotPositiveDefinite { u: f64, v: f64 },
    #[error("N = ({n1:.3e}, {n2:.3e}) does not vanish at the singular node ({u}, {v})")]
    MembershipViolation { u: f64, v: f64, n1: f64, n2: f64 },
    #[error("no off-Σ neighbours to interpolate τ at (u, v) = ({u}, {v})")]
    InterpolationGap { u: f64, v: f64 },
    #[error("non-finite value while integrating at (u, v) = ({u}, {v})")]
    StepFailure { u: f64, v: f64 },
    #[error("cannot align: {0}")]
    DegenerateCloud(String),
    #[error("{0}")]
    Data(String),
}

/// The coefficient fields of a frontal sampled on a grid, as order-2 jets.
///
/// `i_omega` holds `(E_Ω, F_Ω; F_Ω, G_Ω)`, `ii_omega` holds
/// `(e_Ω, f₁Ω; f₂Ω, g_Ω)` and `lambda` holds `(λ₁₁, λ₁₂; λ₂₁, λ₂₂)`, each
/// in grid order.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionData {
    pub grid: GridSpec,
    pub i_omega: Vec<Mat2<Jet2>>,
    pub ii_omega: Vec<Mat2<Jet2>>,
    pub lambda: Vec<Mat2<Jet2>>,
    /// Node where the frame and position are seeded.
    pub origin: (usize, usize),
    /// `x` at the origin.
    pub seed: Vec3,
}

/// Names of the eleven scalar fields, in the order of [`ReconstructionData::scalar`].
pub const FIELD_NAMES: [&str; 11] = [
    "E_omega", "F_omega", "G_omega", "e_omega", "f1_omega", "f2_omega", "g_omega", "lambda11", "lambda12",
    "lambda21", "lambda22",
];

/// `|λ_Ω|` below this fraction of its grid maximum marks a node whose `τ` is
/// interpolated.
pub const TAU_BAND_FRAC: f64 = 1e-6;
/// Bound on `|N|` at interpolated nodes.
pub const N_TOL: f64 = 1e-8;
/// Largest distance, in nodes, searched for off-`Σ` neighbours.
const INTERP_REACH: isize = 6;

impl ReconstructionData {
    /// Assembles data from the eleven fields in [`FIELD_NAMES`] order.
    pub fn from_scalars(grid: GridSpec, fields: [Vec<Jet2>; 11]) -> Result<Self, ReconstructError> {
        if let Some(k) = FIELD_NAMES.iter().zip(&fields).position(|(_, f)| f.len() != grid.len()) {
            return Err(ReconstructError::Data(format!(
                "field {} has {} values, grid has {}",
                FIELD_NAMES[k],
                fields[k].len(),
                grid.len()
            )));
        }
        let f = |i: usize, k: usize| fields[i][k];
        let n = grid.len();
        let mut data = ReconstructionData {
            grid,
            i_omega: (0..n).map(|k| Mat2::new(f(0, k), f(1, k), f(1, k), f(2, k))).collect(),
            ii_omega: (0..n).map(|k| Mat2::new(f(3, k), f(4, k), f(5, k), f(6, k))).collect(),
            lambda: (0..n).map(|k| Mat2::new(f(7, k), f(8, k), f(9, k), f(10, k))).collect(),
            origin: (0, 0),
            seed: Vec3::zero(),
        };
        data.origin = data.default_origin();
        Ok(data)
    }

    /// The eleven fields in [`FIELD_NAMES`] order.
    pub fn scalar(&self, i: usize) -> Vec<Jet2> {
        let pick = |m: &Mat2<Jet2>, r: usize, c: usize| m.m[r][c];
        let n = self.grid.len();
        (0..n)
            .map(|k| match i {
                0 => pick(&self.i_omega[k], 0, 0),
                1 => pick(&self.i_omega[k], 0, 1),
                2 => pick(&self.i_omega[k], 1, 1),
                3..=6 => pick(&self.ii_omega[k], (i - 3) / 2, (i - 3) % 2),
                7..=10 => pick(&self.lambda[k], (i - 7) / 2, (i - 7) % 2),
                _ => panic!("field index {i} out of range"),
            })
            .collect()
    }

    pub fn lambda_det(&self, k: usize) -> f64 {
        self.lambda[k].values().det()
    }

    /// The centre node, or the regular node nearest to it.
    pub fn default_origin(&self) -> (usize, usize) {
        let g = &self.grid;
        let c = (g.nu / 2, g.nv / 2);
        let lmax = (0..g.len()).map(|k| self.lambda_det(k).abs()).fold(0.0, f64::max);
        let regular = |k: usize| self.lambda_det(k).abs() > TAU_BAND_FRAC * lmax;
        if lmax == 0.0 || regular(g.index(c.0, c.1)) {
            return c;
        }
        let d2 = |k: usize| {
            let (i, j) = g.ij(k);
            (i as f64 - c.0 as f64).powi(2) + (j as f64 - c.1 as f64).powi(2)
        };
        let best = (0..g.len()).filter(|&k| regular(k)).min_by(|&a, &b| d2(a).total_cmp(&d2(b)));
        best.map(|k| g.ij(k)).unwrap_or(c)
    }

    /// Moves the origin to the node nearest `(u, v)`.
    pub fn with_origin(mut self, u: f64, v: f64) -> Self {
        self.origin = self.grid.nearest(u, v);
        self
    }

    pub fn with_seed(mut self, q: Vec3) -> Self {
        self.seed = q;
        self
    }

    /// `E_Ω > 0`, `G_Ω > 0` and `E_ΩG_Ω − F_Ω² > 0` at every node.
    pub fn check_positive(&self) -> Result<(), ReconstructError> {
        for (k, io) in self.i_omega.iter().enumerate() {
            let m = io.values();
            if !(m.m[0][0] > 0.0 && m.m[1][1] > 0.0 && m.det() > 0.0) {
                let (u, v) = self.grid.point(k);
                return Err(ReconstructError::NotPositiveDefinite { u, v });
            }
        }
        Ok(())
    }

    /// `μ = −II_Ωᵀ I_Ω⁻¹` at node `k`.
    pub fn mu(&self, k: usize) -> Mat2 {
        let inv = self.i_omega[k].values().inverse().unwrap_or(Mat2::zero());
        -(self.ii_omega[k].values().transpose() * inv)
    }
}

/// Samples the coefficient fields of `spec` on `grid`.
pub fn derive_data(spec: &FrontalSpec, grid: &GridSpec) -> Result<ReconstructionData, ReconstructError> {
    let jets = sample_jets(spec, grid).into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(data_from_jets(grid, &jets))
}

fn data_from_jets(grid: &GridSpec, jets: &[FormJets]) -> ReconstructionData {
    let mut data = ReconstructionData {
        grid: *grid,
        i_omega: jets.iter().map(|j| j.i_omega).collect(),
        ii_omega: jets.iter().map(|j| j.ii_omega).collect(),
        lambda: jets.iter().map(|j| j.lambda).collect(),
        origin: (0, 0),
        seed: Vec3::zero(),
    };
    data.origin = data.default_origin();
    data
}

/// `τ` and the rebuilt `Θ₁`, `Θ₂` at every node.
#[derive(Clone, Debug, PartialEq)]
pub struct TauTheta {
    pub tau: Vec<[f64; 2]>,
    pub theta1: Vec<Mat2>,
    pub theta2: Vec<Mat2>,
    /// Nodes whose `τ` was interpolated.
    pub interpolated: usize,
}

/// `τᵢ = Nᵢ/λ_Ω` off `Σ`; on `Σ` a cubic through the nearest off-`Σ` nodes on
/// a grid line or diagonal. `Θᵢ` follows from `τᵢ` and `I_Ω`.
pub fn build_tau_theta(data: &ReconstructionData) -> Result<TauTheta, ReconstructError> {
    data.check_positive()?;
    let g = &data.grid;
    let n = g.len();
    let lam: Vec<f64> = (0..n).map(|k| data.lambda_det(k)).collect();
    let lmax = lam.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let band: Vec<bool> = lam.iter().map(|l| l.abs() <= TAU_BAND_FRAC * lmax).collect();
    let nf: Vec<[f64; 2]> = (0..n)
        .into_par_iter()
        .map(|k| n_from_forms(&data.lambda[k].map(Jet2::to_dual), &data.i_omega[k].map(Jet2::to_dual)))
        .collect();
    let mut tau: Vec<[f64; 2]> =
        (0..n).map(|k| if band[k] { [0.0; 2] } else { [nf[k][0] / lam[k], nf[k][1] / lam[k]] }).collect();

    let mut interpolated = 0;
    if lmax > 0.0 {
        for k in (0..n).filter(|&k| band[k]) {
            let (u, v) = g.point(k);
            if nf[k][0].abs().max(nf[k][1].abs()) > N_TOL {
                return Err(ReconstructError::MembershipViolation { u, v, n1: nf[k][0], n2: nf[k][1] });
            }
            tau[k] = interpolate_tau(g, &band, &tau, k).ok_or(ReconstructError::InterpolationGap { u, v })?;
            interpolated += 1;
        }
    }

    let mut theta1 = Vec::with_capacity(n);
    let mut theta2 = Vec::with_capacity(n);
    for k in 0..n {
        let io = data.i_omega[k].values();
        let t1 = theta_from_tau(tau[k][0], &io, &data.i_omega[k].map(|x| x.du));
        let t2 = theta_from_tau(tau[k][1], &io, &data.i_omega[k].map(|x| x.dv));
        let (Some(t1), Some(t2)) = (t1, t2) else {
            let (u, v) = g.point(k);
            return Err(ReconstructError::NotPositiveDefinite { u, v });
        };
        theta1.push(t1);
        theta2.push(t2);
    }
    Ok(TauTheta { tau, theta1, theta2, interpolated })
}

fn lagrange_at_zero(ks: &[isize], ys: &[[f64; 2]]) -> [f64; 2] {
    let mut out = [0.0; 2];
    for (a, &ka) in ks.iter().enumerate() {
        let mut w = 1.0;
        for (b, &kb) in ks.iter().enumerate() {
            if a != b {
                w *= kb as f64 / (kb - ka) as f64;
            }
        }
        out[0] += w * ys[a][0];
        out[1] += w * ys[a][1];
    }
    out
}

/// Cubic through the four off-band nodes closest to `k` along one of the
/// grid lines or diagonals, taking the direction where they lie closest.
fn interpolate_tau(g: &GridSpec, band: &[bool], tau: &[[f64; 2]], k: usize) -> Option<[f64; 2]> {
    let (i, j) = g.ij(k);
    let (i, j) = (i as isize, j as isize);
    let mut best: Option<(f64, [f64; 2])> = None;
    for (di, dj) in [(1isize, 0isize), (0, 1), (1, 1), (1, -1)] {
        let len = ((di * di) as f64 * g.hu() * g.hu() + (dj * dj) as f64 * g.hv() * g.hv()).sqrt();
        let mut ks: Vec<isize> = (1..=INTERP_REACH).flat_map(|s| [s, -s]).collect();
        ks.retain(|&s| {
            let (a, b) = (i + s * di, j + s * dj);
            a >= 0 && b >= 0 && (a as usize) < g.nu && (b as usize) < g.nv && !band[g.index(a as usize, b as usize)]
        });
        if ks.len() < 4 {
            continue;
        }
        ks.truncate(4);
        let reach = ks.iter().map(|s| s.abs()).max().unwrap() as f64 * len;
        if best.is_some_and(|(r, _)| r <= reach) {
            continue;
        }
        let ys: Vec<[f64; 2]> = ks.iter().map(|&s| tau[g.index((i + s * di) as usize, (j + s * dj) as usize)]).collect();
        best = Some((reach, lagrange_at_zero(&ks, &ys)));
    }
    best.map(|b| b.1)
}

/// `P` and `Q`: the connection matrices with `W_uᵀ = PWᵀ`, `W_vᵀ = QWᵀ`.
pub fn build_pq(data: &ReconstructionData, tt: &TauTheta) -> (Vec<Mat3>, Vec<Mat3>) {
    (0..data.grid.len())
        .map(|k| {
            let mu = data.mu(k);
            let ii = data.ii_omega[k].values();
            let (t1, t2) = (tt.theta1[k], tt.theta2[k]);
            let p = Mat3::from_rows([
                [t1.m[0][0], t1.m[0][1], ii.m[0][0]],
                [t1.m[1][0], t1.m[1][1], ii.m[1][0]],
                [mu.m[0][0], mu.m[0][1], 0.0],
            ]);
            let q = Mat3::from_rows([
                [t2.m[0][0], t2.m[0][1], ii.m[0][1]],
                [t2.m[1][0], t2.m[1][1], ii.m[1][1]],
                [mu.m[1][0], mu.m[1][1], 0.0],
            ]);
            (p, q)
        })
        .unzip()
}

/// Fourth-order first derivative at node `i` of a line of `n` samples;
/// one-sided stencils within two nodes of either end.
fn d4(f: impl Fn(usize) -> Mat3, i: usize, n: usize, h: f64) -> Mat3 {
    const EDGE: [[f64; 5]; 2] = [[-25.0, 48.0, -36.0, 16.0, -3.0], [-3.0, -10.0, 18.0, -6.0, 1.0]];
    let terms: Vec<(f64, usize)> = if i >= 2 && i + 2 < n {
        vec![(1.0, i - 2), (-8.0, i - 1), (8.0, i + 1), (-1.0, i + 2)]
    } else if i < 2 {
        (0..5).map(|s| (EDGE[i][s], s)).collect()
    } else {
        (0..5).map(|s| (-EDGE[n - 1 - i][s], n - 1 - s)).collect()
    };
    let c = 1.0 / (12.0 * h);
    terms.iter().fold(Mat3::zero(), |a, &(w, s)| a + f(s).scale(w * c))
}

/// Grid maximum of `‖P_v − Q_u + PQ − QP‖` (largest entry) and where it
/// occurs. Derivatives are fourth-order finite differences.
pub fn frobenius_residual(p: &[Mat3], q: &[Mat3], grid: &GridSpec) -> (f64, (f64, f64)) {
    let g = grid;
    assert!(g.nu >= 5 && g.nv >= 5, "the residual needs at least 5×5 nodes");
    let r: Vec<f64> = (0..g.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = g.ij(k);
            let pv = d4(|jj| p[g.index(i, jj)], j, g.nv, g.hv());
            let qu = d4(|ii| q[g.index(ii, j)], i, g.nu, g.hu());
            (pv - qu + p[k].commutator(&q[k])).max_abs()
        })
        .collect();
    let (k, m) = r.iter().enumerate().fold((0, 0.0), |(bk, bm), (k, &x)| if x > bm { (k, x) } else { (bk, bm) });
    (m, g.point(k))
}
