//! Relative curvatures and the singular-point taxonomy.

use crate::exprmap::{eval_f64, Expr};
use crate::frontal::{sample_jets, Domain, FormBundle, FormJets, FrontalError, FrontalSpec};
use crate::grid::GridSpec;
use crate::linalg::{rank_tol, Mat2, Mat4x2, DEFAULT_RANK_TOL};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub const DEFAULT_TOL_CLASS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Regular,
    FrontRank1,
    FrontRank0,
    NotFrontHere,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Regular => "Regular",
            Verdict::FrontRank1 => "FrontRank1",
            Verdict::FrontRank0 => "FrontRank0",
            Verdict::NotFrontHere => "NotFrontHere",
        }
    }

    pub fn is_singular(self) -> bool {
        self != Verdict::Regular
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Frontal(#[from] FrontalError),
    #[error("verdict {verdict} disagrees with rank {rank} of [Λᵀ; μᵀ] at (u, v) = ({u}, {v})")]
    InconsistentClassification { u: f64, v: f64, verdict: Verdict, rank: usize },
    #[error("no regular sample near (u, v) = ({u}, {v})")]
    NoRegularNeighbors { u: f64, v: f64 },
}

/// Thresholds and the normalizations they apply to.
///
/// A point is singular when `|λ_Ω| ≤ tol_sing · lambda_det_ref`. The
/// curvatures are compared with `tol_class` after dividing `K_Ω` by
/// `mu_scale²` and `H_Ω` by `mu_scale · lambda_scale`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyParams {
    pub tol_sing: f64,
    pub tol_class: f64,
    pub rank_tol: f64,
    pub lambda_det_ref: f64,
    pub lambda_scale: f64,
    pub mu_scale: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            tol_sing: crate::frontal::DEFAULT_TOL_SING,
            tol_class: DEFAULT_TOL_CLASS,
            rank_tol: DEFAULT_RANK_TOL,
            lambda_det_ref: 1.0,
            lambda_scale: 1.0,
            mu_scale: 1.0,
        }
    }
}

impl ClassifyParams {
    pub fn absolute(tol_sing: f64, tol_class: f64) -> Self {
        ClassifyParams { tol_sing, tol_class, ..Default::default() }
    }

    /// Normalizations from grid maxima of `|λ_Ω|`, `‖Λ‖` and `‖μ‖`.
    pub fn from_bundles<'a>(
        bundles: impl IntoIterator<Item = &'a FormBundle>,
        tol_sing: f64,
        tol_class: f64,
    ) -> Self {
        let (mut l, mut lam, mut mu) = (0.0f64, 0.0f64, 0.0f64);
        for b in bundles {
            l = l.max(b.lambda_det.abs());
            lam = lam.max(b.lambda.max_abs());
            mu = mu.max(b.mu.max_abs());
        }
        let or_one = |x: f64| if x > 0.0 { x } else { 1.0 };
        ClassifyParams {
            tol_sing,
            tol_class,
            rank_tol: DEFAULT_RANK_TOL,
            lambda_det_ref: or_one(l),
            lambda_scale: or_one(lam),
            mu_scale: or_one(mu),
        }
    }

    pub fn is_singular(&self, lambda_det: f64) -> bool {
        lambda_det.abs() <= self.tol_sing * self.lambda_det_ref
    }

    pub fn k_hat(&self, k: f64) -> f64 {
        k / (self.mu_scale * self.mu_scale)
    }

    pub fn h_hat(&self, h: f64) -> f64 {
        h / (self.mu_scale * self.lambda_scale)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport {
    pub point: (f64, f64),
    pub lambda_det: f64,
    pub k_rel: f64,
    pub h_rel: f64,
    pub k_classical: Option<f64>,
    pub h_classical: Option<f64>,
    pub dx_rank: usize,
    pub verdict: Verdict,
}

/// `(K_Ω, H_Ω) = (det μ, −½ tr(μ adj Λ))`.
pub fn relative_curvatures(b: &FormBundle) -> (f64, f64) {
    (b.mu.det(), -0.5 * (b.mu * b.lambda.adj()).trace())
}

/// Classical `(K, H)` from `I` and `II`, where `det I > 0`.
pub fn classical_curvatures(first: &Mat2, second: &Mat2) -> Option<(f64, f64)> {
    let d = first.det();
    if !(d > 0.0) {
        return None;
    }
    let alpha = -(second.transpose() * first.inverse()?);
    Some((second.det() / d, -0.5 * alpha.trace()))
}

/// Classification with absolute thresholds.
pub fn classify_point(
    b: &FormBundle,
    tol_sing: f64,
    tol_class: f64,
) -> Result<ClassificationReport, ClassifyError> {
    classify_with(b, &ClassifyParams::absolute(tol_sing, tol_class))
}

pub fn classify_with(b: &FormBundle, p: &ClassifyParams) -> Result<ClassificationReport, ClassifyError> {
    let (k, h) = relative_curvatures(b);
    let singular = p.is_singular(b.lambda_det);
    let verdict = if !singular {
        Verdict::Regular
    } else if p.h_hat(h).abs() > p.tol_class {
        Verdict::FrontRank1
    } else if p.k_hat(k).abs() > p.tol_class {
        Verdict::FrontRank0
    } else {
        Verdict::NotFrontHere
    };
    if singular {
        let stacked = Mat4x2::stack(
            &b.lambda.transpose().scale(1.0 / p.lambda_scale),
            &b.mu.transpose().scale(1.0 / p.mu_scale),
        );
        // H_Ω is half a difference of two minors, so a non-front verdict
        // tolerates minors up to 2·tol_class.
        let front = verdict != Verdict::NotFrontHere;
        let rank = minor_rank(&stacked, if front { p.tol_class } else { 2.0 * p.tol_class });
        if (rank == 2) != front {
            return Err(ClassifyError::InconsistentClassification {
                u: b.point.0,
                v: b.point.1,
                verdict,
                rank,
            });
        }
    }
    let classical = if singular { None } else { classical_curvatures(&b.first, &b.second) };
    Ok(ClassificationReport {
        point: b.point,
        lambda_det: b.lambda_det,
        k_rel: k,
        h_rel: h,
        k_classical: classical.map(|c| c.0),
        h_classical: classical.map(|c| c.1),
        dx_rank: rank_tol(&Mat4x2::pad(&b.dx), p.rank_tol),
        verdict,
    })
}

/// Rank read off the 2×2 minors: 2 if some minor exceeds `tol` in absolute
/// value, else 1 if some entry does, else 0. Entries are expected to be
/// normalized already, so the threshold matches the one applied to
/// `K_Ω` and `H_Ω`.
pub fn minor_rank(m: &Mat4x2, tol: f64) -> usize {
    let mut max_minor: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            max_minor = max_minor.max((m.m[i][0] * m.m[j][1] - m.m[i][1] * m.m[j][0]).abs());
        }
    }
    if max_minor > tol {
        2
    } else if m.m.iter().flatten().any(|x| x.abs() > tol) {
        1
    } else {
        0
    }
}

/// Per-node classification of a grid plus refined zero crossings of `λ_Ω`.
#[derive(Clone, Debug)]
pub struct GridClassification {
    pub grid: GridSpec,
    pub params: ClassifyParams,
    pub nodes: Vec<Result<ClassificationReport, ClassifyError>>,
    /// Sign changes of `λ_Ω` along grid edges, located by bisection.
    pub crossings: Vec<ClassificationReport>,
}

impl GridClassification {
    pub fn histogram(&self) -> BTreeMap<String, usize> {
        let mut h = BTreeMap::new();
        for r in &self.nodes {
            let key = match r {
                Ok(r) => r.verdict.as_str().to_string(),
                Err(_) => "Error".to_string(),
            };
            *h.entry(key).or_insert(0) += 1;
        }
        h
    }

    pub fn verdicts(&self) -> Vec<Option<Verdict>> {
        self.nodes.iter().map(|r| r.as_ref().ok().map(|r| r.verdict)).collect()
    }

    pub fn at(&self, i: usize, j: usize) -> Option<&ClassificationReport> {
        self.nodes[self.grid.index(i, j)].as_ref().ok()
    }

    pub fn nearest(&self, u: f64, v: f64) -> Option<&ClassificationReport> {
        let (i, j) = self.grid.nearest(u, v);
        self.at(i, j)
    }

    pub fn singular(&self) -> impl Iterator<Item = &ClassificationReport> {
        self.nodes
            .iter()
            .filter_map(|r| r.as_ref().ok())
            .chain(&self.crossings)
            .filter(|r| r.verdict.is_singular())
    }
}

/// Bundles at every node (errors kept per node).
pub fn sample_bundles(spec: &FrontalSpec, grid: &GridSpec, tol_sing: f64) -> Vec<Result<FormBundle, FrontalError>> {
    sample_jets(spec, grid)
        .into_iter()
        .map(|j| j.map(|j| j.bundle(tol_sing)))
        .collect()
}

/// Normalizations computed from the given grid.
pub fn grid_params(spec: &FrontalSpec, grid: &GridSpec, tol_sing: f64, tol_class: f64) -> ClassifyParams {
    let bundles = sample_bundles(spec, grid, 0.0);
    ClassifyParams::from_bundles(bundles.iter().filter_map(|b| b.as_ref().ok()), tol_sing, tol_class)
}

pub fn classify_grid(spec: &FrontalSpec, grid: &GridSpec, tol_sing: f64, tol_class: f64) -> GridClassification {
    let bundles = sample_bundles(spec, grid, 0.0);
    let params = ClassifyParams::from_bundles(bundles.iter().filter_map(|b| b.as_ref().ok()), tol_sing, tol_class);
    classify_grid_with(spec, grid, &params, bundles)
}

fn classify_grid_with(
    spec: &FrontalSpec,
    grid: &GridSpec,
    params: &ClassifyParams,
    bundles: Vec<Result<FormBundle, FrontalError>>,
) -> GridClassification {
    let nodes: Vec<_> = bundles
        .par_iter()
        .map(|b| match b {
            Ok(b) => classify_with(&rebundle(b, params), params),
            Err(e) => Err(e.clone().into()),
        })
        .collect();
    let lam: Vec<Option<f64>> = bundles.iter().map(|b| b.as_ref().ok().map(|b| b.lambda_det)).collect();
    let mut edges = Vec::new();
    for j in 0..grid.nv {
        for i in 0..grid.nu {
            let k = grid.index(i, j);
            if i + 1 < grid.nu {
                edges.push((k, grid.index(i + 1, j)));
            }
            if j + 1 < grid.nv {
                edges.push((k, grid.index(i, j + 1)));
            }
        }
    }
    let crossings = edges
        .par_iter()
        .filter_map(|&(a, b)| {
            let (la, lb) = (lam[a]?, lam[b]?);
            if params.is_singular(la) || params.is_singular(lb) || la.signum() == lb.signum() {
                return None;
            }
            let p = bisect(spec, grid.point(a), grid.point(b), la)?;
            let bundle = FormJets::new(spec, p.0, p.1).ok()?.bundle(0.0);
            classify_with(&rebundle(&bundle, params), params).ok()
        })
        .collect();
    GridClassification { grid: *grid, params: *params, nodes, crossings }
}

/// Christoffel fields follow the grid-relative singularity threshold.
fn rebundle(b: &FormBundle, p: &ClassifyParams) -> FormBundle {
    let mut b = b.clone();
    if p.is_singular(b.lambda_det) {
        b.gamma1 = None;
        b.gamma2 = None;
    }
    b
}

fn bisect(spec: &FrontalSpec, a: (f64, f64), b: (f64, f64), la: f64) -> Option<(f64, f64)> {
    let lerp = |t: f64| (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let p = lerp(mid);
        let l = FormJets::new(spec, p.0, p.1).ok()?.lambda_det().value;
        if l == 0.0 {
            return Some(p);
        }
        if l.signum() == la.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lerp(0.5 * (lo + hi)))
}

/// Max relative error of `λ_Ω K = K_Ω` and `λ_Ω H = H_Ω` over regular nodes
/// with `|λ_Ω| > regular_frac · max|λ_Ω|`; the error is scaled by
/// `max(|K_Ω|, 1)` (resp. `H_Ω`).
pub fn prop_lim_residual(spec: &FrontalSpec, grid: &GridSpec, regular_frac: f64) -> Result<f64, ClassifyError> {
    let bundles: Vec<FormBundle> = sample_bundles(spec, grid, 0.0).into_iter().collect::<Result<_, _>>()?;
    let lmax = bundles.iter().fold(0.0f64, |m, b| m.max(b.lambda_det.abs()));
    let mut worst: f64 = 0.0;
    for b in &bundles {
        if b.lambda_det.abs() <= regular_frac * lmax {
            continue;
        }
        let (k, h) = relative_curvatures(b);
        let Some((kc, hc)) = classical_curvatures(&b.first, &b.second) else { continue };
        worst = worst
            .max((b.lambda_det * kc - k).abs() / k.abs().max(1.0))
            .max((b.lambda_det * hc - h).abs() / h.abs().max(1.0));
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitRow {
    pub radius: f64,
    pub k_err: f64,
    pub h_err: f64,
    pub regular_samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    pub point: (f64, f64),
    pub k_rel: f64,
    pub h_rel: f64,
    pub rows: Vec<LimitRow>,
}

impl LimitReport {
    /// Errors shrink strictly over the last three radii and end at or below
    /// `final_tol`.
    pub fn converges(&self, final_tol: f64) -> bool {
        let errs: Vec<f64> = self.rows.iter().map(|r| r.k_err.max(r.h_err)).collect();
        if errs.len() < 3 {
            return false;
        }
        let tail = &errs[errs.len() - 3..];
        let tiny = 1e-13;
        let monotone = tail.windows(2).all(|w| w[1] < w[0] || w[1] <= tiny);
        monotone && tail[2] <= final_tol
    }
}

pub const DEFAULT_RADII: [f64; 7] = [0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4];

/// Samples `λ_Ω K` and `λ_Ω H` on 16-point circles around `p` and compares
/// them with `K_Ω(p)`, `H_Ω(p)`.
pub fn limit_identity_check(spec: &FrontalSpec, p: (f64, f64), radii: &[f64]) -> Result<LimitReport, ClassifyError> {
    let center = FormJets::new(spec, p.0, p.1)?.bundle(0.0);
    let (k0, h0) = relative_curvatures(&center);
    let mut rows = Vec::new();
    let mut any = false;
    for &r in radii {
        let (mut ke, mut he, mut n) = (0.0f64, 0.0f64, 0usize);
        for s in 0..16 {
            let th = (s as f64 + 0.5) * std::f64::consts::TAU / 16.0;
            let q = (p.0 + r * th.cos(), p.1 + r * th.sin());
            let Ok(j) = FormJets::new(spec, q.0, q.1) else { continue };
            let b = j.bundle(0.0);
            if b.lambda_det == 0.0 {
                continue;
            }
            let Some((kc, hc)) = classical_curvatures(&b.first, &b.second) else { continue };
            ke = ke.max((b.lambda_det * kc - k0).abs());
            he = he.max((b.lambda_det * hc - h0).abs());
            n += 1;
        }
        any |= n > 0;
        rows.push(LimitRow { radius: r, k_err: ke, h_err: he, regular_samples: n });
    }
    if !any {
        return Err(ClassifyError::NoRegularNeighbors { u: p.0, v: p.1 });
    }
    Ok(LimitReport { point: p, k_rel: k0, h_rel: h0, rows })
}

/// Outcome of comparing two classifications node by node.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InvarianceReport {
    pub nodes_compared: usize,
    pub k_sign_mismatches: usize,
    pub h_sign_mismatches: usize,
    pub k_zero_mismatches: usize,
    pub h_zero_mismatches: usize,
    pub verdict_mismatches: usize,
    pub first_mismatch: Option<(f64, f64)>,
}

impl InvarianceReport {
    pub fn passes(&self) -> bool {
        self.nodes_compared > 0
            && self.k_sign_mismatches + self.h_sign_mismatches + self.k_zero_mismatches + self.h_zero_mismatches
                + self.verdict_mismatches
                == 0
    }

    /// `flip`: whether the transformation reverses the sign of `K_Ω` and of `H_Ω`.
    fn compare(
        &mut self,
        a: &ClassificationReport,
        pa: &ClassifyParams,
        b: &ClassificationReport,
        pb: &ClassifyParams,
        flip: (bool, bool),
    ) {
        self.nodes_compared += 1;
        let ka = pa.k_hat(a.k_rel);
        let kb = pb.k_hat(b.k_rel);
        let ha = pa.h_hat(a.h_rel);
        let hb = pb.h_hat(b.h_rel);
        let tol = pa.tol_class;
        let sk = if flip.0 { -1.0 } else { 1.0 };
        let sh = if flip.1 { -1.0 } else { 1.0 };
        let mut bad = false;
        let zk = (ka.abs() <= tol, kb.abs() <= tol);
        let zh = (ha.abs() <= tol, hb.abs() <= tol);
        if zk.0 != zk.1 {
            self.k_zero_mismatches += 1;
            bad = true;
        } else if !zk.0 && ka.signum() != (sk * kb).signum() {
            self.k_sign_mismatches += 1;
            bad = true;
        }
        if zh.0 != zh.1 {
            self.h_zero_mismatches += 1;
            bad = true;
        } else if !zh.0 && ha.signum() != (sh * hb).signum() {
            self.h_sign_mismatches += 1;
            bad = true;
        }
        if a.verdict != b.verdict {
            self.verdict_mismatches += 1;
            bad = true;
        }
        if bad && self.first_mismatch.is_none() {
            self.first_mismatch = Some(a.point);
        }
    }
}

/// Recompute with `Ω' = Ω·C` (det C > 0) and compare signs, zero sets and
/// verdicts node by node.
pub fn base_change_invariance_check(
    spec: &FrontalSpec,
    c: &[[Expr; 2]; 2],
    grid: &GridSpec,
    tol_sing: f64,
    tol_class: f64,
) -> InvarianceReport {
    let changed = spec.with_base_change(c);
    let a = classify_grid(spec, grid, tol_sing, tol_class);
    let b = classify_grid(&changed, grid, tol_sing, tol_class);
    let mut rep = InvarianceReport::default();
    for (ra, rb) in a.nodes.iter().zip(&b.nodes) {
        if let (Ok(ra), Ok(rb)) = (ra, rb) {
            rep.compare(ra, &a.params, rb, &b.params, (false, false));
        }
    }
    rep
}

/// Ambient isometry `x ↦ O x + a` and/or reparametrization `(s,t) ↦ h(s,t)`
/// on the given domain. Nodes of the transformed grid are compared with the
/// original classified at the mapped points.
pub fn symmetry_invariance_check(
    spec: &FrontalSpec,
    isometry: Option<(&[[f64; 3]; 3], &[f64; 3])>,
    reparam: Option<(&[Expr; 2], Domain)>,
    n: usize,
    tol_sing: f64,
    tol_class: f64,
) -> Result<InvarianceReport, ClassifyError> {
    let mut t = spec.clone();
    if let Some((o, a)) = isometry {
        t = t.with_isometry(o, a);
    }
    if let Some((h, dom)) = reparam {
        t = t.reparametrized(h, dom);
    }
    let tgrid = t.grid_n(n);
    let ogrid = spec.grid_n(n);
    let ta = classify_grid(&t, &tgrid, tol_sing, tol_class);
    let po = grid_params(spec, &ogrid, tol_sing, tol_class);
    let mut rep = InvarianceReport::default();
    for (k, rt) in ta.nodes.iter().enumerate() {
        let Ok(rt) = rt else { continue };
        let (s, tt) = tgrid.point(k);
        let (u, v) = match reparam {
            Some((h, _)) => (
                eval_f64(&h[0], s, tt).map_err(FrontalError::from)?,
                eval_f64(&h[1], s, tt).map_err(FrontalError::from)?,
            ),
            None => (s, tt),
        };
        let Ok(j) = FormJets::new(spec, u, v) else { continue };
        let ro = classify_with(&j.bundle(0.0), &po)?;
        // det Dh scales both curvatures; det O = -1 flips the normal and H_Ω.
        let flip_h_iso = isometry.is_some_and(|(o, _)| {
            crate::linalg::Mat3::from_rows(*o).det() < 0.0
        });
        let flip_dh = match reparam {
            Some((h, _)) => {
                let ju = crate::exprmap::eval_jet(&h[0], s, tt).map_err(FrontalError::from)?;
                let jv = crate::exprmap::eval_jet(&h[1], s, tt).map_err(FrontalError::from)?;
                ju.du * jv.dv - ju.dv * jv.du < 0.0
            }
            None => false,
        };
        rep.compare(&ro, &po, rt, &ta.params, (flip_dh, flip_dh != flip_h_iso));
    }
    Ok(rep)
}
