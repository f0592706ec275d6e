//! Numerical proxy for membership of `N₁`, `N₂` in the ideal generated by
//! `λ_Ω`.
//!
//! Three parts: `N` vanishes on singular nodes; the quotients `τᵢ = Nᵢ/λ_Ω`
//! settle under grid refinement in the band `|λ_Ω| < 0.1·max` (their largest
//! jump between neighbouring nodes shrinks with the spacing); and `Θ`
//! rebuilt from `τ` reproduces the directly computed `Θ`. On singular nodes
//! `τ` is the symmetric limit from off-`Σ` points, extrapolated in the step.

use super::CompatError;
use crate::frontal::{sample_jets, FormJets, FrontalSpec, DEFAULT_TOL_SING};
use crate::exprmap::{Jet1, Jet2};
use crate::grid::GridSpec;
use crate::linalg::Mat2;
use rayon::prelude::*;
use std::fmt;

pub const DEFAULT_REFINEMENT_LEVELS: usize = 3;
const BAND_FRAC: f64 = 0.1;
const N_TOL: f64 = 1e-8;
const THETA_TOL: f64 = 1e-7;
/// Under refinement the largest neighbour jump of a smooth `τ` halves; this
/// is the largest ratio still accepted.
const CAUCHY_RATIO: f64 = 0.75;
/// Jumps below `OSC_FLOOR · (1 + sup|τ|)` are rounding noise.
const OSC_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MembershipFailure {
    NotVanishingOnSigma,
    NotCauchy,
    ThetaMismatch,
}

impl fmt::Display for MembershipFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MembershipFailure::NotVanishingOnSigma => "N does not vanish on the singular set",
            MembershipFailure::NotCauchy => "N/λ_Ω does not settle under refinement",
            MembershipFailure::ThetaMismatch => "Θ rebuilt from τ differs from Θ",
        })
    }
}

/// Behaviour of `τ = N/λ_Ω` in the band at one refinement level.
///
/// `tau_osc` is the largest jump of `τ` between adjacent non-singular nodes
/// with at least one of them in the band; `osc_at` is the endpoint with the
/// smaller `|λ_Ω|`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelStats {
    pub grid: GridSpec,
    pub band_nodes: usize,
    /// Neighbour pairs entering `tau_osc`.
    pub band_pairs: usize,
    pub undefined_nodes: usize,
    pub tau_sup: f64,
    pub tau_osc: f64,
    pub osc_at: (f64, f64),
    pub lambda_at_osc: f64,
    pub n_at_osc: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport {
    pub singular_nodes: usize,
    pub n_max_on_sigma: f64,
    pub levels: Vec<LevelStats>,
    pub theta_defect: f64,
    pub theta_argmax: (f64, f64),
    /// Singular nodes where no direction leaves `Σ`; `τ` is not checked there.
    pub unresolved_nodes: usize,
    /// 2×2 blocks of singular nodes: a sign that `Σ` may have interior.
    pub interior_blocks: usize,
    pub violation: Option<(MembershipFailure, (f64, f64), String)>,
}

impl MembershipReport {
    pub fn into_result(self) -> Result<Self, CompatError> {
        match &self.violation {
            None => Ok(self),
            Some((failure, (u, v), detail)) => Err(CompatError::MembershipViolation {
                u: *u,
                v: *v,
                failure: *failure,
                detail: detail.clone(),
            }),
        }
    }
}

fn quad(a: [f64; 2], m: &Mat2, b: [f64; 2]) -> f64 {
    a[0] * (m.m[0][0] * b[0] + m.m[0][1] * b[1]) + a[1] * (m.m[1][0] * b[0] + m.m[1][1] * b[1])
}

/// `(N₁, N₂)` with `N₁ = Λ₍₁₎ᵤI_ΩΛ₍₂₎ᵀ − Λ₍₁₎I_ΩΛ₍₂₎ᵤᵀ + E_v − F_u` and the
/// `v` analogue `N₂ = … + F_v − G_u`.
pub fn n_fields(j: &FormJets) -> [f64; 2] {
    n_from_forms(&j.lambda.map(Jet2::to_dual), &j.i_omega.map(Jet2::to_dual))
}

/// `(N₁, N₂)` from first-order jets of `Λ` and `I_Ω`; `I = ΛI_ΩΛᵀ`.
pub fn n_from_forms(lambda: &Mat2<Jet1>, i_omega: &Mat2<Jet1>) -> [f64; 2] {
    let l = lambda.values();
    let lu = lambda.map(|x| x.du);
    let lv = lambda.map(|x| x.dv);
    let io = i_omega.values();
    let first = *lambda * *i_omega * lambda.transpose();
    let (e, f, g) = (first.m[0][0], first.m[0][1], first.m[1][1]);
    [
        quad(lu.row(0), &io, l.row(1)) - quad(l.row(0), &io, lu.row(1)) + e.dv - f.du,
        quad(lv.row(0), &io, l.row(1)) - quad(l.row(0), &io, lv.row(1)) + f.dv - g.du,
    ]
}

fn tau_at(j: &FormJets) -> [f64; 2] {
    let n = n_fields(j);
    let l = j.lambda_det().value;
    [n[0] / l, n[1] / l]
}

/// `τ` at a point of `Σ` as the extrapolated average of `τ(p ± δe)`, taking
/// the direction `e` that moves farthest off `Σ`.
fn tau_limit(spec: &FrontalSpec, p: (f64, f64), delta: f64, lmax: f64) -> Option<[f64; 2]> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let dirs = [(1.0, 0.0), (0.0, 1.0), (s, s), (s, -s)];
    let mut best: Option<(f64, [f64; 2])> = None;
    for (a, b) in dirs {
        let avg = |d: f64| -> Option<(f64, [f64; 2])> {
            let jp = FormJets::new(spec, p.0 + a * d, p.1 + b * d).ok()?;
            let jm = FormJets::new(spec, p.0 - a * d, p.1 - b * d).ok()?;
            let lam = jp.lambda_det().value.abs().min(jm.lambda_det().value.abs());
            let (tp, tm) = (tau_at(&jp), tau_at(&jm));
            Some((lam, [(tp[0] + tm[0]) / 2.0, (tp[1] + tm[1]) / 2.0]))
        };
        let (Some((l1, t1)), Some((l2, t2))) = (avg(delta), avg(delta / 2.0)) else {
            continue;
        };
        let score = l1.min(l2);
        if score > 1e-14 * lmax && best.is_none_or(|(b, _)| score > b) {
            best = Some((score, [(4.0 * t2[0] - t1[0]) / 3.0, (4.0 * t2[1] - t1[1]) / 3.0]));
        }
    }
    best.map(|b| b.1)
}

/// `Θ = ½((0 −τ; τ 0) + ∂I_Ω) I_Ω⁻¹`, or `None` when `I_Ω` is singular.
pub fn theta_from_tau(tau: f64, io: &Mat2, io_d: &Mat2) -> Option<Mat2> {
    let skew = Mat2::new(0.0, -tau, tau, 0.0);
    Some((skew + *io_d).scale(0.5) * io.inverse()?)
}

struct NodeTau {
    point: (f64, f64),
    lambda: f64,
    tau: [f64; 2],
    n: [f64; 2],
}

fn level_stats(spec: &FrontalSpec, grid: &GridSpec, lmax: f64) -> LevelStats {
    let rows: Vec<Option<NodeTau>> = sample_jets(spec, grid)
        .into_par_iter()
        .map(|j| {
            j.ok().map(|j| NodeTau { point: j.point, lambda: j.lambda_det().value, tau: tau_at(&j), n: n_fields(&j) })
        })
        .collect();
    let regular = |r: &NodeTau| r.lambda.abs() > DEFAULT_TOL_SING * lmax;
    let in_band = |r: &NodeTau| regular(r) && r.lambda.abs() < BAND_FRAC * lmax;
    let mut st = LevelStats {
        grid: *grid,
        band_nodes: 0,
        band_pairs: 0,
        undefined_nodes: rows.iter().filter(|r| r.is_none()).count(),
        tau_sup: 0.0,
        tau_osc: 0.0,
        osc_at: (f64::NAN, f64::NAN),
        lambda_at_osc: f64::NAN,
        n_at_osc: [f64::NAN; 2],
    };
    for (k, r) in rows.iter().enumerate() {
        let Some(r) = r.as_ref().filter(|r| regular(r)) else { continue };
        if in_band(r) {
            st.band_nodes += 1;
            st.tau_sup = st.tau_sup.max(r.tau[0].abs()).max(r.tau[1].abs());
        }
        let (i, j) = grid.ij(k);
        let right = (i + 1 < grid.nu).then(|| k + 1);
        let up = (j + 1 < grid.nv).then(|| k + grid.nu);
        for q in [right, up].into_iter().flatten() {
            let Some(q) = rows[q].as_ref().filter(|q| regular(q)) else { continue };
            if !(in_band(r) || in_band(q)) {
                continue;
            }
            st.band_pairs += 1;
            let jump = (r.tau[0] - q.tau[0]).abs().max((r.tau[1] - q.tau[1]).abs());
            if jump > st.tau_osc {
                let w = if r.lambda.abs() <= q.lambda.abs() { r } else { q };
                st.tau_osc = jump;
                st.osc_at = w.point;
                st.lambda_at_osc = w.lambda;
                st.n_at_osc = w.n;
            }
        }
    }
    st
}

/// Runs all three parts on `grid` and `levels − 1` successive refinements,
/// recording the first failure in `violation`.
pub fn ideal_membership_report(
    spec: &FrontalSpec,
    grid: &GridSpec,
    levels: usize,
) -> MembershipReport {
    let jets: Vec<Option<FormJets>> = sample_jets(spec, grid).into_iter().map(Result::ok).collect();
    let lmax = jets.iter().flatten().map(|j| j.lambda_det().value.abs()).fold(0.0, f64::max);
    let lmax = if lmax > 0.0 { lmax } else { 1.0 };
    let singular: Vec<bool> = jets
        .iter()
        .map(|j| j.as_ref().is_some_and(|j| j.lambda_det().value.abs() <= DEFAULT_TOL_SING * lmax))
        .collect();

    let mut interior_blocks = 0;
    for jj in 0..grid.nv - 1 {
        for i in 0..grid.nu - 1 {
            let k = grid.index(i, jj);
            if singular[k] && singular[k + 1] && singular[k + grid.nu] && singular[k + grid.nu + 1] {
                interior_blocks += 1;
            }
        }
    }

    let mut violation = None;
    // (a) N on Σ
    let (mut n_max, mut n_arg) = (0.0f64, (f64::NAN, f64::NAN));
    for (j, _) in jets.iter().zip(&singular).filter(|(_, s)| **s) {
        let j = j.as_ref().expect("singular nodes are defined");
        let n = n_fields(j);
        let m = n[0].abs().max(n[1].abs());
        if m > n_max {
            n_max = m;
            n_arg = j.point;
        }
    }
    if n_max > N_TOL {
        violation = Some((MembershipFailure::NotVanishingOnSigma, n_arg, format!("|N| = {n_max:e} on Σ")));
    }

    // (b) τ settles: its largest jump between neighbours must shrink
    let mut stats = Vec::new();
    let mut g = *grid;
    for _ in 0..levels.max(1) {
        stats.push(level_stats(spec, &g, lmax));
        g = g.refined();
    }
    // levels whose band holds no neighbour pair say nothing
    let seen: Vec<&LevelStats> = stats.iter().filter(|x| x.band_pairs > 0).collect();
    if violation.is_none() && seen.len() >= 2 {
        let o: Vec<f64> = seen.iter().map(|x| x.tau_osc).collect();
        let k = o.len() - 1;
        let floor = OSC_FLOOR * (1.0 + seen[k].tau_sup);
        if !(o[k] <= CAUCHY_RATIO * o[k - 1] || o[k] <= floor) {
            let w = seen[k];
            let per_level: Vec<String> = o.iter().map(|x| format!("{x:.3e}")).collect();
            violation = Some((
                MembershipFailure::NotCauchy,
                w.osc_at,
                format!(
                    "largest jump of N/λ_Ω between neighbours per level [{}]; at the witness λ_Ω = {:.3e}, N = ({:.3e}, {:.3e})",
                    per_level.join(", "),
                    w.lambda_at_osc,
                    w.n_at_osc[0],
                    w.n_at_osc[1]
                ),
            ));
        }
    }

    // (c) Θ from τ
    let delta = 0.05 * grid.hu().min(grid.hv());
    let rows: Vec<Option<(f64, (f64, f64))>> = jets
        .par_iter()
        .zip(&singular)
        .map(|(j, &sing)| {
            let j = j.as_ref()?;
            let tau = if sing { tau_limit(spec, j.point, delta, lmax)? } else { tau_at(j) };
            let io = j.i_omega.values();
            let t1 = theta_from_tau(tau[0], &io, &j.i_omega.map(|x| x.du))?;
            let t2 = theta_from_tau(tau[1], &io, &j.i_omega.map(|x| x.dv))?;
            let d = (t1 - j.theta1.values()).max_abs().max((t2 - j.theta2.values()).max_abs());
            Some((d, j.point))
        })
        .collect();
    let unresolved_nodes = jets
        .iter()
        .zip(&rows)
        .filter(|(j, r)| j.is_some() && r.is_none())
        .count();
    let (mut theta_defect, mut theta_argmax) = (0.0f64, (f64::NAN, f64::NAN));
    for (d, p) in rows.into_iter().flatten() {
        if !(d <= theta_defect) {
            theta_defect = d;
            theta_argmax = p;
        }
    }
    if violation.is_none() && !(theta_defect <= THETA_TOL) {
        violation = Some((
            MembershipFailure::ThetaMismatch,
            theta_argmax,
            format!("max |Θ(τ) − Θ| = {theta_defect:e}"),
        ));
    }

    MembershipReport {
        singular_nodes: singular.iter().filter(|s| **s).count(),
        n_max_on_sigma: n_max,
        levels: stats,
        theta_defect,
        theta_argmax,
        unresolved_nodes,
        interior_blocks,
        violation,
    }
}

/// [`ideal_membership_report`] turned into an error on violation.
pub fn ideal_membership_check(
    spec: &FrontalSpec,
    grid: &GridSpec,
    levels: usize,
) -> Result<MembershipReport, CompatError> {
    ideal_membership_report(spec, grid, levels).into_result()
}
