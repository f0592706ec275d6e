//! Residual suites for the compatibility identities every frontal satisfies.

mod fields;
mod ideal;

pub use fields::{classical_residuals, weingarten_residual, OmegaFields};
pub use ideal::{
    ideal_membership_check, ideal_membership_report, n_fields, n_from_forms, theta_from_tau, LevelStats,
    MembershipFailure, MembershipReport, DEFAULT_REFINEMENT_LEVELS,
};

use crate::frontal::{sample_jets, FormJets, FrontalError, FrontalSpec};
use crate::grid::GridSpec;
use rayon::prelude::*;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompatError {
    #[error(transparent)]
    Frontal(#[from] FrontalError),
    #[error("non-finite {id} residual at (u, v) = ({u}, {v})")]
    NonFinite { id: EquationId, u: f64, v: f64 },
    #[error("ideal membership violated at (u, v) = ({u}, {v}): {failure}; {detail}")]
    MembershipViolation { u: f64, v: f64, failure: MembershipFailure, detail: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EquationId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
    GaussT,
    Cs1,
    Cs2,
    Cs3,
    Cc1,
    Cc2,
    Cc3,
    Cc4,
    Cc5,
    Cc6,
    Li1,
    Li2,
    PropEU,
    PropEV,
    Wo,
    Mc1,
    Mc2,
    GaussClassical,
}

impl EquationId {
    pub const RCE: [EquationId; 9] = {
        use EquationId::*;
        [C1, C2, C3, C4, C5, C6, C7, C8, C9]
    };
    pub const SCE: [EquationId; 3] = [EquationId::Cs1, EquationId::Cs2, EquationId::Cs3];
    pub const COMPACT: [EquationId; 6] = {
        use EquationId::*;
        [Cc1, Cc2, Cc3, Cc4, Cc5, Cc6]
    };
    pub const CLASSICAL: [EquationId; 3] = [EquationId::GaussClassical, EquationId::Mc1, EquationId::Mc2];

    pub fn as_str(self) -> &'static str {
        use EquationId::*;
        match self {
            C1 => "c1",
            C2 => "c2",
            C3 => "c3",
            C4 => "c4",
            C5 => "c5",
            C6 => "c6",
            C7 => "c7",
            C8 => "c8",
            C9 => "c9",
            GaussT => "gaussT",
            Cs1 => "cs1",
            Cs2 => "cs2",
            Cs3 => "cs3",
            Cc1 => "cc1",
            Cc2 => "cc2",
            Cc3 => "cc3",
            Cc4 => "cc4",
            Cc5 => "cc5",
            Cc6 => "cc6",
            Li1 => "li1",
            Li2 => "li2",
            PropEU => "propE_u",
            PropEV => "propE_v",
            Wo => "wo",
            Mc1 => "mc1",
            Mc2 => "mc2",
            GaussClassical => "gauss_classical",
        }
    }
}

impl fmt::Display for EquationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Pointwise residuals of one identity over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub id: EquationId,
    pub max_abs_residual: f64,
    pub argmax: (f64, f64),
    pub samples: Vec<((f64, f64), f64)>,
    /// Nodes where the identity was not evaluated.
    pub skipped: usize,
}

impl ResidualReport {
    /// Builds a report; fails on the first non-finite sample.
    pub fn new(id: EquationId, samples: Vec<((f64, f64), f64)>, skipped: usize) -> Result<Self, CompatError> {
        let mut max = 0.0;
        let mut argmax = samples.first().map(|s| s.0).unwrap_or((f64::NAN, f64::NAN));
        for &((u, v), r) in &samples {
            if !r.is_finite() {
                return Err(CompatError::NonFinite { id, u, v });
            }
            if r > max {
                max = r;
                argmax = (u, v);
            }
        }
        Ok(ResidualReport { id, max_abs_residual: max, argmax, samples, skipped })
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_abs_residual <= tol
    }
}

/// Fraction of the grid maximum of `|λ_Ω|` above which a node counts as
/// regular for the classical equations.
pub const CLASSICAL_REGULAR_FRAC: f64 = 1e-3;

fn jets(spec: &FrontalSpec, grid: &GridSpec) -> Result<Vec<FormJets>, CompatError> {
    sample_jets(spec, grid).into_iter().map(|j| j.map_err(Into::into)).collect()
}

/// Ω-relative fields at every node, in grid order.
pub fn omega_fields(spec: &FrontalSpec, grid: &GridSpec) -> Result<Vec<OmegaFields>, CompatError> {
    Ok(jets(spec, grid)?.iter().map(OmegaFields::from_jets).collect())
}

/// Reports for the given ids from precomputed fields.
pub fn reports_from_fields(fields: &[OmegaFields], ids: &[EquationId]) -> Result<Vec<ResidualReport>, CompatError> {
    let rows: Vec<Vec<f64>> = fields
        .par_iter()
        .map(|f| {
            let rce = f.rce();
            let sce = f.sce();
            let cc = f.compact();
            let pe = f.prop_e();
            ids.iter()
                .map(|id| {
                    use EquationId::*;
                    match id {
                        C1 | C2 | C3 | C4 | C5 | C6 | C7 | C8 | C9 => rce[*id as usize - C1 as usize],
                        GaussT => f.gauss_t(),
                        Cs1 | Cs2 | Cs3 => sce[*id as usize - Cs1 as usize],
                        Cc1 | Cc2 | Cc3 | Cc4 | Cc5 | Cc6 => cc[*id as usize - Cc1 as usize],
                        PropEU => pe[0],
                        PropEV => pe[1],
                        _ => panic!("{id} is not computed from Ω-relative fields"),
                    }
                })
                .collect()
        })
        .collect();
    ids.iter()
        .enumerate()
        .map(|(c, &id)| {
            let samples = fields.iter().zip(&rows).map(|(f, r)| (f.point, r[c])).collect();
            ResidualReport::new(id, samples, 0)
        })
        .collect()
}

fn suite(spec: &FrontalSpec, grid: &GridSpec, ids: &[EquationId]) -> Result<Vec<ResidualReport>, CompatError> {
    reports_from_fields(&omega_fields(spec, grid)?, ids)
}

/// The nine relative compatibility equations `c1`–`c9`.
pub fn rce_residuals(spec: &FrontalSpec, grid: &GridSpec) -> Result<Vec<ResidualReport>, CompatError> {
    suite(spec, grid, &EquationId::RCE)
}

/// The singular compatibility equations `cs1`–`cs3`.
pub fn sce_residuals(spec: &FrontalSpec, grid: &GridSpec) -> Result<Vec<ResidualReport>, CompatError> {
    suite(spec, grid, &EquationId::SCE)
}

/// The compact forms `cc1`–`cc6`.
pub fn compact_residuals(spec: &FrontalSpec, grid: &GridSpec) -> Result<Vec<ResidualReport>, CompatError> {
    suite(spec, grid, &EquationId::COMPACT)
}

pub fn gauss_omega_residual(spec: &FrontalSpec, grid: &GridSpec) -> Result<ResidualReport, CompatError> {
    Ok(suite(spec, grid, &[EquationId::GaussT])?.remove(0))
}

/// `I_Ω Θᵢᵀ + Θᵢ I_Ω = ∂I_Ω` in both directions.
pub fn prop_e_residuals(spec: &FrontalSpec, grid: &GridSpec) -> Result<Vec<ResidualReport>, CompatError> {
    suite(spec, grid, &[EquationId::PropEU, EquationId::PropEV])
}

/// `Dn = Ωμᵀ`.
pub fn weingarten_residuals(spec: &FrontalSpec, grid: &GridSpec) -> Result<ResidualReport, CompatError> {
    let js = jets(spec, grid)?;
    let samples = js.par_iter().map(|j| (j.point, weingarten_residual(j))).collect();
    ResidualReport::new(EquationId::Wo, samples, 0)
}

/// Classical Gauss and Mainardi–Codazzi residuals on nodes with
/// `|λ_Ω| > CLASSICAL_REGULAR_FRAC · max|λ_Ω|`; other nodes are counted in
/// `skipped`.
pub fn classical_compatibility_residuals(
    spec: &FrontalSpec,
    grid: &GridSpec,
) -> Result<Vec<ResidualReport>, CompatError> {
    let js = jets(spec, grid)?;
    let lmax = js.iter().map(|j| j.lambda_det().value.abs()).fold(0.0, f64::max);
    let rows: Vec<Option<((f64, f64), [f64; 3])>> = js
        .par_iter()
        .map(|j| {
            if j.lambda_det().value.abs() <= CLASSICAL_REGULAR_FRAC * lmax {
                return None;
            }
            classical_residuals(j).map(|r| (j.point, r))
        })
        .collect();
    let skipped = rows.iter().filter(|r| r.is_none()).count();
    EquationId::CLASSICAL
        .iter()
        .enumerate()
        .map(|(c, &id)| {
            let samples = rows.iter().flatten().map(|(p, r)| (*p, r[c])).collect();
            ResidualReport::new(id, samples, skipped)
        })
        .collect()
}

/// Every Ω-relative suite plus `Dn = Ωμᵀ` from one sampling pass.
pub fn relative_residuals(spec: &FrontalSpec, grid: &GridSpec) -> Result<Vec<ResidualReport>, CompatError> {
    let js = jets(spec, grid)?;
    let fields: Vec<_> = js.iter().map(OmegaFields::from_jets).collect();
    let mut ids = EquationId::RCE.to_vec();
    ids.push(EquationId::GaussT);
    ids.extend(EquationId::SCE);
    ids.extend(EquationId::COMPACT);
    ids.extend([EquationId::PropEU, EquationId::PropEV]);
    let mut out = reports_from_fields(&fields, &ids)?;
    let samples = js.par_iter().map(|j| (j.point, weingarten_residual(j))).collect();
    out.push(ResidualReport::new(EquationId::Wo, samples, 0)?);
    Ok(out)
}
