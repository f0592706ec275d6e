use super::{sample_jets, FormJets, FrontalError, FrontalSpec};
use crate::exprmap::Jet2;
use crate::grid::GridSpec;
use crate::linalg::Mat2;

/// The six reduced base patterns. Each puts the identity (or the swap
/// matrix) in two rows of `Ω̂` and leaves `(g₁, g₂)` in the third.
const PATTERNS: [(usize, (usize, usize), bool, usize); 6] = [
    (1, (0, 1), false, 2),
    (2, (0, 2), false, 1),
    (3, (0, 1), true, 2),
    (4, (1, 2), false, 0),
    (5, (1, 2), true, 0),
    (6, (0, 2), true, 1),
];

/// Result of reducing `Ω` to one of the six special forms on a grid.
#[derive(Clone, Debug)]
pub struct SpecialForm {
    /// 1 to 6.
    pub form_index: usize,
    pub grid: GridSpec,
    pub g1: Vec<Jet2>,
    pub g2: Vec<Jet2>,
    pub lambda_hat: Vec<Mat2>,
    /// Grid max of `|(a,b)_u·(g₁,g₂)_v − (a,b)_v·(g₁,g₂)_u|`.
    pub mixed_partial_defect: f64,
    /// Smallest `|det|` of the selected minor over the grid.
    pub min_minor: f64,
}

/// Reduce `Ω` so that two of its rows form the identity or the swap matrix,
/// choosing the row pair whose minor stays furthest from zero on the grid.
/// The swap variant is used when that minor is negative, which keeps the
/// induced normal.
pub fn special_form(spec: &FrontalSpec, grid: &GridSpec) -> Result<SpecialForm, FrontalError> {
    let jets: Vec<FormJets> = sample_jets(spec, grid).into_iter().collect::<Result<_, _>>()?;
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    let mut best: Option<((usize, usize), f64, bool)> = None;
    for &(r0, r1) in &pairs {
        let mut min_abs = f64::INFINITY;
        let mut pos = true;
        let mut neg = true;
        for j in &jets {
            let d = j.omega.rows(r0, r1).det().value;
            min_abs = min_abs.min(d.abs());
            pos &= d > 0.0;
            neg &= d < 0.0;
        }
        if !(pos || neg) {
            continue;
        }
        if best.map_or(true, |(_, m, _)| min_abs > m) {
            best = Some(((r0, r1), min_abs, neg));
        }
    }
    let (rows, min_minor, swap) = match best {
        Some(b) if b.1 > 1e-12 => b,
        _ => return Err(FrontalError::NoGlobalForm),
    };
    let &(form_index, _, _, g_row) = PATTERNS
        .iter()
        .find(|p| p.1 == rows && p.2 == swap)
        .expect("every pair has both variants");
    let t: Mat2<Jet2> = if swap {
        Mat2::new(Jet2::constant(0.0), Jet2::constant(1.0), Jet2::constant(1.0), Jet2::constant(0.0))
    } else {
        Mat2::identity()
    };

    let mut g1 = Vec::with_capacity(jets.len());
    let mut g2 = Vec::with_capacity(jets.len());
    let mut lambda_hat = Vec::with_capacity(jets.len());
    let mut defect: f64 = 0.0;
    for j in &jets {
        let b = j.omega.rows(rows.0, rows.1);
        let m = b.inverse().expect("minor bounded away from zero") * t;
        let reduced = j.omega.mul2(&m);
        let (ga, gb) = (reduced.m[g_row][0], reduced.m[g_row][1]);
        g1.push(ga);
        g2.push(gb);
        let m_inv = m.inverse().expect("invertible");
        lambda_hat.push((m_inv * j.lambda.transpose()).transpose().values());
        // (a, b) = T·(x_r0, x_r1)
        let xr = [j.dx.m[rows.0], j.dx.m[rows.1]];
        let (a, bb) = if swap { (xr[1], xr[0]) } else { (xr[0], xr[1]) };
        let d = (a[0].value * ga.dv + bb[0].value * gb.dv) - (a[1].value * ga.du + bb[1].value * gb.du);
        defect = defect.max(d.abs());
    }
    Ok(SpecialForm {
        form_index,
        grid: *grid,
        g1,
        g2,
        lambda_hat,
        mixed_partial_defect: defect,
        min_minor,
    })
}
