use crate::exprmap::{Jet1, Jet2, Scalar};
use crate::frontal::FormJets;
use crate::linalg::Mat2;

/// Ω-relative matrix fields at one node, each entry carrying its first
/// partials.
///
/// `ii_omega` uses the layout `(e_Ω, f₁Ω; f₂Ω, g_Ω)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaFields {
    pub point: (f64, f64),
    pub i_omega: Mat2<Jet1>,
    pub ii_omega: Mat2<Jet1>,
    pub theta1: Mat2<Jet1>,
    pub theta2: Mat2<Jet1>,
    pub mu: Mat2<Jet1>,
    pub lambda: Mat2<Jet1>,
}

fn d(m: &Mat2<Jet2>) -> Mat2<Jet1> {
    m.map(Jet2::to_dual)
}

fn du(m: &Mat2<Jet1>) -> Mat2 {
    m.map(|x| x.du)
}

fn dv(m: &Mat2<Jet1>) -> Mat2 {
    m.map(|x| x.dv)
}

fn row_diff(a: &Mat2, b: &Mat2) -> f64 {
    // e₂ᵀa − e₁ᵀb
    (a.m[1][0] - b.m[0][0]).abs().max((a.m[1][1] - b.m[0][1]).abs())
}

impl OmegaFields {
    pub fn from_jets(j: &FormJets) -> Self {
        OmegaFields {
            point: j.point,
            i_omega: d(&j.i_omega),
            ii_omega: d(&j.ii_omega),
            theta1: d(&j.theta1),
            theta2: d(&j.theta2),
            mu: d(&j.mu),
            lambda: d(&j.lambda),
        }
    }

    /// Adds `delta` to `II_Ω` and recomputes `μ = −II_Ωᵀ I_Ω⁻¹`; `Θ₁`, `Θ₂`
    /// and `Λ` are left as they are.
    pub fn perturb_ii(&self, delta: &Mat2<Jet1>) -> Self {
        let ii = self.ii_omega + *delta;
        let inv = self.i_omega.inverse().expect("I_Ω is positive definite");
        OmegaFields { ii_omega: ii, mu: -(ii.transpose() * inv), ..self.clone() }
    }

    /// `Θ^i_{jk}` in the indexing of the connection matrices: entry `(i, j)`
    /// of `Θ_k`, 1-based.
    fn t(&self, i: usize, j: usize, k: usize) -> Jet1 {
        let m = if k == 1 { &self.theta1 } else { &self.theta2 };
        m.m[i - 1][j - 1]
    }

    fn mu_(&self, i: usize, j: usize) -> Jet1 {
        self.mu.m[i - 1][j - 1]
    }

    fn efg(&self) -> (Jet1, Jet1, Jet1, Jet1) {
        let m = &self.ii_omega.m;
        (m[0][0], m[0][1], m[1][0], m[1][1])
    }

    pub fn k_omega(&self) -> f64 {
        self.mu.det().v
    }

    /// Residuals `|LHS − RHS|` of the nine relative compatibility equations.
    pub fn rce(&self) -> [f64; 9] {
        let t = |i, j, k| self.t(i, j, k).v;
        let tu = |i, j, k| self.t(i, j, k).du;
        let tv = |i, j, k| self.t(i, j, k).dv;
        let m = |i, j| self.mu_(i, j).v;
        let (e, f1, f2, g) = self.efg();
        let (e, f1, f2, g, e_v, f1_u, f2_v, g_u) = (e.v, f1.v, f2.v, g.v, e.dv, f1.du, f2.dv, g.du);

        let c1 = tv(1, 1, 1) - tu(1, 1, 2)
            - (t(1, 1, 2) * t(1, 1, 1) - t(1, 1, 1) * t(1, 1, 2) + t(1, 2, 2) * t(2, 1, 1)
                - t(2, 1, 2) * t(1, 2, 1)
                + m(1, 1) * f1
                - m(2, 1) * e);
        let c2 = tv(1, 2, 1) - tu(1, 2, 2)
            - (t(1, 1, 2) * t(1, 2, 1) + t(1, 2, 2) * t(2, 2, 1) - t(1, 1, 1) * t(1, 2, 2)
                - t(1, 2, 1) * t(2, 2, 2)
                + m(1, 2) * f1
                - m(2, 2) * e);
        let c3 = tv(2, 1, 1) - tu(2, 1, 2)
            - (t(2, 1, 2) * t(1, 1, 1) + t(2, 2, 2) * t(2, 1, 1) - t(2, 1, 1) * t(1, 1, 2)
                - t(2, 2, 1) * t(2, 1, 2)
                + m(1, 1) * g
                - m(2, 1) * f2);
        let c4 = tv(2, 2, 1) - tu(2, 2, 2)
            - (t(2, 2, 2) * t(2, 2, 1) - t(2, 2, 1) * t(2, 2, 2) + t(1, 2, 1) * t(2, 1, 2)
                - t(1, 2, 2) * t(2, 1, 1)
                + m(1, 2) * g
                - m(2, 2) * f2);
        let c5 = self.mu_(1, 1).dv - self.mu_(2, 1).du
            - (t(1, 1, 1) * m(2, 1) + t(2, 1, 1) * m(2, 2) - t(1, 1, 2) * m(1, 1) - t(2, 1, 2) * m(1, 2));
        let c6 = self.mu_(1, 2).dv - self.mu_(2, 2).du
            - (t(1, 2, 1) * m(2, 1) + t(2, 2, 1) * m(2, 2) - t(1, 2, 2) * m(1, 1) - t(2, 2, 2) * m(1, 2));
        let c7 = e_v - f1_u - (e * t(1, 1, 2) + f2 * t(1, 2, 2) - f1 * t(1, 1, 1) - g * t(1, 2, 1));
        let c8 = f2_v - g_u - (e * t(2, 1, 2) + f2 * t(2, 2, 2) - f1 * t(2, 1, 1) - g * t(2, 2, 1));
        [c1, c2, c3, c4, c5, c6, c7, c8, self.cc6()].map(f64::abs)
    }

    /// Residual of the Ω-relative Gauss equation (`… = −E_Ω K_Ω`).
    pub fn gauss_t(&self) -> f64 {
        let t = |i, j, k| self.t(i, j, k).v;
        let lhs = self.t(1, 2, 2).du - self.t(1, 2, 1).dv + t(1, 1, 2) * t(1, 2, 1)
            + t(1, 2, 2) * t(2, 2, 1)
            - t(1, 2, 1) * t(2, 2, 2)
            - t(1, 1, 1) * t(1, 2, 2);
        (lhs + self.i_omega.m[0][0].v * self.k_omega()).abs()
    }

    /// Residuals of the three singular compatibility equations.
    pub fn sce(&self) -> [f64; 3] {
        let t = |i, j, k| self.t(i, j, k).v;
        let l = |i: usize, j: usize| self.lambda.m[i - 1][j - 1];
        let (e, f1, f2, g) = self.efg();
        let cs1 = l(1, 1).dv - l(2, 1).du
            - (t(1, 1, 1) * l(2, 1).v + t(2, 1, 1) * l(2, 2).v - t(1, 1, 2) * l(1, 1).v - t(2, 1, 2) * l(1, 2).v);
        let cs2 = l(1, 2).dv - l(2, 2).du
            - (t(1, 2, 1) * l(2, 1).v + t(2, 2, 1) * l(2, 2).v - t(1, 2, 2) * l(1, 1).v - t(2, 2, 2) * l(1, 2).v);
        let cs3 = l(1, 1).v * f1.v + l(1, 2).v * g.v - l(2, 1).v * e.v - l(2, 2).v * f2.v;
        [cs1.abs(), cs2.abs(), cs3.abs()]
    }

    /// Signed defect `(μ II_Ω)₁₂ − (μ II_Ω)₂₁`.
    fn cc6(&self) -> f64 {
        let mu = self.mu.values();
        let ii = self.ii_omega.values();
        (mu * ii).asymmetry()
    }

    /// Residuals of the compact forms, largest entry of each.
    pub fn compact(&self) -> [f64; 6] {
        let lam = self.lambda.values();
        let (t1, t2) = (self.theta1.values(), self.theta2.values());
        let mu = self.mu.values();
        let ii = self.ii_omega.values();
        let cc1 = row_diff(&(lam * t1 + du(&self.lambda)), &(lam * t2 + dv(&self.lambda)));
        let cc2 = (lam * ii).asymmetry().abs();
        // II^(1) e₂ᵀμ − II^(2) e₁ᵀμ
        let outer = |c: [f64; 2], r: [f64; 2]| Mat2::new(c[0] * r[0], c[0] * r[1], c[1] * r[0], c[1] * r[1]);
        let cc3 = dv(&self.theta1) - du(&self.theta2) + t1 * t2 - t2 * t1 + outer(ii.col(0), mu.row(1))
            - outer(ii.col(1), mu.row(0));
        let cc4 = row_diff(&(mu * t1 + du(&self.mu)), &(mu * t2 + dv(&self.mu)));
        // differentiated matrix is II_Ωᵀ; its rows give c7 and c8
        let cc5 = row_diff(
            &(ii.transpose() * t1.transpose() - du(&self.ii_omega).transpose()),
            &(ii.transpose() * t2.transpose() - dv(&self.ii_omega).transpose()),
        );
        [cc1, cc2, cc3.max_abs(), cc4, cc5, self.cc6().abs()]
    }

    /// `I_Ω Θᵀ + Θ I_Ω − ∂I_Ω` for both directions.
    pub fn prop_e(&self) -> [f64; 2] {
        let io = self.i_omega.values();
        let (t1, t2) = (self.theta1.values(), self.theta2.values());
        [
            (io * t1.transpose() + t1 * io - du(&self.i_omega)).max_abs(),
            (io * t2.transpose() + t2 * io - dv(&self.i_omega)).max_abs(),
        ]
    }
}

/// `‖Dn − Ωμᵀ‖`.
pub fn weingarten_residual(j: &FormJets) -> f64 {
    let dn = j.dn().map(|x| x.v);
    let om = j.omega.values();
    (dn - om.mul2(&j.mu.values().transpose())).max_abs()
}

/// Classical Gauss and Mainardi–Codazzi residuals `[gauss, mc1, mc2]`, or
/// `None` where `I` is degenerate.
pub fn classical_residuals(j: &FormJets) -> Option<[f64; 3]> {
    let (g1, g2) = j.christoffel()?;
    let gm = |i: usize, jj: usize, k: usize| if k == 1 { g1.m[i - 1][jj - 1] } else { g2.m[i - 1][jj - 1] };
    let g = |i, jj, k| gm(i, jj, k).v;
    let first = j.first.values();
    let second = j.second_form();
    let k = second.values().det() / first.det();
    let gauss = gm(1, 2, 2).du - gm(1, 2, 1).dv + g(1, 1, 2) * g(1, 2, 1) + g(1, 2, 2) * g(1, 2, 2)
        - g(1, 2, 1) * g(2, 2, 2)
        - g(1, 1, 1) * g(1, 2, 2)
        + first.m[0][0] * k;
    // II is symmetric in exact arithmetic; f is the average of both entries
    let (e, g_) = (second.m[0][0], second.m[1][1]);
    let f = (second.m[0][1] + second.m[1][0]).scale(0.5);
    let mc1 = e.dv - f.du - (e.v * g(1, 1, 2) + f.v * (g(1, 2, 2) - g(1, 1, 1)) - g_.v * g(1, 2, 1));
    let mc2 = f.dv - g_.du - (e.v * g(2, 1, 2) + f.v * (g(2, 2, 2) - g(1, 1, 2)) - g_.v * g(1, 2, 2));
    Some([gauss.abs(), mc1.abs(), mc2.abs()])
}
