use crate::exprmap::{parse, Expr, ParseError};
use crate::grid::{GridError, GridSpec};

/// Parameter rectangle `[u0, u1] × [v0, v1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Domain {
    pub const fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Domain { u0, u1, v0, v1 }
    }

    pub fn grid(&self, nu: usize, nv: usize) -> Result<GridSpec, GridError> {
        GridSpec::new(self.u0, self.u1, nu, self.v0, self.v1, nv)
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.u0 + self.u1), 0.5 * (self.v0 + self.v1))
    }
}

/// A parametrized surface `x: U → R³` with an explicit tangent moving base
/// `Ω = (w₁ w₂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontalSpec {
    pub name: String,
    pub x: [Expr; 3],
    /// `omega[i][j]` is the `i`-th coordinate of `w_{j+1}`.
    pub omega: [[Expr; 2]; 3],
    pub domain: Domain,
    /// Negative control: the supplied base is expected to fail the
    /// ideal-membership check.
    pub expect_violation: bool,
    /// Preferred grid size `(nu, nv)`.
    pub grid: Option<(usize, usize)>,
}

impl FrontalSpec {
    /// Build from expression text; `omega` rows are `[w1_i, w2_i]`.
    pub fn from_strs(
        name: &str,
        x: [&str; 3],
        omega: [[&str; 2]; 3],
        domain: Domain,
    ) -> Result<Self, ParseError> {
        let x = [parse(x[0])?, parse(x[1])?, parse(x[2])?];
        let mut om = Vec::with_capacity(3);
        for row in omega {
            om.push([parse(row[0])?, parse(row[1])?]);
        }
        let omega: [[Expr; 2]; 3] = om.try_into().expect("three rows");
        Ok(FrontalSpec {
            name: name.to_string(),
            x,
            omega,
            domain,
            expect_violation: false,
            grid: None,
        })
    }

    /// Grid over the domain using the preferred size, or `n × n`.
    pub fn default_grid(&self, n: usize) -> GridSpec {
        let (nu, nv) = self.grid.unwrap_or((n, n));
        self.domain.grid(nu, nv).expect("spec domain is validated on construction")
    }

    pub fn grid_n(&self, n: usize) -> GridSpec {
        self.domain.grid(n, n).expect("spec domain is validated on construction")
    }

    /// `Ω' = Ω·C` for a 2×2 matrix field `C`.
    pub fn with_base_change(&self, c: &[[Expr; 2]; 2]) -> FrontalSpec {
        let mut out = self.clone();
        for i in 0..3 {
            for j in 0..2 {
                out.omega[i][j] = Expr::sum(
                    (0..2).map(|l| Expr::product(self.omega[i][l].clone(), c[l][j].clone())),
                );
            }
        }
        out.name = format!("{}*C", self.name);
        out
    }

    /// `x' = O x + a`, `Ω' = O Ω`.
    pub fn with_isometry(&self, o: &[[f64; 3]; 3], a: &[f64; 3]) -> FrontalSpec {
        let lin = |src: &dyn Fn(usize) -> Expr, i: usize| {
            Expr::sum((0..3).map(|k| Expr::product(Expr::num(o[i][k]), src(k))))
        };
        let mut out = self.clone();
        for i in 0..3 {
            let xi = lin(&|k| self.x[k].clone(), i);
            out.x[i] = if a[i] == 0.0 { xi } else { Expr::add(xi, Expr::num(a[i])) };
            for j in 0..2 {
                out.omega[i][j] = lin(&|k| self.omega[k][j].clone(), i);
            }
        }
        out.name = format!("{}@iso", self.name);
        out
    }

    /// Pull back through `h(s, t) = (h[0], h[1])`; the new spec lives on
    /// `domain`.
    pub fn reparametrized(&self, h: &[Expr; 2], domain: Domain) -> FrontalSpec {
        let mut out = self.clone();
        for i in 0..3 {
            out.x[i] = self.x[i].substitute(&h[0], &h[1]);
            for j in 0..2 {
                out.omega[i][j] = self.omega[i][j].substitute(&h[0], &h[1]);
            }
        }
        out.domain = domain;
        out.grid = None;
        out.name = format!("{}@h", self.name);
        out
    }

    /// Gram-Schmidt applied symbolically to the base columns.
    pub fn orthonormalized(&self) -> FrontalSpec {
        let col = |j: usize| -> [Expr; 3] { [0, 1, 2].map(|i| self.omega[i][j].clone()) };
        let dot = |a: &[Expr; 3], b: &[Expr; 3]| {
            Expr::sum((0..3).map(|i| Expr::product(a[i].clone(), b[i].clone())))
        };
        let (w1, w2) = (col(0), col(1));
        let a = dot(&w1, &w1);
        let b = dot(&w1, &w2);
        let c = dot(&w2, &w2);
        let na = Expr::call(crate::exprmap::Func::Sqrt, a.clone());
        // |w2 - (b/a) w1|² = c - b²/a
        let perp2 = Expr::sub(c, Expr::div(Expr::mul(b.clone(), b.clone()), a.clone()));
        let np = Expr::call(crate::exprmap::Func::Sqrt, perp2);
        let mut out = self.clone();
        for i in 0..3 {
            out.omega[i][0] = Expr::div(w1[i].clone(), na.clone());
            let r = Expr::sub(w2[i].clone(), Expr::mul(Expr::div(b.clone(), a.clone()), w1[i].clone()));
            out.omega[i][1] = Expr::div(r, np.clone());
        }
        out.name = format!("{}@on", self.name);
        out
    }

    /// Swap the base columns, which flips the induced normal.
    pub fn flipped(&self) -> FrontalSpec {
        let mut out = self.clone();
        for i in 0..3 {
            out.omega[i].swap(0, 1);
        }
        out.name = format!("{}@flip", self.name);
        out
    }
}
