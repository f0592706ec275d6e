//! Rectangular parameter grids.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid grid: {0}")]
pub struct GridError(pub String);

/// Uniform `nu × nv` grid over `[u0, u1] × [v0, v1]`.
///
/// Nodes are stored row by row: index `k = j * nu + i` is the node
/// `(u0 + i·hu, v0 + j·hv)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub u0: f64,
    pub u1: f64,
    pub nu: usize,
    pub v0: f64,
    pub v1: f64,
    pub nv: usize,
}

impl GridSpec {
    pub fn new(u0: f64, u1: f64, nu: usize, v0: f64, v1: f64, nv: usize) -> Result<Self, GridError> {
        let g = GridSpec { u0, u1, nu, v0, v1, nv };
        g.validate()?;
        Ok(g)
    }

    /// Square grid on `[u0,u1]×[v0,v1]` with spacing as close to `h` as the
    /// node count allows.
    pub fn with_spacing(u0: f64, u1: f64, v0: f64, v1: f64, h: f64) -> Result<Self, GridError> {
        if !(h > 0.0) {
            return Err(GridError(format!("spacing must be positive, got {h}")));
        }
        let nu = ((u1 - u0) / h).round() as usize + 1;
        let nv = ((v1 - v0) / h).round() as usize + 1;
        GridSpec::new(u0, u1, nu, v0, v1, nv)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.nu < 2 || self.nv < 2 {
            return Err(GridError(format!("need at least 2×2 nodes, got {}×{}", self.nu, self.nv)));
        }
        let finite = [self.u0, self.u1, self.v0, self.v1].iter().all(|x| x.is_finite());
        if !finite || !(self.u1 > self.u0) || !(self.v1 > self.v0) {
            return Err(GridError(format!(
                "empty domain [{}, {}] × [{}, {}]",
                self.u0, self.u1, self.v0, self.v1
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hu(&self) -> f64 {
        (self.u1 - self.u0) / (self.nu - 1) as f64
    }

    pub fn hv(&self) -> f64 {
        (self.v1 - self.v0) / (self.nv - 1) as f64
    }

    pub fn u_at(&self, i: usize) -> f64 {
        if i + 1 == self.nu {
            self.u1
        } else {
            self.u0 + i as f64 * self.hu()
        }
    }

    pub fn v_at(&self, j: usize) -> f64 {
        if j + 1 == self.nv {
            self.v1
        } else {
            self.v0 + j as f64 * self.hv()
        }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nu + i
    }

    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nu, k / self.nu)
    }

    pub fn point(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.ij(k);
        (self.u_at(i), self.v_at(j))
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }

    /// Node closest to `(u, v)`, clamped to the grid.
    pub fn nearest(&self, u: f64, v: f64) -> (usize, usize) {
        let i = ((u - self.u0) / self.hu()).round().clamp(0.0, (self.nu - 1) as f64) as usize;
        let j = ((v - self.v0) / self.hv()).round().clamp(0.0, (self.nv - 1) as f64) as usize;
        (i, j)
    }

    /// Same domain with `2n - 1` nodes per axis, so every old node survives.
    pub fn refined(&self) -> GridSpec {
        GridSpec { nu: 2 * self.nu - 1, nv: 2 * self.nv - 1, ..*self }
    }

    pub fn translated(&self, du: f64, dv: f64) -> GridSpec {
        GridSpec { u0: self.u0 + du, u1: self.u1 + du, v0: self.v0 + dv, v1: self.v1 + dv, ..*self }
    }
}
