//! Fixed-size matrices (2×2, 3×2, 3×3, 4×2) over any [`Scalar`].
//!
//! Entries are row-major. Only what the geometry needs is provided.

use crate::exprmap::Scalar;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<S = f64>(pub [S; 3]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<S = f64> {
    pub m: [[S; 2]; 2],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3<S = f64> {
    pub m: [[S; 3]; 3],
}

/// 3×2 matrix; its columns are vectors of R³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3x2<S = f64> {
    pub m: [[S; 2]; 3],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4x2<S = f64> {
    pub m: [[S; 2]; 4],
}

// ---------------------------------------------------------------- Vec3

impl<S: Scalar> Vec3<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Vec3([x, y, z])
    }

    pub fn zero() -> Self {
        Vec3([S::zero(); 3])
    }

    pub fn dot(&self, o: &Self) -> S {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(&self, o: &Self) -> Self {
        cross(self, o)
    }

    pub fn norm(&self) -> S {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, k: S) -> Self {
        Vec3(self.0.map(|x| x * k))
    }

    pub fn map<T>(&self, f: impl Fn(S) -> T) -> Vec3<T> {
        Vec3(self.0.map(f))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |a, x| a.max(x.re().abs()))
    }
}

impl<S: Scalar> Add for Vec3<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<S: Scalar> Sub for Vec3<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<S: Scalar> Neg for Vec3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec3(self.0.map(|x| -x))
    }
}

/// Right-handed cross product.
pub fn cross<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    let [a0, a1, a2] = a.0;
    let [b0, b1, b2] = b.0;
    Vec3([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
}

// ---------------------------------------------------------------- Mat2

impl<S: Scalar> Mat2<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn zero() -> Self {
        Mat2 { m: [[S::zero(); 2]; 2] }
    }

    pub fn identity() -> Self {
        Mat2::new(S::one(), S::zero(), S::zero(), S::one())
    }

    pub fn diag(a: S, d: S) -> Self {
        Mat2::new(a, S::zero(), S::zero(), d)
    }

    pub fn det(&self) -> S {
        det2(self)
    }

    pub fn adj(&self) -> Self {
        adj2(self)
    }

    pub fn trace(&self) -> S {
        self.m[0][0] + self.m[1][1]
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    /// `None` when the determinant is exactly zero.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.re() == 0.0 {
            return None;
        }
        let r = d.recip();
        Some(self.adj().scale(r))
    }

    pub fn scale(&self, k: S) -> Self {
        self.map(|x| x * k)
    }

    pub fn map<T>(&self, f: impl Fn(S) -> T) -> Mat2<T> {
        Mat2 { m: [[f(self.m[0][0]), f(self.m[0][1])], [f(self.m[1][0]), f(self.m[1][1])]] }
    }

    pub fn row(&self, i: usize) -> [S; 2] {
        self.m[i]
    }

    pub fn col(&self, j: usize) -> [S; 2] {
        [self.m[0][j], self.m[1][j]]
    }

    /// Largest absolute entry of the value part.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0, |a, x| a.max(x.re().abs()))
    }

    /// Skew part `(A - Aᵀ)/2` measured as `|a01 - a10|`.
    pub fn asymmetry(&self) -> S {
        self.m[0][1] - self.m[1][0]
    }

    pub fn values(&self) -> Mat2<f64> {
        self.map(|x| x.re())
    }
}

impl<S: Scalar> Add for Mat2<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Mat2::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl<S: Scalar> Sub for Mat2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Mat2::new(
            self.m[0][0] - o.m[0][0],
            self.m[0][1] - o.m[0][1],
            self.m[1][0] - o.m[1][0],
            self.m[1][1] - o.m[1][1],
        )
    }
}

impl<S: Scalar> Neg for Mat2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x)
    }
}

impl<S: Scalar> Mul for Mat2<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

pub fn det2<S: Scalar>(m: &Mat2<S>) -> S {
    m.m[0][0] * m.m[1][1] - m.m[0][1] * m.m[1][0]
}

pub fn adj2<S: Scalar>(m: &Mat2<S>) -> Mat2<S> {
    Mat2::new(m.m[1][1], -m.m[0][1], -m.m[1][0], m.m[0][0])
}

// ---------------------------------------------------------------- Mat3x2

impl<S: Scalar> Mat3x2<S> {
    pub fn zero() -> Self {
        Mat3x2 { m: [[S::zero(); 2]; 3] }
    }

    pub fn from_cols(a: &Vec3<S>, b: &Vec3<S>) -> Self {
        Mat3x2 { m: [[a.0[0], b.0[0]], [a.0[1], b.0[1]], [a.0[2], b.0[2]]] }
    }

    pub fn col(&self, j: usize) -> Vec3<S> {
        Vec3([self.m[0][j], self.m[1][j], self.m[2][j]])
    }

    /// `selfᵀ · o`.
    pub fn tr_mul(&self, o: &Mat3x2<S>) -> Mat2<S> {
        let (a0, a1) = (self.col(0), self.col(1));
        let (b0, b1) = (o.col(0), o.col(1));
        Mat2::new(a0.dot(&b0), a0.dot(&b1), a1.dot(&b0), a1.dot(&b1))
    }

    /// `self · b` for a 2×2 `b`.
    pub fn mul2(&self, b: &Mat2<S>) -> Mat3x2<S> {
        let mut out = Mat3x2::zero();
        for i in 0..3 {
            for j in 0..2 {
                out.m[i][j] = self.m[i][0] * b.m[0][j] + self.m[i][1] * b.m[1][j];
            }
        }
        out
    }

    pub fn map<T>(&self, f: impl Fn(S) -> T) -> Mat3x2<T> {
        Mat3x2 { m: self.m.map(|r| [f(r[0]), f(r[1])]) }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0, |a, x| a.max(x.re().abs()))
    }

    pub fn values(&self) -> Mat3x2<f64> {
        self.map(|x| x.re())
    }

    /// 2×2 minor from rows `r0`, `r1`.
    pub fn rows(&self, r0: usize, r1: usize) -> Mat2<S> {
        Mat2 { m: [self.m[r0], self.m[r1]] }
    }
}

impl<S: Scalar> Sub for Mat3x2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..2 {
                out.m[i][j] = self.m[i][j] - o.m[i][j];
            }
        }
        out
    }
}

// ---------------------------------------------------------------- Mat3

impl<S: Scalar> Mat3<S> {
    pub fn zero() -> Self {
        Mat3 { m: [[S::zero(); 3]; 3] }
    }

    pub fn identity() -> Self {
        let mut m = Mat3::zero();
        for i in 0..3 {
            m.m[i][i] = S::one();
        }
        m
    }

    pub fn from_rows(m: [[S; 3]; 3]) -> Self {
        Mat3 { m }
    }

    pub fn from_cols(a: &Vec3<S>, b: &Vec3<S>, c: &Vec3<S>) -> Self {
        Mat3 {
            m: [
                [a.0[0], b.0[0], c.0[0]],
                [a.0[1], b.0[1], c.0[1]],
                [a.0[2], b.0[2], c.0[2]],
            ],
        }
    }

    pub fn col(&self, j: usize) -> Vec3<S> {
        Vec3([self.m[0][j], self.m[1][j], self.m[2][j]])
    }

    pub fn transpose(&self) -> Self {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[j][i];
            }
        }
        out
    }

    pub fn det(&self) -> S {
        let a = &self.m;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.re() == 0.0 {
            return None;
        }
        let a = &self.m;
        let c = |i0: usize, i1: usize, j0: usize, j1: usize| a[i0][j0] * a[i1][j1] - a[i0][j1] * a[i1][j0];
        let adj = [
            [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
            [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
            [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
        ];
        let r = d.recip();
        Some(Mat3 { m: adj.map(|row| row.map(|x| x * r)) })
    }

    pub fn mul_vec(&self, x: &Vec3<S>) -> Vec3<S> {
        Vec3([0, 1, 2].map(|i| self.m[i][0] * x.0[0] + self.m[i][1] * x.0[1] + self.m[i][2] * x.0[2]))
    }

    pub fn scale(&self, k: S) -> Self {
        Mat3 { m: self.m.map(|r| r.map(|x| x * k)) }
    }

    pub fn commutator(&self, o: &Self) -> Self {
        *self * *o - *o * *self
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0, |a, x| a.max(x.re().abs()))
    }

    /// `blockdiag(a, c)`.
    pub fn block_diag(a: &Mat2<S>, c: S) -> Self {
        Mat3 {
            m: [
                [a.m[0][0], a.m[0][1], S::zero()],
                [a.m[1][0], a.m[1][1], S::zero()],
                [S::zero(), S::zero(), c],
            ],
        }
    }

    /// Upper-left 2×2 block.
    pub fn block2(&self) -> Mat2<S> {
        Mat2::new(self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1])
    }
}

impl<S: Scalar> Add for Mat3<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[i][j] + o.m[i][j];
            }
        }
        out
    }
}

impl<S: Scalar> Sub for Mat3<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[i][j] - o.m[i][j];
            }
        }
        out
    }
}

impl<S: Scalar> Mul for Mat3<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j] + self.m[i][2] * o.m[2][j];
            }
        }
        out
    }
}

// ---------------------------------------------------------------- Mat4x2

impl Mat4x2<f64> {
    /// Rows of `a` on top of rows of `b`.
    pub fn stack(a: &Mat2<f64>, b: &Mat2<f64>) -> Self {
        Mat4x2 { m: [a.m[0], a.m[1], b.m[0], b.m[1]] }
    }

    /// A 3×2 matrix padded with a zero row.
    pub fn pad(a: &Mat3x2<f64>) -> Self {
        Mat4x2 { m: [a.m[0], a.m[1], a.m[2], [0.0, 0.0]] }
    }

    /// Singular values `(σ_max, σ_min)`.
    ///
    /// `σ₁σ₂` comes from the 2×2 minors (Cauchy-Binet) rather than from the
    /// determinant of the Gram matrix, which keeps `σ_min` accurate when it is
    /// many orders below `σ_max`.
    pub fn singular_values(&self) -> (f64, f64) {
        let m = &self.m;
        let frob2: f64 = m.iter().flatten().map(|x| x * x).sum();
        let mut minors2 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                let d = m[i][0] * m[j][1] - m[i][1] * m[j][0];
                minors2 += d * d;
            }
        }
        let prod = minors2.sqrt();
        let disc = (frob2 * frob2 - 4.0 * minors2).max(0.0).sqrt();
        let s1 = ((frob2 + disc) / 2.0).sqrt();
        let s2 = if s1 > 0.0 { prod / s1 } else { 0.0 };
        (s1, s2)
    }
}

/// Numerical rank of a 4×2 matrix: singular values above
/// `tol·σ_max` (or above `tol` when `σ_max ≤ tol`).
pub fn rank_tol(m: &Mat4x2<f64>, tol: f64) -> usize {
    let (s1, s2) = m.singular_values();
    let scale = if s1 > tol { s1 } else { 1.0 };
    [s1, s2].iter().filter(|&&s| s > tol * scale).count()
}

pub const DEFAULT_RANK_TOL: f64 = 1e-8;
