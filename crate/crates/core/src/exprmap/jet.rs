//! Forward-mode jets.
//!
//! [`Jet2`] carries a value together with all partials up to order two in
//! the parameters `(u, v)`. [`Dual`] is a generic first-order dual number
//! over any [`Scalar`]; nesting `Dual<Jet2>` gives exact third derivatives,
//! which is what the classical Gauss equation needs.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic shared by `f64`, [`Jet2`] and [`Dual`].
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether the type carries derivative information.
    const DIFFERENTIABLE: bool;

    fn cst(c: f64) -> Self;
    /// The plain value (order-zero part).
    fn re(&self) -> f64;
    fn scale(self, k: f64) -> Self;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, p: f64) -> Self;

    fn recip(self) -> Self {
        Self::cst(1.0) / self
    }
    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn one() -> Self {
        Self::cst(1.0)
    }
    fn is_finite(&self) -> bool;
}

impl Scalar for f64 {
    const DIFFERENTIABLE: bool = false;

    fn cst(c: f64) -> Self {
        c
    }
    fn re(&self) -> f64 {
        *self
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// Second-order Taylor jet in two variables.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Jet2 {
    pub value: f64,
    pub du: f64,
    pub dv: f64,
    pub duu: f64,
    pub duv: f64,
    pub dvv: f64,
}

impl Jet2 {
    pub const fn new(value: f64, du: f64, dv: f64, duu: f64, duv: f64, dvv: f64) -> Self {
        Jet2 { value, du, dv, duu, duv, dvv }
    }

    pub const fn constant(c: f64) -> Self {
        Jet2::new(c, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// Seed for the variable `u` at the given value.
    pub const fn var_u(u: f64) -> Self {
        Jet2::new(u, 1.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub const fn var_v(v: f64) -> Self {
        Jet2::new(v, 0.0, 1.0, 0.0, 0.0, 0.0)
    }

    /// Apply a scalar function given its value and first two derivatives at
    /// `self.value`.
    #[inline]
    pub fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        Jet2 {
            value: f0,
            du: f1 * self.du,
            dv: f1 * self.dv,
            duu: f2 * self.du * self.du + f1 * self.duu,
            duv: f2 * self.du * self.dv + f1 * self.duv,
            dvv: f2 * self.dv * self.dv + f1 * self.dvv,
        }
    }

    /// First-order truncation.
    pub fn to_dual(self) -> Dual<f64> {
        Dual::new(self.value, self.du, self.dv)
    }

    /// The `u`-partial as a first-order jet (value `du`, partials `duu`, `duv`).
    pub fn d_u(self) -> Dual<f64> {
        Dual::new(self.du, self.duu, self.duv)
    }

    pub fn d_v(self) -> Dual<f64> {
        Dual::new(self.dv, self.duv, self.dvv)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.value + o.value,
            self.du + o.du,
            self.dv + o.dv,
            self.duu + o.duu,
            self.duv + o.duv,
            self.dvv + o.dvv,
        )
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.value - o.value,
            self.du - o.du,
            self.dv - o.dv,
            self.duu - o.duu,
            self.duv - o.duv,
            self.dvv - o.dvv,
        )
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            value: self.value * o.value,
            du: self.du * o.value + self.value * o.du,
            dv: self.dv * o.value + self.value * o.dv,
            duu: self.duu * o.value + 2.0 * self.du * o.du + self.value * o.duu,
            duv: self.duv * o.value + self.du * o.dv + self.dv * o.du + self.value * o.duv,
            dvv: self.dvv * o.value + 2.0 * self.dv * o.dv + self.value * o.dvv,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[inline]
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    #[inline]
    fn neg(self) -> Jet2 {
        Jet2::new(-self.value, -self.du, -self.dv, -self.duu, -self.duv, -self.dvv)
    }
}

impl Scalar for Jet2 {
    const DIFFERENTIABLE: bool = true;

    fn cst(c: f64) -> Self {
        Jet2::constant(c)
    }
    fn re(&self) -> f64 {
        self.value
    }
    fn scale(self, k: f64) -> Self {
        Jet2::new(
            self.value * k,
            self.du * k,
            self.dv * k,
            self.duu * k,
            self.duv * k,
            self.dvv * k,
        )
    }
    fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn tan(self) -> Self {
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let r = 1.0 / self.value;
        self.chain(self.value.ln(), r, -r * r)
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        let d1 = 0.5 / s;
        self.chain(s, d1, -0.5 * d1 / self.value)
    }
    fn abs(self) -> Self {
        let sg = self.value.signum();
        self.chain(self.value.abs(), sg, 0.0)
    }
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Jet2::constant(1.0),
            1 => self,
            2 => self * self,
            _ => {
                let x = self.value;
                let nf = n as f64;
                let f1 = nf * x.powi(n - 1);
                let f2 = nf * (nf - 1.0) * x.powi(n - 2);
                self.chain(x.powi(n), f1, f2)
            }
        }
    }
    fn powf(self, p: f64) -> Self {
        let x = self.value;
        let f0 = x.powf(p);
        self.chain(f0, p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }
    fn recip(self) -> Self {
        let r = 1.0 / self.value;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
    fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.du.is_finite()
            && self.dv.is_finite()
            && self.duu.is_finite()
            && self.duv.is_finite()
            && self.dvv.is_finite()
    }
}

/// First-order dual number in `(u, v)` over an arbitrary scalar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub v: T,
    pub du: T,
    pub dv: T,
}

/// First-order jet with plain `f64` coefficients.
pub type Jet1 = Dual<f64>;

impl<T: Scalar> Dual<T> {
    pub fn new(v: T, du: T, dv: T) -> Self {
        Dual { v, du, dv }
    }

    pub fn constant(v: T) -> Self {
        Dual { v, du: T::zero(), dv: T::zero() }
    }

    #[inline]
    fn lift(self, f0: T, f1: T) -> Self {
        Dual { v: f0, du: f1 * self.du, dv: f1 * self.dv }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual { v: self.v + o.v, du: self.du + o.du, dv: self.dv + o.dv }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual { v: self.v - o.v, du: self.du - o.du, dv: self.dv - o.dv }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual {
            v: self.v * o.v,
            du: self.du * o.v + self.v * o.du,
            dv: self.dv * o.v + self.v * o.dv,
        }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let r = o.v.recip();
        let q = self.v * r;
        Dual {
            v: q,
            du: (self.du - q * o.du) * r,
            dv: (self.dv - q * o.dv) * r,
        }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual { v: -self.v, du: -self.du, dv: -self.dv }
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    const DIFFERENTIABLE: bool = true;

    fn cst(c: f64) -> Self {
        Dual::constant(T::cst(c))
    }
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn scale(self, k: f64) -> Self {
        Dual { v: self.v.scale(k), du: self.du.scale(k), dv: self.dv.scale(k) }
    }
    fn sin(self) -> Self {
        self.lift(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.lift(self.v.cos(), -self.v.sin())
    }
    fn tan(self) -> Self {
        let t = self.v.tan();
        self.lift(t, T::one() + t * t)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.lift(e, e)
    }
    fn ln(self) -> Self {
        self.lift(self.v.ln(), self.v.recip())
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.lift(s, (s.scale(2.0)).recip())
    }
    fn abs(self) -> Self {
        let sg = if self.v.re() < 0.0 { -1.0 } else { 1.0 };
        Dual { v: self.v.scale(sg), du: self.du.scale(sg), dv: self.dv.scale(sg) }
    }
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::one(),
            1 => self,
            2 => self * self,
            _ => self.lift(self.v.powi(n), self.v.powi(n - 1).scale(n as f64)),
        }
    }
    fn powf(self, p: f64) -> Self {
        self.lift(self.v.powf(p), self.v.powf(p - 1.0).scale(p))
    }
    fn recip(self) -> Self {
        let r = self.v.recip();
        self.lift(r, -(r * r))
    }
    fn is_finite(&self) -> bool {
        self.v.is_finite() && self.du.is_finite() && self.dv.is_finite()
    }
}

/// Seeds `(u, v)` as `Dual<Jet2>` so that evaluating an expression yields
/// exact partials up to order three.
pub fn seed3(u: f64, v: f64) -> (Dual<Jet2>, Dual<Jet2>) {
    (
        Dual::new(Jet2::var_u(u), Jet2::constant(1.0), Jet2::constant(0.0)),
        Dual::new(Jet2::var_v(v), Jet2::constant(0.0), Jet2::constant(1.0)),
    )
}
