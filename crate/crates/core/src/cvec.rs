//! Complex numbers and complex 3-vectors over a generic [`Real`] scalar.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cx<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Cx<T> {
    #[inline]
    pub fn new(re: T, im: T) -> Self {
        Cx { re, im }
    }
    #[inline]
    pub fn real(re: T) -> Self {
        Cx { re, im: T::zero() }
    }
    #[inline]
    pub fn zero() -> Self {
        Cx::real(T::zero())
    }
    #[inline]
    pub fn one() -> Self {
        Cx::real(T::one())
    }
    #[inline]
    pub fn i() -> Self {
        Cx { re: T::zero(), im: T::one() }
    }
    #[inline]
    pub fn cst(re: f64, im: f64) -> Self {
        Cx { re: T::cst(re), im: T::cst(im) }
    }
    /// Lifts an `f64` complex constant into this scalar type.
    #[inline]
    pub fn from_c64(c: C64) -> Self {
        Cx::cst(c.re, c.im)
    }
    #[inline]
    pub fn conj(self) -> Self {
        Cx { re: self.re, im: -self.im }
    }
    #[inline]
    pub fn norm_sqr(self) -> T {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    pub fn scale(self, s: T) -> Self {
        Cx { re: self.re * s, im: self.im * s }
    }
    #[inline]
    pub fn mul_i(self) -> Self {
        Cx { re: -self.im, im: self.re }
    }
    pub fn inv(self) -> Self {
        let n = self.norm_sqr();
        Cx { re: self.re / n, im: -self.im / n }
    }
    /// `e^{i t}` for real `t`.
    pub fn expi(t: T) -> Self {
        Cx { re: t.cos(), im: t.sin() }
    }
}

impl Cx<f64> {
    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

pub type C64 = Cx<f64>;

impl<T: Real> Add for Cx<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Cx { re: self.re + o.re, im: self.im + o.im }
    }
}
impl<T: Real> Sub for Cx<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Cx { re: self.re - o.re, im: self.im - o.im }
    }
}
impl<T: Real> Mul for Cx<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Cx {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}
impl<T: Real> Neg for Cx<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Cx { re: -self.re, im: -self.im }
    }
}

/// A vector of `ℂ³` with components over `T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CVec3<T>(pub [Cx<T>; 3]);

pub type V3 = CVec3<f64>;

impl<T: Real> CVec3<T> {
    pub fn zero() -> Self {
        CVec3([Cx::zero(); 3])
    }
    pub fn new(a: Cx<T>, b: Cx<T>, c: Cx<T>) -> Self {
        CVec3([a, b, c])
    }
    pub fn from_v3(v: &V3) -> Self {
        CVec3([Cx::from_c64(v.0[0]), Cx::from_c64(v.0[1]), Cx::from_c64(v.0[2])])
    }
    /// Hermitian product `(self, o) = Σ self_k · conj(o_k)`.
    #[inline]
    pub fn herm(&self, o: &Self) -> Cx<T> {
        let mut acc = Cx::zero();
        for k in 0..3 {
            acc = acc + self.0[k] * o.0[k].conj();
        }
        acc
    }
    /// Real part of the Hermitian product: the Euclidean inner product on `ℝ⁶`.
    #[inline]
    pub fn dot(&self, o: &Self) -> T {
        let mut acc = T::zero();
        for k in 0..3 {
            acc = acc + self.0[k].re * o.0[k].re + self.0[k].im * o.0[k].im;
        }
        acc
    }
    #[inline]
    pub fn norm_sqr(&self) -> T {
        self.dot(self)
    }
    #[inline]
    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }
    #[inline]
    pub fn scale(&self, s: T) -> Self {
        CVec3(self.0.map(|c| c.scale(s)))
    }
    #[inline]
    pub fn cscale(&self, s: Cx<T>) -> Self {
        CVec3(self.0.map(|c| c * s))
    }
    /// Multiplication by `i`: the complex structure `J` on horizontal lifts.
    #[inline]
    pub fn mul_i(&self) -> Self {
        CVec3(self.0.map(|c| c.mul_i()))
    }
    #[inline]
    pub fn conj(&self) -> Self {
        CVec3(self.0.map(|c| c.conj()))
    }
    pub fn cross(&self, o: &Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        CVec3([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }
    pub fn normalized(&self) -> Self {
        self.scale(self.norm().recip())
    }
    /// Removes the complex span of the unit vector `z`.
    #[inline]
    pub fn horizontal(&self, z: &Self) -> Self {
        *self - z.cscale(self.herm(z))
    }
    /// Applies a complex 3×3 matrix given as rows of `f64` complexes.
    pub fn apply(&self, m: &[[C64; 3]; 3]) -> Self {
        let mut out = [Cx::zero(); 3];
        for (r, row) in m.iter().enumerate() {
            for (c, a) in row.iter().enumerate() {
                out[r] = out[r] + Cx::from_c64(*a) * self.0[c];
            }
        }
        CVec3(out)
    }
    pub fn map_scalar<U: Real>(&self, f: impl Fn(T) -> U) -> CVec3<U> {
        CVec3(self.0.map(|c| Cx { re: f(c.re), im: f(c.im) }))
    }
}

impl<T: Real> Add for CVec3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        CVec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}
impl<T: Real> Sub for CVec3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        CVec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}
impl<T: Real> Neg for CVec3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        CVec3(self.0.map(|c| -c))
    }
}

impl V3 {
    pub fn c(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> V3 {
        CVec3([Cx::new(a.0, a.1), Cx::new(b.0, b.1), Cx::new(c.0, c.1)])
    }
    pub fn real(a: f64, b: f64, c: f64) -> V3 {
        CVec3([Cx::real(a), Cx::real(b), Cx::real(c)])
    }
    pub fn max_abs_diff(&self, o: &V3) -> f64 {
        (0..3)
            .map(|k| (self.0[k] - o.0[k]).abs())
            .fold(0.0, f64::max)
    }
}

/// Complex 3×3 matrix utilities used by the projective group action.
pub mod mat {
    use super::{Cx, C64};

    pub type M3 = [[C64; 3]; 3];

    pub fn identity() -> M3 {
        let mut m = [[C64::zero(); 3]; 3];
        for (k, row) in m.iter_mut().enumerate() {
            row[k] = C64::one();
        }
        m
    }

    pub fn det(m: &M3) -> C64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Inverse via the adjugate; `None` when `|det| ≤ tol`.
    pub fn inverse(m: &M3, tol: f64) -> Option<M3> {
        let d = det(m);
        if d.abs() <= tol {
            return None;
        }
        let inv_d = d.inv();
        let mut out = [[C64::zero(); 3]; 3];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                // cofactor of (c, r)
                let (r1, r2) = ((c + 1) % 3, (c + 2) % 3);
                let (c1, c2) = ((r + 1) % 3, (r + 2) % 3);
                let cof = m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1];
                *e = cof * inv_d;
            }
        }
        Some(out)
    }

    pub fn conj_transpose(m: &M3) -> M3 {
        let mut out = [[C64::zero(); 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                out[r][c] = m[c][r].conj();
            }
        }
        out
    }

    pub fn transpose(m: &M3) -> M3 {
        let mut out = [[C64::zero(); 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                out[r][c] = m[c][r];
            }
        }
        out
    }

    pub fn mul(a: &M3, b: &M3) -> M3 {
        let mut out = [[C64::zero(); 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                let mut acc = Cx::zero();
                for k in 0..3 {
                    acc = acc + a[r][k] * b[k][c];
                }
                out[r][c] = acc;
            }
        }
        out
    }
}
