//! Scalar types for forward-mode differentiation in two chart variables.
//!
//! [`Grad`] carries a value and its two first partials; [`HyperDual`] adds the
//! three second partials. Both are generic over [`Real`] so they nest: a
//! `HyperDual<Grad<f64>>` differentiates a quantity that itself depends on first
//! derivatives of an immersion (frames, twistor lifts, normal displacements).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Minimal real-field interface shared by `f64` and the dual types.
pub trait Real:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    /// Innermost real value; used for branching only.
    fn re(&self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tan(self) -> Self;

    #[inline]
    fn zero() -> Self {
        Self::cst(0.0)
    }
    #[inline]
    fn one() -> Self {
        Self::cst(1.0)
    }
    #[inline]
    fn recip(self) -> Self {
        Self::one() / self
    }
    #[inline]
    fn sqr(self) -> Self {
        self * self
    }
}

impl Real for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn re(&self) -> f64 {
        *self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    #[inline]
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    #[inline]
    fn tan(self) -> Self {
        f64::tan(self)
    }
}

/// Value with first partials in the two chart directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grad<T> {
    pub v: T,
    pub dx: T,
    pub dy: T,
}

impl<T: Real> Grad<T> {
    pub fn constant(v: T) -> Self {
        Grad { v, dx: T::zero(), dy: T::zero() }
    }
    pub fn var_x(v: T) -> Self {
        Grad { v, dx: T::one(), dy: T::zero() }
    }
    pub fn var_y(v: T) -> Self {
        Grad { v, dx: T::zero(), dy: T::one() }
    }
    /// Applies a scalar function given its value and derivative at `self.v`.
    #[inline]
    fn chain(self, f: T, df: T) -> Self {
        Grad { v: f, dx: df * self.dx, dy: df * self.dy }
    }
}

impl<T: Real> Add for Grad<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Grad { v: self.v + o.v, dx: self.dx + o.dx, dy: self.dy + o.dy }
    }
}
impl<T: Real> Sub for Grad<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Grad { v: self.v - o.v, dx: self.dx - o.dx, dy: self.dy - o.dy }
    }
}
impl<T: Real> Mul for Grad<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Grad {
            v: self.v * o.v,
            dx: self.dx * o.v + self.v * o.dx,
            dy: self.dy * o.v + self.v * o.dy,
        }
    }
}
impl<T: Real> Div for Grad<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = o.v.recip();
        let q = self.v * inv;
        Grad {
            v: q,
            dx: (self.dx - q * o.dx) * inv,
            dy: (self.dy - q * o.dy) * inv,
        }
    }
}
impl<T: Real> Neg for Grad<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Grad { v: -self.v, dx: -self.dx, dy: -self.dy }
    }
}
impl<T: Real> Add<f64> for Grad<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: f64) -> Self {
        Grad { v: self.v + o, ..self }
    }
}
impl<T: Real> Sub<f64> for Grad<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: f64) -> Self {
        Grad { v: self.v - o, ..self }
    }
}
impl<T: Real> Mul<f64> for Grad<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: f64) -> Self {
        Grad { v: self.v * o, dx: self.dx * o, dy: self.dy * o }
    }
}
impl<T: Real> Div<f64> for Grad<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl<T: Real> Real for Grad<T> {
    fn cst(v: f64) -> Self {
        Grad::constant(T::cst(v))
    }
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, (s * 2.0).recip())
    }
    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.v.ln(), self.v.recip())
    }
    fn sinh(self) -> Self {
        self.chain(self.v.sinh(), self.v.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.v.cosh(), self.v.sinh())
    }
    fn tan(self) -> Self {
        let t = self.v.tan();
        self.chain(t, t * t + 1.0)
    }
}

/// Second-order two-variable jet: value, gradient and Hessian.
///
/// Seeding `x` with [`HyperDual::var_x`] and `y` with [`HyperDual::var_y`]
/// yields exact (to roundoff) partials `f_x, f_y, f_xx, f_xy, f_yy` of any
/// expression built from [`Real`] operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperDual<T> {
    pub v: T,
    pub dx: T,
    pub dy: T,
    pub dxx: T,
    pub dxy: T,
    pub dyy: T,
}

impl<T: Real> HyperDual<T> {
    pub fn constant(v: T) -> Self {
        let z = T::zero();
        HyperDual { v, dx: z, dy: z, dxx: z, dxy: z, dyy: z }
    }
    pub fn var_x(v: T) -> Self {
        HyperDual { dx: T::one(), ..Self::constant(v) }
    }
    pub fn var_y(v: T) -> Self {
        HyperDual { dy: T::one(), ..Self::constant(v) }
    }
    /// Chain rule for a scalar function with value `f`, first derivative `d1`
    /// and second derivative `d2` at `self.v`.
    #[inline]
    fn chain(self, f: T, d1: T, d2: T) -> Self {
        HyperDual {
            v: f,
            dx: d1 * self.dx,
            dy: d1 * self.dy,
            dxx: d1 * self.dxx + d2 * self.dx * self.dx,
            dxy: d1 * self.dxy + d2 * self.dx * self.dy,
            dyy: d1 * self.dyy + d2 * self.dy * self.dy,
        }
    }
}

impl<T: Real> Add for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        HyperDual {
            v: self.v + o.v,
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
            dxx: self.dxx + o.dxx,
            dxy: self.dxy + o.dxy,
            dyy: self.dyy + o.dyy,
        }
    }
}
impl<T: Real> Sub for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        HyperDual {
            v: self.v - o.v,
            dx: self.dx - o.dx,
            dy: self.dy - o.dy,
            dxx: self.dxx - o.dxx,
            dxy: self.dxy - o.dxy,
            dyy: self.dyy - o.dyy,
        }
    }
}
impl<T: Real> Mul for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        HyperDual {
            v: self.v * o.v,
            dx: self.dx * o.v + self.v * o.dx,
            dy: self.dy * o.v + self.v * o.dy,
            dxx: self.dxx * o.v + self.dx * o.dx * 2.0 + self.v * o.dxx,
            dxy: self.dxy * o.v + self.dx * o.dy + self.dy * o.dx + self.v * o.dxy,
            dyy: self.dyy * o.v + self.dy * o.dy * 2.0 + self.v * o.dyy,
        }
    }
}
impl<T: Real> Div for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = o.v.recip();
        self * o.chain(inv, -inv * inv, inv * inv * inv * 2.0)
    }
}
impl<T: Real> Neg for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        HyperDual {
            v: -self.v,
            dx: -self.dx,
            dy: -self.dy,
            dxx: -self.dxx,
            dxy: -self.dxy,
            dyy: -self.dyy,
        }
    }
}
impl<T: Real> Add<f64> for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: f64) -> Self {
        HyperDual { v: self.v + o, ..self }
    }
}
impl<T: Real> Sub<f64> for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: f64) -> Self {
        HyperDual { v: self.v - o, ..self }
    }
}
impl<T: Real> Mul<f64> for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: f64) -> Self {
        HyperDual {
            v: self.v * o,
            dx: self.dx * o,
            dy: self.dy * o,
            dxx: self.dxx * o,
            dxy: self.dxy * o,
            dyy: self.dyy * o,
        }
    }
}
impl<T: Real> Div<f64> for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl<T: Real> Real for HyperDual<T> {
    fn cst(v: f64) -> Self {
        HyperDual::constant(T::cst(v))
    }
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let d1 = (s * 2.0).recip();
        let d2 = -d1 / (self.v * 2.0);
        self.chain(s, d1, d2)
    }
    fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let inv = self.v.recip();
        self.chain(self.v.ln(), inv, -inv * inv)
    }
    fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }
    fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }
    fn tan(self) -> Self {
        let t = self.v.tan();
        let d1 = t * t + 1.0;
        self.chain(t, d1, t * d1 * 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<T: Real>(x: T, y: T) -> T {
        (x * y).sin() + (x / (y + 2.0)).exp() - (x * x + 1.0).sqrt().ln() + y.cosh() * x.tan()
    }

    #[test]
    fn hyperdual_matches_central_differences() {
        let (x0, y0) = (0.3, -0.7);
        let j = f(HyperDual::var_x(x0), HyperDual::var_y(y0));
        let h = 1e-4;
        let fx = (f(x0 + h, y0) - f(x0 - h, y0)) / (2.0 * h);
        let fy = (f(x0, y0 + h) - f(x0, y0 - h)) / (2.0 * h);
        let fxx = (f(x0 + h, y0) - 2.0 * f(x0, y0) + f(x0 - h, y0)) / (h * h);
        let fyy = (f(x0, y0 + h) - 2.0 * f(x0, y0) + f(x0, y0 - h)) / (h * h);
        let fxy = (f(x0 + h, y0 + h) - f(x0 + h, y0 - h) - f(x0 - h, y0 + h)
            + f(x0 - h, y0 - h))
            / (4.0 * h * h);
        assert!((j.v - f(x0, y0)).abs() < 1e-15);
        assert!((j.dx - fx).abs() < 1e-7);
        assert!((j.dy - fy).abs() < 1e-7);
        assert!((j.dxx - fxx).abs() < 1e-5);
        assert!((j.dxy - fxy).abs() < 1e-5);
        assert!((j.dyy - fyy).abs() < 1e-5);
    }

    #[test]
    fn nested_grad_inside_hyperdual_gives_third_order_mixed() {
        // d/dx of f_x, differentiated again to second order: f_xxx etc.
        let (x0, y0) = (0.4, 0.2);
        let outer = |x: HyperDual<f64>, y: HyperDual<f64>| {
            let gx = Grad { v: x, dx: HyperDual::cst(1.0), dy: HyperDual::cst(0.0) };
            let gy = Grad { v: y, dx: HyperDual::cst(0.0), dy: HyperDual::cst(1.0) };
            f(gx, gy).dx
        };
        let j = outer(HyperDual::var_x(x0), HyperDual::var_y(y0));
        let inner = HyperDual::var_x(x0);
        let fx_direct = f(inner, HyperDual::constant(y0));
        assert!((j.v - fx_direct.dx).abs() < 1e-13);
        assert!((j.dx - fx_direct.dxx).abs() < 1e-12);
    }
}
