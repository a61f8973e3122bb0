//! Chart points, immersions and second-order jets of their homogeneous
//! representatives.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::Serialize;

use crate::cvec::{CVec3, Cx, V3};
use crate::error::{GeomError, Result};
use crate::scalar::{HyperDual, Real};
use crate::zoo::SurfaceMeta;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Domain {
    Sphere,
    Torus,
}

/// Coordinate charts.
///
/// Sphere surfaces are parametrized by `ℂ ∪ {∞}`. `Near` uses `z = x + iy`,
/// `Far` uses `ζ = 1/z`; both are holomorphic coordinates, so they induce the
/// same orientation. The polar charts use spherical coordinates `(θ, ϕ)` with
/// `z = cot(θ/2) e^{−iϕ}`, which is orientation preserving; they differ only in
/// which of the two complex charts supplies the homogeneous representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Chart {
    Torus,
    Near,
    Far,
    PolarNear,
    PolarFar,
}

impl Chart {
    pub fn domain(self) -> Domain {
        match self {
            Chart::Torus => Domain::Torus,
            _ => Domain::Sphere,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChartPoint {
    pub chart: Chart,
    pub x: f64,
    pub y: f64,
}

impl fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({:.6}, {:.6})", self.chart, self.x, self.y)
    }
}

impl ChartPoint {
    /// Torus point with coordinates reduced into `[0, 2π)`.
    pub fn torus(x: f64, y: f64) -> Self {
        ChartPoint { chart: Chart::Torus, x: x.rem_euclid(TAU), y: y.rem_euclid(TAU) }
    }

    /// Stereographic point in the chart where `|coords| ≤ 1`.
    pub fn sphere_z(z: Cx<f64>) -> Self {
        if z.abs() <= 1.0 {
            ChartPoint { chart: Chart::Near, x: z.re, y: z.im }
        } else {
            let w = z.inv();
            ChartPoint { chart: Chart::Far, x: w.re, y: w.im }
        }
    }

    /// Spherical-coordinate point; the southern hemisphere (`θ ≥ π/2`, `|z| ≤ 1`)
    /// uses the near chart.
    pub fn polar(theta: f64, phi: f64) -> Self {
        let chart = if theta >= 0.5 * PI { Chart::PolarNear } else { Chart::PolarFar };
        ChartPoint { chart, x: theta, y: phi }
    }

    pub fn domain(&self) -> Domain {
        self.chart.domain()
    }

    /// Same chart, shifted coordinates (no reduction, so stencils stay smooth).
    pub fn offset(&self, dx: f64, dy: f64) -> Self {
        ChartPoint { chart: self.chart, x: self.x + dx, y: self.y + dy }
    }

    /// The complex coordinate `z` of a sphere point (`None` at `z = ∞` or on the torus).
    pub fn z_coord(&self) -> Option<Cx<f64>> {
        match chart_coord(self.chart, self.x, self.y)? {
            SphereCoord::Near(z) => Some(z),
            SphereCoord::Far(w) => {
                if w.norm_sqr() == 0.0 {
                    None
                } else {
                    Some(w.inv())
                }
            }
        }
    }

    /// Position on the round unit sphere `S² ⊂ ℝ³` (sphere charts only).
    pub fn sphere_point(&self) -> Option<[f64; 3]> {
        chart_coord(self.chart, self.x, self.y).map(|c| c.unit_sphere())
    }

    /// Re-expresses a sphere point in the stereographic chart with `|coords| ≤ 1`.
    pub fn to_stereographic(&self) -> Self {
        match self.chart {
            Chart::Torus | Chart::Near | Chart::Far => *self,
            _ => match chart_coord::<f64>(self.chart, self.x, self.y) {
                Some(SphereCoord::Near(z)) => ChartPoint::sphere_z(z),
                Some(SphereCoord::Far(w)) => {
                    if w.abs() <= 1.0 {
                        ChartPoint { chart: Chart::Far, x: w.re, y: w.im }
                    } else {
                        ChartPoint::sphere_z(w.inv())
                    }
                }
                None => *self,
            },
        }
    }
}

/// Complex coordinate in one of the two stereographic charts.
#[derive(Clone, Copy, Debug)]
pub enum SphereCoord<T> {
    /// `z` itself.
    Near(Cx<T>),
    /// `ζ = 1/z`.
    Far(Cx<T>),
}

impl<T: Real> SphereCoord<T> {
    /// Inverse stereographic image on `S² ⊂ ℝ³`, consistent with the polar
    /// chart `(sin θ cos ϕ, sin θ sin ϕ, cos θ)`.
    pub fn unit_sphere_generic(&self) -> [T; 3] {
        match *self {
            SphereCoord::Near(z) => {
                let r2 = z.norm_sqr();
                let d = (r2 + 1.0).recip();
                [z.re * d * 2.0, -z.im * d * 2.0, (r2 - 1.0) * d]
            }
            SphereCoord::Far(w) => {
                let r2 = w.norm_sqr();
                let d = (r2 + 1.0).recip();
                [w.re * d * 2.0, w.im * d * 2.0, (-r2 + 1.0) * d]
            }
        }
    }
    pub fn unit_sphere(&self) -> [f64; 3] {
        let p = self.unit_sphere_generic();
        [p[0].re(), p[1].re(), p[2].re()]
    }
}

/// Maps sphere chart coordinates to the complex coordinate of the chart
/// supplying the representative.
pub fn chart_coord<T: Real>(chart: Chart, x: T, y: T) -> Option<SphereCoord<T>> {
    match chart {
        Chart::Torus => None,
        Chart::Near => Some(SphereCoord::Near(Cx::new(x, y))),
        Chart::Far => Some(SphereCoord::Far(Cx::new(x, y))),
        Chart::PolarNear => {
            let r = (x * 0.5).tan().recip();
            Some(SphereCoord::Near(Cx::new(r * y.cos(), -(r * y.sin()))))
        }
        Chart::PolarFar => {
            let r = (x * 0.5).tan();
            Some(SphereCoord::Far(Cx::new(r * y.cos(), r * y.sin())))
        }
    }
}

/// A smooth map from a chart domain to `ℂ³ − {0}` whose projection is an
/// immersion into `ℂP²`.
///
/// `eval` is generic so that the same closed form can be differentiated with
/// [`HyperDual`] numbers, or nested inside derived immersions.
pub trait Immersion: Sync {
    fn domain(&self) -> Domain;
    fn eval<T: Real>(&self, chart: Chart, x: T, y: T) -> CVec3<T>;
    fn meta(&self) -> Option<SurfaceMeta> {
        None
    }
    fn label(&self) -> String {
        "immersion".into()
    }
}

impl<I: Immersion + ?Sized> Immersion for &I {
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn eval<T: Real>(&self, chart: Chart, x: T, y: T) -> CVec3<T> {
        (**self).eval(chart, x, y)
    }
    fn meta(&self) -> Option<SurfaceMeta> {
        (**self).meta()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

pub fn eval_point<I: Immersion>(im: &I, p: &ChartPoint) -> V3 {
    im.eval(p.chart, p.x, p.y)
}

/// Value and partial derivatives of the homogeneous representative.
#[derive(Clone, Copy, Debug)]
pub struct Jet2 {
    pub value: V3,
    /// `[∂x, ∂y]`
    pub d1: [V3; 2],
    /// `[∂xx, ∂xy, ∂yy]`
    pub d2: [V3; 3],
}

impl Jet2 {
    pub fn d2(&self, i: usize, j: usize) -> &V3 {
        &self.d2[i + j]
    }

    pub fn max_abs_diff(&self, o: &Jet2) -> f64 {
        let mut m = self.value.max_abs_diff(&o.value);
        for k in 0..2 {
            m = m.max(self.d1[k].max_abs_diff(&o.d1[k]));
        }
        for k in 0..3 {
            m = m.max(self.d2[k].max_abs_diff(&o.d2[k]));
        }
        m
    }
}

/// Exact jet by hyper-dual differentiation.
pub fn jet2_eval<I: Immersion>(im: &I, p: &ChartPoint) -> Result<Jet2> {
    let v = im.eval(p.chart, HyperDual::var_x(p.x), HyperDual::var_y(p.y));
    let pick = |f: fn(&HyperDual<f64>) -> f64| v.0.map(|c| Cx::new(f(&c.re), f(&c.im)));
    let value = CVec3(pick(|h| h.v));
    let n = value.norm();
    if !(n > 1e-300) || !n.is_finite() {
        return Err(GeomError::Degenerate(*p));
    }
    Ok(Jet2 {
        value,
        d1: [CVec3(pick(|h| h.dx)), CVec3(pick(|h| h.dy))],
        d2: [CVec3(pick(|h| h.dxx)), CVec3(pick(|h| h.dxy)), CVec3(pick(|h| h.dyy))],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdStencil {
    /// Three-point central differences, O(h²).
    Central3,
    /// Five-point central differences, O(h⁴).
    Central5,
}

/// Jet from central finite differences of [`Immersion::eval`].
pub fn fd_jet<I: Immersion>(im: &I, p: &ChartPoint, h: f64, stencil: FdStencil) -> Jet2 {
    let f = |dx: f64, dy: f64| eval_point(im, &p.offset(dx, dy));
    let f0 = f(0.0, 0.0);
    let (d1x, d1y, dxx, dyy) = match stencil {
        FdStencil::Central3 => {
            let (xp, xm, yp, ym) = (f(h, 0.0), f(-h, 0.0), f(0.0, h), f(0.0, -h));
            (
                (xp - xm).scale(0.5 / h),
                (yp - ym).scale(0.5 / h),
                (xp + xm - f0.scale(2.0)).scale(1.0 / (h * h)),
                (yp + ym - f0.scale(2.0)).scale(1.0 / (h * h)),
            )
        }
        FdStencil::Central5 => {
            let d1 = |a: V3, b: V3, c: V3, d: V3| {
                // f(+2h), f(+h), f(-h), f(-2h)
                (b.scale(8.0) - c.scale(8.0) - a + d).scale(1.0 / (12.0 * h))
            };
            let d2 = |a: V3, b: V3, c: V3, d: V3| {
                (b.scale(16.0) + c.scale(16.0) - a - d - f0.scale(30.0))
                    .scale(1.0 / (12.0 * h * h))
            };
            let xs = [f(2.0 * h, 0.0), f(h, 0.0), f(-h, 0.0), f(-2.0 * h, 0.0)];
            let ys = [f(0.0, 2.0 * h), f(0.0, h), f(0.0, -h), f(0.0, -2.0 * h)];
            (
                d1(xs[0], xs[1], xs[2], xs[3]),
                d1(ys[0], ys[1], ys[2], ys[3]),
                d2(xs[0], xs[1], xs[2], xs[3]),
                d2(ys[0], ys[1], ys[2], ys[3]),
            )
        }
    };
    let dxy = match stencil {
        FdStencil::Central3 => {
            (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)).scale(0.25 / (h * h))
        }
        FdStencil::Central5 => {
            // product of the five-point first-derivative weights
            let w = [(2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0)];
            let mut acc = V3::zero();
            for (sx, wx) in w {
                for (sy, wy) in w {
                    acc = acc + f(sx * h, sy * h).scale(wx * wy);
                }
            }
            acc.scale(1.0 / (144.0 * h * h))
        }
    };
    Jet2 { value: f0, d1: [d1x, d1y], d2: [dxx, dxy, dyy] }
}

/// Largest deviation between the hyper-dual and finite-difference jets.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FdDiscrepancy {
    pub h: f64,
    pub first: f64,
    pub second: f64,
    pub max: f64,
}

/// Compares [`jet2_eval`] against three-point central differences with step `h`.
pub fn fd_crosscheck<I: Immersion>(im: &I, p: &ChartPoint, h: f64) -> Result<FdDiscrepancy> {
    if !(1e-6..=1e-2).contains(&h) {
        return Err(GeomError::Domain(format!("finite-difference step {h} outside [1e-6, 1e-2]")));
    }
    let exact = jet2_eval(im, p)?;
    let fd = fd_jet(im, p, h, FdStencil::Central3);
    let first = (0..2).map(|k| exact.d1[k].max_abs_diff(&fd.d1[k])).fold(0.0, f64::max);
    let second = (0..3).map(|k| exact.d2[k].max_abs_diff(&fd.d2[k])).fold(0.0, f64::max);
    Ok(FdDiscrepancy { h, first, second, max: first.max(second) })
}
