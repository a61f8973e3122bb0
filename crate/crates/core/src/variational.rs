//! Euler–Lagrange residuals of `W±`, finite-difference first variations and the
//! distance-function identity `H = ξ/(1 − h)`.
//!
//! The normal connection is computed on ambient vectors. If `N` is a normal
//! field lifted at the representative `Z = F/|F|` and `Z` turns in the fibre at
//! rate `λᵢ = Im βᵢ`, then `∇⊥ᵢN` is the normal part of `∂ᵢN − iλᵢN`. The
//! derivative `∂ᵢN` is a central difference over the chart.

use serde::Serialize;

use crate::cp2::{dist_field, dist_value, geodesic_exp_raw, ProjPoint};
use crate::cvec::{CVec3, Cx, V3};
use crate::error::{GeomError, Result};
use crate::geometry::{fd_partials, first_jet_generic, geometry_at, horizontal_tangents, tangent_frame_generic, GeometryRecord, Pair, SCALAR_FD_STEP};
use crate::invariants::{area_element, log_distance_laplacian};
use crate::jet::{chart_coord, Chart, ChartPoint, Domain, Immersion};
use crate::quadrature::{pairwise_sum, QuadratureGrid};
use crate::scalar::{HyperDual, Real};

/// Default step for the connection stencils.
pub const CONNECTION_STEP: f64 = 1e-3;
/// Default displacement for first-variation checks.
pub const VARIATION_EPS: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Functional {
    Wplus,
    Wminus,
}

/// A normal vector at a chart point, as an ambient horizontal vector at the
/// representative of that chart point and by its normal-frame components.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormalVector {
    pub chart_point: ChartPoint,
    #[serde(skip)]
    pub vec: V3,
    pub coeffs: Pair,
}

impl NormalVector {
    fn from_rec(rec: &GeometryRecord, v: V3) -> Self {
        let v = rec.normal_part(&v);
        NormalVector { chart_point: rec.chart_point, vec: v, coeffs: rec.normal_coeffs(&v) }
    }

    pub fn norm(&self) -> f64 {
        self.vec.norm()
    }
}

/// Point where stencils are evaluated: sphere points move to the stereographic
/// chart with `|coords| ≤ 1`, which is smooth well beyond any stencil.
fn stencil_point(p: &ChartPoint) -> ChartPoint {
    p.to_stereographic()
}

fn cov_derivative(rec: &GeometryRecord, plus: &V3, minus: &V3, center: &V3, i: usize, h: f64) -> V3 {
    let d = (*plus - *minus).scale(0.5 / h);
    rec.normal_part(&(d - center.mul_i().scale(rec.vertical_rate[i])))
}

/// `∇⊥ⱼ` of a normal field given pointwise, at `q`, for `j = 0, 1`.
fn connection<F>(rec: &GeometryRecord, q: &ChartPoint, h: f64, field: &F) -> Result<[V3; 2]>
where
    F: Fn(&ChartPoint) -> Result<V3>,
{
    let c = field(q)?;
    let mut out = [V3::zero(); 2];
    for (j, o) in out.iter_mut().enumerate() {
        let (dx, dy) = if j == 0 { (h, 0.0) } else { (0.0, h) };
        let plus = field(&q.offset(dx, dy))?;
        let minus = field(&q.offset(-dx, -dy))?;
        *o = cov_derivative(rec, &plus, &minus, &c, j, h);
    }
    Ok(out)
}

/// `Δ⊥N = gⁱʲ(∇⊥ᵢ∇⊥ⱼN − Γᵏᵢⱼ∇⊥ₖN)` by nested central differences.
fn normal_laplacian<I, F>(im: &I, rec: &GeometryRecord, h: f64, field: &F) -> Result<V3>
where
    I: Immersion,
    F: Fn(&ChartPoint) -> Result<V3>,
{
    let p = rec.chart_point;
    let first = connection(rec, &p, h, field)?;
    // ∇⊥N at the four neighbours, each in its own gauge
    let mut nb = Vec::with_capacity(4);
    for (dx, dy) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
        let q = p.offset(dx, dy);
        let r = geometry_at(im, &q)?;
        nb.push(connection(&r, &q, h, field)?);
    }
    let gi = rec.g_inv();
    let mut acc = V3::zero();
    for i in 0..2 {
        let (plus, minus) = (&nb[2 * i], &nb[2 * i + 1]);
        for j in 0..2 {
            let second = cov_derivative(rec, &plus[j], &minus[j], &first[j], i, h);
            let mut t = second;
            for k in 0..2 {
                t = t - first[k].scale(rec.christoffel[k][i][j]);
            }
            acc = acc + t.scale(gi[i][j]);
        }
    }
    Ok(rec.normal_part(&acc))
}

fn mean_curvature_field<I: Immersion>(im: &I) -> impl Fn(&ChartPoint) -> Result<V3> + '_ {
    move |q: &ChartPoint| Ok(geometry_at(im, q)?.h)
}

/// `Δ⊥H` at `p` with connection step `h`.
pub fn normal_laplacian_h<I: Immersion>(im: &I, p: &ChartPoint, h: f64) -> Result<NormalVector> {
    if !(h > 0.0 && h < 0.1) {
        return Err(GeomError::Config(format!("connection step {h} outside (0, 0.1)")));
    }
    let q = stencil_point(p);
    let rec = geometry_at(im, &q)?;
    let lap = normal_laplacian(im, &rec, h, &mean_curvature_field(im))?;
    Ok(NormalVector::from_rec(&rec, lap))
}

/// The Euler–Lagrange expression of `W⁻` or `W⁺` at `p`:
///
/// - `W⁻`: `Δ⊥H + (1 − 3C² − 2|H|²)H + ÃH`
/// - `W⁺`: `Δ⊥H + (5 + 9C² − 2|H|²)H + ÃH + 12(JJ⁺∇C)⊥`
///
/// `Δ⊥H` is Richardson-extrapolated from the stencils with steps
/// `2·CONNECTION_STEP` and `CONNECTION_STEP`.
pub fn el_residual<I: Immersion>(im: &I, p: &ChartPoint, which: Functional) -> Result<NormalVector> {
    el_residual_impl(im, p, which, CONNECTION_STEP, true)
}

/// Plain second-order stencil with step `h`.
pub fn el_residual_with_step<I: Immersion>(
    im: &I,
    p: &ChartPoint,
    which: Functional,
    h: f64,
) -> Result<NormalVector> {
    el_residual_impl(im, p, which, h, false)
}

fn el_residual_impl<I: Immersion>(
    im: &I,
    p: &ChartPoint,
    which: Functional,
    h: f64,
    extrapolate: bool,
) -> Result<NormalVector> {
    let q = stencil_point(p);
    let rec = geometry_at(im, &q)?;
    let hv = rec.h;
    let (h2, c) = (rec.h_sq(), rec.c);
    let field = mean_curvature_field(im);
    let mut lap = normal_laplacian(im, &rec, h, &field)?;
    if extrapolate {
        let coarse = normal_laplacian(im, &rec, 2.0 * h, &field)?;
        lap = (lap.scale(4.0) - coarse).scale(1.0 / 3.0);
    }
    let at = rec.a_tilde(&hv);
    let out = match which {
        Functional::Wminus => lap + hv.scale(1.0 - 3.0 * c * c - 2.0 * h2) + at,
        Functional::Wplus => {
            let (_, grad, _) = fd_partials(&q, SCALAR_FD_STEP, |r| Ok(geometry_at(im, r)?.c))?;
            let gc = rec.gradient_vector(grad);
            let t = rec.tangent_coeffs(&gc);
            // J⁺e₁ = e₂, J⁺e₂ = −e₁
            let jp = rec.tangent_vec([-t[1], t[0]]);
            lap + hv.scale(5.0 + 9.0 * c * c - 2.0 * h2) + at + jp.mul_i().scale(12.0)
        }
    };
    Ok(NormalVector::from_rec(&rec, out))
}

/// Direction of a normal variation field before the bump profile is applied.
#[derive(Clone, Copy, Debug, Serialize)]
pub enum NormalDirection {
    /// The mean curvature vector.
    MeanCurvature,
    /// `m₀ξ + m₁(J∇̄f)⊥` with `f = |(·, a)|²` and `ξ = (∇̄f)⊥`.
    FocusGradient {
        #[serde(skip)]
        focus: ProjPoint,
        mix: [f64; 2],
    },
}

/// A smooth normal field: a localized profile about a center point of the
/// parameter domain times a normal direction.
///
/// The profile is `amplitude · exp((⟨p, c⟩ − 1)/w²)` on the round sphere and
/// `amplitude · exp((cos(x − cx) + cos(y − cy) − 2)/w²)` on the torus, a
/// Gaussian of width `w` near the center that stays analytic, so quadratures of
/// the displaced surfaces converge spectrally.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormalField {
    pub center: ChartPoint,
    pub width: f64,
    pub amplitude: f64,
    pub direction: NormalDirection,
}

impl NormalField {
    pub fn zero(center: ChartPoint) -> Self {
        NormalField { center, width: 1.0, amplitude: 0.0, direction: NormalDirection::MeanCurvature }
    }

    fn profile<T: Real>(&self, chart: Chart, x: T, y: T) -> T {
        if self.amplitude == 0.0 {
            return T::zero();
        }
        let k = 1.0 / (self.width * self.width);
        let s = match chart {
            Chart::Torus => (x - self.center.x).cos() + (y - self.center.y).cos() - 2.0,
            _ => {
                let Some(s) = chart_coord(chart, x, y) else { return T::zero() };
                let p = s.unit_sphere_generic();
                let c = self.center.sphere_point().unwrap_or([0.0, 0.0, 1.0]);
                p[0] * c[0] + p[1] * c[1] + p[2] * c[2] - 1.0
            }
        };
        (s * k).exp() * self.amplitude
    }

    /// The field as an ambient horizontal vector at the representative `F/|F|`
    /// of the chart point, generic in the scalar.
    pub(crate) fn vector_generic<I: Immersion, T: Real>(&self, im: &I, chart: Chart, x: T, y: T) -> CVec3<T> {
        let rho = self.profile(chart, x, y);
        if rho.re() == 0.0 {
            return CVec3::zero();
        }
        match self.direction {
            NormalDirection::MeanCurvature => {
                let v = im.eval(chart, HyperDual::var_x(x), HyperDual::var_y(y));
                mean_curvature_generic(&v).scale(rho)
            }
            NormalDirection::FocusGradient { focus, mix } => {
                let (f, d) = first_jet_generic(im, chart, x, y);
                let (z, xs) = horizontal_tangents(&f, &d);
                let e = tangent_frame_generic(&xs);
                let a = CVec3::from_v3(focus.rep());
                let c = z.herm(&a);
                let fv = c.norm_sqr();
                let grad = (a.cscale(c) - z.scale(fv)).scale(T::cst(2.0));
                let v = grad.scale(T::cst(mix[0])) + grad.mul_i().scale(T::cst(mix[1]));
                let n = v - e[0].scale(v.dot(&e[0])) - e[1].scale(v.dot(&e[1]));
                n.scale(rho)
            }
        }
    }

    /// The field at `p` in the gauge of `p`'s record.
    pub fn vector_at<I: Immersion>(&self, im: &I, p: &ChartPoint) -> V3 {
        self.vector_generic(im, p.chart, p.x, p.y)
    }

    /// Components over the normal frame of the record at `p`.
    pub fn coeffs_at<I: Immersion>(&self, im: &I, p: &ChartPoint) -> Result<Pair> {
        let rec = geometry_at(im, p)?;
        Ok(rec.normal_coeffs(&self.vector_at(im, p)))
    }
}

/// Mean curvature vector from the hyper-dual evaluation of the representative,
/// generic in the scalar.
pub(crate) fn mean_curvature_generic<T: Real>(v: &CVec3<HyperDual<T>>) -> CVec3<T> {
    let pick = |f: &dyn Fn(&HyperDual<T>) -> T| CVec3(v.0.map(|c| Cx::new(f(&c.re), f(&c.im))));
    let f = pick(&|h| h.v);
    let d = [pick(&|h| h.dx), pick(&|h| h.dy)];
    let dd = [[pick(&|h| h.dxx), pick(&|h| h.dxy)], [pick(&|h| h.dxy), pick(&|h| h.dyy)]];
    let n2 = f.norm_sqr();
    let inv_n = n2.sqrt().recip();
    let (z, xs) = horizontal_tangents(&f, &d);
    let beta = [d[0].herm(&f).scale(n2.recip()), d[1].herm(&f).scale(n2.recip())];
    let mut g = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g[i][j] = xs[i].dot(&xs[j]);
        }
    }
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let gi = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
    let mut h = CVec3::zero();
    for i in 0..2 {
        for j in 0..2 {
            let raw = dd[i][j] - d[i].cscale(beta[j]) - d[j].cscale(beta[i]);
            let dij = raw.horizontal(&z).scale(inv_n);
            let b = [dij.dot(&xs[0]), dij.dot(&xs[1])];
            let gam = [gi[0][0] * b[0] + gi[0][1] * b[1], gi[1][0] * b[0] + gi[1][1] * b[1]];
            let s = dij - xs[0].scale(gam[0]) - xs[1].scale(gam[1]);
            h = h + s.scale(gi[i][j] * 0.5);
        }
    }
    h
}

/// The immersion displaced along geodesics: `φ_t(q) = exp_{φ(q)}(t V(q))`.
#[derive(Clone, Copy, Debug)]
pub struct Displaced<'a, I> {
    pub surface: &'a I,
    pub field: &'a NormalField,
    pub t: f64,
}

impl<I: Immersion> Immersion for Displaced<'_, I> {
    fn domain(&self) -> Domain {
        self.surface.domain()
    }
    fn eval<T: Real>(&self, chart: Chart, x: T, y: T) -> CVec3<T> {
        let f = self.surface.eval(chart, x, y);
        let z = f.normalized();
        let v = self.field.vector_generic(self.surface, chart, x, y);
        geodesic_exp_raw(&z, &v, self.t)
    }
    fn label(&self) -> String {
        format!("displaced({}, t={})", self.surface.label(), self.t)
    }
}

fn functional_density(rec: &GeometryRecord, which: Functional) -> f64 {
    match which {
        Functional::Wminus => rec.h_sq() + 2.0,
        Functional::Wplus => rec.h_sq() + 6.0 * rec.c * rec.c,
    }
}

fn functional_value<I: Immersion>(im: &I, grid: &QuadratureGrid, which: Functional) -> Result<f64> {
    grid.integrate(|p| {
        let r = geometry_at(im, p)?;
        Ok(functional_density(&r, which) * area_element(&r))
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FirstVariation {
    pub which: Functional,
    pub eps: f64,
    /// `(W(φ_eps) − W(φ_−eps)) / 2eps`.
    pub fd: f64,
    /// `∫⟨EL, V⟩ dA`.
    pub integral: f64,
}

impl FirstVariation {
    pub fn discrepancy(&self) -> f64 {
        (self.fd - self.integral).abs()
    }
}

/// Compares the central difference of `W⁻` along a normal variation with the
/// integral of the Euler–Lagrange expression against the variation field.
pub fn first_variation_check<I: Immersion>(
    im: &I,
    field: &NormalField,
    grid: &QuadratureGrid,
    eps: f64,
) -> Result<FirstVariation> {
    first_variation_check_for(im, field, grid, eps, Functional::Wminus)
}

pub fn first_variation_check_for<I: Immersion>(
    im: &I,
    field: &NormalField,
    grid: &QuadratureGrid,
    eps: f64,
    which: Functional,
) -> Result<FirstVariation> {
    if !(1e-4..=1e-2).contains(&eps) {
        return Err(GeomError::Config(format!("variation eps {eps} outside [1e-4, 1e-2]")));
    }
    if im.domain() != grid.domain {
        return Err(GeomError::Config("grid domain does not match the immersion".into()));
    }
    let plus = functional_value(&Displaced { surface: im, field, t: eps }, grid, which)?;
    let minus = functional_value(&Displaced { surface: im, field, t: -eps }, grid, which)?;
    let vals = grid.map(|p| {
        let rec = geometry_at(im, p)?;
        let da = area_element(&rec);
        let q = stencil_point(p);
        let v = field.vector_at(im, &q);
        if v.norm() == 0.0 {
            return Ok(0.0);
        }
        let el = el_residual(im, &q, which)?;
        Ok(el.vec.dot(&v) * da)
    })?;
    let terms: Vec<f64> = vals.iter().zip(&grid.weights).map(|(v, w)| v * w).collect();
    Ok(FirstVariation { which, eps, fd: (plus - minus) / (2.0 * eps), integral: pairwise_sum(&terms) })
}

/// `H − ξ/(1 − h)` with `h = |(φ, a)|²` and `ξ` the normal part of `∇̄h`.
pub fn whitney_identity_residual<I: Immersion>(im: &I, a: &ProjPoint, p: &ChartPoint) -> Result<NormalVector> {
    let rec = geometry_at(im, p)?;
    let df = dist_field(a, &rec.point);
    let omh = 1.0 - df.value;
    if !(omh > 1e-6) {
        return Err(GeomError::Domain(format!("{p} is within 1e-6 of a preimage of the focus")));
    }
    let xi = rec.normal_part(&df.gradient.vec);
    Ok(NormalVector::from_rec(&rec, rec.h - xi.scale(1.0 / omh)))
}

/// Pointwise relations of the distance function `h = |(φ, a)|²`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DistanceChecks {
    pub h: f64,
    /// `|∇h|² − (4h(1 − h) − |ξ|²)`, with `∇h` from exact partials.
    pub gradient_split: f64,
    /// `Σᵢ|(eᵢ, a)|² − (1 − h)`; vanishes on Lagrangian surfaces.
    pub lagrangian_split: f64,
    /// `Δ log(1 − h) + |H|² + 3 + C²`; nonnegative.
    pub log_laplacian_slack: f64,
}

pub fn distance_checks<I: Immersion>(im: &I, a: &ProjPoint, p: &ChartPoint) -> Result<DistanceChecks> {
    let rec = geometry_at(im, p)?;
    let df = dist_field(a, &rec.point);
    let xi = rec.normal_part(&df.gradient.vec);
    let f = im.eval(p.chart, HyperDual::var_x(p.x), HyperDual::var_y(p.y));
    let hv = dist_value(&CVec3::from_v3(a.rep()), &f);
    let grad_sq = rec.grad_sq_from_partials([hv.dx, hv.dy]);
    let h = df.value;
    let lag: f64 = rec.tangent_frame.iter().map(|e| e.herm(a.rep()).norm_sqr()).sum();
    let (_, lap) = log_distance_laplacian(im, a, p)?;
    Ok(DistanceChecks {
        h,
        gradient_split: grad_sq - (4.0 * h * (1.0 - h) - xi.norm_sqr()),
        lagrangian_split: lag - (1.0 - h),
        log_laplacian_slack: lap + rec.h_sq() + 3.0 + rec.c * rec.c,
    })
}
