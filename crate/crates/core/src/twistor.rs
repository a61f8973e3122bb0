//! The negative twistor space as the flag manifold
//! `𝒫⁻ = {([z], [w]) : (z, w) = 0} ⊂ ℂP² × ℂP²` with `π⁻([z], [w]) = [z̄ ∧ w̄]`.
//!
//! The lift of a surface sends a point to the pair of complex lines of `ℂ³`
//! orthogonal to the representative `Z` and spanned by `e₁ ∓ ie₂`, where
//! `(e₁, e₂)` is an oriented orthonormal tangent frame. The two lines are
//! Hermitian-orthogonal to each other and to `Z`, so the pair is incident and
//! projects back to `[Z]`; rotating the frame only rescales each line by a phase.

use serde::Serialize;

use crate::cp2::{normalize, ProjPoint};
use crate::cvec::mat::{self, M3};
use crate::cvec::{CVec3, V3};
use crate::error::{GeomError, Result};
use crate::geometry::{first_jet_generic, geometry_at, horizontal_tangents, inv2, tangent_frame_generic};
use crate::jet::{Chart, ChartPoint, Domain, Immersion};
use crate::quadrature::{pairwise_sum, QuadratureGrid};
use crate::scalar::Real;
use crate::zoo::SurfaceMeta;

pub const INCIDENCE_TOL: f64 = 1e-10;

/// An incident pair of points of `ℂP²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistorPair {
    pub z: ProjPoint,
    pub w: ProjPoint,
}

impl TwistorPair {
    pub fn new(z: ProjPoint, w: ProjPoint) -> Result<Self> {
        let inc = z.rep().herm(w.rep()).abs();
        if inc > INCIDENCE_TOL {
            return Err(GeomError::Domain(format!("pair is not incident: |(z, w)| = {inc:e}")));
        }
        Ok(TwistorPair { z, w })
    }

    pub fn from_reps(z: &V3, w: &V3) -> Result<Self> {
        TwistorPair::new(normalize(z)?, normalize(w)?)
    }

    pub fn incidence(&self) -> f64 {
        self.z.rep().herm(self.w.rep()).abs()
    }

    pub fn proj_eq(&self, o: &TwistorPair) -> bool {
        self.z.proj_eq(&o.z) && self.w.proj_eq(&o.w)
    }
}

/// `π⁻([z], [w]) = [z̄ ∧ w̄]`.
pub fn project_pair(p: &TwistorPair) -> Result<ProjPoint> {
    let v = p.z.rep().cross(p.w.rep()).conj();
    if v.norm() < 1e-12 {
        return Err(GeomError::Domain("degenerate pair: z ∧ w = 0".into()));
    }
    normalize(&v)
}

/// Unit representatives of the two lift components from the unit representative
/// `z` and an oriented orthonormal tangent frame, generic in the scalar.
///
/// The first component is the line of `e₁ + ie₂` (`|e₁ + ie₂|² = 2 − 2C`), the
/// second that of `e₁ − ie₂` (`|e₁ − ie₂|² = 2 + 2C`). Whichever is shorter is
/// rebuilt as the Hermitian complement of the other, so the lift stays
/// well defined at complex points.
pub(crate) fn lift_from_frame<T: Real>(z: &CVec3<T>, e: &[CVec3<T>; 2]) -> (CVec3<T>, CVec3<T>) {
    let plus = e[0] + e[1].mul_i();
    let minus = e[0] - e[1].mul_i();
    if plus.norm_sqr().re() >= minus.norm_sqr().re() {
        let first = plus.normalized();
        let second = z.cross(&first).conj();
        (first, second)
    } else {
        let second = minus.normalized();
        let first = second.cross(z).conj();
        (first, second)
    }
}

/// Lift components at chart coordinates `(x, y)`, generic in the scalar.
pub(crate) fn lift_generic<I: Immersion, T: Real>(im: &I, chart: Chart, x: T, y: T) -> (CVec3<T>, CVec3<T>) {
    let (f, d) = first_jet_generic(im, chart, x, y);
    let (z, xs) = horizontal_tangents(&f, &d);
    let e = tangent_frame_generic(&xs);
    lift_from_frame(&z, &e)
}

/// The twistor lift `(φ̃₁, φ̃₂)` of `im` at `p`.
///
/// Convention: for `φ_{a,b}` the first component is the line `[1 : z : 0]`, for
/// `ψ` the line `[az : −a + bz : −b]`, i.e. the holomorphic component.
pub fn numeric_lift<I: Immersion>(im: &I, p: &ChartPoint) -> Result<TwistorPair> {
    geometry_at(im, p)?;
    let (u, w) = lift_generic(im, p.chart, p.x, p.y);
    let pair = TwistorPair::from_reps(&u, &w)
        .map_err(|e| GeomError::Numerical(format!("lift at {p}: {e}")))?;
    Ok(pair)
}

/// One component of the lift, as a map into `ℂ³` that can be differentiated.
#[derive(Clone, Copy, Debug)]
pub struct LiftComponent<'a, I> {
    pub surface: &'a I,
    /// 1 or 2.
    pub which: u8,
}

impl<I: Immersion> Immersion for LiftComponent<'_, I> {
    fn domain(&self) -> Domain {
        self.surface.domain()
    }
    fn eval<T: Real>(&self, chart: Chart, x: T, y: T) -> CVec3<T> {
        let (u, w) = lift_generic(self.surface, chart, x, y);
        if self.which == 1 {
            u
        } else {
            w
        }
    }
    fn label(&self) -> String {
        format!("lift{}({})", self.which, self.surface.label())
    }
}

/// Pull-back of the Fubini–Study metric by a map into `ℂP²` from its first jet.
fn pullback_metric(f: &V3, d: &[V3; 2]) -> [[f64; 2]; 2] {
    let (_, xs) = horizontal_tangents(f, d);
    let mut g = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g[i][j] = xs[i].dot(&xs[j]);
        }
    }
    g
}

fn lift_metric<I: Immersion>(im: &I, p: &ChartPoint, which: u8) -> [[f64; 2]; 2] {
    let lc = LiftComponent { surface: im, which };
    let (f, d) = first_jet_generic(&lc, p.chart, p.x, p.y);
    pullback_metric(&f, &d)
}

fn which_ok(which: u8) -> Result<()> {
    if which == 1 || which == 2 {
        Ok(())
    } else {
        Err(GeomError::Config(format!("lift component must be 1 or 2, got {which}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentDegree {
    pub which: u8,
    /// `Area(φ̃ᵢ)/π`.
    pub degree: f64,
    /// Largest relative deviation of the component metric from a multiple of
    /// the surface metric; large values mean the component is not a curve.
    pub max_conformality_defect: f64,
    pub warning: Option<String>,
}

/// Degree of a lift component as `Area/π` of the (holomorphic or
/// anti-holomorphic) curve it traces.
pub fn component_degree<I: Immersion>(im: &I, which: u8, grid: &QuadratureGrid) -> Result<ComponentDegree> {
    which_ok(which)?;
    let vals = grid.map(|p| {
        let rec = geometry_at(im, p)?;
        let gl = lift_metric(im, p, which);
        let det = (gl[0][0] * gl[1][1] - gl[0][1] * gl[1][0]).max(0.0);
        let defect = conformality_defect(&rec.g, &gl);
        Ok((det.sqrt(), defect))
    })?;
    let terms: Vec<f64> = vals.iter().zip(&grid.weights).map(|(v, w)| v.0 * w).collect();
    let defect = vals.iter().map(|v| v.1).fold(0.0, f64::max);
    let warning = (defect > 1e-4)
        .then(|| format!("component {which} is not conformal (defect {defect:.2e}); degree is not an integer invariant"));
    Ok(ComponentDegree {
        which,
        degree: pairwise_sum(&terms) / std::f64::consts::PI,
        max_conformality_defect: defect,
        warning,
    })
}

/// `|g_l − λ g| / |g_l|` with `λ = tr(g⁻¹ g_l)/2`; zero when `g_l` is conformal to `g`.
fn conformality_defect(g: &[[f64; 2]; 2], gl: &[[f64; 2]; 2]) -> f64 {
    let gi = inv2(g);
    let mut tr = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            tr += gi[i][j] * gl[j][i];
        }
    }
    let lam = 0.5 * tr;
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for i in 0..2 {
        for j in 0..2 {
            num = num.max((gl[i][j] - lam * g[i][j]).abs());
            den = den.max(gl[i][j].abs());
        }
    }
    let gn = g.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if den <= 1e-12 * gn {
        0.0
    } else {
        num / den
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LiftMetricResidual {
    /// `|g₁ − ((|H|² + 2(1 − C))/4) g| / |g|`, relative to the surface metric.
    pub r1: f64,
    /// `|g₂ − ((|H|² + 2(1 + C))/4) g| / |g|`.
    pub r2: f64,
    /// Components whose predicted metric factor vanishes (constant component).
    pub degenerate: [bool; 2],
}

/// Compares the metrics induced by the two lift components with the conformal
/// factors `(|H|² + 2(1 ∓ C))/4` of the surface metric.
pub fn lifted_metric_residual<I: Immersion>(im: &I, p: &ChartPoint) -> Result<LiftMetricResidual> {
    let rec = geometry_at(im, p)?;
    let h2 = rec.h_sq();
    let factors = [(h2 + 2.0 * (1.0 - rec.c)) / 4.0, (h2 + 2.0 * (1.0 + rec.c)) / 4.0];
    let gnorm = rec.g.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut r = [0.0; 2];
    let mut degenerate = [false; 2];
    for k in 0..2 {
        let gl = lift_metric(im, p, k as u8 + 1);
        let mut dev: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                dev = dev.max((gl[i][j] - factors[k] * rec.g[i][j]).abs());
            }
        }
        r[k] = dev / gnorm;
        degenerate[k] = factors[k] < 1e-9;
    }
    if degenerate.iter().any(|d| *d) {
        return Err(GeomError::Numerical(format!(
            "lift component(s) {:?} are constant at {p}: the surface is a complex curve there",
            degenerate
        )));
    }
    Ok(LiftMetricResidual { r1: r[0], r2: r[1], degenerate })
}

/// `[A]·([z], [w]) = ([Az], [A*⁻¹w])`.
pub fn pgl_act(a: &M3, pair: &TwistorPair) -> Result<TwistorPair> {
    let ainv = invert(a)?;
    let astar_inv = mat::conj_transpose(&ainv);
    TwistorPair::from_reps(&pair.z.rep().apply(a), &pair.w.rep().apply(&astar_inv))
}

fn invert(a: &M3) -> Result<M3> {
    mat::inverse(a, 1e-10).ok_or_else(|| GeomError::Domain("matrix is singular (|det A| ≤ 1e-10)".into()))
}

/// The surface obtained by acting with `A` on the twistor lift of `inner` and
/// projecting back with `π⁻`.
#[derive(Clone, Debug)]
pub struct Deformed<I> {
    inner: I,
    a: M3,
    astar_inv: M3,
}

pub fn deform_surface<I: Immersion>(a: &M3, inner: I) -> Result<Deformed<I>> {
    let ainv = invert(a)?;
    Ok(Deformed { inner, a: *a, astar_inv: mat::conj_transpose(&ainv) })
}

impl<I: Immersion> Deformed<I> {
    pub fn matrix(&self) -> &M3 {
        &self.a
    }
}

impl<I: Immersion> Immersion for Deformed<I> {
    fn domain(&self) -> Domain {
        self.inner.domain()
    }
    fn eval<T: Real>(&self, chart: Chart, x: T, y: T) -> CVec3<T> {
        let (u, w) = lift_generic(&self.inner, chart, x, y);
        u.apply(&self.a).cross(&w.apply(&self.astar_inv)).conj()
    }
    fn meta(&self) -> Option<SurfaceMeta> {
        None
    }
    fn label(&self) -> String {
        format!("deformed({})", self.inner.label())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DualCurveReport {
    /// Largest Fubini–Study distance between `φ̃₂` and the dual curve of `φ̃₁`.
    pub max_distance: f64,
    pub mean_distance: f64,
    /// Nodes where `φ̃₁` is ramified (`φ̃₁ ∧ ∂φ̃₁ ≈ 0`) and the dual curve is undefined.
    pub skipped: usize,
}

/// Distance between the second lift component and the dual curve of the first,
/// the line `[conj(φ̃₁ ∧ ∂φ̃₁)]`; zero exactly for superminimal surfaces.
pub fn dual_curve_residual<I: Immersion>(im: &I, grid: &QuadratureGrid) -> Result<DualCurveReport> {
    let lc = LiftComponent { surface: im, which: 1 };
    let vals = grid.map(|p| {
        let (u, du) = first_jet_generic(&lc, p.chart, p.x, p.y);
        let w = LiftComponent { surface: im, which: 2 }.eval(p.chart, p.x, p.y);
        // ∂x of a holomorphic curve spans, with the curve, its tangent line
        let d = if du[0].horizontal(&u.normalized()).norm() >= du[1].horizontal(&u.normalized()).norm() {
            du[0]
        } else {
            du[1]
        };
        let dual = u.cross(&d).conj();
        if dual.norm() < 1e-8 * u.norm() * d.norm().max(1e-300) || dual.norm() < 1e-12 {
            return Ok(None);
        }
        Ok(Some(ProjPoint::distance(&normalize(&dual)?, &normalize(&w)?)))
    })?;
    let ds: Vec<f64> = vals.iter().flatten().copied().collect();
    let skipped = vals.len() - ds.len();
    if ds.is_empty() {
        return Err(GeomError::Numerical("first lift component is constant; no dual curve".into()));
    }
    Ok(DualCurveReport {
        max_distance: ds.iter().copied().fold(0.0, f64::max),
        mean_distance: ds.iter().sum::<f64>() / ds.len() as f64,
        skipped,
    })
}

/// Unitary matrix from a complex matrix by Gram–Schmidt on its columns.
pub fn unitary_from(m: &M3) -> M3 {
    let cols: Vec<V3> = (0..3).map(|c| CVec3([m[0][c], m[1][c], m[2][c]])).collect();
    let mut q: Vec<V3> = Vec::new();
    for v in cols {
        let mut v = v;
        for u in &q {
            v = v - u.cscale(v.herm(u));
        }
        q.push(v.normalized());
    }
    let mut out = [[crate::cvec::C64::zero(); 3]; 3];
    for (c, col) in q.iter().enumerate() {
        for r in 0..3 {
            out[r][c] = col.0[r];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvec::{Cx, C64};
    use crate::quadrature::build_grid;
    use crate::zoo::{make_surface, FamilySpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn near(x: f64, y: f64) -> ChartPoint {
        ChartPoint { chart: Chart::Near, x, y }
    }

    #[test]
    fn lift_matches_closed_form_for_phi() {
        let s = make_surface(FamilySpec::PhiAb { a: C64::one(), b: C64::zero() }).unwrap();
        let pair = numeric_lift(&s, &near(1.0, 0.0)).unwrap();
        let expect = TwistorPair::from_reps(
            &V3::real(1.0, 1.0, 0.0),
            &V3::real(1.0, -1.0, 1.0),
        )
        .unwrap();
        assert!(pair.proj_eq(&expect), "{pair:?}");
    }

    #[test]
    fn lift_matches_closed_forms_elsewhere() {
        let specs = [
            FamilySpec::PhiAb { a: Cx::new(0.3, 1.0), b: Cx::new(0.0, 2.0) },
            FamilySpec::Psi { a: Cx::new(1.0, 0.0), b: Cx::new(0.5, 0.5) },
            FamilySpec::DoublePoint,
        ];
        for spec in specs {
            let s = make_surface(spec).unwrap();
            for &(x, y) in &[(0.3, 0.2), (-0.5, 0.7)] {
                let pair = numeric_lift(&s, &near(x, y)).unwrap();
                let (u, w) = s.analytic_lift(Cx::new(x, y)).unwrap();
                let expect = TwistorPair::from_reps(&u, &w).unwrap();
                assert!(pair.proj_eq(&expect), "{spec}");
            }
        }
    }

    #[test]
    fn section_property() {
        let s = make_surface(FamilySpec::Whitney { t: 1.0 }).unwrap();
        for p in [near(0.2, 0.4), ChartPoint::polar(0.4, 1.0)] {
            let pair = numeric_lift(&s, &p).unwrap();
            let phi = normalize(&s.eval(p.chart, p.x, p.y)).unwrap();
            assert!(project_pair(&pair).unwrap().proj_eq(&phi));
            assert!(pair.incidence() < 1e-14);
        }
    }

    #[test]
    fn unitary_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let mut m = [[C64::zero(); 3]; 3];
            for row in m.iter_mut() {
                for e in row.iter_mut() {
                    *e = Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            let a = unitary_from(&m);
            let z = V3::c((0.3, 0.1), (-0.2, 0.9), (0.5, 0.0));
            let w = V3::c((1.0, -0.4), (0.2, 0.0), (0.1, 0.3)).horizontal(&z.normalized());
            let pair = TwistorPair::from_reps(&z, &w).unwrap();
            let acted = pgl_act(&a, &pair).unwrap();
            let lhs = project_pair(&acted).unwrap();
            let rhs = normalize(&project_pair(&pair).unwrap().rep().apply(&a)).unwrap();
            assert!(lhs.proj_eq(&rhs));
            assert!(acted.incidence() < 1e-12);
        }
    }

    #[test]
    fn dual_curve_convention() {
        let g = build_grid(Domain::Sphere, 16, 32).unwrap();
        let tg = make_surface(FamilySpec::TotallyGeodesic).unwrap();
        assert!(dual_curve_residual(&tg, &g).unwrap().max_distance < 1e-8);
        let phi = make_surface(FamilySpec::PhiAb { a: C64::one(), b: C64::zero() }).unwrap();
        assert!(dual_curve_residual(&phi, &g).unwrap().max_distance > 0.5);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let mut a = mat::identity();
        a[2][2] = C64::zero();
        let s = make_surface(FamilySpec::ComplexLine).unwrap();
        assert!(deform_surface(&a, s).is_err());
    }

    #[test]
    fn degrees_of_phi() {
        let s = make_surface(FamilySpec::PhiAb { a: C64::one(), b: C64::zero() }).unwrap();
        let g = build_grid(Domain::Sphere, 32, 64).unwrap();
        let d1 = component_degree(&s, 1, &g).unwrap();
        let d2 = component_degree(&s, 2, &g).unwrap();
        assert!((d1.degree - 1.0).abs() < 1e-8 && (d2.degree - 1.0).abs() < 1e-8, "{d1:?} {d2:?}");
        assert!(d1.warning.is_none());
    }

    #[test]
    fn lift_metrics_of_phi() {
        let s = make_surface(FamilySpec::PhiAb { a: C64::one(), b: C64::zero() }).unwrap();
        let r = lifted_metric_residual(&s, &near(0.4, -0.3)).unwrap();
        assert!(r.r1 < 1e-10 && r.r2 < 1e-10, "{r:?}");
        let line = make_surface(FamilySpec::ComplexLine).unwrap();
        assert!(lifted_metric_residual(&line, &near(0.4, -0.3)).is_err());
    }
}
