//! Fubini–Study geometry of `ℂP²` (holomorphic sectional curvature 4) through
//! unit representatives in `ℂ³` and the Hopf submersion.
//!
//! Tangent vectors at `[z]` are stored as horizontal lifts at the unit
//! representative `z`: vectors `v` with `(v, z) = 0`. The metric is `Re(u, v)`
//! and the complex structure is multiplication by `i`. Changing the phase of
//! the representative multiplies every lift by the same phase, so all scalar
//! operations here are phase-equivariant.

use crate::cvec::{CVec3, Cx, C64, V3};
use crate::error::{GeomError, Result};
use crate::scalar::Real;

/// Tolerance for projective equality: `|(z₁, z₂)| ≥ 1 − PROJ_EQ_TOL`.
pub const PROJ_EQ_TOL: f64 = 1e-10;
const HORIZONTAL_TOL: f64 = 1e-12;

/// A point of `ℂP²` held as a unit representative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjPoint {
    rep: V3,
}

impl ProjPoint {
    pub fn rep(&self) -> &V3 {
        &self.rep
    }

    /// `|(z₁, z₂)|`, the cosine of the Fubini–Study distance.
    pub fn overlap(&self, other: &ProjPoint) -> f64 {
        self.rep.herm(&other.rep).abs()
    }

    pub fn proj_eq(&self, other: &ProjPoint) -> bool {
        self.overlap(other) >= 1.0 - PROJ_EQ_TOL
    }

    /// Fubini–Study distance `arccos |(z₁, z₂)|`.
    /// Fubini–Study distance, `atan2(|z × w|, |(z, w)|)` for unit reps.
    pub fn distance(&self, other: &ProjPoint) -> f64 {
        self.rep.cross(&other.rep).norm().atan2(self.overlap(other))
    }

    /// Phase `λ` with `other.rep ≈ λ · self.rep`.
    fn phase_to(&self, other: &ProjPoint) -> C64 {
        let c = other.rep.herm(&self.rep);
        let n = c.abs();
        Cx::new(c.re / n, c.im / n)
    }
}

/// Normalizes a nonzero vector of `ℂ³` to a [`ProjPoint`].
pub fn normalize(raw: &V3) -> Result<ProjPoint> {
    let n = raw.norm();
    if !(n > 1e-300) || !n.is_finite() {
        return Err(GeomError::Domain(format!(
            "cannot normalize vector of norm {n:e}"
        )));
    }
    Ok(ProjPoint { rep: raw.scale(1.0 / n) })
}

/// A tangent vector of `ℂP²` as a horizontal lift at its base representative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HorizontalVector {
    pub base: ProjPoint,
    pub vec: V3,
}

impl HorizontalVector {
    /// Wraps `vec` after checking `(vec, base) = 0`.
    pub fn new(base: ProjPoint, vec: V3) -> Result<Self> {
        let off = vec.herm(&base.rep).abs();
        if off > HORIZONTAL_TOL * vec.norm().max(1.0) {
            return Err(GeomError::Domain(format!(
                "vector is not horizontal: |(v, z)| = {off:e}"
            )));
        }
        Ok(HorizontalVector { base, vec })
    }

    /// Projects an arbitrary vector of `ℂ³` onto the horizontal space at `base`.
    pub fn project(base: ProjPoint, v: &V3) -> Self {
        HorizontalVector { base, vec: v.horizontal(&base.rep) }
    }

    pub fn norm(&self) -> f64 {
        self.vec.norm()
    }

    /// The same tangent vector expressed over the representative of `base`.
    fn vec_at(&self, base: &ProjPoint) -> Result<V3> {
        if !self.base.proj_eq(base) {
            return Err(GeomError::Domain(
                "horizontal vectors based at different points".into(),
            ));
        }
        let lam = self.base.phase_to(base);
        Ok(self.vec.cscale(lam))
    }
}

/// Riemannian metric `Re(u, v)` on horizontal lifts.
pub fn fs_inner(u: &HorizontalVector, v: &HorizontalVector) -> Result<f64> {
    Ok(u.vec.dot(&v.vec_at(&u.base)?))
}

/// The complex structure `J`.
pub fn j_apply(u: &HorizontalVector) -> Result<HorizontalVector> {
    HorizontalVector::new(u.base, u.vec)?;
    Ok(HorizontalVector { base: u.base, vec: u.vec.mul_i() })
}

/// Kähler form `Ω(u, v) = ⟨Ju, v⟩`.
pub fn kahler_form(u: &HorizontalVector, v: &HorizontalVector) -> Result<f64> {
    fs_inner(&j_apply(u)?, v)
}

/// Curvature tensor `R̄(x, y, z, w)` of constant holomorphic sectional
/// curvature 4 on raw horizontal lifts at a common representative.
pub fn curvature_raw<T: Real>(
    x: &CVec3<T>,
    y: &CVec3<T>,
    z: &CVec3<T>,
    w: &CVec3<T>,
) -> T {
    let (jx, jy, jz) = (x.mul_i(), y.mul_i(), z.mul_i());
    x.dot(w) * y.dot(z) - x.dot(z) * y.dot(w) + jx.dot(w) * jy.dot(z)
        - jx.dot(z) * jy.dot(w)
        - jx.dot(y) * jz.dot(w) * 2.0
}

/// `R̄(x, y, z, w)` with `R̄(x, y, y, x)` the sectional curvature of `x ∧ y`.
pub fn fs_curvature(
    x: &HorizontalVector,
    y: &HorizontalVector,
    z: &HorizontalVector,
    w: &HorizontalVector,
) -> Result<f64> {
    let b = &x.base;
    let (xv, yv, zv, wv) = (x.vec, y.vec_at(b)?, z.vec_at(b)?, w.vec_at(b)?);
    Ok(curvature_raw(&xv, &yv, &zv, &wv))
}

/// `cos(s·t)` and `sin(s·t)/s` as functions of `s² = |v|²`, smooth through `v = 0`.
pub(crate) fn geodesic_coeffs<T: Real>(s2: T, t: f64) -> (T, T) {
    if s2.re() * t * t < 1e-10 {
        let u = s2 * (t * t);
        let c = T::one() - u * 0.5 + u * u * (1.0 / 24.0);
        let s = (T::one() - u * (1.0 / 6.0) + u * u * (1.0 / 120.0)) * t;
        (c, s)
    } else {
        let s = s2.sqrt();
        let st = s * t;
        (st.cos(), st.sin() / s)
    }
}

/// Geodesic displacement of a unit representative along a horizontal lift,
/// without normalization (the result is a unit vector up to roundoff).
pub(crate) fn geodesic_exp_raw<T: Real>(z: &CVec3<T>, v: &CVec3<T>, t: f64) -> CVec3<T> {
    let (c, s) = geodesic_coeffs(v.norm_sqr(), t);
    z.scale(c) + v.scale(s)
}

/// Point reached at time `t` along the geodesic from `z` with initial velocity `v`.
pub fn geodesic_exp(z: &ProjPoint, v: &HorizontalVector, t: f64) -> Result<ProjPoint> {
    let vv = v.vec_at(z)?;
    normalize(&geodesic_exp_raw(&z.rep, &vv, t))
}

/// Deterministic real orthonormal basis `(u₁, iu₁, u₂, iu₂)` of the horizontal
/// space at `z`, from complex Gram–Schmidt of projected standard basis vectors.
pub fn horizontal_basis(z: &ProjPoint) -> [V3; 4] {
    let mut us: Vec<V3> = Vec::with_capacity(2);
    for k in 0..3 {
        let mut e = V3::zero();
        e.0[k] = C64::one();
        let mut v = e.horizontal(&z.rep);
        for u in &us {
            v = v - u.cscale(v.herm(u));
        }
        let n = v.norm();
        if n > 0.3 {
            us.push(v.scale(1.0 / n));
        }
        if us.len() == 2 {
            break;
        }
    }
    // at least two of the three projected basis vectors have norm² ≥ 1/3 after
    // the first is removed, so the loop always fills both slots
    [us[0], us[0].mul_i(), us[1], us[1].mul_i()]
}

/// Value, gradient and Hessian of `f([z]) = |(z, a)|²` at one point.
#[derive(Clone, Debug)]
pub struct DistanceFieldData {
    pub value: f64,
    pub gradient: HorizontalVector,
    /// Hessian over [`horizontal_basis`] of the base point.
    pub hessian: [[f64; 4]; 4],
    focus: V3,
}

impl DistanceFieldData {
    /// `∇̄²f(u, v) = −2f⟨u, v⟩ + 2 Re((u, a)(a, v))`.
    pub fn hessian_apply(&self, u: &V3, v: &V3) -> f64 {
        -2.0 * self.value * u.dot(v) + 2.0 * self.cross_term(u, v)
    }

    /// `Re((u, a)(a, v))` for horizontal lifts `u, v` at the base.
    pub fn cross_term(&self, u: &V3, v: &V3) -> f64 {
        (u.herm(&self.focus) * self.focus.herm(v)).re
    }

    /// The cross term rebuilt from the gradient alone:
    /// `f · Re((u, a)(a, v)) = ¼(⟨∇̄f, u⟩⟨∇̄f, v⟩ + ⟨∇̄f, Ju⟩⟨∇̄f, Jv⟩)`.
    pub fn cross_term_from_gradient(&self, u: &V3, v: &V3) -> f64 {
        let g = &self.gradient.vec;
        0.25 * (g.dot(u) * g.dot(v) + g.dot(&u.mul_i()) * g.dot(&v.mul_i()))
    }
}

/// Distance-type function of the focus `a` evaluated at `z`.
pub fn dist_field(a: &ProjPoint, z: &ProjPoint) -> DistanceFieldData {
    let av = a.rep;
    let zv = z.rep;
    let c = zv.herm(&av);
    let value = c.norm_sqr();
    let grad = (av.cscale(c) - zv.scale(value)).scale(2.0).horizontal(&zv);
    let basis = horizontal_basis(z);
    let mut hessian = [[0.0; 4]; 4];
    let partial = DistanceFieldData {
        value,
        gradient: HorizontalVector { base: *z, vec: grad },
        hessian,
        focus: av,
    };
    for i in 0..4 {
        for j in 0..4 {
            hessian[i][j] = partial.hessian_apply(&basis[i], &basis[j]);
        }
    }
    DistanceFieldData { hessian, ..partial }
}

/// `f = |(z, a)|² / |z|²` for an arbitrary nonzero representative, generic in the scalar.
pub(crate) fn dist_value<T: Real>(a: &CVec3<T>, z: &CVec3<T>) -> T {
    z.herm(a).norm_sqr() / z.norm_sqr()
}
