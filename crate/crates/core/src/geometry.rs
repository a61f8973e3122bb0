//! Pointwise geometry of an immersed surface: induced metric, second
//! fundamental form, mean curvature, Kähler function, Gauss and normal
//! curvatures and the twistor tensors `σ±`.
//!
//! Everything is computed from the second-order jet of the homogeneous
//! representative `F`. With `Z = F/|F|`, the horizontal lift of `dφ(∂ᵢ)` at `Z`
//! is `Xᵢ = P(Fᵢ)/|F|` where `P` removes the complex span of `Z`, and the lift of
//! `∇̄_{∂ⱼ} dφ(∂ᵢ)` is `P(Fᵢⱼ − βⱼFᵢ − βᵢFⱼ)/|F|` with `βᵢ = (Fᵢ, F)/|F|²`.

use serde::Serialize;

use crate::cp2::{curvature_raw, horizontal_basis, normalize, ProjPoint};
use crate::cvec::{CVec3, Cx, C64, V3};
use crate::error::{GeomError, Result};
use crate::jet::{jet2_eval, ChartPoint, Immersion, Jet2};
use crate::scalar::{Grad, Real};

/// Below this `1 − |C|` the normal frame is built by Gram–Schmidt instead of from `Je₁`.
const COMPLEX_POINT_GAP: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct GeometryRecord {
    pub chart_point: ChartPoint,
    pub point: ProjPoint,
    /// Horizontal lifts of `dφ(∂x)`, `dφ(∂y)` at the representative of `point`.
    pub coord_tangents: [V3; 2],
    /// `e₁, e₂`: Gram–Schmidt of the coordinate tangents.
    pub tangent_frame: [V3; 2],
    /// `e₃, e₄`, with `(e₁, e₂, e₃, e₄)` positive for `Ω ∧ Ω`.
    pub normal_frame: [V3; 2],
    /// `eₐ = Σᵢ frame_coeffs[a][i] ∂ᵢ`.
    pub frame_coeffs: [[f64; 2]; 2],
    pub g: [[f64; 2]; 2],
    /// `Γᵏᵢⱼ` stored as `[k][i][j]`.
    pub christoffel: [[[f64; 2]; 2]; 2],
    /// `σ(∂ᵢ, ∂ⱼ)` as horizontal vectors.
    pub sigma_coord: [[V3; 2]; 2],
    /// `σ(eₐ, e_b)` as horizontal vectors.
    pub sigma: [[V3; 2]; 2],
    /// `Im βᵢ`: rate at which the representative turns in the fibre direction.
    pub vertical_rate: [f64; 2],
    pub h: V3,
    pub k: f64,
    pub kperp: f64,
    pub kbar: f64,
    pub kbarperp: f64,
    pub c: f64,
    pub sigma_plus_sq: f64,
    pub sigma_minus_sq: f64,
}

/// Normal vectors and tangent vectors by their frame components.
pub type Pair = [f64; 2];

impl GeometryRecord {
    pub fn rep(&self) -> &V3 {
        self.point.rep()
    }

    pub fn area_density(&self) -> f64 {
        (self.g[0][0] * self.g[1][1] - self.g[0][1] * self.g[1][0]).sqrt()
    }

    pub fn g_inv(&self) -> [[f64; 2]; 2] {
        inv2(&self.g)
    }

    pub fn h_sq(&self) -> f64 {
        self.h.norm_sqr()
    }

    /// Components `(⟨v, e₃⟩, ⟨v, e₄⟩)`.
    pub fn normal_coeffs(&self, v: &V3) -> Pair {
        [v.dot(&self.normal_frame[0]), v.dot(&self.normal_frame[1])]
    }

    pub fn tangent_coeffs(&self, v: &V3) -> Pair {
        [v.dot(&self.tangent_frame[0]), v.dot(&self.tangent_frame[1])]
    }

    pub fn normal_vec(&self, n: Pair) -> V3 {
        self.normal_frame[0].scale(n[0]) + self.normal_frame[1].scale(n[1])
    }

    pub fn tangent_vec(&self, t: Pair) -> V3 {
        self.tangent_frame[0].scale(t[0]) + self.tangent_frame[1].scale(t[1])
    }

    /// Orthogonal projection of a horizontal vector onto the normal plane.
    pub fn normal_part(&self, v: &V3) -> V3 {
        self.normal_vec(self.normal_coeffs(v))
    }

    /// Shape operator `A_ξ` in the tangent frame: `⟨A_ξ eₐ, e_b⟩ = ⟨σ(eₐ, e_b), ξ⟩`.
    pub fn shape_operator(&self, xi: &V3) -> [[f64; 2]; 2] {
        let mut a = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                a[i][j] = self.sigma[i][j].dot(xi);
            }
        }
        a
    }

    /// `Ã(ξ) = Σᵢ σ(A_ξ eᵢ, eᵢ) = Σᵢⱼ ⟨σᵢⱼ, ξ⟩ σᵢⱼ`.
    pub fn a_tilde(&self, xi: &V3) -> V3 {
        let mut acc = V3::zero();
        for i in 0..2 {
            for j in 0..2 {
                acc = acc + self.sigma[i][j].scale(self.sigma[i][j].dot(xi));
            }
        }
        acc
    }

    /// `σ` on tangent frame components, valued in normal frame components.
    pub fn sigma_on(&self, u: Pair, v: Pair) -> Pair {
        let mut out = [0.0; 2];
        for a in 0..2 {
            for b in 0..2 {
                let n = self.normal_coeffs(&self.sigma[a][b]);
                out[0] += u[a] * v[b] * n[0];
                out[1] += u[a] * v[b] * n[1];
            }
        }
        out
    }

    /// Laplace–Beltrami operator from coordinate partials of a function.
    pub fn laplacian_from_partials(&self, grad: Pair, hess: [[f64; 2]; 2]) -> f64 {
        let gi = self.g_inv();
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut t = hess[i][j];
                for k in 0..2 {
                    t -= self.christoffel[k][i][j] * grad[k];
                }
                acc += gi[i][j] * t;
            }
        }
        acc
    }

    pub fn grad_sq_from_partials(&self, grad: Pair) -> f64 {
        let gi = self.g_inv();
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                acc += gi[i][j] * grad[i] * grad[j];
            }
        }
        acc
    }

    /// The tangent vector `∇u` as a horizontal vector, from coordinate partials.
    pub fn gradient_vector(&self, grad: Pair) -> V3 {
        let gi = self.g_inv();
        let mut v = V3::zero();
        for i in 0..2 {
            let c = gi[i][0] * grad[0] + gi[i][1] * grad[1];
            v = v + self.coord_tangents[i].scale(c);
        }
        v
    }
}

pub(crate) fn inv2(m: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

/// `Ω(eₐ, e_b) = ⟨Jeₐ, e_b⟩` Pfaffian: positive iff `(e₁, e₂, e₃, e₄)` is positively
/// oriented for the complex orientation.
pub fn kahler_pfaffian(e: &[V3; 4]) -> f64 {
    let w = |a: usize, b: usize| e[a].mul_i().dot(&e[b]);
    w(0, 1) * w(2, 3) - w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2)
}

/// Unit representative and horizontal coordinate tangents, generic in the scalar.
pub(crate) fn horizontal_tangents<T: Real>(f: &CVec3<T>, d: &[CVec3<T>; 2]) -> (CVec3<T>, [CVec3<T>; 2]) {
    let inv_n = f.norm().recip();
    let z = f.scale(inv_n);
    (z, [d[0].horizontal(&z).scale(inv_n), d[1].horizontal(&z).scale(inv_n)])
}

/// Oriented orthonormal tangent frame from coordinate tangents, generic in the scalar.
pub(crate) fn tangent_frame_generic<T: Real>(x: &[CVec3<T>; 2]) -> [CVec3<T>; 2] {
    let e1 = x[0].normalized();
    let x2 = x[1] - e1.scale(x[1].dot(&e1));
    [e1, x2.normalized()]
}

/// Value and first partials of the representative with entries in `T`, by
/// evaluating the immersion on [`Grad`] numbers.
pub(crate) fn first_jet_generic<I: Immersion, T: Real>(
    im: &I,
    chart: crate::jet::Chart,
    x: T,
    y: T,
) -> (CVec3<T>, [CVec3<T>; 2]) {
    let v: CVec3<Grad<T>> = im.eval(chart, Grad::var_x(x), Grad::var_y(y));
    let pick = |f: &dyn Fn(&Grad<T>) -> T| CVec3(v.0.map(|c| Cx::new(f(&c.re), f(&c.im))));
    (pick(&|g| g.v), [pick(&|g| g.dx), pick(&|g| g.dy)])
}

pub fn geometry_at<I: Immersion>(im: &I, p: &ChartPoint) -> Result<GeometryRecord> {
    let jet = jet2_eval(im, p)?;
    geometry_from_jet(&jet, p)
}

pub fn geometry_from_jet(jet: &Jet2, p: &ChartPoint) -> Result<GeometryRecord> {
    let f = jet.value;
    let n2 = f.norm_sqr();
    let n = n2.sqrt();
    let point = normalize(&f)?;
    let z = *point.rep();
    let beta: [C64; 2] = [jet.d1[0].herm(&f).scale(1.0 / n2), jet.d1[1].herm(&f).scale(1.0 / n2)];
    let (_, xs) = horizontal_tangents(&f, &jet.d1);

    let l1 = xs[0].norm();
    let scale = l1.max(xs[1].norm());
    if !(scale > 1e-12) || !(l1 > 1e-9 * scale) {
        return Err(GeomError::NotImmersion(*p));
    }
    let e1 = xs[0].scale(1.0 / l1);
    let proj = xs[1].dot(&e1);
    let x2p = xs[1] - e1.scale(proj);
    let l2 = x2p.norm();
    if !(l2 > 1e-9 * scale) {
        return Err(GeomError::NotImmersion(*p));
    }
    let e2 = x2p.scale(1.0 / l2);
    let frame_coeffs = [[1.0 / l1, 0.0], [-proj / (l1 * l2), 1.0 / l2]];

    let mut g = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g[i][j] = xs[i].dot(&xs[j]);
        }
    }
    let gi = inv2(&g);

    let mut christoffel = [[[0.0; 2]; 2]; 2];
    let mut sigma_coord = [[V3::zero(); 2]; 2];
    for i in 0..2 {
        for j in i..2 {
            let raw = *jet.d2(i, j) - jet.d1[i].cscale(beta[j]) - jet.d1[j].cscale(beta[i]);
            let d = raw.horizontal(&z).scale(1.0 / n);
            let b = [d.dot(&xs[0]), d.dot(&xs[1])];
            let gam = [gi[0][0] * b[0] + gi[0][1] * b[1], gi[1][0] * b[0] + gi[1][1] * b[1]];
            let s = d - xs[0].scale(gam[0]) - xs[1].scale(gam[1]);
            for k in 0..2 {
                christoffel[k][i][j] = gam[k];
                christoffel[k][j][i] = gam[k];
            }
            sigma_coord[i][j] = s;
            sigma_coord[j][i] = s;
        }
    }
    let mut sigma = [[V3::zero(); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = V3::zero();
            for i in 0..2 {
                for j in 0..2 {
                    let w = frame_coeffs[a][i] * frame_coeffs[b][j];
                    if w != 0.0 {
                        acc = acc + sigma_coord[i][j].scale(w);
                    }
                }
            }
            sigma[a][b] = acc;
        }
    }

    let c = e1.mul_i().dot(&e2);
    let [e3, e4] = normal_frame(&point, &e1, &e2, c);

    let h = (sigma[0][0] + sigma[1][1]).scale(0.5);
    let kbar = curvature_raw(&e1, &e2, &e2, &e1);
    let kbarperp = curvature_raw(&e1, &e2, &e3, &e4);
    let k = kbar + sigma[0][0].dot(&sigma[1][1]) - sigma[0][1].norm_sqr();
    let comp = |v: &V3| (v.dot(&e3), v.dot(&e4));
    let ((p3, p4), (q3, q4), (r3, r4)) = (comp(&sigma[0][0]), comp(&sigma[0][1]), comp(&sigma[1][1]));
    // ⟨[A₃, A₄]e₁, e₂⟩
    let commutator = q3 * (p4 - r4) - q4 * (p3 - r3);
    let kperp = kbarperp + commutator;

    let mut rec = GeometryRecord {
        chart_point: *p,
        point,
        coord_tangents: xs,
        tangent_frame: [e1, e2],
        normal_frame: [e3, e4],
        frame_coeffs,
        g,
        christoffel,
        sigma_coord,
        sigma,
        vertical_rate: [beta[0].im, beta[1].im],
        h,
        k,
        kperp,
        kbar,
        kbarperp,
        c,
        sigma_plus_sq: 0.0,
        sigma_minus_sq: 0.0,
    };
    let (sp, sm) = sigma_pm(&rec);
    rec.sigma_plus_sq = sp;
    rec.sigma_minus_sq = sm;
    Ok(rec)
}

fn normal_frame(point: &ProjPoint, e1: &V3, e2: &V3, c: f64) -> [V3; 2] {
    let (e3, mut e4) = if c.abs() < 1.0 - COMPLEX_POINT_GAP {
        let s = (1.0 - c * c).sqrt();
        let e3 = (e1.mul_i() - e2.scale(c)).scale(1.0 / s);
        let e4 = (e2.mul_i() + e1.scale(c)).scale(-1.0 / s);
        (e3, e4)
    } else {
        let mut chosen: Vec<V3> = Vec::with_capacity(2);
        let cands = horizontal_basis(point);
        while chosen.len() < 2 {
            let best = cands
                .iter()
                .map(|b| {
                    let mut v = *b - e1.scale(b.dot(e1)) - e2.scale(b.dot(e2));
                    for u in &chosen {
                        v = v - u.scale(v.dot(u));
                    }
                    v
                })
                .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
                .expect("four candidates");
            chosen.push(best.normalized());
        }
        (chosen[0], chosen[1])
    };
    if kahler_pfaffian(&[*e1, *e2, e3, e4]) < 0.0 {
        e4 = -e4;
    }
    [e3, e4]
}

/// `|σ⁺|²` and `|σ⁻|²` with `σ±(u, v) = σ(u, v) − σ(J±u, J±v) + J±σ(J±u, v) + J±σ(u, J±v)`,
/// where `J±e₁ = e₂` and `J±e₃ = ±e₄`.
pub fn sigma_pm(rec: &GeometryRecord) -> (f64, f64) {
    let jt = |u: Pair| [-u[1], u[0]];
    let jn = |n: Pair, sign: f64| [-sign * n[1], sign * n[0]];
    let norm = |sign: f64| {
        let mut acc = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let (mut u, mut v) = ([0.0; 2], [0.0; 2]);
                u[a] = 1.0;
                v[b] = 1.0;
                let s0 = rec.sigma_on(u, v);
                let s1 = rec.sigma_on(jt(u), jt(v));
                let s2 = jn(rec.sigma_on(jt(u), v), sign);
                let s3 = jn(rec.sigma_on(u, jt(v)), sign);
                for k in 0..2 {
                    let t = s0[k] - s1[k] + s2[k] + s3[k];
                    acc += t * t;
                }
            }
        }
        acc
    };
    (norm(1.0), norm(-1.0))
}

/// `⟨σ(∂, ∂), J∂⟩` for the unit-frame complex vector `∂ = (e₁ − ie₂)/2`, with
/// the metric extended complex-bilinearly.
pub fn theta_cubic_record(rec: &GeometryRecord) -> C64 {
    let [e1, e2] = rec.tangent_frame;
    let a = rec.sigma[0][0] - rec.sigma[1][1];
    let b = rec.sigma[0][1];
    let (je1, je2) = (e1.mul_i(), e2.mul_i());
    Cx::new(a.dot(&je1) - 2.0 * b.dot(&je2), -(a.dot(&je2) + 2.0 * b.dot(&je1))).scale(0.125)
}

pub fn theta_cubic<I: Immersion>(im: &I, p: &ChartPoint) -> Result<C64> {
    Ok(theta_cubic_record(&geometry_at(im, p)?))
}

/// `⟨σ(∂, ∂), ξ⟩` and `⟨σ(∂, ∂), ξ̄⟩` with `ξ = (e₃ − ie₄)/√2`. The first vanishes
/// exactly where `σ⁺` does, the second where `σ⁻` does:
/// `|σ±|² = 128 |·|²`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TwistorConditions {
    pub pos: C64Ser,
    pub neg: C64Ser,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct C64Ser {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for C64Ser {
    fn from(c: C64) -> Self {
        C64Ser { re: c.re, im: c.im }
    }
}

impl C64Ser {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

pub fn twistor_conditions_record(rec: &GeometryRecord) -> TwistorConditions {
    let a = rec.normal_coeffs(&(rec.sigma[0][0] - rec.sigma[1][1]));
    let b = rec.normal_coeffs(&rec.sigma[0][1]);
    let k = 1.0 / (4.0 * 2f64.sqrt());
    let pos = Cx::new(a[0] - 2.0 * b[1], -(a[1] + 2.0 * b[0])).scale(k);
    let neg = Cx::new(a[0] + 2.0 * b[1], a[1] - 2.0 * b[0]).scale(k);
    TwistorConditions { pos: pos.into(), neg: neg.into() }
}

pub fn twistor_complex_conditions<I: Immersion>(im: &I, p: &ChartPoint) -> Result<TwistorConditions> {
    Ok(twistor_conditions_record(&geometry_at(im, p)?))
}

/// Defects of the pointwise curvature identities of a record.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IdentityResiduals {
    /// `K̄ − (1 + 3C²)`.
    pub kbar: f64,
    /// `K̄⊥ − (1 − 3C²)`.
    pub kbarperp: f64,
    /// `|H|² + K̄ − K̄⊥ − (K − K⊥ + |σ⁺|²/16)`.
    pub sigma_plus: f64,
    /// `|H|² + K̄ + K̄⊥ − (K + K⊥ + |σ⁻|²/16)`.
    pub sigma_minus: f64,
    /// `(Jv)ᵀ = C J±v` and `(Jξ)⊥ = C J⁺ξ = −C J⁻ξ` on frame vectors.
    pub kahler_angle: f64,
    /// Frame orthonormality defect.
    pub frame: f64,
}

pub fn identity_residuals(rec: &GeometryRecord) -> IdentityResiduals {
    let c = rec.c;
    let h2 = rec.h_sq();
    let e = [rec.tangent_frame[0], rec.tangent_frame[1], rec.normal_frame[0], rec.normal_frame[1]];
    let mut frame: f64 = 0.0;
    for a in 0..4 {
        frame = frame.max(e[a].herm(rec.rep()).abs());
        for b in 0..4 {
            let target = if a == b { 1.0 } else { 0.0 };
            frame = frame.max((e[a].dot(&e[b]) - target).abs());
        }
    }
    let mut kahler: f64 = 0.0;
    for a in 0..2 {
        let mut u = [0.0; 2];
        u[a] = 1.0;
        let jplus = [-u[1], u[0]];
        let jv = e[a].mul_i();
        let t = rec.tangent_coeffs(&jv);
        kahler = kahler.max((t[0] - c * jplus[0]).abs()).max((t[1] - c * jplus[1]).abs());
        let jxi = e[2 + a].mul_i();
        let nrm = rec.normal_coeffs(&jxi);
        // J⁺ on the normal plane: e₃ ↦ e₄, e₄ ↦ −e₃
        kahler = kahler.max((nrm[0] - c * jplus[0]).abs()).max((nrm[1] - c * jplus[1]).abs());
    }
    IdentityResiduals {
        kbar: rec.kbar - (1.0 + 3.0 * c * c),
        kbarperp: rec.kbarperp - (1.0 - 3.0 * c * c),
        sigma_plus: h2 + rec.kbar - rec.kbarperp - (rec.k - rec.kperp + rec.sigma_plus_sq / 16.0),
        sigma_minus: h2 + rec.kbar + rec.kbarperp - (rec.k + rec.kperp + rec.sigma_minus_sq / 16.0),
        kahler_angle: kahler,
        frame,
    }
}

/// Defects of `|∇C|² = (1 − C²)|H|²` and `ΔC = 2C(3(1 − C²) − |H|²)`, which hold
/// on surfaces with `σ⁺ ≡ 0`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpinResiduals {
    pub grad_res: f64,
    pub lap_res: f64,
}

/// Default step for finite differences of scalar fields over the chart.
pub const SCALAR_FD_STEP: f64 = 1e-4;

/// Coordinate gradient and Hessian of a scalar field by central differences.
pub(crate) fn fd_partials(
    p: &ChartPoint,
    h: f64,
    mut f: impl FnMut(&ChartPoint) -> Result<f64>,
) -> Result<(f64, Pair, [[f64; 2]; 2])> {
    let at = |dx: f64, dy: f64, f: &mut dyn FnMut(&ChartPoint) -> Result<f64>| f(&p.offset(dx, dy));
    let f0 = at(0.0, 0.0, &mut f)?;
    let (xp, xm) = (at(h, 0.0, &mut f)?, at(-h, 0.0, &mut f)?);
    let (yp, ym) = (at(0.0, h, &mut f)?, at(0.0, -h, &mut f)?);
    let pp = at(h, h, &mut f)?;
    let pm = at(h, -h, &mut f)?;
    let mp = at(-h, h, &mut f)?;
    let mm = at(-h, -h, &mut f)?;
    let grad = [(xp - xm) / (2.0 * h), (yp - ym) / (2.0 * h)];
    let hxx = (xp - 2.0 * f0 + xm) / (h * h);
    let hyy = (yp - 2.0 * f0 + ym) / (h * h);
    let hxy = (pp - pm - mp + mm) / (4.0 * h * h);
    Ok((f0, grad, [[hxx, hxy], [hxy, hyy]]))
}

pub fn spin_identity_residuals<I: Immersion>(im: &I, p: &ChartPoint) -> Result<SpinResiduals> {
    spin_identity_residuals_with_step(im, p, SCALAR_FD_STEP)
}

pub fn spin_identity_residuals_with_step<I: Immersion>(
    im: &I,
    p: &ChartPoint,
    h: f64,
) -> Result<SpinResiduals> {
    let rec = geometry_at(im, p)?;
    let (c, grad, hess) = fd_partials(p, h, |q| Ok(geometry_at(im, q)?.c))?;
    let grad_sq = rec.grad_sq_from_partials(grad);
    let lap = rec.laplacian_from_partials(grad, hess);
    let h2 = rec.h_sq();
    Ok(SpinResiduals {
        grad_res: grad_sq - (1.0 - c * c) * h2,
        lap_res: lap - 2.0 * c * (-h2 + 3.0 * (1.0 - c * c)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Chart;
    use crate::zoo::{make_surface, FamilySpec};

    fn pts_sphere() -> Vec<ChartPoint> {
        vec![
            ChartPoint { chart: Chart::Near, x: 0.3, y: -0.2 },
            ChartPoint { chart: Chart::Near, x: -0.6, y: 0.5 },
            ChartPoint { chart: Chart::Far, x: 0.1, y: 0.7 },
            ChartPoint::polar(1.1, 2.0),
            ChartPoint::polar(2.4, -0.7),
        ]
    }

    #[test]
    fn complex_line_is_totally_geodesic_with_curvature_four() {
        let s = make_surface(FamilySpec::ComplexLine).unwrap();
        for p in pts_sphere() {
            let r = geometry_at(&s, &p).unwrap();
            assert!((r.c - 1.0).abs() < 1e-12, "C = {}", r.c);
            assert!(r.h.norm() < 1e-12);
            assert!((r.k - 4.0).abs() < 1e-10);
            assert!((r.kperp + 2.0).abs() < 1e-10, "K⊥ = {}", r.kperp);
        }
    }

    #[test]
    fn whitney_is_lagrangian_with_matching_curvatures() {
        for t in [0.0, 0.3, 1.0, 2.0] {
            let s = make_surface(FamilySpec::Whitney { t }).unwrap();
            for p in pts_sphere() {
                let r = geometry_at(&s, &p).unwrap();
                assert!(r.c.abs() < 1e-12);
                assert!((r.kperp - r.k).abs() < 1e-9, "t={t} K={} K⊥={}", r.k, r.kperp);
                assert!(r.sigma_minus_sq < 1e-18, "{}", r.sigma_minus_sq);
                assert!(theta_cubic_record(&r).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn clifford_torus_is_flat_and_minimal() {
        let s = make_surface(FamilySpec::Clifford).unwrap();
        let r = geometry_at(&s, &ChartPoint::torus(0.4, 1.9)).unwrap();
        assert!(r.h.norm() < 1e-14 && r.k.abs() < 1e-13 && r.c.abs() < 1e-14);
        assert!((r.area_density() - 1.0 / (3.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!(r.sigma_plus_sq < 1e-20);
    }

    #[test]
    fn identities_hold_on_generic_surfaces() {
        let specs = [
            FamilySpec::PhiAb { a: Cx::new(1.0, 0.0), b: Cx::new(0.0, 2.0) },
            FamilySpec::Psi { a: Cx::new(0.3, 1.0), b: Cx::new(1.0, -0.5) },
            FamilySpec::DoublePoint,
            FamilySpec::Whitney { t: 0.5 },
        ];
        for spec in specs {
            let s = make_surface(spec).unwrap();
            for p in pts_sphere() {
                let r = geometry_at(&s, &p).unwrap();
                let d = identity_residuals(&r);
                for v in [d.kbar, d.kbarperp, d.sigma_plus, d.sigma_minus, d.kahler_angle, d.frame] {
                    assert!(v.abs() < 1e-9, "{spec} {p}: {d:?}");
                }
                let tc = twistor_conditions_record(&r);
                assert!((128.0 * tc.neg.abs().powi(2) - r.sigma_minus_sq).abs() < 1e-9);
                assert!((128.0 * tc.pos.abs().powi(2) - r.sigma_plus_sq).abs() < 1e-9);
                assert!(r.sigma_minus_sq < 1e-16, "{spec}: {}", r.sigma_minus_sq);
            }
        }
    }

    #[test]
    fn flat_torus_area_element() {
        let r = [0.8, 0.44, (1.0f64 - 0.64 - 0.44 * 0.44).sqrt()];
        let s = make_surface(FamilySpec::FlatTorus { r }).unwrap();
        let rec = geometry_at(&s, &ChartPoint::torus(1.0, 2.0)).unwrap();
        assert!((rec.area_density() - r[0] * r[1] * r[2]).abs() < 1e-14);
        assert!((rec.k).abs() < 1e-12 && (rec.kperp).abs() < 1e-12);
    }

    #[test]
    fn spin_residuals_vanish_on_clifford() {
        let s = make_surface(FamilySpec::Clifford).unwrap();
        let r = spin_identity_residuals(&s, &ChartPoint::torus(1.0, 0.5)).unwrap();
        assert!(r.grad_res.abs() < 1e-6 && r.lap_res.abs() < 1e-6);
        let w = make_surface(FamilySpec::Whitney { t: 1.0 }).unwrap();
        let p = ChartPoint { chart: Chart::Near, x: 0.2, y: 0.1 };
        let r = spin_identity_residuals(&w, &p).unwrap();
        let rec = geometry_at(&w, &p).unwrap();
        assert!((r.grad_res + rec.h_sq()).abs() < 1e-6);
    }

    #[test]
    fn scalars_agree_across_charts() {
        let s = make_surface(FamilySpec::Psi { a: Cx::new(1.0, 0.0), b: Cx::new(0.5, 0.5) }).unwrap();
        let z = Cx::new(0.9, 0.5);
        let w = z.inv();
        let a = geometry_at(&s, &ChartPoint { chart: Chart::Near, x: z.re, y: z.im }).unwrap();
        let b = geometry_at(&s, &ChartPoint { chart: Chart::Far, x: w.re, y: w.im }).unwrap();
        for (u, v) in [(a.k, b.k), (a.kperp, b.kperp), (a.c, b.c), (a.h_sq(), b.h_sq()), (a.sigma_plus_sq, b.sigma_plus_sq)] {
            assert!((u - v).abs() < 1e-9, "{u} {v}");
        }
    }
}
