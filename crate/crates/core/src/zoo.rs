//! Closed-form surface families in `ℂP²`.
//!
//! Sphere families are written on `ℂ ∪ {∞}`; each has a representative in the
//! near chart `z` and one in the far chart `ζ = 1/z` (the latter is the former
//! multiplied by a suitable power of `|ζ|²` or `ζ`, so both are polynomial and
//! never vanish). Torus families use two angles.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::cvec::{CVec3, Cx, C64, V3};
use crate::error::{GeomError, Result};
use crate::jet::{chart_coord, Chart, Domain, Immersion, SphereCoord};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `z ↦ [1 : z : 0]`.
    ComplexLine,
    /// `(x, y, w) ∈ S² ↦ [x : y : w cosh t + i sinh t]`, `t ≥ 0`.
    Whitney { t: f64 },
    /// `z ↦ [−a z̄ − b|z|² : a + bz : 1 + |z|²]`.
    PhiAb {
        #[serde(serialize_with = "ser_c64")]
        a: C64,
        #[serde(serialize_with = "ser_c64")]
        b: C64,
    },
    /// `z ↦ [b̄z(|z|²+1) − āz² : −(b̄ + ā|z|²z) : ā(|z|²+1) − b̄z̄]`, `[a : b] ∈ ℂP¹`.
    Psi {
        #[serde(serialize_with = "ser_c64")]
        a: C64,
        #[serde(serialize_with = "ser_c64")]
        b: C64,
    },
    /// `z ↦ [−|z|² : z : (1+z)(1+|z|²)]`, a non-Lagrangian sphere with a double
    /// point over `[0 : 0 : 1]`.
    DoublePoint,
    /// `|z₁|² = |z₂|² = |z₃|² = 1/3`.
    Clifford,
    /// `|zᵢ|² = rᵢ²` with `r₁² + r₂² + r₃² = 1`.
    FlatTorus { r: [f64; 3] },
    /// The Whitney sphere at `t = 0`: a double cover of the totally geodesic `ℝP²`.
    TotallyGeodesic,
}

fn ser_c64<S: serde::Serializer>(c: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [c.re, c.im].serialize(s)
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        let ps = self.params();
        if !ps.is_empty() {
            let parts: Vec<String> = ps.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", parts.join(", "))?;
        }
        Ok(())
    }
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::ComplexLine => "line",
            FamilySpec::Whitney { .. } => "whitney",
            FamilySpec::PhiAb { .. } => "phi_ab",
            FamilySpec::Psi { .. } => "psi",
            FamilySpec::DoublePoint => "double_point",
            FamilySpec::Clifford => "clifford",
            FamilySpec::FlatTorus { .. } => "flat_torus",
            FamilySpec::TotallyGeodesic => "totally_geodesic",
        }
    }

    /// Parameters as `(name, value)` pairs, complex values split into `_re`/`_im`.
    pub fn params(&self) -> Vec<(String, f64)> {
        let cx = |n: &str, c: &C64| vec![(format!("{n}_re"), c.re), (format!("{n}_im"), c.im)];
        match self {
            FamilySpec::Whitney { t } => vec![("t".into(), *t)],
            FamilySpec::PhiAb { a, b } | FamilySpec::Psi { a, b } => {
                let mut v = cx("a", a);
                v.extend(cx("b", b));
                v
            }
            FamilySpec::FlatTorus { r } => {
                vec![("r1".into(), r[0]), ("r2".into(), r[1]), ("r3".into(), r[2])]
            }
            _ => Vec::new(),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            FamilySpec::Clifford | FamilySpec::FlatTorus { .. } => Domain::Torus,
            _ => Domain::Sphere,
        }
    }

    /// Checks parameter constraints and normalizes (`[a : b]` to unit norm,
    /// torus radii to `Σ rᵢ² = 1`).
    pub fn validated(self) -> Result<Self> {
        let finite = |x: f64| x.is_finite();
        match self {
            FamilySpec::Whitney { t } => {
                if !finite(t) || t < 0.0 {
                    return Err(GeomError::Config(format!("whitney parameter t = {t} must be ≥ 0")));
                }
                Ok(self)
            }
            FamilySpec::PhiAb { a, b } => {
                if ![a.re, a.im, b.re, b.im].iter().all(|x| finite(*x)) {
                    return Err(GeomError::Config("phi_ab parameters must be finite".into()));
                }
                if a.norm_sqr() + b.norm_sqr() == 0.0 {
                    return Err(GeomError::Config("phi_ab needs (a, b) ≠ (0, 0)".into()));
                }
                Ok(self)
            }
            FamilySpec::Psi { a, b } => {
                let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
                if !finite(n) || n == 0.0 {
                    return Err(GeomError::Config("psi needs [a : b] with (a, b) ≠ (0, 0)".into()));
                }
                Ok(FamilySpec::Psi { a: a.scale(1.0 / n), b: b.scale(1.0 / n) })
            }
            FamilySpec::FlatTorus { r } => {
                if !r.iter().all(|x| finite(*x) && *x > 0.0) {
                    return Err(GeomError::Config(format!("flat torus radii {r:?} must be positive")));
                }
                let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                Ok(FamilySpec::FlatTorus { r: r.map(|x| x / n) })
            }
            _ => Ok(self),
        }
    }

    /// Builds a spec from `key=value` settings: `surface` names the family,
    /// and `t`, `a`, `b`, `r1`, `r2`, `r3` carry its parameters. Complex values
    /// are written `1`, `-2i`, `0.5+1.5i`.
    pub fn from_settings(kv: &BTreeMap<String, String>) -> Result<Self> {
        let name = kv
            .get("surface")
            .ok_or_else(|| GeomError::Config("missing `surface`".into()))?;
        let real = |k: &str, default: f64| -> Result<f64> {
            match kv.get(k) {
                None => Ok(default),
                Some(s) => s
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| GeomError::Config(format!("`{k}`: cannot parse `{s}` as a number"))),
            }
        };
        let complex = |k: &str, default: C64| -> Result<C64> {
            match kv.get(k) {
                None => Ok(default),
                Some(s) => parse_complex(s)
                    .ok_or_else(|| GeomError::Config(format!("`{k}`: cannot parse `{s}` as a complex number"))),
            }
        };
        let spec = match name.trim().to_ascii_lowercase().as_str() {
            "line" | "complex_line" => FamilySpec::ComplexLine,
            "whitney" => FamilySpec::Whitney { t: real("t", 1.0)? },
            "phi_ab" | "phi" => FamilySpec::PhiAb {
                a: complex("a", C64::one())?,
                b: complex("b", C64::zero())?,
            },
            "psi" => FamilySpec::Psi {
                a: complex("a", C64::one())?,
                b: complex("b", C64::zero())?,
            },
            "double_point" => FamilySpec::DoublePoint,
            "clifford" => FamilySpec::Clifford,
            "flat_torus" | "torus" => {
                let s = 1.0 / 3f64.sqrt();
                FamilySpec::FlatTorus { r: [real("r1", s)?, real("r2", s)?, real("r3", s)?] }
            }
            "totally_geodesic" | "rp2" => FamilySpec::TotallyGeodesic,
            other => return Err(GeomError::Config(format!("unknown surface `{other}`"))),
        };
        spec.validated()
    }
}

/// Parses `x`, `yi`, `x+yi`, `x-yi` (also with `j`), or `x,y`.
pub fn parse_complex(s: &str) -> Option<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    if let Some((re, im)) = s.split_once(',') {
        return Some(Cx::new(re.parse().ok()?, im.parse().ok()?));
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return Some(Cx::real(s.parse().ok()?));
    };
    // split at the last sign that is not an exponent sign or the leading sign
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let coef = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => t.parse().ok(),
        }
    };
    match split {
        Some(k) => Some(Cx::new(body[..k].parse().ok()?, coef(&body[k..])?)),
        None => Some(Cx::new(0.0, coef(body)?)),
    }
}

/// A reference value attached to a family.
#[derive(Clone, Debug, Serialize)]
pub struct Expected {
    pub key: &'static str,
    pub value: f64,
    pub note: &'static str,
}

/// Family metadata used by the verification suites.
#[derive(Clone, Debug, Serialize)]
pub struct SurfaceMeta {
    pub spec: FamilySpec,
    /// Maximum multiplicity of the immersion.
    pub mu: u32,
    /// Euler characteristic of the surface.
    pub chi: i32,
    pub orientable: bool,
    pub lagrangian: bool,
    pub minimal: bool,
    /// `σ⁻ ≡ 0`: the surface is the projection of a curve in the negative twistor space.
    pub negative_spin: bool,
    /// `σ⁺ ≡ 0`.
    pub positive_spin: bool,
    pub expected: Vec<Expected>,
}

impl SurfaceMeta {
    pub fn expected(&self, key: &str) -> Option<f64> {
        self.expected.iter().find(|e| e.key == key).map(|e| e.value)
    }
}

/// Reference invariants of a family.
pub fn list_expected(spec: &FamilySpec) -> Vec<Expected> {
    let e = |key, value, note| Expected { key, value, note };
    let tg_area = 4.0 * PI;
    match *spec {
        FamilySpec::ComplexLine => vec![
            e("area", PI, "area of a projective line"),
            e("Wminus", 2.0 * PI, "minimum of W⁻, attained only by lines"),
            e("Wplus", 6.0 * PI, "C ≡ 1, H ≡ 0"),
            e("W", 4.0 * PI, "C ≡ 1, H ≡ 0"),
            e("degree_d", 1.0, "holomorphic curve of degree 1"),
            e("chi", 2.0, "sphere"),
            e("chi_perp", -1.0, "W⁻ = 2π(χ + χ⊥) for σ⁻ ≡ 0"),
            e("d1", 0.0, "first lift component is constant"),
            e("d2", 1.0, "d = d₂ − d₁"),
            e("mu", 1.0, "embedded"),
        ],
        FamilySpec::Whitney { .. } | FamilySpec::TotallyGeodesic => {
            let mut v = vec![
                e("Wminus", 8.0 * PI, "every Whitney sphere"),
                e("degree_d", 0.0, "Lagrangian"),
                e("chi", 2.0, "sphere"),
                e("chi_perp", 2.0, "Lagrangian: χ⊥ = χ"),
                e("d1", 2.0, "lift components are conics"),
                e("d2", 2.0, "lift components are conics"),
                e("mu", 2.0, "one double point"),
            ];
            let t = match *spec {
                FamilySpec::Whitney { t } => t,
                _ => 0.0,
            };
            if t == 0.0 {
                v.push(e("area", tg_area, "umbilical sphere with K ≡ 1"));
            } else {
                v.push(e("n_zeros_H", 2.0, "W⁻ = 2π(χ + N(H))"));
            }
            v
        }
        FamilySpec::PhiAb { .. } => vec![
            e("Wminus", 4.0 * PI, "negative spin, lift degrees (1, 1)"),
            e("degree_d", 0.0, "d = d₂ − d₁"),
            e("chi", 2.0, "sphere"),
            e("chi_perp", 0.0, "W⁻ = 2π(χ + χ⊥)"),
            e("n_zeros_H", 0.0, "H has no zeros"),
            e("d1", 1.0, "first lift component is a line"),
            e("d2", 1.0, "second lift component is a line"),
            e("mu", 1.0, "embedding"),
        ],
        FamilySpec::Psi { .. } => vec![
            e("Wminus", 6.0 * PI, "negative spin, lift degrees (1, 2)"),
            e("degree_d", 1.0, "d = d₂ − d₁"),
            e("chi", 2.0, "sphere"),
            e("chi_perp", 1.0, "W⁻ = 2π(χ + χ⊥)"),
            e("n_zeros_H", 1.0, "H has a single zero"),
            e("d1", 1.0, "first lift component is a line"),
            e("d2", 2.0, "second lift component is a conic"),
        ],
        FamilySpec::DoublePoint => vec![
            e("Wminus", 6.0 * PI, "lift degrees (1, 2)"),
            e("degree_d", 1.0, "d = d₂ − d₁"),
            e("chi", 2.0, "sphere"),
            e("chi_perp", 1.0, "W⁻ = 2π(χ + χ⊥)"),
            e("d1", 1.0, "first lift component is a line"),
            e("d2", 2.0, "second lift component is a conic"),
            e("mu", 2.0, "double point at z = 0, ∞"),
        ],
        FamilySpec::Clifford => {
            let a = 4.0 * PI * PI / (3.0 * 3f64.sqrt());
            vec![
                e("area", a, "minimal Lagrangian torus"),
                e("Wminus", 2.0 * a, "H ≡ 0"),
                e("degree_d", 0.0, "Lagrangian"),
                e("chi", 0.0, "torus"),
                e("chi_perp", 0.0, "Lagrangian: χ⊥ = χ"),
                e("mu", 1.0, "embedded"),
            ]
        }
        FamilySpec::FlatTorus { r } => vec![
            e("area", 4.0 * PI * PI * r[0] * r[1] * r[2], "√det g = r₁r₂r₃"),
            e("degree_d", 0.0, "Lagrangian"),
            e("chi", 0.0, "torus"),
            e("chi_perp", 0.0, "Lagrangian: χ⊥ = χ"),
            e("mu", 1.0, "embedded"),
        ],
    }
}

fn meta_for(spec: FamilySpec) -> SurfaceMeta {
    use FamilySpec::*;
    let (mu, chi) = match spec {
        Whitney { .. } | TotallyGeodesic | DoublePoint => (2, 2),
        Clifford | FlatTorus { .. } => (1, 0),
        _ => (1, 2),
    };
    let lagrangian = matches!(spec, Whitney { .. } | TotallyGeodesic | Clifford | FlatTorus { .. });
    let umbilical_sphere = matches!(spec, Whitney { t } if t == 0.0);
    let minimal = umbilical_sphere || matches!(spec, ComplexLine | TotallyGeodesic | Clifford);
    let negative_spin = !matches!(spec, Clifford | FlatTorus { .. });
    let positive_spin = minimal;
    SurfaceMeta {
        spec,
        mu,
        chi,
        orientable: true,
        lagrangian,
        minimal,
        negative_spin,
        positive_spin,
        expected: list_expected(&spec),
    }
}

/// A family member ready for evaluation.
#[derive(Clone, Copy, Debug)]
pub struct Surface {
    spec: FamilySpec,
}

/// Validates `spec` and returns the immersion.
pub fn make_surface(spec: FamilySpec) -> Result<Surface> {
    Ok(Surface { spec: spec.validated()? })
}

#[inline]
fn c<T: Real>(z: C64) -> Cx<T> {
    Cx::from_c64(z)
}

impl Surface {
    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    fn sphere_rep<T: Real>(&self, sc: SphereCoord<T>) -> CVec3<T> {
        use FamilySpec::*;
        use SphereCoord::{Far, Near};
        let one = Cx::<T>::one();
        match (self.spec, sc) {
            (ComplexLine, Near(z)) => CVec3::new(one, z, Cx::zero()),
            (ComplexLine, Far(w)) => CVec3::new(w, one, Cx::zero()),
            (PhiAb { a, b }, Near(z)) => {
                let r2 = Cx::real(z.norm_sqr());
                CVec3::new(
                    -(c::<T>(a) * z.conj()) - c::<T>(b) * r2,
                    c::<T>(a) + c::<T>(b) * z,
                    one + r2,
                )
            }
            (PhiAb { a, b }, Far(w)) => {
                let r2 = Cx::real(w.norm_sqr());
                CVec3::new(
                    -(c::<T>(a) * w) - c::<T>(b),
                    c::<T>(a) * r2 + c::<T>(b) * w.conj(),
                    r2 + one,
                )
            }
            (Psi { a, b }, Near(z)) => {
                let (ab, bb) = (c::<T>(a.conj()), c::<T>(b.conj()));
                let r2 = Cx::real(z.norm_sqr());
                CVec3::new(
                    bb * z * (r2 + one) - ab * z * z,
                    -(bb + ab * r2 * z),
                    ab * (r2 + one) - bb * z.conj(),
                )
            }
            (Psi { a, b }, Far(w)) => {
                let (ab, bb) = (c::<T>(a.conj()), c::<T>(b.conj()));
                let r2 = Cx::real(w.norm_sqr());
                CVec3::new(
                    bb * (one + r2) - ab * w.conj(),
                    -(bb * r2 * w + ab),
                    ab * w * (one + r2) - bb * w * w,
                )
            }
            (DoublePoint, Near(z)) => {
                let r2 = Cx::real(z.norm_sqr());
                CVec3::new(-r2, z, (one + z) * (one + r2))
            }
            (DoublePoint, Far(w)) => {
                let r2 = Cx::real(w.norm_sqr());
                CVec3::new(-w, r2, (w + one) * (r2 + one))
            }
            (Whitney { t }, sc) => whitney_rep(sc.unit_sphere_generic(), t),
            (TotallyGeodesic, sc) => whitney_rep(sc.unit_sphere_generic(), 0.0),
            (Clifford | FlatTorus { .. }, _) => unreachable!("torus family in a sphere chart"),
        }
    }

    /// The lift `(φ̃₁, φ̃₂)` in closed form at the near-chart coordinate `z`,
    /// for families that come with one. `π⁻` of the pair is the surface point.
    pub fn analytic_lift(&self, z: C64) -> Option<(V3, V3)> {
        let one = C64::one();
        let zb = z.conj();
        match self.spec {
            FamilySpec::PhiAb { a, b } => Some((
                CVec3::new(one, z, C64::zero()),
                CVec3::new(zb, -one, (a + b * z).conj()),
            )),
            FamilySpec::Psi { a, b } => Some((
                CVec3::new(a * z, -a + b * z, -b),
                CVec3::new(one, zb, zb * zb),
            )),
            FamilySpec::DoublePoint => Some((
                CVec3::new(one, z, C64::zero()),
                CVec3::new(zb * (one + zb), -(one + zb), zb),
            )),
            _ => None,
        }
    }
}

fn whitney_rep<T: Real>(p: [T; 3], t: f64) -> CVec3<T> {
    CVec3::new(
        Cx::real(p[0]),
        Cx::real(p[1]),
        Cx::new(p[2] * t.cosh(), T::cst(t.sinh())),
    )
}

impl Immersion for Surface {
    fn domain(&self) -> Domain {
        self.spec.domain()
    }

    fn eval<T: Real>(&self, chart: Chart, x: T, y: T) -> CVec3<T> {
        match self.spec {
            FamilySpec::Clifford => torus_rep([1.0 / 3f64.sqrt(); 3], x, y),
            FamilySpec::FlatTorus { r } => torus_rep(r, x, y),
            _ => {
                let sc = chart_coord(chart, x, y).expect("sphere family evaluated in the torus chart");
                self.sphere_rep(sc)
            }
        }
    }

    fn meta(&self) -> Option<SurfaceMeta> {
        Some(meta_for(self.spec))
    }

    fn label(&self) -> String {
        self.spec.to_string()
    }
}

fn torus_rep<T: Real>(r: [f64; 3], x: T, y: T) -> CVec3<T> {
    CVec3::new(
        Cx::expi(x).scale(T::cst(r[0])),
        Cx::expi(y).scale(T::cst(r[1])),
        Cx::cst(r[2], 0.0),
    )
}
