//! Verification suites: named numerical checks over the surface families.
//!
//! Every check records what was computed, what it was compared with, the
//! tolerance and the outcome. Random sample points come from a seeded ChaCha
//! generator, so a run is reproducible from its [`SuiteConfig`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cp2::{normalize, ProjPoint};
use crate::cvec::{mat, Cx, C64, V3};
use crate::error::{GeomError, Result};
use crate::geometry::{geometry_at, identity_residuals, spin_identity_residuals, theta_cubic, twistor_conditions_record};
use crate::invariants::{excision_extrapolate, invariant_report, locate_h_zeros, preimage_count, InvariantReport};
use crate::jet::{ChartPoint, Domain, Immersion};
use crate::quadrature::{build_grid, QuadratureGrid};
use crate::twistor::{
    component_degree, deform_surface, dual_curve_residual, lifted_metric_residual, numeric_lift, pgl_act,
    project_pair, unitary_from, TwistorPair,
};
use crate::variational::{
    distance_checks, el_residual, el_residual_with_step, first_variation_check, normal_laplacian_h,
    whitney_identity_residual, Functional, NormalDirection, NormalField, CONNECTION_STEP, VARIATION_EPS,
};
use crate::zoo::{make_surface, FamilySpec, Surface};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Bounds,
    Twistor,
    Variational,
    Identities,
    All,
}

impl FromStr for Suite {
    type Err = GeomError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bounds" => Suite::Bounds,
            "twistor" => Suite::Twistor,
            "variational" => Suite::Variational,
            "identities" => Suite::Identities,
            "all" => Suite::All,
            _ => {
                return Err(GeomError::Config(format!(
                    "unknown suite '{s}' (expected bounds, twistor, variational, identities or all)"
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Bounds => "bounds",
            Suite::Twistor => "twistor",
            Suite::Variational => "variational",
            Suite::Identities => "identities",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

/// How `computed` is compared with `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|computed − expected| ≤ tol`.
    Abs,
    /// `|computed − expected| ≤ tol·|expected|`.
    Rel,
    /// `computed ≥ expected − tol`.
    AtLeast,
    /// `computed ≤ expected + tol`.
    AtMost,
    /// `computed > expected + tol`.
    Above,
    /// `computed < expected − tol`.
    Below,
    /// Equality within `tol` exactly when the flag is set.
    EqualIff(bool),
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Abs => f.write_str("abs"),
            Relation::Rel => f.write_str("rel"),
            Relation::AtLeast => f.write_str(">="),
            Relation::AtMost => f.write_str("<="),
            Relation::Above => f.write_str(">"),
            Relation::Below => f.write_str("<"),
            Relation::EqualIff(true) => f.write_str("equal"),
            Relation::EqualIff(false) => f.write_str("strict"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    /// Short statement of what is being checked.
    pub basis: String,
    pub status: Status,
    pub computed: f64,
    pub expected: f64,
    pub tol: f64,
    pub relation: Relation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(id: impl Into<String>, basis: impl Into<String>, computed: f64, expected: f64, tol: f64, relation: Relation) -> Self {
        let d = computed - expected;
        let ok = match relation {
            Relation::Abs => d.abs() <= tol,
            Relation::Rel => d.abs() <= tol * expected.abs(),
            Relation::AtLeast => d >= -tol,
            Relation::AtMost => d <= tol,
            Relation::Above => d > tol,
            Relation::Below => d < -tol,
            Relation::EqualIff(eq) => (d.abs() <= tol) == eq,
        };
        Check {
            id: id.into(),
            basis: basis.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            computed,
            expected,
            tol,
            relation,
            note: None,
        }
    }

    pub fn failed(id: impl Into<String>, basis: impl Into<String>, err: &GeomError) -> Self {
        Check {
            id: id.into(),
            basis: basis.into(),
            status: Status::Fail,
            computed: f64::NAN,
            expected: f64::NAN,
            tol: f64::NAN,
            relation: Relation::Abs,
            note: Some(err.to_string()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn attempt(id: String, basis: &str, f: impl FnOnce(String) -> Result<Check>) -> Check {
    match f(id.clone()) {
        Ok(c) => c,
        Err(e) => Check::failed(id, basis, &e),
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SuiteConfig {
    pub sphere_grid: (usize, usize),
    pub torus_grid: (usize, usize),
    pub seed: u64,
    /// Random sample points per surface for pointwise checks.
    pub points: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { sphere_grid: (96, 192), torus_grid: (128, 128), seed: 7, points: 4 }
    }
}

impl SuiteConfig {
    pub fn grid(&self, domain: Domain) -> Result<QuadratureGrid> {
        let (u, v) = match domain {
            Domain::Sphere => self.sphere_grid,
            Domain::Torus => self.torus_grid,
        };
        build_grid(domain, u, v)
    }
}

/// Compact name of a family member for check ids.
pub fn short_label(spec: &FamilySpec) -> String {
    let c = |z: &C64| fmt_complex(*z);
    match spec {
        FamilySpec::ComplexLine => "line".into(),
        FamilySpec::Whitney { t } => format!("whitney(t={t})"),
        FamilySpec::PhiAb { a, b } => format!("phi_ab({},{})", c(a), c(b)),
        FamilySpec::Psi { a, b } => format!("psi[{}:{}]", c(a), c(b)),
        FamilySpec::DoublePoint => "double_point".into(),
        FamilySpec::Clifford => "clifford".into(),
        FamilySpec::FlatTorus { r } => format!("flat_torus({:.4},{:.4},{:.4})", r[0], r[1], r[2]),
        FamilySpec::TotallyGeodesic => "totally_geodesic".into(),
    }
}

pub fn fmt_complex(z: C64) -> String {
    let t = |x: f64| format!("{}", (x * 1e12).round() / 1e12);
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => t(z.re),
        (true, false) => format!("{}i", t(z.im)),
        _ => format!("{}{}{}i", t(z.re), if z.im < 0.0 { "-" } else { "+" }, t(z.im.abs())),
    }
}

/// The families exercised by the suites.
pub fn verification_zoo() -> Vec<FamilySpec> {
    let one = C64::one();
    let zero = C64::zero();
    vec![
        FamilySpec::ComplexLine,
        FamilySpec::Whitney { t: 0.0 },
        FamilySpec::Whitney { t: 0.3 },
        FamilySpec::Whitney { t: 1.0 },
        FamilySpec::Whitney { t: 2.0 },
        FamilySpec::PhiAb { a: one, b: zero },
        FamilySpec::PhiAb { a: zero, b: one },
        FamilySpec::PhiAb { a: one, b: Cx::new(0.0, 2.0) },
        FamilySpec::Psi { a: one, b: zero },
        FamilySpec::Psi { a: one, b: Cx::new(0.5, 0.5) },
        FamilySpec::DoublePoint,
        FamilySpec::Clifford,
        FamilySpec::FlatTorus { r: [0.8, 0.44, 0.41] },
        FamilySpec::TotallyGeodesic,
    ]
}

/// Seeded sample points away from the coordinate poles.
pub fn sample_points(domain: Domain, seed: u64, n: usize) -> Vec<ChartPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| match domain {
            Domain::Sphere => {
                let c: f64 = rng.gen_range(-0.95..0.95);
                ChartPoint::polar(c.acos(), rng.gen_range(0.0..2.0 * PI))
            }
            Domain::Torus => ChartPoint::torus(rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)),
        })
        .collect()
}

/// A surface of the zoo with its report on the configured grid.
pub struct Evaluated {
    pub spec: FamilySpec,
    pub tag: String,
    pub surface: Surface,
    pub grid: QuadratureGrid,
    pub report: InvariantReport,
}

impl Evaluated {
    pub fn new(spec: FamilySpec, cfg: &SuiteConfig) -> Result<Self> {
        let surface = make_surface(spec)?;
        let grid = cfg.grid(spec.domain())?;
        let report = invariant_report(&surface, &grid)?;
        Ok(Evaluated { spec, tag: short_label(&spec), surface, grid, report })
    }

    fn meta(&self) -> crate::zoo::SurfaceMeta {
        self.surface.meta().expect("zoo surfaces carry metadata")
    }

    fn points(&self, cfg: &SuiteConfig, salt: u64) -> Vec<ChartPoint> {
        sample_points(self.spec.domain(), cfg.seed.wrapping_mul(1_000_003).wrapping_add(salt), cfg.points)
    }
}

fn max_over<F>(pts: &[ChartPoint], mut f: F) -> Result<f64>
where
    F: FnMut(&ChartPoint) -> Result<f64>,
{
    let mut m: f64 = 0.0;
    for p in pts {
        m = m.max(f(p)?);
    }
    Ok(m)
}

fn min_over<F>(pts: &[ChartPoint], mut f: F) -> Result<f64>
where
    F: FnMut(&ChartPoint) -> Result<f64>,
{
    let mut m = f64::INFINITY;
    for p in pts {
        m = m.min(f(p)?);
    }
    Ok(m)
}

fn focus(v: V3) -> ProjPoint {
    normalize(&v).expect("nonzero focus")
}

/// Runs one suite (or all of them) over the zoo.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Vec<Check> {
    let mut zoo = Vec::new();
    let mut out = Vec::new();
    for spec in verification_zoo() {
        match Evaluated::new(spec, cfg) {
            Ok(e) => zoo.push(e),
            Err(e) => out.push(Check::failed(format!("invariant_report/{}", short_label(&spec)), "surface evaluates on the grid", &e)),
        }
    }
    let parts: &[Suite] = match suite {
        Suite::All => &[Suite::Bounds, Suite::Twistor, Suite::Variational, Suite::Identities],
        _ => std::slice::from_ref(&suite),
    };
    for s in parts {
        match s {
            Suite::Bounds => out.extend(bounds_suite(&zoo)),
            Suite::Twistor => out.extend(twistor_suite(&zoo, cfg)),
            Suite::Variational => out.extend(variational_suite(&zoo, cfg)),
            Suite::Identities => out.extend(identities_suite(&zoo, cfg)),
            Suite::All => unreachable!(),
        }
    }
    out
}

pub fn bounds_suite(zoo: &[Evaluated]) -> Vec<Check> {
    let mut out = Vec::new();
    for e in zoo {
        let meta = e.meta();
        let r = &e.report;
        let mu = meta.mu as f64;
        let tag = &e.tag;
        let wm = r.wminus.value;
        out.push(Check::new(format!("wminus_ge_2pi_mu/{tag}"), "W⁻ ≥ 2πμ", wm, 2.0 * PI * mu, 1e-6, Relation::AtLeast));
        out.push(Check::new(
            format!("multiplicity_integral_ge_4pi_mu/{tag}"),
            "∫(|H|² + 3 + C²) dA ≥ 4πμ",
            r.multiplicity_integral.value,
            4.0 * PI * mu,
            1e-6,
            Relation::AtLeast,
        ));
        let is_line = matches!(e.spec, FamilySpec::ComplexLine);
        out.push(Check::new(
            format!("wminus_2pi_mu_equality/{tag}"),
            "W⁻ = 2πμ exactly for projective lines",
            wm,
            2.0 * PI * mu,
            1e-6,
            Relation::EqualIff(is_line),
        ));
        if meta.lagrangian {
            out.push(Check::new(
                format!("lagrangian_wminus_ge_4pi_mu/{tag}"),
                "Lagrangian: W⁻ ≥ 4πμ",
                wm,
                4.0 * PI * mu,
                1e-6,
                Relation::AtLeast,
            ));
            let whitney = matches!(e.spec, FamilySpec::Whitney { .. } | FamilySpec::TotallyGeodesic);
            out.push(Check::new(
                format!("lagrangian_4pi_mu_equality/{tag}"),
                "Lagrangian: W⁻ = 4πμ exactly for Whitney spheres",
                wm,
                4.0 * PI * mu,
                1e-6,
                Relation::EqualIff(whitney),
            ));
        }
        if matches!(e.spec, FamilySpec::DoublePoint) {
            out.push(Check::new(
                format!("below_lagrangian_bound/{tag}"),
                "non-Lagrangian: W⁻ < 4πμ is possible",
                wm,
                4.0 * PI * mu,
                1e-6,
                Relation::Below,
            ));
        }
        if e.spec.domain() == Domain::Sphere || matches!(e.spec, FamilySpec::Clifford | FamilySpec::FlatTorus { .. }) {
            let (chi, chip) = (r.chi.raw, r.chi_perp.raw);
            out.push(Check::new(
                format!("wminus_ge_2pi_chi_plus_chi_perp/{tag}"),
                "W⁻ ≥ 2π(χ + χ⊥), equality iff σ⁻ ≡ 0",
                wm,
                2.0 * PI * (chi + chip),
                1e-6,
                Relation::AtLeast,
            ));
            out.push(Check::new(
                format!("wminus_twistor_equality/{tag}"),
                "W⁻ = 2π(χ + χ⊥) iff σ⁻ ≡ 0",
                wm,
                2.0 * PI * (chi + chip),
                1e-6 * wm.max(1.0),
                Relation::EqualIff(meta.negative_spin),
            ));
            out.push(Check::new(
                format!("wplus_ge_2pi_chi_minus_chi_perp/{tag}"),
                "W⁺ ≥ 2π(χ − χ⊥), equality iff σ⁺ ≡ 0",
                r.wplus.value,
                2.0 * PI * (chi - chip),
                1e-6,
                Relation::AtLeast,
            ));
            out.push(Check::new(
                format!("wplus_twistor_equality/{tag}"),
                "W⁺ = 2π(χ − χ⊥) iff σ⁺ ≡ 0",
                r.wplus.value,
                2.0 * PI * (chi - chip),
                1e-6 * r.wplus.value.max(1.0),
                Relation::EqualIff(meta.positive_spin),
            ));
        }
    }
    out
}

pub fn identities_suite(zoo: &[Evaluated], cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    let a = focus(V3::c((0.3, 0.1), (0.2, -0.5), (1.0, 0.0)));
    for (k, e) in zoo.iter().enumerate() {
        let meta = e.meta();
        let r = &e.report;
        let tag = &e.tag;
        let im = &e.surface;
        let pts = e.points(cfg, k as u64);
        out.push(Check::new(
            format!("w_is_mean_of_wplus_wminus/{tag}"),
            "W = (W⁺ + W⁻)/2",
            r.w.value - 0.5 * (r.wplus.value + r.wminus.value),
            0.0,
            1e-10 * r.w.value.abs().max(1.0),
            Relation::Abs,
        ));
        out.push(Check::new(
            format!("kahler_function_range/{tag}"),
            "|C| ≤ 1",
            r.max_abs_c,
            1.0,
            1e-12,
            Relation::AtMost,
        ));
        let pointwise: [(&str, &str, f64, fn(&crate::geometry::IdentityResiduals) -> f64); 6] = [
            ("ambient_sectional_curvature", "K̄ = 1 + 3C²", 1e-9, |x| x.kbar.abs()),
            ("ambient_normal_curvature", "K̄⊥ = 1 − 3C²", 1e-9, |x| x.kbarperp.abs()),
            ("sigma_plus_identity", "|H|² + K̄ − K̄⊥ = K − K⊥ + |σ⁺|²/16", 1e-8, |x| x.sigma_plus.abs()),
            ("sigma_minus_identity", "|H|² + K̄ + K̄⊥ = K + K⊥ + |σ⁻|²/16", 1e-8, |x| x.sigma_minus.abs()),
            ("kahler_angle_relations", "(Jv)ᵀ = CJ±v and (Jξ)⊥ = CJ⁺ξ = −CJ⁻ξ", 1e-9, |x| x.kahler_angle),
            ("frame_orthonormal", "(e₁, e₂, e₃, e₄) orthonormal and horizontal", 1e-10, |x| x.frame),
        ];
        for (name, basis, tol, pick) in pointwise {
            out.push(attempt(format!("{name}/{tag}"), basis, |id| {
                let m = max_over(&pts, |p| Ok(pick(&identity_residuals(&geometry_at(im, p)?))))?;
                Ok(Check::new(id, basis, m, 0.0, tol, Relation::Abs))
            }));
        }
        out.push(attempt(format!("twistor_condition_norms/{tag}"), "|σ±|² = 128|⟨σ(∂z, ∂z), ξ or ξ̄⟩|²", |id| {
            let m = max_over(&pts, |p| {
                let rec = geometry_at(im, p)?;
                let t = twistor_conditions_record(&rec);
                let dp = (rec.sigma_plus_sq - 128.0 * t.pos.abs().powi(2)).abs() / (1.0 + rec.sigma_plus_sq);
                let dm = (rec.sigma_minus_sq - 128.0 * t.neg.abs().powi(2)).abs() / (1.0 + rec.sigma_minus_sq);
                Ok(dp.max(dm))
            })?;
            Ok(Check::new(id, "|σ±|² = 128|⟨σ(∂z, ∂z), ξ or ξ̄⟩|²", m, 0.0, 1e-8, Relation::Abs))
        }));
        if e.spec.domain() == Domain::Sphere {
            out.push(attempt(format!("chart_independence/{tag}"), "scalars agree between overlapping charts", |id| {
                let m = max_over(&pts, |p| {
                    let a = geometry_at(im, p)?;
                    let b = geometry_at(im, &p.to_stereographic())?;
                    let d = |x: f64, y: f64| (x - y).abs() / (1.0 + x.abs());
                    Ok(d(a.k, b.k)
                        .max(d(a.kperp, b.kperp))
                        .max(d(a.c, b.c))
                        .max(d(a.h_sq(), b.h_sq()))
                        .max(d(a.sigma_plus_sq, b.sigma_plus_sq))
                        .max(d(a.sigma_minus_sq, b.sigma_minus_sq)))
                })?;
                Ok(Check::new(id, "scalars agree between overlapping charts", m, 0.0, 1e-9, Relation::Abs))
            }));
        }
        if meta.lagrangian {
            out.push(Check::new(
                format!("lagrangian_chi_equals_chi_perp/{tag}"),
                "C ≡ 0 forces χ = χ⊥",
                r.chi.raw - r.chi_perp.raw,
                0.0,
                1e-6,
                Relation::Abs,
            ));
            out.push(Check::new(format!("lagrangian_c_vanishes/{tag}"), "C ≡ 0", r.max_abs_c, 0.0, 1e-9, Relation::Abs));
        }
        if meta.positive_spin {
            out.push(attempt(format!("positive_spin_identities/{tag}"), "|∇C|² = (1 − C²)|H|², ΔC = 2C(3(1 − C²) − |H|²)", |id| {
                let m = max_over(&pts, |p| {
                    let s = spin_identity_residuals(im, p)?;
                    Ok(s.grad_res.abs().max(s.lap_res.abs()))
                })?;
                Ok(Check::new(id, "|∇C|² = (1 − C²)|H|², ΔC = 2C(3(1 − C²) − |H|²)", m, 0.0, 1e-6, Relation::Abs))
            }));
        }
        match e.spec {
            FamilySpec::Clifford => out.push(attempt(format!("cubic_form_constant/{tag}"), "holomorphic cubic form on a flat torus", |id| {
                let vals: Vec<C64> = pts.iter().map(|p| theta_cubic(im, p)).collect::<Result<_>>()?;
                let n = vals.len() as f64;
                let mean = vals.iter().fold(C64::zero(), |s, v| s + *v).scale(1.0 / n);
                let var = vals.iter().map(|v| (*v - mean).norm_sqr()).sum::<f64>() / n;
                Ok(Check::new(id, "holomorphic cubic form on a flat torus", var.sqrt() / mean.abs(), 0.0, 1e-8, Relation::Abs))
            })),
            FamilySpec::Whitney { .. } | FamilySpec::TotallyGeodesic => {
                out.push(attempt(format!("cubic_form_vanishes/{tag}"), "holomorphic cubic form on a sphere", |id| {
                    let m = max_over(&pts, |p| Ok(theta_cubic(im, p)?.abs()))?;
                    Ok(Check::new(id, "holomorphic cubic form on a sphere", m, 0.0, 1e-9, Relation::Abs))
                }))
            }
            _ => {}
        }
        out.push(attempt(format!("distance_gradient_split/{tag}"), "|∇h|² = 4h(1 − h) − |ξ|²", |id| {
            let m = max_over(&pts, |p| Ok(distance_checks(im, &a, p)?.gradient_split.abs()))?;
            Ok(Check::new(id, "|∇h|² = 4h(1 − h) − |ξ|²", m, 0.0, 1e-8, Relation::Abs))
        }));
        out.push(attempt(format!("log_distance_laplacian_bound/{tag}"), "Δ log(1 − h) ≥ −|H|² − 3 − C²", |id| {
            let m = min_over(&pts, |p| Ok(distance_checks(im, &a, p)?.log_laplacian_slack))?;
            Ok(Check::new(id, "Δ log(1 − h) ≥ −|H|² − 3 − C²", m, 0.0, 1e-5, Relation::AtLeast))
        }));
        if meta.lagrangian {
            out.push(attempt(format!("lagrangian_distance_split/{tag}"), "Lagrangian: Σ|(eᵢ, a)|² = 1 − h", |id| {
                let m = max_over(&pts, |p| Ok(distance_checks(im, &a, p)?.lagrangian_split.abs()))?;
                Ok(Check::new(id, "Lagrangian: Σ|(eᵢ, a)|² = 1 − h", m, 0.0, 1e-8, Relation::Abs))
            }));
        }
        out.extend(expectation_checks(&e.spec, r, &meta));
    }
    out
}

/// Integer-valued report entries.
const INTEGER_KEYS: [&str; 3] = ["degree_d", "chi", "chi_perp"];

/// Compares a report with the reference table of its family.
pub fn expectation_checks(spec: &FamilySpec, r: &InvariantReport, meta: &crate::zoo::SurfaceMeta) -> Vec<Check> {
    let tag = short_label(spec);
    let mut out = Vec::new();
    for ex in &meta.expected {
        let id = format!("expected_{}/{tag}", ex.key);
        if INTEGER_KEYS.contains(&ex.key) {
            let est = match ex.key {
                "degree_d" => &r.degree_d,
                "chi" => &r.chi,
                _ => &r.chi_perp,
            };
            let computed = est.snapped.map(|n| n as f64).unwrap_or(est.raw);
            let mut c = Check::new(id, ex.note, computed, ex.value, 0.0, Relation::Abs);
            if est.snapped.is_none() {
                c = c.with_note(format!("raw {:.6e} did not snap to an integer", est.raw));
            } else if c.status == Status::Fail {
                c = c.with_note(format!("raw value {:.12}", est.raw));
            }
            out.push(c);
        } else if let Some(v) = r.value(ex.key) {
            out.push(Check::new(id, ex.note, v, ex.value, 1e-6, Relation::Rel));
        }
    }
    out
}

pub fn twistor_suite(zoo: &[Evaluated], cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for (k, e) in zoo.iter().enumerate() {
        let meta = e.meta();
        if !meta.negative_spin {
            continue;
        }
        let tag = &e.tag;
        let im = &e.surface;
        let r = &e.report;
        let pts = e.points(cfg, 100 + k as u64);
        out.push(Check::new(
            format!("sigma_minus_vanishes/{tag}"),
            "σ⁻ ≡ 0",
            r.max_sigma_minus_sq,
            0.0,
            1e-9,
            Relation::AtMost,
        ));
        out.push(attempt(format!("section_property/{tag}"), "π⁻ of the lift is the surface", |id| {
            let m = max_over(&pts, |p| {
                let pair = numeric_lift(im, p)?;
                let phi = normalize(&im.eval(p.chart, p.x, p.y))?;
                Ok(project_pair(&pair)?.distance(&phi).max(pair.incidence()))
            })?;
            Ok(Check::new(id, "π⁻ of the lift is the surface", m, 0.0, 1e-8, Relation::Abs))
        }));
        let degrees = (|| -> Result<(f64, f64)> {
            let d1 = component_degree(im, 1, &e.grid)?;
            let d2 = component_degree(im, 2, &e.grid)?;
            Ok((d1.degree, d2.degree))
        })();
        match degrees {
            Ok((d1, d2)) => {
                for (key, d) in [("d1", d1), ("d2", d2)] {
                    if let Some(x) = meta.expected(key) {
                        out.push(Check::new(format!("lift_degree_{key}/{tag}"), "degree of a lift component", d, x, 1e-6, Relation::Abs));
                    }
                }
                out.push(Check::new(
                    format!("degree_is_d2_minus_d1/{tag}"),
                    "d = d₂ − d₁",
                    r.degree_d.raw,
                    d2 - d1,
                    1e-6,
                    Relation::Abs,
                ));
                out.push(Check::new(
                    format!("wminus_is_2pi_d1_plus_d2/{tag}"),
                    "W⁻ = 2π(d₁ + d₂)",
                    r.wminus.value,
                    2.0 * PI * (d1 + d2),
                    1e-6,
                    Relation::Rel,
                ));
            }
            Err(err) => out.push(Check::failed(format!("lift_degrees/{tag}"), "degrees of the lift components", &err)),
        }
        if !matches!(e.spec, FamilySpec::ComplexLine) {
            out.push(attempt(format!("lift_metric_factors/{tag}"), "gᵢ = ((|H|² + 2(1 ∓ C))/4) g", |id| {
                let m = max_over(&pts, |p| {
                    let x = lifted_metric_residual(im, p)?;
                    Ok(x.r1.max(x.r2))
                })?;
                Ok(Check::new(id, "gᵢ = ((|H|² + 2(1 ∓ C))/4) g", m, 0.0, 1e-6, Relation::Abs))
            }));
            out.push(attempt(format!("dual_curve/{tag}"), "second lift component is the dual curve iff superminimal", |id| {
                let d = dual_curve_residual(im, &e.grid)?;
                let c = if meta.minimal {
                    Check::new(id, "superminimal: second component is the dual curve", d.max_distance, 0.0, 1e-8, Relation::AtMost)
                } else {
                    Check::new(id, "not superminimal: second component is not the dual curve", d.max_distance, 0.01, 0.0, Relation::Above)
                };
                Ok(c)
            }));
        }
        if let Some(n) = meta.expected("n_zeros_H") {
            out.push(attempt(format!("h_zero_count/{tag}"), "number of zeros of H", |id| {
                let z = locate_h_zeros(im, &e.grid, 1e-5)?;
                let mut c = Check::new(id, "number of zeros of H", z.count() as f64, n, 0.0, Relation::Abs);
                if z.ambiguous {
                    c.status = Status::Fail;
                    c = c.with_note("zero clusters are ambiguous");
                }
                Ok(c)
            }));
        }
    }

    // lift convention, action and deformations
    out.push(attempt("lift_calibration/phi_ab(1,0)".into(), "lift of φ_{1,0} at z = 1 is ([1:1:0], [1:−1:1])", |id| {
        let s = make_surface(FamilySpec::PhiAb { a: C64::one(), b: C64::zero() })?;
        let pair = numeric_lift(&s, &ChartPoint { chart: crate::jet::Chart::Near, x: 1.0, y: 0.0 })?;
        let z = normalize(&V3::real(1.0, 1.0, 0.0))?;
        let w = normalize(&V3::real(1.0, -1.0, 1.0))?;
        let d = pair.z.distance(&z).max(pair.w.distance(&w));
        Ok(Check::new(id, "lift of φ_{1,0} at z = 1 is ([1:1:0], [1:−1:1])", d, 0.0, 1e-7, Relation::Abs))
    }));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let rand_c = |rng: &mut ChaCha8Rng| Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut pairs = Vec::new();
    let mut mats = Vec::new();
    for _ in 0..8 {
        let z = V3::new(rand_c(&mut rng), rand_c(&mut rng), rand_c(&mut rng));
        let w = V3::new(rand_c(&mut rng), rand_c(&mut rng), rand_c(&mut rng)).horizontal(&z.normalized());
        let mut m = mat::identity();
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = *x + rand_c(&mut rng).scale(0.1);
            }
        }
        let mut g = [[C64::zero(); 3]; 3];
        for row in g.iter_mut() {
            for x in row.iter_mut() {
                *x = rand_c(&mut rng);
            }
        }
        if let Ok(p) = TwistorPair::from_reps(&z, &w) {
            pairs.push(p);
        }
        mats.push((m, unitary_from(&g)));
    }
    out.push(attempt("pgl_incidence".into(), "the action preserves incidence", |id| {
        let mut m: f64 = 0.0;
        for (p, (a, _)) in pairs.iter().zip(&mats) {
            m = m.max(pgl_act(a, p)?.incidence());
        }
        Ok(Check::new(id, "the action preserves incidence", m, 0.0, 1e-12, Relation::Abs))
    }));
    out.push(attempt("pgl_identity".into(), "the identity acts trivially", |id| {
        let mut m: f64 = 0.0;
        for p in &pairs {
            let q = pgl_act(&mat::identity(), p)?;
            m = m.max(q.z.distance(&p.z)).max(q.w.distance(&p.w));
        }
        Ok(Check::new(id, "the identity acts trivially", m, 0.0, 1e-7, Relation::Abs))
    }));
    out.push(attempt("unitary_equivariance".into(), "π⁻([A]·pair) = [A]π⁻(pair) for unitary A", |id| {
        let mut m: f64 = 0.0;
        for (p, (_, u)) in pairs.iter().zip(&mats) {
            let lhs = project_pair(&pgl_act(u, p)?)?;
            let rhs = normalize(&project_pair(p)?.rep().apply(u))?;
            m = m.max(lhs.distance(&rhs));
        }
        Ok(Check::new(id, "π⁻([A]·pair) = [A]π⁻(pair) for unitary A", m, 0.0, 1e-7, Relation::Abs))
    }));
    let phi = FamilySpec::PhiAb { a: C64::one(), b: C64::zero() };
    out.push(attempt("deformation_wminus/phi_ab(1,0)".into(), "W⁻ is invariant under twistor deformation", |id| {
        let s = make_surface(phi)?;
        let d = deform_surface(&mats[0].0, s)?;
        let g = cfg.grid(Domain::Sphere)?;
        let r = invariant_report(&d, &g)?;
        Ok(Check::new(id, "W⁻ is invariant under twistor deformation", r.wminus.value, 4.0 * PI, 1e-5, Relation::Rel))
    }));
    out.push(attempt("unitary_deformation_isometric/phi_ab(1,0)".into(), "unitary deformations are isometries", |id| {
        let s = make_surface(phi)?;
        let d = deform_surface(&mats[0].1, s)?;
        let g = cfg.grid(Domain::Sphere)?;
        let (a, b) = (invariant_report(&s, &g)?, invariant_report(&d, &g)?);
        let mut m: f64 = 0.0;
        for ((_, x, _), (_, y, _)) in a.entries().iter().zip(b.entries().iter()) {
            m = m.max((x - y).abs());
        }
        Ok(Check::new(id, "unitary deformations are isometries", m, 0.0, 1e-8, Relation::Abs))
    }));
    out
}

pub fn variational_suite(zoo: &[Evaluated], cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    let pole = focus(V3::real(0.0, 0.0, 1.0));
    let generic = focus(V3::c((0.3, 0.1), (0.2, -0.5), (1.0, 0.0)));
    for (k, e) in zoo.iter().enumerate() {
        let meta = e.meta();
        let tag = &e.tag;
        let im = &e.surface;
        let pts = e.points(cfg, 200 + k as u64);
        if meta.minimal {
            out.push(attempt(format!("minimal_is_wminus_critical/{tag}"), "minimal surfaces are critical for W⁻", |id| {
                let m = max_over(&pts, |p| Ok(el_residual(im, p, Functional::Wminus)?.norm()))?;
                Ok(Check::new(id, "minimal surfaces are critical for W⁻", m, 0.0, 1e-8, Relation::Abs))
            }));
        }
        if meta.minimal && meta.positive_spin && !matches!(e.spec, FamilySpec::TotallyGeodesic | FamilySpec::Whitney { .. }) {
            out.push(attempt(format!("superminimal_is_wplus_critical/{tag}"), "positive-spin superminimal surfaces are critical for W⁺", |id| {
                let m = max_over(&pts, |p| Ok(el_residual(im, p, Functional::Wplus)?.norm()))?;
                Ok(Check::new(id, "positive-spin superminimal surfaces are critical for W⁺", m, 0.0, 1e-6, Relation::Abs))
            }));
        }
        if let FamilySpec::Whitney { t } = e.spec {
            out.push(attempt(format!("whitney_is_wminus_critical/{tag}"), "Whitney spheres are critical for W⁻", |id| {
                let m = max_over(&pts, |p| Ok(el_residual(im, p, Functional::Wminus)?.norm()))?;
                Ok(Check::new(id, "Whitney spheres are critical for W⁻", m, 0.0, 1e-3, Relation::Abs))
            }));
            if t > 0.0 {
                out.push(attempt(format!("distance_mean_curvature_identity/{tag}"), "H = ξ/(1 − h) for a = [0:0:1]", |id| {
                    let m = max_over(&pts, |p| Ok(whitney_identity_residual(im, &pole, p)?.norm()))?;
                    Ok(Check::new(id, "H = ξ/(1 − h) for a = [0:0:1]", m, 0.0, 1e-8, Relation::Abs))
                }));
            }
        }
        if matches!(e.spec, FamilySpec::TotallyGeodesic) {
            out.push(attempt(format!("distance_mean_curvature_identity/{tag}"), "H = ξ/(1 − h) for a = [0:0:1]", |id| {
                let m = max_over(&pts, |p| Ok(whitney_identity_residual(im, &pole, p)?.norm()))?;
                Ok(Check::new(id, "H = ξ/(1 − h) for a = [0:0:1]", m, 0.0, 1e-8, Relation::Abs))
            }));
        }
        if matches!(e.spec, FamilySpec::PhiAb { a, b } if a == C64::one() && b == C64::zero()) {
            out.push(attempt(format!("distance_mean_curvature_identity_fails/{tag}"), "H ≠ ξ/(1 − h) off the Whitney family", |id| {
                let m = max_over(&pts, |p| Ok(whitney_identity_residual(im, &generic, p)?.norm()))?;
                Ok(Check::new(id, "H ≠ ξ/(1 − h) off the Whitney family", m, 1e-3, 0.0, Relation::Above))
            }));
        }
        if let FamilySpec::FlatTorus { .. } = e.spec {
            out.push(attempt(format!("parallel_mean_curvature/{tag}"), "flat tori have parallel mean curvature", |id| {
                let m = max_over(&pts, |p| Ok(normal_laplacian_h(im, p, CONNECTION_STEP)?.norm()))?;
                Ok(Check::new(id, "flat tori have parallel mean curvature", m, 0.0, 1e-4, Relation::Abs))
            }));
            out.push(attempt(format!("first_variation/{tag}"), "dW⁻/dt = ∫⟨EL⁻, V⟩ dA", |id| {
                let f = NormalField {
                    center: ChartPoint::torus(1.0, 2.0),
                    width: 0.5,
                    amplitude: 1.0,
                    direction: NormalDirection::MeanCurvature,
                };
                let v = first_variation_check(im, &f, &e.grid, VARIATION_EPS)?;
                Ok(Check::new(id, "dW⁻/dt = ∫⟨EL⁻, V⟩ dA", v.integral, v.fd, 1e-3 * v.fd.abs().max(1.0), Relation::Abs))
            }));
        }
        if matches!(e.spec, FamilySpec::Whitney { t } if t == 1.0) {
            out.push(attempt(format!("connection_stencil_order/{tag}"), "EL residual decays as h²", |id| {
                let p = pts[0];
                let r1 = el_residual_with_step(im, &p, Functional::Wminus, 1e-2)?.norm();
                let r2 = el_residual_with_step(im, &p, Functional::Wminus, 5e-3)?.norm();
                Ok(Check::new(id, "EL residual decays as h²", r1 / r2, 4.0, 0.5, Relation::Abs))
            }));
            out.push(attempt(format!("first_variation_critical/{tag}"), "critical: both sides of the first variation vanish", |id| {
                let a = focus(V3::c((0.3, 0.1), (0.2, -0.5), (1.0, 0.0)));
                let f = NormalField {
                    center: ChartPoint::polar(1.0, 2.0),
                    width: 0.5,
                    amplitude: 1.0,
                    direction: NormalDirection::FocusGradient { focus: a, mix: [1.0, 0.5] },
                };
                let v = first_variation_check(im, &f, &e.grid, VARIATION_EPS)?;
                Ok(Check::new(id, "critical: both sides of the first variation vanish", v.fd.abs().max(v.integral.abs()), 0.0, 1e-4, Relation::Abs))
            }));
            out.push(attempt(format!("excision_integral/{tag}"), "∫Δ log(1 − h) dA → −4πμ", |id| {
                let (_, x) = excision_extrapolate(im, &pole, &[0.1, 0.05, 0.025], &e.grid)?;
                Ok(Check::new(id, "∫Δ log(1 − h) dA → −4πμ", x, -4.0 * PI * meta.mu as f64, 0.01, Relation::Rel))
            }));
            out.push(attempt(format!("preimage_count/{tag}"), "preimages of [0:0:1]", |id| {
                let p = preimage_count(im, &pole, &e.grid, 1e-3)?;
                Ok(Check::new(id, "preimages of [0:0:1]", p.count as f64, 2.0, 0.0, Relation::Abs))
            }));
        }
        if matches!(e.spec, FamilySpec::ComplexLine) {
            let a = focus(V3::real(1.0, 0.0, 0.0));
            out.push(attempt(format!("excision_integral/{tag}"), "∫Δ log(1 − h) dA → −4πμ", |id| {
                let (_, x) = excision_extrapolate(im, &a, &[0.1, 0.05, 0.025], &e.grid)?;
                Ok(Check::new(id, "∫Δ log(1 − h) dA → −4πμ", x, -4.0 * PI, 0.01, Relation::Rel))
            }));
            out.push(attempt(format!("preimage_count/{tag}"), "preimages of [1:0:0]", |id| {
                let p = preimage_count(im, &a, &e.grid, 1e-3)?;
                Ok(Check::new(id, "preimages of [1:0:0]", p.count as f64, 1.0, 0.0, Relation::Abs))
            }));
        }
        if matches!(e.spec, FamilySpec::DoublePoint) {
            out.push(attempt(format!("preimage_count/{tag}"), "preimages of [0:0:1]", |id| {
                let p = preimage_count(im, &pole, &e.grid, 1e-3)?;
                Ok(Check::new(id, "preimages of [0:0:1]", p.count as f64, 2.0, 0.0, Relation::Abs))
            }));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Check::new("x", "", 1.0, 1.0 + 1e-9, 1e-8, Relation::Abs).passed());
        assert!(!Check::new("x", "", 1.0, 2.0, 1e-8, Relation::Rel).passed());
        assert!(Check::new("x", "", 1.0, 1.0, 1e-8, Relation::EqualIff(true)).passed());
        assert!(!Check::new("x", "", 1.0, 1.0, 1e-8, Relation::EqualIff(false)).passed());
        assert!(Check::new("x", "", 0.9999, 1.0, 1e-3, Relation::AtLeast).passed());
        assert!(Check::new("x", "", 0.5, 0.01, 0.0, Relation::Above).passed());
        assert!(!Check::new("x", "", f64::NAN, 0.0, 1.0, Relation::Abs).passed());
    }

    #[test]
    fn suite_names_parse() {
        for s in ["bounds", "twistor", "variational", "identities", "all"] {
            assert_eq!(s.parse::<Suite>().unwrap().to_string(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(short_label(&FamilySpec::Psi { a: C64::one(), b: Cx::new(0.5, -0.5) }), "psi[1:0.5-0.5i]");
        assert_eq!(fmt_complex(Cx::new(0.0, 2.0)), "2i");
    }

    #[test]
    fn sample_points_are_reproducible() {
        let a = sample_points(Domain::Sphere, 3, 5);
        let b = sample_points(Domain::Sphere, 3, 5);
        assert_eq!(a, b);
        assert_ne!(a, sample_points(Domain::Sphere, 4, 5));
    }
}
