//! Global invariants: the functionals `W`, `W⁺`, `W⁻`, area, degree, Euler
//! characteristics of the tangent and normal bundles; zeros of `H`; the
//! excision integral of `Δ log(1 − h)`; preimage probes.

use std::f64::consts::PI;

use serde::Serialize;

use crate::cp2::{dist_value, ProjPoint};
use crate::cvec::CVec3;
use crate::error::{GeomError, Result};
use crate::geometry::{geometry_at, GeometryRecord};
use crate::jet::{ChartPoint, Domain, Immersion};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::quadrature::{pairwise_sum, QuadratureGrid};
use crate::scalar::{HyperDual, Real};

/// Integer invariants are snapped only when within `max(10 · error, SNAP_FLOOR)`
/// of an integer.
pub const SNAP_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// `|I(grid) − I(grid/2)|`.
    pub error: f64,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct IntegerEstimate {
    pub raw: f64,
    pub error: f64,
    pub snapped: Option<i64>,
}

impl IntegerEstimate {
    fn new(raw: f64, coarse: f64) -> Self {
        let error = (raw - coarse).abs();
        let nearest = raw.round();
        let snapped = if (raw - nearest).abs() < (10.0 * error).max(SNAP_FLOOR) {
            Some(nearest as i64)
        } else {
            None
        };
        IntegerEstimate { raw, error, snapped }
    }

    pub fn is(&self, n: i64) -> bool {
        self.snapped == Some(n)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub resolution: (usize, usize),
    pub area: Estimate,
    #[serde(rename = "W")]
    pub w: Estimate,
    #[serde(rename = "Wplus")]
    pub wplus: Estimate,
    #[serde(rename = "Wminus")]
    pub wminus: Estimate,
    /// `∫ (|H|² + 3 + C²) dA`, bounded below by `4πμ`.
    pub multiplicity_integral: Estimate,
    pub degree_d: IntegerEstimate,
    pub chi: IntegerEstimate,
    pub chi_perp: IntegerEstimate,
    /// `χ − χ⊥`.
    pub adjunction: IntegerEstimate,
    pub min_abs_h: f64,
    pub max_abs_h: f64,
    pub max_abs_c: f64,
    pub min_c: f64,
    pub max_c: f64,
    pub max_sigma_plus_sq: f64,
    pub max_sigma_minus_sq: f64,
}

impl InvariantReport {
    /// `(name, value, error)` rows in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, f64, f64)> {
        let i = |e: &IntegerEstimate| (e.snapped.map(|n| n as f64).unwrap_or(e.raw), e.error);
        let mut v = vec![
            ("area", self.area.value, self.area.error),
            ("W", self.w.value, self.w.error),
            ("Wplus", self.wplus.value, self.wplus.error),
            ("Wminus", self.wminus.value, self.wminus.error),
            ("multiplicity_integral", self.multiplicity_integral.value, self.multiplicity_integral.error),
        ];
        for (name, e) in [
            ("degree_d", &self.degree_d),
            ("chi", &self.chi),
            ("chi_perp", &self.chi_perp),
            ("adjunction", &self.adjunction),
        ] {
            let (val, err) = i(e);
            v.push((name, val, err));
        }
        v.extend([
            ("min_abs_H", self.min_abs_h, 0.0),
            ("max_abs_H", self.max_abs_h, 0.0),
            ("max_abs_C", self.max_abs_c, 0.0),
            ("min_C", self.min_c, 0.0),
            ("max_C", self.max_c, 0.0),
            ("max_sigma_plus_sq", self.max_sigma_plus_sq, 0.0),
            ("max_sigma_minus_sq", self.max_sigma_minus_sq, 0.0),
        ]);
        v
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.entries().into_iter().find(|e| e.0 == name).map(|e| e.1)
    }
}

/// Geometric data at one node with the quadrature weight folded into `da`.
#[derive(Clone, Copy, Debug)]
struct NodeSample {
    da: f64,
    h2: f64,
    c: f64,
    k: f64,
    kperp: f64,
    sp: f64,
    sm: f64,
}

struct Integrals {
    area: f64,
    w: f64,
    wplus: f64,
    wminus: f64,
    mult: f64,
    degree: f64,
    chi: f64,
    chi_perp: f64,
}

/// Parameter-measure density of the area element at a node.
pub fn area_element(rec: &GeometryRecord) -> f64 {
    rec.area_density()
}

fn sample<I: Immersion>(im: &I, grid: &QuadratureGrid) -> Result<Vec<NodeSample>> {
    let recs = grid.map(|p| geometry_at(im, p))?;
    Ok(recs
        .iter()
        .zip(&grid.weights)
        .map(|(r, w)| NodeSample {
            da: w * area_element(r),
            h2: r.h_sq(),
            c: r.c,
            k: r.k,
            kperp: r.kperp,
            sp: r.sigma_plus_sq,
            sm: r.sigma_minus_sq,
        })
        .collect())
}

fn integrate_samples(s: &[NodeSample]) -> Integrals {
    let sum = |f: &dyn Fn(&NodeSample) -> f64| {
        let v: Vec<f64> = s.iter().map(|n| f(n) * n.da).collect();
        pairwise_sum(&v)
    };
    Integrals {
        area: sum(&|_| 1.0),
        w: sum(&|n| n.h2 + 1.0 + 3.0 * n.c * n.c),
        wplus: sum(&|n| n.h2 + 6.0 * n.c * n.c),
        wminus: sum(&|n| n.h2 + 2.0),
        mult: sum(&|n| n.h2 + 3.0 + n.c * n.c),
        degree: sum(&|n| n.c) / PI,
        chi: sum(&|n| n.k) / (2.0 * PI),
        chi_perp: sum(&|n| n.kperp) / (2.0 * PI),
    }
}

/// Integrates the pointwise invariants over `grid`; errors come from
/// re-integrating on the grid with both resolutions halved.
pub fn invariant_report<I: Immersion>(im: &I, grid: &QuadratureGrid) -> Result<InvariantReport> {
    check_domain(im, grid)?;
    let fine = sample(im, grid)?;
    let coarse_grid = grid.coarsened()?;
    let coarse = sample(im, &coarse_grid)?;
    let (a, b) = (integrate_samples(&fine), integrate_samples(&coarse));
    let est = |x: f64, y: f64| Estimate { value: x, error: (x - y).abs() };

    let mut min_abs_h = f64::INFINITY;
    let mut max_abs_h: f64 = 0.0;
    let mut min_c = f64::INFINITY;
    let mut max_c = f64::NEG_INFINITY;
    let mut max_sp: f64 = 0.0;
    let mut max_sm: f64 = 0.0;
    for n in &fine {
        let h = n.h2.sqrt();
        min_abs_h = min_abs_h.min(h);
        max_abs_h = max_abs_h.max(h);
        min_c = min_c.min(n.c);
        max_c = max_c.max(n.c);
        max_sp = max_sp.max(n.sp);
        max_sm = max_sm.max(n.sm);
    }
    Ok(InvariantReport {
        resolution: grid.resolution,
        area: est(a.area, b.area),
        w: est(a.w, b.w),
        wplus: est(a.wplus, b.wplus),
        wminus: est(a.wminus, b.wminus),
        multiplicity_integral: est(a.mult, b.mult),
        degree_d: IntegerEstimate::new(a.degree, b.degree),
        chi: IntegerEstimate::new(a.chi, b.chi),
        chi_perp: IntegerEstimate::new(a.chi_perp, b.chi_perp),
        adjunction: IntegerEstimate::new(a.chi - a.chi_perp, b.chi - b.chi_perp),
        min_abs_h,
        max_abs_h,
        max_abs_c: min_c.abs().max(max_c.abs()),
        min_c,
        max_c,
        max_sigma_plus_sq: max_sp,
        max_sigma_minus_sq: max_sm,
    })
}

/// `∫ f dA` over the surface for a pointwise function of the geometry.
pub fn integrate_geometry<I, F>(im: &I, grid: &QuadratureGrid, f: F) -> Result<f64>
where
    I: Immersion,
    F: Fn(&GeometryRecord) -> f64 + Sync,
{
    check_domain(im, grid)?;
    grid.integrate(|p| {
        let r = geometry_at(im, p)?;
        Ok(f(&r) * area_element(&r))
    })
}

fn check_domain<I: Immersion>(im: &I, grid: &QuadratureGrid) -> Result<()> {
    if im.domain() != grid.domain {
        return Err(GeomError::Config(format!(
            "{:?} grid used for an immersion of a {:?}",
            grid.domain,
            im.domain()
        )));
    }
    Ok(())
}

/// Distance between two points of the parameter domain: chordal on the round
/// sphere, flat periodic on the torus.
pub fn domain_distance(a: &ChartPoint, b: &ChartPoint) -> f64 {
    match (a.sphere_point(), b.sphere_point()) {
        (Some(p), Some(q)) => ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt(),
        _ => {
            let per = |d: f64| {
                let d = d.rem_euclid(std::f64::consts::TAU);
                d.min(std::f64::consts::TAU - d)
            };
            per(a.x - b.x).hypot(per(a.y - b.y))
        }
    }
}

/// Indices of grid neighbours of node `(i, j)`: periodic in both directions on
/// the torus, in the azimuth only on the sphere.
fn neighbours(grid: &QuadratureGrid, i: usize, j: usize) -> Vec<usize> {
    let (nu, nv) = grid.resolution;
    let mut out = Vec::with_capacity(8);
    for di in [-1i64, 0, 1] {
        for dj in [-1i64, 0, 1] {
            if di == 0 && dj == 0 {
                continue;
            }
            let ii = i as i64 + di;
            let ii = match grid.domain {
                Domain::Torus => ii.rem_euclid(nu as i64),
                Domain::Sphere if (0..nu as i64).contains(&ii) => ii,
                Domain::Sphere => continue,
            };
            let jj = (j as i64 + dj).rem_euclid(nv as i64);
            out.push(grid.index(ii as usize, jj as usize));
        }
    }
    out
}

/// Nodes at which `vals` is a (non-strict) local minimum, thinned so that no two
/// kept nodes are within `radius` of each other (the lower value wins).
fn local_minima(grid: &QuadratureGrid, vals: &[f64], radius: f64) -> Vec<usize> {
    let (nu, nv) = grid.resolution;
    let mut cands: Vec<usize> = Vec::new();
    for i in 0..nu {
        for j in 0..nv {
            let k = grid.index(i, j);
            if !vals[k].is_finite() {
                continue;
            }
            if neighbours(grid, i, j).iter().all(|&m| vals[k] <= vals[m] || !vals[m].is_finite()) {
                cands.push(k);
            }
        }
    }
    cands.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut kept: Vec<usize> = Vec::new();
    for k in cands {
        if kept.iter().all(|&m| domain_distance(&grid.nodes[k], &grid.nodes[m]) > radius) {
            kept.push(k);
        }
    }
    kept
}

fn grid_spacing(grid: &QuadratureGrid) -> f64 {
    match grid.domain {
        Domain::Torus => std::f64::consts::TAU / grid.resolution.0.min(grid.resolution.1) as f64,
        Domain::Sphere => PI / grid.resolution.0 as f64,
    }
}

/// Minimizes `f` near `start` over the chart that contains it (sphere points
/// are first moved to the stereographic chart with `|coords| ≤ 1`).
fn refine(start: &ChartPoint, step: f64, f: impl Fn(&ChartPoint) -> Result<f64>) -> (ChartPoint, f64, bool) {
    let base = start.to_stereographic();
    let opts = NelderMeadOptions { max_iter: 600, f_tol: 1e-24, x_tol: 1e-11 };
    let r = nelder_mead(|x| f(&base.offset(x[0], x[1])).unwrap_or(f64::INFINITY), &[0.0, 0.0], step, opts);
    let p = match base.domain() {
        Domain::Torus => ChartPoint::torus(base.x + r.x[0], base.y + r.x[1]),
        Domain::Sphere => base.offset(r.x[0], r.x[1]).to_stereographic(),
    };
    (p, r.f, r.converged)
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroSearch {
    /// Refined zeros with `|H| < tol`, one per cluster.
    pub zeros: Vec<ChartPoint>,
    pub zero_values: Vec<f64>,
    /// Local minima of `|H|` that did not refine below `tol`, with the value reached.
    pub rejected: Vec<(ChartPoint, f64)>,
    /// Two refined zeros closer than the clustering scale but not merged.
    pub ambiguous: bool,
    /// `|H| < tol` at every node: the surface is minimal and no zeros are listed.
    pub identically_zero: bool,
}

impl ZeroSearch {
    pub fn count(&self) -> usize {
        self.zeros.len()
    }
}

/// Zeros of the mean curvature vector: coarse scan of `|H|` over the grid,
/// Nelder–Mead refinement of each local minimum, clustering in the domain.
/// Counts geometric zeros (without order).
pub fn locate_h_zeros<I: Immersion>(im: &I, grid: &QuadratureGrid, tol: f64) -> Result<ZeroSearch> {
    if !(tol > 0.0) {
        return Err(GeomError::Config("zero tolerance must be positive".into()));
    }
    check_domain(im, grid)?;
    let vals = grid.map(|p| Ok(geometry_at(im, p).map(|r| r.h_sq().sqrt()).unwrap_or(f64::NAN)))?;
    if vals.iter().all(|v| *v < tol) {
        return Ok(ZeroSearch {
            zeros: Vec::new(),
            zero_values: Vec::new(),
            rejected: Vec::new(),
            ambiguous: false,
            identically_zero: true,
        });
    }
    let spacing = grid_spacing(grid);
    let cands = local_minima(grid, &vals, 2.0 * spacing);
    let hsq = |q: &ChartPoint| geometry_at(im, q).map(|r| r.h_sq());
    let mut zeros: Vec<(ChartPoint, f64)> = Vec::new();
    let mut rejected = Vec::new();
    let mut ambiguous = false;
    for k in cands {
        let (p, f, _) = refine(&grid.nodes[k], 0.5 * spacing, hsq);
        let h = f.max(0.0).sqrt();
        if h >= tol {
            rejected.push((p, h));
            continue;
        }
        let near = zeros.iter().map(|(q, _)| domain_distance(&p, q)).fold(f64::INFINITY, f64::min);
        if near < 1e-4 {
            continue;
        }
        if near < 1e-2 {
            ambiguous = true;
        }
        zeros.push((p, h));
    }
    Ok(ZeroSearch {
        zero_values: zeros.iter().map(|z| z.1).collect(),
        zeros: zeros.into_iter().map(|z| z.0).collect(),
        rejected,
        ambiguous,
        identically_zero: false,
    })
}

/// `1 − h` and `Δ log(1 − h)` at `p`, where `h = f∘φ` is the pulled-back
/// distance function of the focus `a`. The Laplacian is exact: `log(1 − h)` is
/// differentiated with hyper-dual numbers and contracted with the induced
/// metric and its Christoffel symbols.
pub fn log_distance_laplacian<I: Immersion>(im: &I, a: &ProjPoint, p: &ChartPoint) -> Result<(f64, f64)> {
    let rec = geometry_at(im, p)?;
    let f = im.eval(p.chart, HyperDual::var_x(p.x), HyperDual::var_y(p.y));
    let av = CVec3::from_v3(a.rep());
    let one_minus_h = -dist_value(&av, &f) + 1.0;
    if !(one_minus_h.v > 0.0) {
        return Err(GeomError::Domain(format!("{p} is a preimage of the focus")));
    }
    let u = one_minus_h.ln();
    let lap = rec.laplacian_from_partials([u.dx, u.dy], [[u.dxx, u.dxy], [u.dxy, u.dyy]]);
    Ok((one_minus_h.v, lap))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExcisionResult {
    pub eps: f64,
    /// `∫ Δ log(1 − h) dA` over nodes with `1 − h > eps²`.
    pub value: f64,
    pub excluded_nodes: usize,
    pub min_one_minus_h: f64,
    /// Whether any node fell inside the excised region.
    pub attained: bool,
}

/// Integral of `Δ log(1 − h)` over the surface with the set `1 − h ≤ eps²`
/// (geodesic balls of radius `arcsin eps` about the focus) removed.
pub fn excised_log_integral<I: Immersion>(
    im: &I,
    a: &ProjPoint,
    eps: f64,
    grid: &QuadratureGrid,
) -> Result<ExcisionResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(GeomError::Config(format!("excision radius {eps} outside (0, 1)")));
    }
    check_domain(im, grid)?;
    let cut = eps * eps;
    let vals = grid.map(|p| {
        let rec = geometry_at(im, p)?;
        match log_distance_laplacian(im, a, p) {
            Ok((omh, lap)) => Ok((omh, lap * area_element(&rec))),
            Err(GeomError::Domain(_)) => Ok((0.0, 0.0)),
            Err(e) => Err(e),
        }
    })?;
    let mut terms = Vec::with_capacity(vals.len());
    let mut excluded = 0;
    let mut min_omh = f64::INFINITY;
    for ((omh, v), w) in vals.iter().zip(&grid.weights) {
        min_omh = min_omh.min(*omh);
        if *omh > cut {
            terms.push(v * w);
        } else {
            excluded += 1;
            terms.push(0.0);
        }
    }
    Ok(ExcisionResult {
        eps,
        value: pairwise_sum(&terms),
        excluded_nodes: excluded,
        min_one_minus_h: min_omh,
        attained: excluded > 0,
    })
}

/// Polynomial extrapolation to `eps = 0` through the excision values at the given radii.
pub fn excision_extrapolate<I: Immersion>(
    im: &I,
    a: &ProjPoint,
    radii: &[f64],
    grid: &QuadratureGrid,
) -> Result<(Vec<ExcisionResult>, f64)> {
    let rs: Vec<ExcisionResult> =
        radii.iter().map(|&e| excised_log_integral(im, a, e, grid)).collect::<Result<_>>()?;
    let xs: Vec<f64> = rs.iter().map(|r| r.eps).collect();
    let ys: Vec<f64> = rs.iter().map(|r| r.value).collect();
    Ok((rs, extrapolate_to_zero(&xs, &ys)))
}

/// Value at 0 of the interpolating polynomial through `(xs, ys)` (Neville).
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
    }
    p.first().copied().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, Serialize)]
pub struct PreimageProbe {
    pub count: usize,
    pub points: Vec<ChartPoint>,
    /// Smallest `1 − h` reached at each point.
    pub residuals: Vec<f64>,
    pub ambiguous: bool,
}

/// Counts distinct points of the domain mapped to `a`: local maxima of
/// `h = f∘φ` on the grid are refined and kept when `h > 1 − tol²`.
pub fn preimage_count<I: Immersion>(
    im: &I,
    a: &ProjPoint,
    grid: &QuadratureGrid,
    tol: f64,
) -> Result<PreimageProbe> {
    if !(tol > 0.0 && tol < 0.1) {
        return Err(GeomError::Config(format!("preimage tolerance {tol} outside (0, 0.1)")));
    }
    check_domain(im, grid)?;
    let av = *a.rep();
    let omh = move |q: &ChartPoint| -> Result<f64> {
        let f = im.eval(q.chart, q.x, q.y);
        let n = f.norm_sqr();
        if !(n > 0.0) || !n.is_finite() {
            return Err(GeomError::Degenerate(*q));
        }
        Ok(1.0 - dist_value(&av, &f))
    };
    let vals = grid.map(|p| Ok(omh(p).unwrap_or(f64::NAN)))?;
    let spacing = grid_spacing(grid);
    let cands = local_minima(grid, &vals, 2.0 * spacing);
    let mut pts: Vec<(ChartPoint, f64)> = Vec::new();
    let mut ambiguous = false;
    let cluster = 1e-4;
    for k in cands {
        let (p, f, _) = refine(&grid.nodes[k], 0.5 * spacing, omh);
        if f >= tol * tol {
            continue;
        }
        let near = pts.iter().map(|(q, _)| domain_distance(&p, q)).fold(f64::INFINITY, f64::min);
        if near < cluster {
            continue;
        }
        if near < 100.0 * cluster {
            ambiguous = true;
        }
        pts.push((p, f));
    }
    Ok(PreimageProbe {
        count: pts.len(),
        residuals: pts.iter().map(|p| p.1).collect(),
        points: pts.into_iter().map(|p| p.0).collect(),
        ambiguous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cp2::normalize;
    use crate::cvec::V3;
    use crate::quadrature::build_grid;
    use crate::zoo::{make_surface, FamilySpec};

    #[test]
    fn complex_line_values() {
        let s = make_surface(FamilySpec::ComplexLine).unwrap();
        let g = build_grid(Domain::Sphere, 48, 96).unwrap();
        let r = invariant_report(&s, &g).unwrap();
        assert!((r.area.value - PI).abs() < 1e-10, "{}", r.area.value);
        assert!((r.wminus.value - 2.0 * PI).abs() < 1e-9);
        assert!(r.degree_d.is(1) && r.chi.is(2) && r.chi_perp.is(-1));
    }

    #[test]
    fn clifford_values() {
        let s = make_surface(FamilySpec::Clifford).unwrap();
        let g = build_grid(Domain::Torus, 16, 16).unwrap();
        let r = invariant_report(&s, &g).unwrap();
        let area = 4.0 * PI * PI / (3.0 * 3f64.sqrt());
        assert!((r.area.value - area).abs() < 1e-12);
        assert!(r.chi.is(0) && r.chi_perp.is(0) && r.degree_d.is(0));
    }

    #[test]
    fn wrong_domain_is_a_config_error() {
        let s = make_surface(FamilySpec::Clifford).unwrap();
        let g = build_grid(Domain::Sphere, 8, 8).unwrap();
        assert!(matches!(invariant_report(&s, &g), Err(GeomError::Config(_))));
    }

    #[test]
    fn neville_recovers_quadratics() {
        let xs = [0.1, 0.05, 0.025];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 5.0 * x * x).collect();
        assert!((extrapolate_to_zero(&xs, &ys) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn line_preimage_and_excision() {
        let s = make_surface(FamilySpec::ComplexLine).unwrap();
        let g = build_grid(Domain::Sphere, 48, 96).unwrap();
        let a = normalize(&V3::c((1.0, 0.0), (0.5, 0.5), (0.0, 0.0))).unwrap();
        let probe = preimage_count(&s, &a, &g, 1e-3).unwrap();
        assert_eq!(probe.count, 1);
        // a focus far from the line: no excision, integral of a Laplacian vanishes
        let far = normalize(&V3::c((0.2, 0.0), (0.0, 0.1), (1.0, 0.0))).unwrap();
        let e = excised_log_integral(&s, &far, 0.05, &g).unwrap();
        assert!(!e.attained && e.value.abs() < 1e-8, "{e:?}");
    }
}
