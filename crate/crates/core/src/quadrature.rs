//! Tensor quadrature over the parameter domains and deterministic summation.
//!
//! The torus uses the trapezoidal rule in both angles, which is spectrally
//! accurate for smooth periodic integrands. The sphere uses Gauss–Legendre in
//! the polar angle `θ` times the trapezoidal rule in the azimuth `ϕ`; the area
//! element carries a factor `sin θ`, so nothing is singular at the poles.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::jet::{ChartPoint, Domain};

pub const MIN_RESOLUTION: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct QuadratureGrid {
    pub domain: Domain,
    pub nodes: Vec<ChartPoint>,
    /// Weights for the parameter measure `dx dy` (torus) or `dθ dϕ` (sphere).
    pub weights: Vec<f64>,
    /// `(n_u, n_v)`; on the sphere `u` is the polar and `v` the azimuthal index.
    pub resolution: (usize, usize),
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Row-major index of node `(i, j)`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.resolution.1 + j
    }

    /// The grid with both resolutions halved (but not below the minimum).
    pub fn coarsened(&self) -> Result<QuadratureGrid> {
        let (u, v) = self.resolution;
        build_grid(self.domain, (u / 2).max(MIN_RESOLUTION), (v / 2).max(MIN_RESOLUTION))
    }

    /// Integrates `f(node) · weight` with fixed-order pairwise summation.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&ChartPoint) -> Result<f64> + Sync,
    {
        let vals = self.map(|p| f(p))?;
        let terms: Vec<f64> = vals.iter().zip(&self.weights).map(|(v, w)| v * w).collect();
        Ok(pairwise_sum(&terms))
    }

    /// Evaluates `f` at every node in parallel; results keep node order.
    /// Failures are tagged with the offending node.
    pub fn map<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&ChartPoint) -> Result<T> + Sync,
    {
        self.nodes
            .par_iter()
            .map(|p| {
                f(p).map_err(|e| match e {
                    e @ GeomError::Node { .. } => e,
                    e => GeomError::Node { node: *p, source: Box::new(e) },
                })
            })
            .collect()
    }
}

pub fn build_grid(domain: Domain, n_u: usize, n_v: usize) -> Result<QuadratureGrid> {
    if n_u < MIN_RESOLUTION || n_v < MIN_RESOLUTION {
        return Err(GeomError::Config(format!(
            "grid {n_u}x{n_v} too small (minimum {MIN_RESOLUTION} per direction)"
        )));
    }
    let mut nodes = Vec::with_capacity(n_u * n_v);
    let mut weights = Vec::with_capacity(n_u * n_v);
    match domain {
        Domain::Torus => {
            let (hu, hv) = (TAU / n_u as f64, TAU / n_v as f64);
            for i in 0..n_u {
                for j in 0..n_v {
                    nodes.push(ChartPoint::torus(i as f64 * hu, j as f64 * hv));
                    weights.push(hu * hv);
                }
            }
        }
        Domain::Sphere => {
            let (xs, ws) = gauss_legendre(n_u);
            let hv = TAU / n_v as f64;
            for (x, w) in xs.iter().zip(&ws) {
                // map [-1, 1] to θ ∈ [0, π]
                let theta = 0.5 * PI * (x + 1.0);
                for j in 0..n_v {
                    nodes.push(ChartPoint::polar(theta, j as f64 * hv));
                    weights.push(0.5 * PI * w * hv);
                }
            }
        }
    }
    Ok(QuadratureGrid { domain, nodes, weights, resolution: (n_u, n_v) })
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p, d)
}

/// Pairwise summation with a fixed split pattern: the result depends only on
/// the order of `xs`, never on scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    let (sa, sb) = rayon::join(|| pairwise_sum(a), || pairwise_sum(b));
    sa + sb
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn torus_weights() {
        let g = build_grid(Domain::Torus, 16, 16).unwrap();
        assert_eq!(g.len(), 256);
        let w = (TAU / 16.0).powi(2);
        assert!(g.weights.iter().all(|x| (*x - w).abs() < 1e-15));
        assert!((pairwise_sum(&g.weights) - TAU * TAU).abs() < 1e-12);
    }

    #[test]
    fn sphere_area() {
        let g = build_grid(Domain::Sphere, 32, 64).unwrap();
        let area = g.integrate(|p| Ok(p.x.sin())).unwrap();
        assert!((area - 4.0 * PI).abs() < 1e-12, "{area}");
        assert!((pairwise_sum(&g.weights) - 2.0 * PI * PI).abs() < 1e-11);
    }

    #[test]
    fn too_small_is_rejected() {
        assert!(matches!(build_grid(Domain::Torus, 4, 16), Err(GeomError::Config(_))));
    }

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(10);
        for deg in 0..20 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}: {q}");
        }
        let (x, _) = gauss_legendre(9);
        assert!(x[4].abs() < 1e-15);
    }

    #[test]
    fn doubling_improves_smooth_integrals() {
        let f = |p: &ChartPoint| {
            let s = p.sphere_point().unwrap();
            Ok((2.0 * s[0] + s[2]).exp() * p.x.sin())
        };
        let g8 = build_grid(Domain::Sphere, 8, 16).unwrap().integrate(f).unwrap();
        let g16 = build_grid(Domain::Sphere, 16, 32).unwrap().integrate(f).unwrap();
        let g32 = build_grid(Domain::Sphere, 32, 64).unwrap().integrate(f).unwrap();
        let (e8, e16) = ((g8 - g32).abs(), (g16 - g32).abs());
        assert!(e8 >= 10.0 * e16, "{e8} {e16}");
    }

    proptest! {
        #[test]
        fn pairwise_sum_is_order_deterministic(xs in proptest::collection::vec(-1e3f64..1e3, 0..2000)) {
            let a = pairwise_sum(&xs);
            let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| pairwise_sum(&xs));
            prop_assert_eq!(a.to_bits(), b.to_bits());
            let naive: f64 = xs.iter().sum();
            prop_assert!((a - naive).abs() <= 1e-9 * (1.0 + xs.iter().map(|x| x.abs()).sum::<f64>()));
        }
    }
}
