//! Minimization of `W⁻` over the flat tori `|zᵢ|² = rᵢ²`.
//!
//! The open simplex `{(r₁², r₂², r₃²)}` is parametrized by `u ∈ ℝ²` through
//! `rᵢ² = e^{uᵢ}/(1 + e^{u₁} + e^{u₂})` (with `u₃ = 0`), so every iterate is an
//! admissible torus.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::invariants::integrate_geometry;
use crate::jet::Domain;
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::quadrature::build_grid;
use crate::zoo::{make_surface, FamilySpec};

/// The flat-torus integrand is constant, so a small grid is exact to roundoff.
pub const TORUS_GRID: usize = 16;

pub fn weights_from_params(u: &[f64]) -> [f64; 3] {
    let m = u[0].max(u[1]).max(0.0);
    let e = [(u[0] - m).exp(), (u[1] - m).exp(), (-m).exp()];
    let s = e[0] + e[1] + e[2];
    [e[0] / s, e[1] / s, e[2] / s]
}

pub fn params_from_weights(w: [f64; 3]) -> Result<[f64; 2]> {
    if w.iter().any(|x| !(*x > 0.0)) {
        return Err(GeomError::Config(format!("weights {w:?} must be positive")));
    }
    Ok([(w[0] / w[2]).ln(), (w[1] / w[2]).ln()])
}

/// `W⁻` of the flat torus with squared radii proportional to `w`.
pub fn flat_torus_wminus(w: [f64; 3]) -> Result<f64> {
    let r = [w[0].sqrt(), w[1].sqrt(), w[2].sqrt()];
    let s = make_surface(FamilySpec::FlatTorus { r })?;
    let grid = build_grid(Domain::Torus, TORUS_GRID, TORUS_GRID)?;
    integrate_geometry(&s, &grid, |rec| rec.h_sq() + 2.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct TorusOptimum {
    pub start: [f64; 3],
    /// `(r₁², r₂², r₃²)` at the minimum found.
    pub argmin: [f64; 3],
    pub min_wminus: f64,
    pub start_wminus: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub trace: Vec<f64>,
}

/// Nelder–Mead from the squared radii `start` (normalized to sum 1).
pub fn optimize_flat_torus(start: [f64; 3], step: f64, opts: NelderMeadOptions) -> Result<TorusOptimum> {
    let s: f64 = start.iter().sum();
    let start = [start[0] / s, start[1] / s, start[2] / s];
    let u0 = params_from_weights(start)?;
    let start_wminus = flat_torus_wminus(start)?;
    let res = nelder_mead(|u| flat_torus_wminus(weights_from_params(u)).unwrap_or(f64::NAN), &u0, step, opts);
    Ok(TorusOptimum {
        start,
        argmin: weights_from_params(&res.x),
        min_wminus: res.f,
        start_wminus,
        iterations: res.iterations,
        evaluations: res.evaluations,
        converged: res.converged,
        trace: res.trace,
    })
}

pub fn default_options() -> NelderMeadOptions {
    NelderMeadOptions { max_iter: 2000, f_tol: 1e-13, x_tol: 1e-9 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parametrization_round_trips() {
        let w = [0.5, 0.3, 0.2];
        let u = params_from_weights(w).unwrap();
        let back = weights_from_params(&u);
        for k in 0..3 {
            assert!((back[k] - w[k]).abs() < 1e-15);
        }
        let far = weights_from_params(&[800.0, -800.0]);
        assert!(far.iter().all(|x| x.is_finite()));
        assert!(params_from_weights([0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn clifford_is_stationary() {
        let r = optimize_flat_torus([1.0, 1.0, 1.0], 1e-3, default_options()).unwrap();
        assert!(r.min_wminus <= r.start_wminus);
        assert!((r.start_wminus - r.min_wminus).abs() < 1e-12);
    }
}
