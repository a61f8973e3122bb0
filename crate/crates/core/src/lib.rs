//! Willmore-type functionals of surfaces in the complex projective plane.
//!
//! Surfaces are given by homogeneous representatives over sphere or torus
//! charts ([`jet::Immersion`]). Pointwise geometry comes from exact second-order
//! jets ([`geometry`]); global invariants from tensor quadrature
//! ([`invariants`]); negative-spin surfaces are studied through their lifts to
//! the flag manifold ([`twistor`]); [`variational`] holds Euler–Lagrange
//! residuals and first-variation checks.

pub mod cp2;
pub mod cvec;
pub mod error;
pub mod geometry;
pub mod invariants;
pub mod jet;
pub mod optim;
pub mod quadrature;
pub mod scalar;
pub mod suites;
pub mod torus_opt;
pub mod twistor;
pub mod variational;
pub mod zoo;

pub use cp2::{HorizontalVector, ProjPoint};
pub use error::{GeomError, Result};
pub use jet::{Chart, ChartPoint, Domain, Immersion, Jet2};
pub use zoo::{make_surface, FamilySpec, Surface, SurfaceMeta};
