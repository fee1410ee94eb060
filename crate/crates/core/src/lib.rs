//! Explicit monotone finite-volume schemes for scalar conservation laws
//!
//! ```text
//! ∂t α + div(u f(α)) = S        (fv2d, fv3d, fvpoly)
//! ∂t α + div F(t, x, α) = S     (fvnl)
//! ```
//!
//! on nonuniform Cartesian grids in two and three dimensions and on general
//! polygonal meshes, instrumented with discrete bounded-variation seminorms,
//! error norms and convergence-rate bookkeeping.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The
//! `*64` aliases at the crate root fix the scalar to `f64`, which is what the
//! experiment harness uses.

pub mod error;
pub mod fv2d;
pub mod fv3d;
pub mod fvnl;
pub mod fvpoly;
pub mod harness;
pub mod mesh;
pub mod metrics;
pub mod physics;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type CartesianGrid2D64 = mesh::CartesianGrid2D<f64>;
pub type CartesianGrid3D64 = mesh::CartesianGrid3D<f64>;
pub type PolygonalMesh64 = mesh::PolygonalMesh<f64>;
pub type DiscreteField2D64 = fv2d::DiscreteField2D<f64>;
pub type DiscreteField3D64 = fv3d::DiscreteField3D<f64>;
pub type PolyField64 = fvpoly::PolyField<f64>;
pub type NormReport64 = metrics::NormReport<f64>;
pub type ConvergenceRow64 = harness::ConvergenceRow<f64>;

pub type CartesianGrid2D32 = mesh::CartesianGrid2D<f32>;
pub type DiscreteField2D32 = fv2d::DiscreteField2D<f32>;
