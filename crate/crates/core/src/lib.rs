//! Numerical engine for conformally invariant surface geometry. Surfaces
//! enter as parametrized maps into S^3 or S^4 (directly, or via a
//! Euclidean chart and inverse stereographic projection), are lifted to
//! the light cone of R^{n+1,1}, and carry from there a canonical moving
//! frame. The crate computes the frame, the conformally invariant
//! curvature data attached to it, residuals of the structure equations,
//! and a classification of the surface against known model geometries.

pub mod diffops;
pub mod error;
pub mod expr;
pub mod grid;
pub mod minkowski;
pub mod par;
pub mod pipeline;
pub mod report;
pub mod rigid;
pub mod surface;
pub mod verify;

pub use error::{Error, Result};
