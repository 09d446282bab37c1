//! Numerical tools for point singularities of the stationary incompressible
//! MHD equations
//!
//! ```text
//! −Δu + (u·∇)u − (B·∇)B + ∇p = 0,   −ΔB + (u·∇)B − (B·∇)u = 0,
//! div u = div B = 0
//! ```
//!
//! on a punctured ball: exact Landau solutions, stress-tensor flux integrals,
//! a pure-swirl contraction solver for the localized induction equation, and
//! scaling/decay diagnostics.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod fields;
pub mod flux;
pub mod geometry;
pub mod induction;
pub mod landau;
pub mod profiles;
pub mod testfields;

pub use error::{Error, Result};
pub use fields::{FieldTriple, ScalarField, SingularityBounds, VectorField};
pub use geometry::{Mat3, QuadratureRule, SphericalCoords, Vec3};
pub use landau::{LandauParam, LandauSolution};
