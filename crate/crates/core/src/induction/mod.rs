//! Localized induction equation in the pure-swirl class, solved by Picard
//! iteration on a spherical-shell grid.

mod banded;
mod grid;
mod operators;
mod problem;
mod solver;

pub use banded::{BandedCholesky, SymmetricBanded};
pub use grid::{AnnulusGrid, GridField, GridScalar};
pub use operators::{
    advection_operator, localize_cutoff, mhd_residual, swirl_operator, LocalizationForcing,
    LocalizedField, MhdResidual, SampledVelocity,
};
pub use problem::{contraction_threshold, landau_background, InductionProblem, ThresholdReport};
pub use solver::{
    contraction_iterate, manufactured_problem, poisson_dirichlet_solve, run_contraction,
    IterationHistory, IterationOptions, IterationOutcome, ShellBoundary, StopReason, SwirlPoisson,
    NON_CONTRACTING_STEPS,
};
