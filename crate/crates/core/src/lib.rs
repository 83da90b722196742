//! Metric Lie algebras given by structure constants.
//!
//! The crate computes left-invariant Ricci curvature (a Levi-Civita oracle
//! plus specialized nilpotent / unimodular-solvable / standard-split
//! formulas), solves the totally left-invariant m-quasi-Einstein equation
//! `Ric + ½ L_X g − (1/m) X♭⊗X♭ = λ g` in closed form, and checks the
//! structural statements that go with it on a catalog of example families.
//!
//! Structure constants are kept in the user's declared basis together with
//! a Gram matrix; curvature formulas run on a Cholesky-orthonormalized copy.

pub mod algebra;
pub mod catalog;
pub mod curvature;
pub mod document;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod qe;
pub mod scalar;

pub use algebra::{MetricLieAlgebra, SeriesKind, SeriesReport, SeriesVerdict, StructureTensor, Subspace};
pub use curvature::{CurvatureReport, Provenance};
pub use error::{Error, Result};
pub use qe::{QESolution, VerdictReport};
pub use scalar::Scalar;

/// Default tolerance for every floating-point predicate.
pub const DEFAULT_TOL: f64 = 1e-9;
