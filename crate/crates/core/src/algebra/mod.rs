//! Structure constants, metrics, and first-order Lie algebra computations.

mod metric;
mod ops;
mod series;
mod structure;
mod subspace;

pub use metric::MetricLieAlgebra;
pub use ops::{
    ad_matrix, derivation_residual, is_derivation, is_unimodular, is_unimodular_exact, jacobi_residual,
    jacobi_residual_exact, killing_form, mean_curvature_vector, metric_adjoint,
    metric_symmetric_part, normality_defect, symmetric_part, unimodularity_defect,
};
pub use series::{
    bracket_span, center, derived_algebra, graded_orthonormal_basis, is_nilpotent, is_solvable,
    nilradical_solvable, second_center, series, GradedBasis, SeriesKind, SeriesReport,
    SeriesVerdict,
};
pub use structure::StructureTensor;
pub use subspace::Subspace;
