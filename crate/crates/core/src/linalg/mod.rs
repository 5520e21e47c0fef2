//! Dense complex linear algebra and bipartite transforms.

mod basis;
mod bipartite;
mod matrix;
mod spectral;

pub use basis::{
    canonical_basis, correlation_matrix_canonical, gell_mann_generators, realignment_trace_norm,
    CorrelationMatrix, HermitianBasis, BASIS_CONVENTION,
};
pub use bipartite::{
    partial_trace, partial_transpose, realignment, reduction_operator_a, reduction_operator_b,
    sparse_vector, DimPair, Subsystem,
};
pub use matrix::{kron, ComplexMatrix, MatrixLiteral, C64, HERMITIAN_TOL, ONE, ZERO};
pub use spectral::{
    determinant, hermitian_eigen, hermitian_spectrum, is_positive_semidefinite, lambda_max,
    lambda_min, real_determinant, singular_values, top_eigenpair, trace_norm, EigenDecomposition,
    Spectrum,
};
