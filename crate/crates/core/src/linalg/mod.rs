//! Dense complex linear algebra substrate.

pub mod eig;
pub mod expm;
pub mod io;
pub mod matrix;
pub mod random;
pub mod svd;
pub mod tensor;
pub mod types;

pub use eig::{eigh, Eigen};
pub use expm::{matrix_exp, matrix_exp_series, unitary_action};
pub use matrix::{basis_vector, inner, norm, normalized, pauli, ComplexMatrix};
pub use random::{
    gaussian_matrix,
    gue, random_density, random_density_rank, random_hermitian, random_projector, random_state,
    random_unitary, RngSeed, SeededRng,
};
pub use svd::{least_squares, psd_nullity, psd_rank, subspace_basis, svd, Svd};
pub use tensor::{partial_trace, partial_trace_keep, reduced_from_pure, tensor, tensor_all, tensor_vec, Keep};
pub use types::{DensityMatrix, HermitianOperator, Projector, StateVector};

use crate::error::Result;
use crate::scalar::Real;

/// Eigendecomposition of a validated Hermitian operator.
pub fn hermitian_eig<T: Real>(op: &HermitianOperator<T>) -> Result<Eigen<T>> {
    eigh(op.matrix())
}
