//! Finite-dimensional quantum formalism workbench.
//!
//! Canonical (Hilbert space), algebraic (block C*-algebras and GNS) and
//! lattice-theoretic descriptions of small quantum systems, with entropy
//! inequalities, Bell/CHSH nonlocality, Kochen-Specker checking and a von
//! Neumann measurement model on top. Numerical kernels are generic over
//! [`Real`]; the aliases below fix the scalar to `f64`.

pub mod algebra;
pub mod cli;
pub mod decoherence;
pub mod entropy;
pub mod error;
pub mod gleason;
pub mod gns;
pub mod linalg;
pub mod logic;
pub mod nonlocal;
pub mod scalar;
pub mod tolerance;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tolerance::Tolerances;

pub type Complex = scalar::C<f64>;
pub type Matrix = linalg::ComplexMatrix<f64>;
pub type Density = linalg::DensityMatrix<f64>;
pub type Hermitian = linalg::HermitianOperator<f64>;
pub type Proj = linalg::Projector<f64>;
pub type Ket = linalg::StateVector<f64>;
pub type Element = algebra::AlgebraElement<f64>;
pub type State = algebra::AlgebraState<f64>;
pub type Gns = gns::GnsRepresentation<f64>;
pub type Multipartite = entropy::MultipartiteState<f64>;
pub type Subspace = logic::Subspace<f64>;
