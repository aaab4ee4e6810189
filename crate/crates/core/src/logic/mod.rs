//! Lattices of propositions: the concrete lattice of subspaces of `C^d` and
//! explicit finite orthocomplemented lattices.

mod finite;
mod subspace;

pub use finite::{builtin_lattice, lattice_audit, FiniteLattice, LatticeAudit, LatticeFile, BUILTIN_LATTICES};
pub use subspace::{random_subspace, DistributivityWitness, Subspace, SubspaceLattice};
