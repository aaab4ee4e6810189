//! Bell-CHSH correlations, correlation boxes and Kochen-Specker colorability.

mod boxes;
mod chsh;
mod ks;

pub use boxes::{
    box_chsh, deterministic_box, is_nonsignaling, local_membership, pr_box, quantum_box, BoxFile, CorrelationBox,
    LocalMembership, Strategy, ViolatedInequality,
};
pub use chsh::{
    chsh_operator, chsh_value, classical_max, correlation_tensor, maximize_chsh, spin, ChshOptimum, ClassicalBound,
    DirectionsFile, MeasurementDirections,
};
pub use ks::{builtin_ks_set, ks_verify, KsContextSet, KsFile, KsStats, KsVerdict, BUILTIN_KS_SETS};
