//! Structured sensing operators `D · Φ^B · R` and their accounting.

pub mod accounting;
pub mod bank;
pub mod kron;
pub mod linop;
pub mod permutation;
pub mod selection;
pub mod structured;

pub use accounting::{
    sampling_cost, separable_axis_config, storage_profile, SamplingCost, StorageMode,
    StorageProfile,
};
pub use bank::{OrthoBlock, OrthoBlockBank};
pub use kron::{kron_apply, KroneckerOperator};
pub use linop::{DenseOperator, LinearOperator, RowSubset};
pub use permutation::{compute_pq, gen_rrp, RestrictedPermutation};
pub use selection::RowSelection;
pub use structured::{build_operator, StructuredOperator, DENSIFY_LIMIT, OPERATOR_FORMAT};
