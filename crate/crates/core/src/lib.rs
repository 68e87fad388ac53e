//! Structured random sensing operators for compressive sensing.
//!
//! The crate builds block-based (BCS), block structurally random (BSRM),
//! restricted structural random (RSRM) and fully random (GRM) sensing
//! operators, measures their restricted-isometry behaviour, recovers sparse
//! signals and images from their measurements, and quantifies how evenly
//! measurements carry information.

pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod io;
pub mod operators;
pub mod recon;
pub mod rip;
pub mod rng;
pub mod security;
pub mod signals;

pub use config::{Normalization, Scheme, SchemeConfig, SeedTriple};
pub use error::{Error, Result};
pub use operators::{build_operator, KroneckerOperator, LinearOperator, StructuredOperator};
