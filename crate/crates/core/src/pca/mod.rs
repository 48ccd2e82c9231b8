//! Derived structure available in every pca.

pub mod finite;
pub mod stdlib;

pub use finite::{check_pas_axioms, search_finite_pca, AxiomViolation, FiniteTable, SearchReport};
pub use stdlib::{converters_roundtrip, diverger, fixpoint, StdLib, StdLibError};
