//! Computability inside partial combinatory algebras.
//!
//! The crate compiles λ*-terms to `s`/`k` combinators, evaluates them under
//! explicit fuel in concrete models (Kleene's first model, a desk-scale
//! second model, finite tables, oracle extensions and a Friedberg
//! numbering), and turns the classical diagonal arguments into procedures
//! that extract a replayable counterexample from any concrete candidate.

pub mod friedberg;
pub mod k1;
pub mod k2;
pub mod model;
pub mod observe;
pub mod oracle;
pub mod outcome;
pub mod pairing;
pub mod pca;
pub mod reductions;
pub mod sexpr;
pub mod term;

pub use model::{Combinatory, Model};
pub use outcome::{EvalOutcome, Fuel, Halt, Step};
pub use term::{Basis, Term};
