//! Numerical laboratory for matrix algebras acting on `l^p_n`.
//!
//! Everything here revolves around the operator norm of a complex `n x n`
//! matrix viewed as a map `l^p_n -> l^p_n`. On top of the norm machinery sit
//! element classification (idempotent / contractive / hermitian / real
//! positive / invertible isometry), the standard transforms of accretive
//! matrices (fractional powers, Cayley, resolvent-type transforms, support
//! idempotents), a gallery of structured example matrices, vector-state
//! sampling, and a registry of reproducible verification experiments.
//!
//! Conventions used throughout:
//!
//! * `1/p + 1/q = 1` with `1/inf = 0`; most optimization-based routines
//!   require `p` strictly inside `(1, inf)`.
//! * The pairing between `l^p_n` and `l^q_n` is bilinear: `<v, w> = sum v_i w_i`.
//! * All randomized routines take an explicit 64-bit seed (default 0).

pub mod elements;
pub mod error;
pub mod experiments;
pub mod exponent;
pub mod gallery;
pub mod linalg;
pub mod matrix;
pub mod pnorm;
pub mod random;
pub mod states;
pub mod transforms;

pub use error::{Error, Result};
pub use exponent::PExponent;
pub use matrix::{C64, PMatrix, PVector};
pub use pnorm::{NormEngine, NormEstimate, NormMethod};
