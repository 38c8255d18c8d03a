//! Truncated Toeplitz matrices on the d-torus — additive truncations over
//! finite frequency sets and multiplicative truncations indexed by positive
//! integers — together with the spectral statistics whose limits the first
//! Szegő-type theorems identify: geometric-mean determinants, normalized
//! trace functionals, block decompositions of the natural truncation, and
//! Gram matrices of dilation systems.

pub mod error;
pub mod indexing;
pub mod symbol;

pub use error::{Error, Result};
