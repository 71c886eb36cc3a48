//! Construction and verification of mutually unbiased pairs of unextendible
//! maximally entangled bases (UMEBs) in C^2 x C^3.
//!
//! The crate builds a parameterized family of basis pairs from angle
//! parameters, and verifies every defining property: orthonormality, maximal
//! entanglement of the first four members, unextendibility of the complement,
//! and mutual unbiasedness of the two bases (all 36 cross overlaps of squared
//! modulus 1/6). Verification runs either exactly, over the cyclotomic field
//! Q(zeta_24), or in floating point for arbitrary angles.
//!
//! Module map:
//! - [`scalar`]: exact cyclotomic arithmetic and the float backend.
//! - [`linalg`]: dense complex vectors/matrices, tensor products, Schmidt
//!   analysis for the 2 x 3 bipartition.
//! - [`construct`]: the basis builders, the angle-closure generator, and the
//!   parameter sampler.
//! - [`verify`]: predicates, brute-force oracles, and audit reports.
//! - [`fixtures`]: the three built-in worked examples, stored as literal data.
//! - [`audit`]: end-to-end reconstruction and adjudication of the built-in
//!   examples.

pub mod audit;
pub mod construct;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{AngleFrac, Backend, CycloNumber, Rational, Scalar, DEFAULT_TOLERANCE};
