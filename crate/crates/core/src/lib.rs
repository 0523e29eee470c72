//! Construction, verification and exact measurement of F-Diophantine sets
//! over odd finite fields.
//!
//! An F-Diophantine set over F_q is a set `A` of nonzero field elements such
//! that `F(a_1, ..., a_k)` is a square whenever the arguments are distinct
//! elements of A. This crate builds such sets by a character-sum
//! construction (powers of a witness element all of whose specialization
//! values are squares), certifies the character sums against the Weil bound,
//! and cross-validates everything at desk scale with an exhaustive
//! branch-and-bound search for the true maximum.

pub mod charsum;
pub mod construct;
pub mod error;
pub mod exact;
pub mod field;
pub mod poly;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
pub use poly::{Classification, Monomial, MultiPoly, UniPoly};
