//! Numerical toolkit for non-elliptic quadratic symbols with a trivial
//! singular space: Hamilton maps, singular spaces, spectral lattices,
//! averaging weights and canonical deformations, quadratic FBI phases, and
//! Hermite-basis truncations of the corresponding Weyl operators.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deform;
pub mod error;
pub mod fbi;
pub mod flow;
pub mod lattice;
pub mod linalg;
pub mod models;
pub mod probe;
pub mod singular;
pub mod symplectic;
pub mod weyl;

pub use error::{Error, ErrorKind, Result};
