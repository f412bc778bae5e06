//! Exact and numerical kernels for polynomial progressions over finite fields.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too, and the
// elimination loops index two rows of the same matrix.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod counting;
pub mod decomposition;
pub mod error;
pub mod extremal;
pub mod field;
pub mod func;
pub mod gowers;
pub mod io;
pub mod par;
pub mod poly;
pub mod rng;
pub mod schedule;

pub use error::{Error, Result};
pub use field::{make_field, Field, FieldElement, FieldSpec};
pub use poly::{IntPoly, PolySystem, ProgressionSystem};
