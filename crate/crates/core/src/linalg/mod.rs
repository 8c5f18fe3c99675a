//! Sparse column-major linear algebra over exact rationals or floats, and the
//! column reduction underlying every persistence computation.

mod field;
mod reduce;
mod sparse;

pub use field::{Exact, Field};
pub use reduce::{rank, reduce, reduce_graded, ReduceOptions, Reduction};
pub use sparse::{Column, SparseColumnMatrix};
