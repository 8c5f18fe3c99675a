//! Persistent local-homology sheaves of weighted flag complexes.
//!
//! Given a weighted graph, this crate builds the Vietoris-Rips filtration of
//! its flag complex ([`complex`]), computes persistent (relative) cohomology
//! with representative cocycles by sparse column reduction ([`linalg`],
//! [`persistence`]), assembles per-vertex stalks of persistent local homology
//! and the sheaf Laplacian coupling neighboring stalks ([`local_sheaf`]), and
//! runs sheaf diffusion and sign-equivariant layers on top ([`diffusion`]).
//!
//! Every fast-path quantity can be cross-checked against the dense exact
//! computations in [`oracle`].

pub mod cli;
pub mod complex;
pub mod diffusion;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod local_sheaf;
pub mod oracle;
pub mod persistence;

pub use complex::{build_flag_complex, Filtration, Metric, Simplex, SimplexSubset, WeightedGraph};
pub use error::{Error, Result};
pub use linalg::{Exact, Field, ReduceOptions};
