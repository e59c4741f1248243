//! Liouville-space simulation of a cyclic entangling map under rf-field
//! inhomogeneity, contrasting a static (incoherent) noise ensemble with
//! per-iteration (decoherent) averaging.

pub mod circuit;
pub mod error;
pub mod experiment;
mod linalg;
pub mod liouville;
pub mod noise;
pub mod spincore;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
