//! Critical sets, caustics, Poincaré indices and pre-image counts of planar
//! harmonic mappings `f = h + conj(g) + sum c_j log|z - s_j|` with rational
//! `h` and `g`.

pub mod error;
pub mod caustic;
pub mod counting;
pub mod critical;
pub mod mapping;
pub mod newton;
pub mod numerics;
pub mod valence;

pub use error::{Error, Result};
pub use mapping::{HarmonicMap, LocalExpansion, LogTerm};
pub use numerics::{Cx, Poly, RationalFn};
