//! Numerical toolkit for the chain of results linking operational
//! no-signalling to unitary factorization in finite-dimensional quantum
//! mechanics, and to microcausality and spin-statistics in a truncated
//! 1+1-dimensional field model.

pub mod error;
pub mod field;
pub mod nosignal;
pub mod op;
pub mod qm;
pub mod report;
pub mod rng;
pub mod signal;

pub use error::{Error, Result};
pub use op::{BipartiteDims, Operator, SpectralDecomposition, C64};
