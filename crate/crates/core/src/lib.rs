//! Exact computation of loop invariants of cyclic covers from twisted
//! Neumann-Zagier data.

pub mod circulant;
pub mod error;
pub mod exactfield;
pub mod feynman;
pub mod fixtures;
pub mod laurent;
pub mod linalg;
pub mod nz;
pub mod powersum;
pub mod rootsum;

pub use error::{Error, Result};
