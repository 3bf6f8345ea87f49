//! Laurent polynomials, rational functions and matrices over them.

pub mod laurent_poly;
pub mod matrix;
pub mod partial;
pub mod poly;
pub mod ratfunc;

pub use laurent_poly::LaurentPolynomial;
pub use matrix::{LaurentMatrix, RatMatrix};
pub use partial::{partial_fractions, PartialFractions, PartialTerm};
pub use poly::Poly;
pub use ratfunc::RationalFunction;
