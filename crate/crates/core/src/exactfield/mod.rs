//! Rationals, number fields `Q[x]/(m)`, and certified complex embeddings.

pub mod ball;
pub mod field;
pub mod qpoly;
pub mod rational;
pub mod serial;

pub use ball::{bits_for_digits, ComplexBall};
pub use field::{FieldElement, NumberField};
pub use rational::{int, parse_rational, rat, Rational};
