//! Exact rational and cyclotomic-field arithmetic.

mod cyclotomic;
mod rational;

pub use cyclotomic::{cyclotomic_polynomial, root_of_unity, CycElem};
pub use rational::{b1, format_rational, parse_rational, Rational};
