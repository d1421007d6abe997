//! Exact rational scalars, vectors and the small linear-algebra kernel
//! (fraction-free rank and square solves) used by every other module.

mod matrix;
mod rational;
mod vector;

pub use matrix::{bareiss_rank, bareiss_solve, integer_row, QMatrix};
pub use rational::Rational;
pub use vector::QVector;
