//! Exact integer and rational linear algebra.

pub mod integer;
pub mod matrix;
pub mod rational;

pub use matrix::{IntMatrix, Matrix, RatMatrix};
pub use rational::{Subspace, Q};
