//! Exact computations in loop groups GL_n over F_q((ε)).

pub mod error;
pub mod finite_field;
pub mod leaf_closures;
pub mod loop_matrix;
pub mod newton_combinatorics;
pub mod puiseux;

pub use error::{Error, Result};
