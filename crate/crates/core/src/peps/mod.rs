//! Variational kagome PEPS: 12 rank-5 tensors contracted along the cell.

pub mod ops;

pub use ops::{identity, ladder_a, ladder_adag, number_op};
