//! Truncated single-cavity operators on the d-dimensional local space
//! (occupations 0..=d−1). Truncation at n = N is exact inside a fixed-N
//! sector.

use ndarray::Array2;
use num_complex::Complex64 as C64;

/// d×d identity.
pub fn identity(d: usize) -> Array2<C64> {
    Array2::eye(d)
}

/// Annihilation operator: ⟨n−1|a|n⟩ = √n.
pub fn ladder_a(d: usize) -> Array2<C64> {
    let mut m = Array2::zeros((d, d));
    for n in 1..d {
        m[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    m
}

/// Creation operator: ⟨n+1|a†|n⟩ = √(n+1).
pub fn ladder_adag(d: usize) -> Array2<C64> {
    let mut m = Array2::zeros((d, d));
    for n in 0..d - 1 {
        m[[n + 1, n]] = C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    m
}

/// Number operator n̂ = a†a (diagonal 0..d−1).
pub fn number_op(d: usize) -> Array2<C64> {
    let mut m = Array2::zeros((d, d));
    for n in 0..d {
        m[[n, n]] = C64::new(n as f64, 0.0);
    }
    m
}
