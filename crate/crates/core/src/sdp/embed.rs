//! Real-symmetric embedding of Hermitian matrices: `H -> [[Re H, -Im H], [Im H, Re H]]`.
//!
//! The embedding is a `*`-homomorphism, so it preserves positivity; every
//! eigenvalue of `H` appears twice in the image.

use nalgebra::DMatrix;

use crate::qmat::{c, ComplexMatrix};

pub fn embed(h: &ComplexMatrix) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Inverse of [`embed`]; the two copies of each block are averaged.
pub fn extract(m: &DMatrix<f64>) -> ComplexMatrix {
    let n = m.nrows() / 2;
    ComplexMatrix::from_fn(n, n, |i, j| {
        c(
            0.5 * (m[(i, j)] + m[(i + n, j + n)]),
            0.5 * (m[(i + n, j)] - m[(i, j + n)]),
        )
    })
}
