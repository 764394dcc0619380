//! Shared fixtures for the benchmarks under `benches/`.

use pndil::generators::{jordan_pair, product_triple, random_polynomial};
use pndil::{CMatrix, MultiPoly, OperatorTuple, PnCertificate, C64};

/// Certified `(T₁, T₂, T₁^j T₂^k)` on a Jordan pair with equal radii.
pub fn triple(d1: usize, d2: usize, r: f64, j: usize, k: usize) -> (OperatorTuple, PnCertificate) {
    let pair = jordan_pair(d1, d2, r, r).expect("valid Jordan pair");
    product_triple(&pair, j, k, 1e-8).expect("product triples are certified")
}

/// Deterministic dense Hermitian matrix.
pub fn hermitian(n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |i, j| {
        let t = (i * 31 + j * 17) as f64;
        C64::new(t.sin(), (0.5 * t).cos())
    });
    &a + &a.adjoint()
}

pub fn polynomials(count: u64) -> Vec<MultiPoly> {
    (0..count).map(|s| random_polynomial(s, 3, 3)).collect()
}
