//! Shared fixtures for the criterion benchmarks.

use zetalab::dirpoly::DirichletPoly;
use zetalab::Complex64;

/// `1 + 2^{-s} + ... + n^{-s}` with unit coefficients.
pub fn unit_poly(n: u64) -> DirichletPoly {
    DirichletPoly::from_pairs((1..=n).map(|k| (k, Complex64::new(1.0, 0.0)))).expect("valid polynomial")
}
