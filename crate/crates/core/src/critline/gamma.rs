//! Complex log-gamma by upward recurrence and the Stirling series.

use num_complex::Complex64;
use std::f64::consts::PI;

// B_{2k} / (2k (2k-1)) for k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// `ln Gamma(z)` for `Re z > 0`, continuous along paths in the right half
/// plane (sum of principal logarithms).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0);
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 18.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_factorials() {
        for n in 1..15u32 {
            let fact: f64 = (1..n).map(f64::from).product();
            let v = ln_gamma(Complex64::new(n as f64, 0.0));
            assert!((v.re - fact.ln()).abs() < 1e-13, "n={n}");
            assert!(v.im.abs() < 1e-15);
        }
        let half = ln_gamma(Complex64::new(0.5, 0.0));
        assert!((half.re - 0.5 * PI.ln()).abs() < 1e-14);
    }

    #[test]
    fn reflection_modulus_on_quarter_line() {
        // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y)
        for y in [0.3, 2.0, 11.0] {
            let v = ln_gamma(Complex64::new(0.5, y));
            let expect = 0.5 * (PI / (PI * y).cosh()).ln();
            assert!((v.re - expect).abs() < 1e-12);
        }
    }
}
