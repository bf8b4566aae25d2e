//! Riemann–Siegel evaluation of `Z(t)` and `Z'(t)`.
//!
//! The correction terms `C_0..C_4` are the usual combinations of derivatives
//! of `Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)`. `Psi` is entire,
//! so its Taylor coefficients about `p = 1/2` are taken once from a Cauchy
//! integral on the unit circle and all derivatives come from that series.

use super::theta::theta_pair_unchecked;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Lowest height for the Riemann–Siegel path.
pub const RS_MIN_HEIGHT: f64 = 50.0;
/// Default height cap.
pub const RS_MAX_HEIGHT: f64 = 2e7;
/// Number of available correction terms (`C_0..C_4`).
pub const MAX_CORRECTION_TERMS: u8 = 5;

const PSI_DEGREE: usize = 72;
const PSI_NODES: usize = 256;

fn psi(p: Complex64) -> Complex64 {
    let two_pi = 2.0 * PI;
    (two_pi * (p * p - p - 1.0 / 16.0)).cos() / (two_pi * p).cos()
}

/// Taylor coefficients of `Psi` in `x = p - 1/2`.
fn psi_coeffs() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let samples: Vec<Complex64> = (0..PSI_NODES)
            .map(|k| {
                let ang = 2.0 * PI * k as f64 / PSI_NODES as f64;
                psi(Complex64::new(0.5, 0.0) + Complex64::from_polar(1.0, ang))
            })
            .collect();
        (0..=PSI_DEGREE)
            .map(|n| {
                if n % 2 == 1 {
                    // Psi(1 - p) = Psi(p)
                    return 0.0;
                }
                let mut acc = 0.0;
                for (k, f) in samples.iter().enumerate() {
                    let ang = 2.0 * PI * (n * k % PSI_NODES) as f64 / PSI_NODES as f64;
                    acc += (f * Complex64::from_polar(1.0, -ang)).re;
                }
                acc / PSI_NODES as f64
            })
            .collect()
    })
}

#[cfg(test)]
/// `Psi^{(order)}` at `p` from the Taylor series; `order <= 13`.
fn psi_derivative(order: usize, x: f64) -> f64 {
    let c = psi_coeffs();
    // sum_{n >= order} c_n n!/(n-order)! x^{n-order}, Horner from the top
    let mut acc = 0.0;
    for n in (order..=PSI_DEGREE).rev() {
        let mut falling = 1.0;
        for j in 0..order {
            falling *= (n - j) as f64;
        }
        acc = acc * x + c[n] * falling;
    }
    acc
}

// C_k = sum over (order, coefficient) of coefficient * Psi^{(order)}(p)
fn correction_recipe(k: usize) -> &'static [(usize, f64)] {
    static RECIPES: OnceLock<Vec<Vec<(usize, f64)>>> = OnceLock::new();
    let r = RECIPES.get_or_init(|| {
        let p2 = PI * PI;
        let p4 = p2 * p2;
        let p6 = p4 * p2;
        let p8 = p4 * p4;
        vec![
            vec![(0, 1.0)],
            vec![(3, -1.0 / (96.0 * p2))],
            vec![(2, 1.0 / (64.0 * p2)), (6, 1.0 / (18432.0 * p4))],
            vec![
                (1, -1.0 / (64.0 * p2)),
                (5, -1.0 / (3840.0 * p4)),
                (9, -1.0 / (5_308_416.0 * p6)),
            ],
            vec![
                (0, 1.0 / (128.0 * p2)),
                (4, 19.0 / (24576.0 * p4)),
                (8, 11.0 / (5_898_240.0 * p6)),
                (12, 1.0 / (2_038_431_744.0 * p8)),
            ],
        ]
    });
    &r[k]
}

// Coefficients of C_k and C_k' as polynomials in x = p - 1/2.
fn correction_polys() -> &'static [(Vec<f64>, Vec<f64>)] {
    static POLYS: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    POLYS.get_or_init(|| {
        let c = psi_coeffs();
        (0..MAX_CORRECTION_TERMS as usize)
            .map(|k| {
                let mut poly = vec![0.0; PSI_DEGREE + 1];
                for &(order, w) in correction_recipe(k) {
                    for n in 0..=PSI_DEGREE - order {
                        let falling: f64 = (n + 1..=n + order).map(|m| m as f64).product();
                        poly[n] += w * c[n + order] * falling;
                    }
                }
                let deriv = (1..poly.len()).map(|n| n as f64 * poly[n]).collect();
                (poly, deriv)
            })
            .collect()
    })
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// `(C_k(p), C_k'(p))`.
pub fn correction_coefficient(k: usize, p: f64) -> (f64, f64) {
    let x = p - 0.5;
    let (v, d) = &correction_polys()[k];
    (horner(v, x), horner(d, x))
}

fn log_table() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let nmax = (RS_MAX_HEIGHT / (2.0 * PI)).sqrt() as usize + 2;
        (0..=nmax)
            .map(|n| if n == 0 { (0.0, 0.0) } else { ((n as f64).ln(), 1.0 / (n as f64).sqrt()) })
            .collect()
    })
}

// Gabcke-style remainder constants after C_0, C_0..C_1, ..., C_0..C_4
const REMAINDER_BOUND: [f64; 5] = [0.127, 0.053, 0.011, 0.031, 0.017];

/// Output of one Riemann–Siegel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsValue {
    pub z: f64,
    pub z_prime: f64,
    pub theta: f64,
    pub theta_prime: f64,
    pub est_abs_error: f64,
}

/// Riemann–Siegel `Z(t)`, `Z'(t)` with `correction_terms` terms of the
/// remainder expansion (0 = main sum only, at most 5 meaning `C_0..C_4`).
pub fn riemann_siegel(t: f64, correction_terms: u8) -> Result<RsValue> {
    if !(RS_MIN_HEIGHT..=RS_MAX_HEIGHT).contains(&t) {
        return Err(Error::Regime(format!(
            "Riemann–Siegel path needs {RS_MIN_HEIGHT} <= t <= {RS_MAX_HEIGHT}, got {t}"
        )));
    }
    if correction_terms > MAX_CORRECTION_TERMS {
        return Err(Error::Config(format!(
            "at most {MAX_CORRECTION_TERMS} correction terms supported"
        )));
    }
    let (theta, theta_prime) = theta_pair_unchecked(t);
    let tau = t / (2.0 * PI);
    let a = tau.sqrt();
    let n = a.floor() as usize;
    let p = a - n as f64;

    let table = log_table();
    let mut z = 0.0;
    let mut dz = 0.0;
    for &(ln_k, inv_sqrt) in &table[1..=n] {
        let (s, c) = (theta - t * ln_k).sin_cos();
        z += inv_sqrt * c;
        dz -= inv_sqrt * s * (theta_prime - ln_k);
    }
    z *= 2.0;
    dz *= 2.0;

    let sign = if n % 2 == 1 { 1.0 } else { -1.0 }; // (-1)^{N-1}
    let dp_dt = 1.0 / (4.0 * PI * a);
    let dtau_dt = 1.0 / (2.0 * PI);
    for k in 0..correction_terms as usize {
        let (ck, dck) = correction_coefficient(k, p);
        let expo = -0.25 - 0.5 * k as f64;
        let scale = tau.powf(expo);
        z += sign * ck * scale;
        dz += sign * (dck * dp_dt * scale + ck * expo * scale / tau * dtau_dt);
    }
    let k = correction_terms as usize;
    let est = if k == 0 {
        tau.powf(-0.25)
    } else {
        REMAINDER_BOUND[k - 1] * tau.powf(-(2.0 * k as f64 + 1.0) / 4.0)
    } + 1e-15 * (n as f64).max(1.0);
    Ok(RsValue { z, z_prime: dz, theta, theta_prime, est_abs_error: est })
}
