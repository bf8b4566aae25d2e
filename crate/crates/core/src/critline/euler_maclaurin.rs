//! Euler–Maclaurin summation for `zeta(s)` and `zeta'(s)` at general complex
//! `s`. Slow but independent of the Riemann–Siegel path; every other module
//! uses it as the reference value.

use super::EvalAccuracy;
use crate::error::{Error, Result};
use crate::quad::ComplexKahan;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Largest `|Im s|` accepted.
pub const EM_MAX_HEIGHT: f64 = 1e5;

const MAX_BERNOULLI_TERMS: usize = 60;

/// `B_{2k} / (2k)!` for `k = 1..=MAX_BERNOULLI_TERMS`, from
/// `B_{2k}/(2k)! = (-1)^{k+1} 2 zeta(2k) / (2 pi)^{2k}`.
fn bernoulli_ratios() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (1..=MAX_BERNOULLI_TERMS)
            .map(|k| {
                let two_k = 2 * k as i32;
                let z = if k == 1 {
                    PI * PI / 6.0
                } else {
                    let n = 2000.0f64;
                    let mut acc = 0.0;
                    for m in (1..2000).rev() {
                        acc += (m as f64).powi(-two_k);
                    }
                    // tail by Euler–Maclaurin: N^{1-2k}/(2k-1) + N^{-2k}/2 + 2k N^{-2k-1}/12
                    acc + n.powi(1 - two_k) / f64::from(two_k - 1)
                        + 0.5 * n.powi(-two_k)
                        + f64::from(two_k) * n.powi(-two_k - 1) / 12.0
                };
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                // (2 pi)^{-2k} without overflow issues for k <= 60
                sign * 2.0 * z * (2.0 * PI).powi(-two_k)
            })
            .collect()
    })
}

/// Result of an Euler–Maclaurin evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValue {
    pub zeta: Complex64,
    pub zeta_prime: Complex64,
    /// Magnitude of the last correction term used, as a tail estimate.
    pub tail: f64,
}

/// `zeta(s)` and `zeta'(s)` by Euler–Maclaurin summation.
pub fn zeta_em(s: Complex64, acc: &EvalAccuracy) -> Result<ZetaValue> {
    if (s - 1.0).norm() < 1e-300 {
        return Err(Error::Pole("zeta has a pole at s = 1".into()));
    }
    if !(s.im.abs() <= EM_MAX_HEIGHT) || !s.re.is_finite() {
        return Err(Error::Regime(format!(
            "Euler–Maclaurin oracle limited to |Im s| <= {EM_MAX_HEIGHT}, got {s}"
        )));
    }
    let n = if acc.em_terms > 0 {
        acc.em_terms
    } else {
        (s.im.abs() / PI).ceil() as usize + (s.re.abs().ceil() as usize) + 12
    };
    let m_terms = acc.em_bernoulli_terms.min(MAX_BERNOULLI_TERMS);
    let mut sum = ComplexKahan::new();
    let mut dsum = ComplexKahan::new();
    for k in 1..n {
        let lk = (k as f64).ln();
        let term = (-s * lk).exp();
        sum.add(term);
        dsum.add(-term * lk);
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp(); // N^{-s}
    let sm1 = s - 1.0;
    let head = n_pow * nf / sm1;
    let mut zeta = sum.value() + head + 0.5 * n_pow;
    let mut dzeta = dsum.value() - head * ln_n - head / sm1 - 0.5 * n_pow * ln_n;

    // q = s (s+1) ... (s+2k-2) N^{-s-2k+1} and dq = dq/ds, updated in
    // scaled form so the rising product never overflows
    let mut q = s * n_pow / nf;
    let mut dq = (Complex64::new(1.0, 0.0) - s * ln_n) * n_pow / nf;
    let inv_n2 = 1.0 / (nf * nf);
    let b = bernoulli_ratios();
    let mut tail = 0.0;
    for (k, bk) in b.iter().enumerate().take(m_terms) {
        if k > 0 {
            let f1 = s + (2 * k - 1) as f64;
            let f2 = s + (2 * k) as f64;
            let f12 = f1 * f2;
            dq = (dq * f12 + q * (f1 + f2)) * inv_n2;
            q = q * f12 * inv_n2;
        }
        let term = q * *bk;
        let dterm = dq * *bk;
        zeta += term;
        dzeta += dterm;
        tail = term.norm();
        if tail < 1e-18 * zeta.norm() && dterm.norm() < 1e-18 * dzeta.norm().max(1e-300) {
            break;
        }
    }
    Ok(ZetaValue { zeta, zeta_prime: dzeta, tail })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acc() -> EvalAccuracy {
        EvalAccuracy::default()
    }

    #[test]
    fn classical_values() {
        let z2 = zeta_em(Complex64::new(2.0, 0.0), &acc()).unwrap();
        assert!((z2.zeta.re - PI * PI / 6.0).abs() < 1e-14);
        assert!((z2.zeta.re - 1.6449340668).abs() < 1e-10);
        let z0 = zeta_em(Complex64::new(0.0, 0.0), &acc()).unwrap();
        assert!((z0.zeta.re + 0.5).abs() < 1e-14);
        // zeta'(0) = -ln(2 pi)/2
        assert!((z0.zeta_prime.re + 0.5 * (2.0 * PI).ln()).abs() < 1e-13);
        let z4 = zeta_em(Complex64::new(4.0, 0.0), &acc()).unwrap();
        assert!((z4.zeta.re - PI.powi(4) / 90.0).abs() < 1e-14);
        let zm1 = zeta_em(Complex64::new(-1.0, 0.0), &acc()).unwrap();
        assert!((zm1.zeta.re + 1.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn pole_and_regime() {
        assert!(matches!(zeta_em(Complex64::new(1.0, 0.0), &acc()), Err(Error::Pole(_))));
        assert!(matches!(zeta_em(Complex64::new(0.5, 2e5), &acc()), Err(Error::Regime(_))));
    }

    #[test]
    fn near_pole_laurent() {
        // zeta(1 + e) = 1/e + gamma + O(e)
        let e = 2f64.powi(-20);
        let z = zeta_em(Complex64::new(1.0 + e, 0.0), &acc()).unwrap();
        let gamma = 0.577_215_664_901_532_9;
        assert!((z.zeta.re - 1.0 / e - gamma).abs() < 1e-6);
    }

    #[test]
    fn first_zero() {
        let z = zeta_em(Complex64::new(0.5, 14.134_725_141_734_693), &acc()).unwrap();
        assert!(z.zeta.norm() < 1e-12);
    }

    #[test]
    fn conjugate_symmetry() {
        for s in [Complex64::new(0.5, 100.0), Complex64::new(1.3, 7.0), Complex64::new(0.5, 4321.0)] {
            let a = zeta_em(s, &acc()).unwrap();
            let b = zeta_em(s.conj(), &acc()).unwrap();
            assert!((a.zeta - b.zeta.conj()).norm() < 1e-12);
            assert!((a.zeta_prime - b.zeta_prime.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_by_complex_step_difference() {
        let s = Complex64::new(0.5, 321.0);
        let h = 1e-5;
        let zp = zeta_em(s + h, &acc()).unwrap().zeta;
        let zm = zeta_em(s - h, &acc()).unwrap().zeta;
        let fd = (zp - zm) / (2.0 * h);
        let d = zeta_em(s, &acc()).unwrap().zeta_prime;
        assert!((fd - d).norm() < 1e-6 * d.norm().max(1.0));
    }

    #[test]
    fn stable_under_more_terms() {
        let s = Complex64::new(0.5, 9876.5);
        let a = zeta_em(s, &acc()).unwrap();
        let mut more = acc();
        more.em_terms = 6000;
        let b = zeta_em(s, &more).unwrap();
        assert!((a.zeta - b.zeta).norm() < 1e-10);
    }
}
