//! The Riemann–Siegel theta function.

use super::gamma::ln_gamma;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Smallest height accepted by the asymptotic expansion.
pub const THETA_ASYMPTOTIC_MIN: f64 = 10.0;

// theta(t) = t/2 log(t/2pi) - t/2 - pi/8 + sum_k THETA_COEFFS[k] / t^(2k+1)
const THETA_COEFFS: [f64; 5] = [
    1.0 / 48.0,
    7.0 / 5760.0,
    31.0 / 80640.0,
    127.0 / 430080.0,
    511.0 / 1216512.0,
];

/// `(theta(t), theta'(t))` from the asymptotic expansion, `t >= 10`.
pub fn theta_pair(t: f64) -> Result<(f64, f64)> {
    if !(t >= THETA_ASYMPTOTIC_MIN) || !t.is_finite() {
        return Err(Error::Regime(format!(
            "theta asymptotics need t >= {THETA_ASYMPTOTIC_MIN}, got {t}"
        )));
    }
    Ok(theta_pair_unchecked(t))
}

#[inline]
pub(crate) fn theta_pair_unchecked(t: f64) -> (f64, f64) {
    let l = (t / (2.0 * PI)).ln();
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut dcorr = 0.0;
    let mut pow = inv; // t^-(2k+1)
    for (k, c) in THETA_COEFFS.iter().enumerate() {
        corr += c * pow;
        dcorr -= (2 * k + 1) as f64 * c * pow * inv;
        pow *= inv2;
    }
    (0.5 * t * l - 0.5 * t - PI / 8.0 + corr, 0.5 * l + dcorr)
}

/// `theta(t) = Im ln Gamma(1/4 + i t/2) - (t/2) ln pi`, valid for any real `t`.
pub fn theta_exact(t: f64) -> f64 {
    ln_gamma(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln()
}

/// `theta` at any `t >= 0`: asymptotic series above 10, log-gamma below.
pub fn theta_any(t: f64) -> f64 {
    if t >= THETA_ASYMPTOTIC_MIN {
        theta_pair_unchecked(t).0
    } else {
        theta_exact(t)
    }
}

/// `theta'(t) = Re digamma(1/4 + i t/2) / 2 - ln(pi)/2`, by a central
/// difference of [`theta_exact`]; used only below the asymptotic regime.
pub fn theta_prime_any(t: f64) -> f64 {
    if t >= THETA_ASYMPTOTIC_MIN {
        theta_pair_unchecked(t).1
    } else {
        let h = 1e-4;
        (theta_exact(t + h) - theta_exact(t - h)) / (2.0 * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn matches_log_gamma_above_ten() {
        for t in [10.0, 12.5, 30.0, 100.0, 1234.5, 1e5] {
            let (th, _) = theta_pair(t).unwrap();
            let exact = theta_exact(t);
            assert!((th - exact).abs() <= 1e-9 * exact.abs().max(1.0), "t={t}: {th} vs {exact}");
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for t in [10.0, 50.0, 777.0] {
            let h = 1e-3;
            let fd = (theta_exact(t + h) - theta_exact(t - h)) / (2.0 * h);
            let (_, d) = theta_pair(t).unwrap();
            assert!((d - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn derivative_at_two_pi_e_squared() {
        let (_, d) = theta_pair(2.0 * PI * E * E).unwrap();
        assert!((d - 1.0).abs() < 1e-3);
    }

    #[test]
    fn root_near_17_8456() {
        // bisection on the log-gamma phase
        let (mut a, mut b) = (17.0, 18.5);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if theta_exact(a).signum() == theta_exact(m).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((a - 17.8456).abs() < 1e-4, "root {a}");
        let (th, _) = theta_pair(a).unwrap();
        assert!(th.abs() < 1e-9);
    }

    #[test]
    fn leading_terms_dominate() {
        for t in [1e3, 1e5, 1e7] {
            let (th, _) = theta_pair(t).unwrap();
            let lead = 0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0;
            assert!((th / lead - 1.0).abs() < 1.0 / t);
        }
    }

    #[test]
    fn regime_error_below_ten() {
        assert!(matches!(theta_pair(9.99), Err(Error::Regime(_))));
        assert!(matches!(theta_pair(f64::NAN), Err(Error::Regime(_))));
    }
}
