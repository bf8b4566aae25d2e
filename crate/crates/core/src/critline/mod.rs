//! Critical-line evaluation of `theta`, `Z`, `Z'`, `zeta` and `zeta'`.
//!
//! Two independent routes are provided: the Riemann–Siegel expansion (fast,
//! `t >= 50`) and Euler–Maclaurin summation (slow, any `|t| <= 1e5`).

mod cache;
mod euler_maclaurin;
mod gamma;
mod riemann_siegel;
mod theta;

pub use cache::{
    decode_records, encode_records, read_grid_cache, write_grid_cache, GridRecord, CACHE_MAGIC, CACHE_VERSION,
};
pub use euler_maclaurin::{zeta_em, ZetaValue, EM_MAX_HEIGHT};
pub use gamma::ln_gamma;
pub use riemann_siegel::{
    correction_coefficient, riemann_siegel, RsValue, MAX_CORRECTION_TERMS, RS_MAX_HEIGHT,
    RS_MIN_HEIGHT,
};
pub use theta::{theta_any, theta_exact, theta_pair, theta_prime_any, THETA_ASYMPTOTIC_MIN};

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Accuracy knobs for the critical-line evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalAccuracy {
    /// Riemann–Siegel correction terms, `0..=5` (`C_0..C_4`).
    pub rs_correction_terms: u8,
    /// Euler–Maclaurin direct-sum length; 0 picks `|t|/pi + 12`.
    pub em_terms: usize,
    /// Euler–Maclaurin Bernoulli terms (capped at 60).
    pub em_bernoulli_terms: usize,
    /// Step of the finite-difference oracle for `Z'`.
    pub fd_step: f64,
}

impl Default for EvalAccuracy {
    fn default() -> Self {
        Self { rs_correction_terms: MAX_CORRECTION_TERMS, em_terms: 0, em_bernoulli_terms: 30, fd_step: 1e-3 }
    }
}

impl EvalAccuracy {
    pub fn validate(&self) -> Result<()> {
        if self.rs_correction_terms > MAX_CORRECTION_TERMS {
            return Err(Error::Config(format!(
                "rs_correction_terms must be <= {MAX_CORRECTION_TERMS}"
            )));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::Config("fd_step must be positive".into()));
        }
        Ok(())
    }
}

/// All integrand ingredients at one height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPointSample {
    pub t: f64,
    pub theta: f64,
    pub theta_prime: f64,
    pub z: f64,
    pub z_prime: f64,
    pub zeta: Complex64,
    pub zeta_prime: Complex64,
    pub est_abs_error: f64,
}

impl CriticalPointSample {
    /// Assemble from the rotated quantities: `zeta = e^{-i theta} Z` and
    /// `zeta' = e^{-i theta} (-i Z' - theta' Z)`.
    pub fn from_hardy(t: f64, theta: f64, theta_prime: f64, z: f64, z_prime: f64, est_abs_error: f64) -> Self {
        let rot = Complex64::from_polar(1.0, -theta);
        let zeta = rot * z;
        let zeta_prime = rot * Complex64::new(-theta_prime * z, -z_prime);
        Self { t, theta, theta_prime, z, z_prime, zeta, zeta_prime, est_abs_error }
    }

    pub fn abs_zeta(&self) -> f64 {
        self.z.abs()
    }

    pub fn abs_zeta_prime(&self) -> f64 {
        self.zeta_prime.norm()
    }
}

/// `Z(t)` and `Z'(t)` on the Riemann–Siegel path (`t >= 50`).
pub fn hardy_z(t: f64, acc: &EvalAccuracy) -> Result<(f64, f64)> {
    let v = riemann_siegel(t, acc.rs_correction_terms)?;
    Ok((v.z, v.z_prime))
}

/// `Z(t)` and `Z'(t)` from Euler–Maclaurin values of `zeta`; valid for
/// `0 <= t <= 1e5`.
pub fn hardy_z_oracle(t: f64, acc: &EvalAccuracy) -> Result<(f64, f64)> {
    let s = oracle_sample(t, acc)?;
    Ok((s.z, s.z_prime))
}

fn oracle_sample(t: f64, acc: &EvalAccuracy) -> Result<CriticalPointSample> {
    if !(t >= 0.0) {
        return Err(Error::Regime(format!("oracle path needs t >= 0, got {t}")));
    }
    let v = zeta_em(Complex64::new(0.5, t), acc)?;
    let theta = theta_any(t);
    let theta_prime = theta_prime_any(t);
    let rot = Complex64::from_polar(1.0, theta);
    let zr = rot * v.zeta;
    // d/dt zeta(1/2 + it) = i zeta'
    let dzr = rot * (Complex64::i() * theta_prime * v.zeta + Complex64::i() * v.zeta_prime);
    let err = v.tail + zr.im.abs() + 1e-15 * (t / std::f64::consts::PI).max(1.0);
    Ok(CriticalPointSample {
        t,
        theta,
        theta_prime,
        z: zr.re,
        z_prime: dzr.re,
        zeta: v.zeta,
        zeta_prime: v.zeta_prime,
        est_abs_error: err,
    })
}

/// Below this height [`critical_sample`] takes the Euler–Maclaurin route:
/// the five-term Riemann–Siegel remainder is still above `1e-9` there.
pub const FAST_PATH_MIN: f64 = 400.0;

/// Sample on the Riemann–Siegel path for `t >= 400` and on the
/// Euler–Maclaurin path for `10 <= t < 400`.
pub fn critical_sample(t: f64, acc: &EvalAccuracy) -> Result<CriticalPointSample> {
    if t >= FAST_PATH_MIN {
        let v = riemann_siegel(t, acc.rs_correction_terms)?;
        Ok(CriticalPointSample::from_hardy(t, v.theta, v.theta_prime, v.z, v.z_prime, v.est_abs_error))
    } else if t >= THETA_ASYMPTOTIC_MIN {
        oracle_sample(t, acc)
    } else {
        Err(Error::Regime(format!("critical samples need t >= {THETA_ASYMPTOTIC_MIN}, got {t}")))
    }
}

/// Always the Euler–Maclaurin route, for `10 <= t <= 1e5`.
pub fn critical_sample_oracle(t: f64, acc: &EvalAccuracy) -> Result<CriticalPointSample> {
    if t < THETA_ASYMPTOTIC_MIN {
        return Err(Error::Regime(format!("oracle samples need t >= {THETA_ASYMPTOTIC_MIN}, got {t}")));
    }
    oracle_sample(t, acc)
}

/// Five-point central difference of `Z` on the fast path.
pub fn z_prime_finite_difference(t: f64, acc: &EvalAccuracy) -> Result<f64> {
    let h = acc.fd_step;
    let z = |x: f64| hardy_z(x, acc).map(|v| v.0);
    Ok((z(t - 2.0 * h)? - 8.0 * z(t - h)? + 8.0 * z(t + h)? - z(t + 2.0 * h)?) / (12.0 * h))
}

/// Sign changes of `Z` on `[a, b]` sampled with spacing `step` (oracle path
/// below 50, fast path above).
pub fn count_sign_changes(a: f64, b: f64, step: f64, acc: &EvalAccuracy) -> Result<usize> {
    if !(b > a) || !(step > 0.0) {
        return Err(Error::Domain("need a < b and step > 0".into()));
    }
    let eval = |t: f64| -> Result<f64> {
        if t >= RS_MIN_HEIGHT {
            hardy_z(t, acc).map(|v| v.0)
        } else {
            hardy_z_oracle(t, acc).map(|v| v.0)
        }
    };
    let n = ((b - a) / step).ceil() as usize;
    let mut prev = eval(a)?;
    let mut changes = 0;
    for i in 1..=n {
        let t = (a + i as f64 * step).min(b);
        let cur = eval(t)?;
        if cur != 0.0 && prev != 0.0 && cur.signum() != prev.signum() {
            changes += 1;
        }
        if cur != 0.0 {
            prev = cur;
        }
    }
    Ok(changes)
}

/// Refine a sign change of `Z` on `[a, b]` by bisection.
pub fn bisect_zero(mut a: f64, mut b: f64, acc: &EvalAccuracy, iterations: usize) -> Result<f64> {
    let eval = |t: f64| -> Result<f64> {
        if t >= RS_MIN_HEIGHT {
            hardy_z(t, acc).map(|v| v.0)
        } else {
            hardy_z_oracle(t, acc).map(|v| v.0)
        }
    };
    let mut fa = eval(a)?;
    if fa.signum() == eval(b)?.signum() {
        return Err(Error::Domain(format!("no sign change of Z on [{a}, {b}]")));
    }
    for _ in 0..iterations {
        let m = 0.5 * (a + b);
        let fm = eval(m)?;
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acc() -> EvalAccuracy {
        EvalAccuracy::default()
    }

    #[test]
    fn first_zero_on_oracle_path() {
        let (z, _) = hardy_z_oracle(14.134_725_141_7, &acc()).unwrap();
        assert!(z.abs() < 1e-5);
        let root = bisect_zero(14.0, 14.3, &acc(), 60).unwrap();
        assert!((root - 14.134_725_141_734_693).abs() < 1e-9);
    }

    #[test]
    fn fast_path_matches_oracle_at_100_and_1000() {
        for t in [100.0, 1000.0] {
            let v = riemann_siegel(t, MAX_CORRECTION_TERMS).unwrap();
            let fast = CriticalPointSample::from_hardy(t, v.theta, v.theta_prime, v.z, v.z_prime, v.est_abs_error);
            let slow = critical_sample_oracle(t, &acc()).unwrap();
            assert!((fast.z.abs() - slow.zeta.norm()).abs() < 1e-6, "t={t}");
            assert!((fast.zeta - slow.zeta).norm() < 1e-6);
            assert!((fast.zeta_prime - slow.zeta_prime).norm() < 1e-5 * slow.zeta_prime.norm().max(1.0));
        }
    }

    #[test]
    fn sample_identities() {
        let s = critical_sample(777.7, &acc()).unwrap();
        assert!((s.z.abs() - s.zeta.norm()).abs() <= 1e-15 * s.z.abs().max(1.0));
        let lhs = s.zeta_prime.norm_sqr();
        let rhs = s.z_prime * s.z_prime + s.theta_prime * s.theta_prime * s.z * s.z;
        assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn z_prime_against_finite_difference() {
        let (_, zp) = hardy_z(500.0, &acc()).unwrap();
        let fd = z_prime_finite_difference(500.0, &acc()).unwrap();
        assert!((zp - fd).abs() < 1e-5 * zp.abs());
    }

    #[test]
    fn twenty_nine_sign_changes_below_100() {
        assert_eq!(count_sign_changes(0.0, 100.0, 0.02, &acc()).unwrap(), 29);
    }

    #[test]
    fn regimes() {
        assert!(matches!(critical_sample(9.0, &acc()), Err(Error::Regime(_))));
        assert!(matches!(hardy_z(20.0, &acc()), Err(Error::Regime(_))));
        let s = critical_sample(20.0, &acc()).unwrap();
        assert!(s.est_abs_error < 1e-9);
    }
}
