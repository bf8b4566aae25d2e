//! Smooth cutoff `phi` with plateau `[1, 2]` and support `[3/4, 9/4]`, and
//! the weights `int L^m (t / 2 pi)^w phi(t / T) dt` with `L = log(t / 2 pi)`.

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use num_complex::Complex64;
use std::f64::consts::PI;

pub const SUPPORT: (f64, f64) = (0.75, 2.25);
pub const PLATEAU: (f64, f64) = (1.0, 2.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffFn {
    /// `a` in the transition `e^{-a/x}`.
    pub sharpness: f64,
}

impl Default for CutoffFn {
    fn default() -> Self {
        Self { sharpness: 1.0 }
    }
}

impl CutoffFn {
    pub fn new(sharpness: f64) -> Result<Self> {
        if !(sharpness > 0.0 && sharpness.is_finite()) {
            return Err(Error::Config(format!("cutoff sharpness must be positive, got {sharpness}")));
        }
        Ok(Self { sharpness })
    }

    fn bump(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-self.sharpness / x).exp()
        }
    }

    /// Smooth step from 0 at `x <= 0` to 1 at `x >= 1`.
    pub fn step(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let a = self.bump(x);
        a / (a + self.bump(1.0 - x))
    }

    pub fn eval(&self, u: f64) -> f64 {
        let w = PLATEAU.0 - SUPPORT.0;
        if u <= SUPPORT.0 || u >= SUPPORT.1 {
            0.0
        } else if u < PLATEAU.0 {
            self.step((u - SUPPORT.0) / w)
        } else if u <= PLATEAU.1 {
            1.0
        } else {
            self.step((SUPPORT.1 - u) / w)
        }
    }

    /// `int phi`; the transitions contribute `1/8` each by symmetry.
    pub fn integral(&self) -> f64 {
        (PLATEAU.1 - PLATEAU.0) + (PLATEAU.0 - SUPPORT.0)
    }
}

/// Quadrature nodes and `phi`-weighted weights for `int g(t) phi(t/T) dt`.
#[derive(Debug, Clone)]
pub struct CutoffRule {
    pub big_t: f64,
    pub t: Vec<f64>,
    /// `log(t / 2 pi)` at the nodes.
    pub log_t: Vec<f64>,
    pub weight: Vec<f64>,
}

const TRANSITION_PANELS: usize = 24;
const PLATEAU_PANELS: usize = 8;
const ORDER: usize = 20;

impl CutoffRule {
    pub fn new(big_t: f64, phi: &CutoffFn) -> Result<Self> {
        if !(big_t > 0.0 && big_t.is_finite()) {
            return Err(Error::Domain(format!("T must be positive, got {big_t}")));
        }
        let (x, w) = gauss_legendre(ORDER);
        let pieces = [
            (SUPPORT.0, PLATEAU.0, TRANSITION_PANELS),
            (PLATEAU.0, PLATEAU.1, PLATEAU_PANELS),
            (PLATEAU.1, SUPPORT.1, TRANSITION_PANELS),
        ];
        let mut rule = Self { big_t, t: Vec::new(), log_t: Vec::new(), weight: Vec::new() };
        for (a, b, panels) in pieces {
            let h = (b - a) / panels as f64;
            for p in 0..panels {
                let lo = a + p as f64 * h;
                for (xi, wi) in x.iter().zip(&w) {
                    let u = lo + 0.5 * h * (xi + 1.0);
                    let t = u * big_t;
                    let weight = 0.5 * h * wi * big_t * phi.eval(u);
                    if weight > 0.0 {
                        rule.t.push(t);
                        rule.log_t.push((t / (2.0 * PI)).ln());
                        rule.weight.push(weight);
                    }
                }
            }
        }
        Ok(rule)
    }

    /// `int L^m e^{wL} phi(t/T) dt`.
    pub fn moment(&self, w: Complex64, m: u32) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, wt) in self.log_t.iter().zip(&self.weight) {
            acc += (w * l).exp() * (wt * l.powi(m as i32));
        }
        acc
    }

    /// `int L^m (L - l0)^n phi(t/T) dt` for `n = 0..=degree`.
    pub fn centred_moments(&self, m: u32, l0: f64, degree: usize) -> Vec<f64> {
        let mut out = vec![0.0; degree + 1];
        for (l, wt) in self.log_t.iter().zip(&self.weight) {
            let base = wt * l.powi(m as i32);
            let d = l - l0;
            let mut pw = 1.0;
            for o in out.iter_mut() {
                *o += base * pw;
                pw *= d;
            }
        }
        out
    }

    /// `log(t / 2 pi)` at the plateau midpoint, used as an expansion centre.
    pub fn centre(&self) -> f64 {
        (1.5 * self.big_t / (2.0 * PI)).ln()
    }
}

/// `mellin_weight`: `int (t / 2 pi)^w phi(t / T) dt`.
pub fn mellin_weight(w: Complex64, big_t: f64, phi: &CutoffFn) -> Result<Complex64> {
    Ok(CutoffRule::new(big_t, phi)?.moment(w, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        let phi = CutoffFn::default();
        for u in [0.0, 0.75, 2.25, 3.0, -1.0] {
            assert_eq!(phi.eval(u), 0.0);
        }
        for u in [1.0, 1.3, 2.0] {
            assert_eq!(phi.eval(u), 1.0);
        }
        let mut prev = 0.0;
        for i in 0..=100 {
            let v = phi.eval(0.75 + 0.0025 * i as f64);
            assert!((0.0..=1.0).contains(&v) && v >= prev);
            prev = v;
        }
        assert!((phi.step(0.3) + phi.step(0.7) - 1.0).abs() < 1e-15);
        assert!(CutoffFn::new(0.0).is_err());
    }

    #[test]
    fn integral_of_phi() {
        for a in [0.5, 1.0, 2.0] {
            let phi = CutoffFn::new(a).unwrap();
            let rule = CutoffRule::new(1.0, &phi).unwrap();
            let s: f64 = rule.weight.iter().sum();
            assert!((s - phi.integral()).abs() < 1e-12, "a={a} s={s}");
        }
        let m = mellin_weight(Complex64::new(0.0, 0.0), 1e5, &CutoffFn::default()).unwrap();
        assert!((1e5..=1.5e5).contains(&m.re));
        assert!((m.re - 1.25e5).abs() < 1e-6);
    }

    #[test]
    fn scaling_by_substitution() {
        // int (t/2pi)^w phi(t/2T) dt = 2^{1+w} int (t/2pi)^w phi(t/T) dt
        let phi = CutoffFn::default();
        for w in [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)] {
            let a = mellin_weight(w, 2e4, &phi).unwrap();
            let b = mellin_weight(w, 1e4, &phi).unwrap() * Complex64::new(2.0, 0.0).powc(w + 1.0);
            assert!((a - b).norm() < 1e-8 * a.norm());
        }
    }

    #[test]
    fn modulus_bound_and_refinement() {
        let phi = CutoffFn::default();
        let w = Complex64::new(0.2, 3.0);
        let rule = CutoffRule::new(1e5, &phi).unwrap();
        let v = rule.moment(w, 0);
        let bound = rule.moment(Complex64::new(w.re, 0.0), 0);
        assert!(v.norm() <= bound.re);
        // brute-force composite midpoint with a fine mesh
        let n = 400_000;
        let h = 1.5e5 / n as f64;
        let mut brute = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let t = 0.75e5 + (i as f64 + 0.5) * h;
            brute += (w * (t / (2.0 * PI)).ln()).exp() * phi.eval(t / 1e5) * h;
        }
        assert!((v - brute).norm() < 1e-8 * brute.norm());
    }

    #[test]
    fn centred_moments_reproduce_moment() {
        let rule = CutoffRule::new(1e4, &CutoffFn::default()).unwrap();
        let l0 = rule.centre();
        let w = Complex64::new(0.1, -0.2);
        let mu = rule.centred_moments(2, l0, 30);
        let mut series = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for (n, m) in mu.iter().enumerate() {
            if n > 0 {
                term = term * w / n as f64;
            }
            series += term * *m;
        }
        series *= (w * l0).exp();
        let direct = rule.moment(w, 2);
        assert!((series - direct).norm() < 1e-12 * direct.norm());
    }
}
