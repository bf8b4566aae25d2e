//! Divisor sums `sigma`, the Euler factors `B`, and the bilinear sums `F`, `G`.

use crate::dirpoly::{factorize, DirichletPoly};
use crate::error::{Error, Result};
use crate::quad::{pairwise_sum_complex, ComplexKahan};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;

/// Default cap on `|support|^2`.
pub const DEFAULT_PAIR_CAP: usize = 100_000_000;

/// Binary gcd.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

/// `lcm` in 128 bits (never overflows for 64-bit inputs).
pub fn lcm(a: u64, b: u64) -> u128 {
    if a == 0 || b == 0 {
        return 0;
    }
    u128::from(a / gcd(a, b)) * u128::from(b)
}

/// `sigma_{z1,z2}(n) = sum_{ab = n} a^{-z1} b^{-z2}`.
pub fn sigma_shift(n: u64, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Domain("sigma_shift needs n >= 1".into()));
    }
    let mut acc = ComplexKahan::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let e = n / d;
            let (ld, le) = ((d as f64).ln(), (e as f64).ln());
            acc.add((-z1 * ld - z2 * le).exp());
            if d != e {
                acc.add((-z1 * le - z2 * ld).exp());
            }
        }
        d += 1;
    }
    Ok(acc.value())
}

/// `sigma_{z1,z2}(p^e)` for `e = 0..=len-1`, by `s_e = y s_{e-1} + x^e`.
fn sigma_prime_powers(p: u64, z1: Complex64, z2: Complex64, len: usize) -> Vec<Complex64> {
    let lp = (p as f64).ln();
    let x = (-z1 * lp).exp();
    let y = (-z2 * lp).exp();
    let mut out = Vec::with_capacity(len);
    let mut s = Complex64::new(1.0, 0.0);
    let mut xe = Complex64::new(1.0, 0.0);
    out.push(s);
    for _ in 1..len {
        xe *= x;
        s = y * s + xe;
        out.push(s);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BSeriesConfig {
    /// Truncation depth `J`.
    pub depth: usize,
    /// Largest admissible relative tail bound.
    pub tail_tolerance: f64,
}

impl Default for BSeriesConfig {
    fn default() -> Self {
        Self { depth: 60, tail_tolerance: 1e-8 }
    }
}

impl BSeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depth < 10 {
            return Err(Error::Config(format!("B-series depth must be >= 10, got {}", self.depth)));
        }
        if !(self.tail_tolerance > 0.0) {
            return Err(Error::Config("tail_tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// One Euler factor of `B` with its relative tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BFactor {
    pub value: Complex64,
    pub tail_bound: f64,
}

fn check_margin(z: &[Complex64; 4]) -> Result<f64> {
    let r = z.iter().map(|w| w.re.abs()).fold(0.0, f64::max);
    if r >= 0.25 {
        return Err(Error::Domain(format!("B needs |Re z_i| < 1/4, got {r}")));
    }
    Ok(r)
}

// sum_{j > J} (j+m+1)(j+1) q^j, bounded by its first term over (1 - q rho)
fn tail_sum(q: f64, m: usize, depth: usize) -> f64 {
    let j = (depth + 1) as f64;
    let m = m as f64;
    let first = (j + m + 1.0) * (j + 1.0) * q.powf(j);
    let rho = ((j + m + 2.0) * (j + 2.0)) / ((j + m + 1.0) * (j + 1.0));
    let ratio = q * rho;
    if ratio >= 1.0 {
        f64::INFINITY
    } else {
        first / (1.0 - ratio)
    }
}

/// `B_p(p^m)` for `z = (z1, z2, z3, z4)`.
pub fn b_prime_factor(p: u64, m: u32, z: &[Complex64; 4], cfg: &BSeriesConfig) -> Result<BFactor> {
    let r = check_margin(z)?;
    let depth = cfg.depth;
    let m = m as usize;
    let s12 = sigma_prime_powers(p, z[0], z[1], depth + m + 1);
    let s34 = sigma_prime_powers(p, z[2], z[3], depth + 1);
    let inv_p = 1.0 / p as f64;
    let mut num = ComplexKahan::new();
    let mut den = ComplexKahan::new();
    let mut pw = 1.0;
    for j in 0..=depth {
        num.add(s12[j + m] * s34[j] * pw);
        den.add(s12[j] * s34[j] * pw);
        pw *= inv_p;
    }
    let (num, den) = (num.value(), den.value());
    let q = (p as f64).powf(2.0 * r - 1.0);
    let pm = (p as f64).powf(m as f64 * r);
    let tn = pm * tail_sum(q, m, depth) / num.norm();
    let td = tail_sum(q, 0, depth) / den.norm();
    let tail_bound = if td >= 1.0 { f64::INFINITY } else { (tn + td) / (1.0 - td) };
    Ok(BFactor { value: num / den, tail_bound })
}

/// `B_{z1,z2,z3,z4}(n)`; truncation error when the tail bound exceeds the tolerance.
pub fn b_factor(n: u64, z: &[Complex64; 4], cfg: &BSeriesConfig) -> Result<Complex64> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::Domain("b_factor needs n >= 1".into()));
    }
    check_margin(z)?;
    let mut acc = Complex64::new(1.0, 0.0);
    for (p, m) in factorize(n) {
        let f = b_prime_factor(p, m, z, cfg)?;
        if !(f.tail_bound < cfg.tail_tolerance) {
            return Err(Error::Truncation(format!(
                "B factor at p = {p}: tail bound {:.3e} exceeds {:.3e}",
                f.tail_bound, cfg.tail_tolerance
            )));
        }
        acc *= f.value;
    }
    Ok(acc)
}

/// Support of a polynomial with cached logarithms and factorisations.
#[derive(Debug, Clone)]
pub struct PreparedPoly {
    pub n: Vec<u64>,
    pub a: Vec<Complex64>,
    pub ln: Vec<f64>,
    factors: Vec<Vec<(u64, u32)>>,
}

impl PreparedPoly {
    pub fn new(poly: &DirichletPoly, pair_cap: usize) -> Result<Self> {
        let len = poly.len();
        if len.saturating_mul(len) > pair_cap {
            return Err(Error::Capacity(format!("{len}^2 coefficient pairs exceed the cap {pair_cap}")));
        }
        let n: Vec<u64> = poly.coeffs().keys().copied().collect();
        let a = poly.coeffs().values().copied().collect();
        let ln = n.iter().map(|&x| (x as f64).ln()).collect();
        let factors = n.iter().map(|&x| factorize(x)).collect();
        Ok(Self { n, a, ln, factors })
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    /// `F(z1, z2)`.
    pub fn f_sum(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        let rows: Vec<Complex64> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = ComplexKahan::new();
                for j in 0..self.len() {
                    let g = gcd(self.n[i], self.n[j]);
                    let l = lcm(self.n[i], self.n[j]) as f64;
                    let lg = (g as f64).ln();
                    let e = ((z1 + z2) * lg - z1 * self.ln[i] - z2 * self.ln[j]).exp();
                    acc.add(self.a[i] * self.a[j].conj() * e / l);
                }
                acc.value()
            })
            .collect();
        pairwise_sum_complex(&rows)
    }

    /// `G(z1, z2, z3, z4)`.
    pub fn g_sum(&self, z: &[Complex64; 4], cfg: &BSeriesConfig) -> Result<Complex64> {
        cfg.validate()?;
        check_margin(z)?;
        let zs = [z[2], z[3], z[0], z[1]];
        let mut cache_h: HashMap<(u64, u32), Complex64> = HashMap::new();
        let mut cache_k: HashMap<(u64, u32), Complex64> = HashMap::new();
        let lookup = |cache: &mut HashMap<(u64, u32), Complex64>, zz: &[Complex64; 4], p: u64, m: u32| {
            if let Some(v) = cache.get(&(p, m)) {
                return Ok(*v);
            }
            let f = b_prime_factor(p, m, zz, cfg)?;
            if !(f.tail_bound < cfg.tail_tolerance) {
                return Err(Error::Truncation(format!(
                    "B factor at p = {p}: tail bound {:.3e} exceeds {:.3e}",
                    f.tail_bound, cfg.tail_tolerance
                )));
            }
            cache.insert((p, m), f.value);
            Ok(f.value)
        };
        let mut rows = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let mut acc = ComplexKahan::new();
            for j in 0..self.len() {
                let l = lcm(self.n[i], self.n[j]) as f64;
                let mut bh = Complex64::new(1.0, 0.0);
                for &(p, e) in &self.factors[i] {
                    let f = exponent_of(&self.factors[j], p);
                    if e > f {
                        bh *= lookup(&mut cache_h, z, p, e - f)?;
                    }
                }
                let mut bk = Complex64::new(1.0, 0.0);
                for &(p, f) in &self.factors[j] {
                    let e = exponent_of(&self.factors[i], p);
                    if f > e {
                        bk *= lookup(&mut cache_k, &zs, p, f - e)?;
                    }
                }
                acc.add(self.a[i] * self.a[j].conj() * bh * bk / l);
            }
            rows.push(acc.value());
        }
        Ok(pairwise_sum_complex(&rows))
    }
}

fn exponent_of(factors: &[(u64, u32)], p: u64) -> u32 {
    factors.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e)
}

/// `f_sum` with the default pair cap.
pub fn f_sum(poly: &DirichletPoly, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    Ok(PreparedPoly::new(poly, DEFAULT_PAIR_CAP)?.f_sum(z1, z2))
}

/// `g_sum` with the default pair cap.
pub fn g_sum(poly: &DirichletPoly, z: &[Complex64; 4], cfg: &BSeriesConfig) -> Result<Complex64> {
    PreparedPoly::new(poly, DEFAULT_PAIR_CAP)?.g_sum(z, cfg)
}
