//! Brute-force checks of the arithmetic sums that bound the prime-power
//! twists: the Rankin-type bound `2^r r! P^r e^P` and the Euler product of
//! the cutoff-free sum.

use crate::dirpoly::factorial;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Pair-count cap for the brute-force enumerations.
pub const DEFAULT_ENUM_CAP: usize = 100_000_000;

/// Exponent vectors over `len` primes with total degree `r`.
fn compositions(len: usize, r: u32) -> Vec<Vec<u32>> {
    fn rec(len: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == len {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(len, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if len == 0 {
        if r == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(len, r, &mut Vec::with_capacity(len), &mut out);
    out
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankinReport {
    pub primes: Vec<u64>,
    pub r: u32,
    /// `sum 1/p` over the range.
    pub variance: f64,
    pub sum: f64,
    pub bound: f64,
    pub log_sum: f64,
    pub log_bound: f64,
    pub pass: bool,
}

/// `rankin_bound_check`: `sum_{Omega(m) = Omega(n) = r} r!^2 g(m) g(n) / [m, n]`
/// against `2^r r! P^r e^P`.
pub fn rankin_bound_check(primes: &[u64], r: u32) -> Result<RankinReport> {
    if primes.is_empty() {
        return Err(Error::Domain("range must contain at least one prime".into()));
    }
    let count = binomial(primes.len() as u64 + u64::from(r) - 1, u64::from(r));
    if count.saturating_mul(count) > DEFAULT_ENUM_CAP as u128 {
        return Err(Error::Capacity(format!("{count}^2 pairs exceed the enumeration cap")));
    }
    let vecs = compositions(primes.len(), r);
    let logp: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
    let g: Vec<f64> = vecs.iter().map(|v| v.iter().map(|&e| 1.0 / factorial(e)).product()).collect();
    let mut total = crate::quad::KahanSum::new();
    for (i, m) in vecs.iter().enumerate() {
        for (j, n) in vecs.iter().enumerate() {
            let log_lcm: f64 = m.iter().zip(n).zip(&logp).map(|((&a, &b), l)| f64::from(a.max(b)) * l).sum();
            total.add(g[i] * g[j] * (-log_lcm).exp());
        }
    }
    let rf = factorial(r);
    let sum = rf * rf * total.value();
    let variance: f64 = primes.iter().map(|&p| 1.0 / p as f64).sum();
    let log_bound = f64::from(r) * std::f64::consts::LN_2 + rf.ln() + f64::from(r) * variance.ln() + variance;
    let log_sum = sum.ln();
    Ok(RankinReport {
        primes: primes.to_vec(),
        r,
        variance,
        sum,
        bound: log_bound.exp(),
        log_sum,
        log_bound,
        pass: log_sum <= log_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerIdentityReport {
    /// Double sum over all `m, n` with per-prime exponents `<= cap`.
    pub brute: Complex64,
    /// Product of the per-prime double sums with the same cap.
    pub euler: Complex64,
    /// Product with a much larger cap, for the truncation size.
    pub euler_untruncated: Complex64,
    /// `prod (1 + (k^2 - 1) / p)`.
    pub leading: f64,
    pub rel_gap: f64,
}

fn local_factor(p: u64, x: f64, z1: Complex64, z2: Complex64, cap: u32) -> Complex64 {
    let lp = (p as f64).ln();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..=cap {
        for j in 0..=cap {
            let (lo, hi) = (i.min(j), i.max(j));
            let shift = ((z1 + z2) * f64::from(lo) - z1 * f64::from(i) - z2 * f64::from(j)) * lp;
            acc += shift.exp() * (x.powi((i + j) as i32) / (factorial(i) * factorial(j)) * (-f64::from(hi) * lp).exp());
        }
    }
    acc
}

/// Cutoff-free sum `sum (k-1)^{Omega(m)+Omega(n)} g(m) g(n) / [m,n] * (m,n)^{z1+z2} / (m^{z1} n^{z2})`
/// over integers built from `primes`, brute force against the Euler product.
pub fn cutoff_free_sum_check(
    primes: &[u64],
    k: f64,
    exp_cap: u32,
    z1: Complex64,
    z2: Complex64,
) -> Result<EulerIdentityReport> {
    let per = (exp_cap as usize + 1).checked_pow(primes.len() as u32).unwrap_or(usize::MAX);
    if per.saturating_mul(per) > DEFAULT_ENUM_CAP {
        return Err(Error::Capacity(format!("{per}^2 pairs exceed the enumeration cap")));
    }
    let x = k - 1.0;
    let logp: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
    let mut vecs: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in primes {
        vecs = vecs
            .into_iter()
            .flat_map(|v| {
                (0..=exp_cap).map(move |e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    let weight: Vec<f64> = vecs
        .iter()
        .map(|v| v.iter().map(|&e| x.powi(e as i32) / factorial(e)).product())
        .collect();
    let mut acc = crate::quad::ComplexKahan::new();
    for (i, m) in vecs.iter().enumerate() {
        for (j, n) in vecs.iter().enumerate() {
            let mut expo = Complex64::new(0.0, 0.0);
            for ((&a, &b), l) in m.iter().zip(n).zip(&logp) {
                let (lo, hi) = (f64::from(a.min(b)), f64::from(a.max(b)));
                expo += ((z1 + z2) * lo - z1 * f64::from(a) - z2 * f64::from(b) - hi) * l;
            }
            acc.add(expo.exp() * (weight[i] * weight[j]));
        }
    }
    let brute = acc.value();
    let euler = primes.iter().map(|&p| local_factor(p, x, z1, z2, exp_cap)).product::<Complex64>();
    let euler_untruncated = primes.iter().map(|&p| local_factor(p, x, z1, z2, 40)).product::<Complex64>();
    let leading = primes.iter().map(|&p| 1.0 + (k * k - 1.0) / p as f64).product();
    Ok(EulerIdentityReport { brute, euler, euler_untruncated, leading, rel_gap: (brute - euler).norm() / euler.norm() })
}
