//! Sparse Dirichlet polynomials `sum a_n n^{-s}` and the truncated
//! exponentials `N_j(s; alpha) = sum alpha^{Omega(n)} g(n) n^{-s}` over integers
//! built from the primes of one increment, with `g(p^m) = 1/m!`.

use crate::error::{Error, Result};
use crate::primes::{prime_power_sum, IncrementScheme};
use crate::quad::ComplexKahan;
use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

/// Default cap on the number of stored coefficients.
pub const DEFAULT_TERM_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletPoly {
    coeffs: BTreeMap<u64, Complex64>,
    length_bound: u64,
}

impl DirichletPoly {
    /// The constant polynomial `1`.
    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        let mut coeffs = BTreeMap::new();
        if c != Complex64::new(0.0, 0.0) {
            coeffs.insert(1, c);
        }
        Self { coeffs, length_bound: 1 }
    }

    /// Builds from `(n, a_n)` pairs; repeated `n` accumulate, zeros are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (u64, Complex64)>>(pairs: I) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (n, a) in pairs {
            if n == 0 {
                return Err(Error::Domain("Dirichlet coefficients are indexed from 1".into()));
            }
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::Domain(format!("coefficient a_{n} is not finite")));
            }
            *coeffs.entry(n).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        coeffs.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        let length_bound = coeffs.keys().next_back().copied().unwrap_or(1);
        Ok(Self { coeffs, length_bound })
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real(pairs: &[(u64, f64)]) -> Result<Self> {
        Self::from_pairs(pairs.iter().map(|&(n, a)| (n, Complex64::new(a, 0.0))))
    }

    pub fn coeffs(&self) -> &BTreeMap<u64, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, n: u64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Declared bound on the largest index; at least the largest stored key.
    pub fn length_bound(&self) -> u64 {
        self.length_bound
    }

    pub fn max_index(&self) -> u64 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    /// Value at `s`, ascending `n`, compensated.
    pub fn eval_at(&self, s: Complex64) -> Complex64 {
        let mut acc = ComplexKahan::new();
        for (&n, &a) in &self.coeffs {
            if n == 1 {
                acc.add(a);
            } else {
                acc.add(a * (-s * (n as f64).ln()).exp());
            }
        }
        acc.value()
    }

    /// `poly_eval`: value at `s = 1/2 + it`.
    pub fn eval(&self, t: f64) -> Complex64 {
        self.eval_at(Complex64::new(0.5, t))
    }

    /// `sum |a_n| n^{-1/2}`, an upper bound for `|eval(t)|`.
    pub fn abs_bound(&self) -> f64 {
        self.coeffs.iter().map(|(&n, a)| a.norm() / (n as f64).sqrt()).sum()
    }

    /// Dirichlet convolution with `other`.
    pub fn mul(&self, other: &Self, cap: usize) -> Result<Self> {
        poly_product(&[self.clone(), other.clone()], cap)
    }

    /// CSV with columns `n,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,re,im\n");
        for (n, a) in &self.coeffs {
            let _ = writeln!(out, "{},{},{}", n, a.re, a.im);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("n,re,im") {
            return Err(Error::Format("expected header n,re,im".into()));
        }
        let mut pairs = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(Error::Format(format!("bad row `{line}`")));
            }
            let parse = |x: &str| x.parse::<f64>().map_err(|e| Error::Format(format!("{x}: {e}")));
            let n = f[0].parse::<u64>().map_err(|e| Error::Format(format!("{}: {e}", f[0])))?;
            pairs.push((n, Complex64::new(parse(f[1])?, parse(f[2])?)));
        }
        Self::from_pairs(pairs)
    }
}

/// `poly_product`: Dirichlet convolution of all factors.
pub fn poly_product(factors: &[DirichletPoly], cap: usize) -> Result<DirichletPoly> {
    let mut acc = DirichletPoly::one();
    for f in factors {
        let pairs = acc.len().saturating_mul(f.len());
        if pairs > cap.saturating_mul(16) {
            return Err(Error::Capacity(format!("product needs {pairs} coefficient pairs")));
        }
        let mut out: HashMap<u64, Complex64> = HashMap::with_capacity(pairs.min(cap));
        for (&m, &a) in &acc.coeffs {
            for (&n, &b) in &f.coeffs {
                let mn = m
                    .checked_mul(n)
                    .ok_or_else(|| Error::Capacity(format!("index {m} * {n} overflows u64")))?;
                *out.entry(mn).or_default() += a * b;
            }
            if out.len() > cap {
                return Err(Error::Capacity(format!("product exceeds {cap} terms")));
            }
        }
        let length_bound = acc
            .length_bound
            .checked_mul(f.length_bound)
            .ok_or_else(|| Error::Capacity("length bound overflows u64".into()))?;
        let coeffs: BTreeMap<u64, Complex64> =
            out.into_iter().filter(|(_, a)| *a != Complex64::new(0.0, 0.0)).collect();
        acc = DirichletPoly { coeffs, length_bound };
    }
    Ok(acc)
}

/// Prime factorisation by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Number of prime factors with multiplicity.
pub fn big_omega(n: u64) -> u32 {
    factorize(n).iter().map(|&(_, e)| e).sum()
}

/// The multiplicative weight with `g(p^m) = 1/m!`.
pub fn taylor_g(n: u64) -> f64 {
    factorize(n).iter().map(|&(_, e)| 1.0 / factorial(e)).product()
}

pub(crate) fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

/// Parameters of one truncated exponential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplicativeSpec {
    pub alpha: Complex64,
    /// Increment index `j`.
    pub j: usize,
    /// Multiplier `c` in the cutoff `Omega(n) <= c P_j`.
    pub omega_cutoff: f64,
}

impl MultiplicativeSpec {
    pub fn new(alpha: f64, j: usize, omega_cutoff: f64) -> Result<Self> {
        if !(omega_cutoff > 0.0) {
            return Err(Error::Domain("omega_cutoff must be positive".into()));
        }
        Ok(Self { alpha: Complex64::new(alpha, 0.0), j, omega_cutoff })
    }

    /// Largest admissible `Omega(n)` for variance `p_j`.
    pub fn max_omega(&self, p_j: f64) -> u32 {
        (self.omega_cutoff * p_j).floor().max(0.0) as u32
    }
}

/// Explicit coefficients of `sum_{Omega(n) <= max_omega} alpha^{Omega(n)} g(n) n^{-s}`
/// over `n` composed of `primes` only, by depth-first enumeration.
pub fn truncated_exp_poly(
    primes: &[u64],
    alpha: Complex64,
    max_omega: u32,
    cap: usize,
) -> Result<DirichletPoly> {
    let mut pairs: Vec<(u64, Complex64)> = Vec::new();
    // powers of alpha divided by factorials are assembled along the path
    fn dfs(
        primes: &[u64],
        idx: usize,
        n: u64,
        omega: u32,
        g: f64,
        max_omega: u32,
        alpha: Complex64,
        cap: usize,
        out: &mut Vec<(u64, Complex64)>,
    ) -> Result<()> {
        if idx == primes.len() {
            if out.len() >= cap {
                return Err(Error::Capacity(format!("truncated exponential exceeds {cap} terms")));
            }
            out.push((n, alpha.powu(omega) * g));
            return Ok(());
        }
        let p = primes[idx];
        let mut m = n;
        let mut e = 0u32;
        loop {
            dfs(primes, idx + 1, m, omega + e, g / factorial(e), max_omega, alpha, cap, out)?;
            if omega + e + 1 > max_omega {
                break;
            }
            m = m
                .checked_mul(p)
                .ok_or_else(|| Error::Capacity(format!("index {m} * {p} overflows u64")))?;
            e += 1;
        }
        Ok(())
    }
    dfs(primes, 0, 1, 0, 1.0, max_omega, alpha, cap, &mut pairs)?;
    let mut poly = DirichletPoly::from_pairs(pairs)?;
    if poly.is_empty() {
        poly.length_bound = 1;
    }
    Ok(poly)
}

/// `build_Nj`: explicit `N_j(s; alpha)` for the `j`-th increment.
pub fn build_nj(scheme: &IncrementScheme, spec: &MultiplicativeSpec, cap: usize) -> Result<DirichletPoly> {
    let range = scheme.range(spec.j)?;
    let k = spec.max_omega(scheme.variance(spec.j)?);
    truncated_exp_poly(range, spec.alpha, k, cap)
        .map_err(|e| match e {
            Error::Capacity(m) => Error::Capacity(format!("increment j = {}: {m}", spec.j)),
            other => other,
        })
}

/// Fast evaluator for a truncated exponential.
///
/// The integers with `Omega(n) = r` built from a prime set satisfy
/// `sum g(n) n^{-s} = P(s)^r / r!`, so the truncated exponential equals the
/// degree-`max_omega` Taylor polynomial of `exp(alpha P(s))` and can be
/// evaluated from the prime sum alone.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedExp {
    primes: Vec<u64>,
    logs: Vec<f64>,
    inv_sqrt: Vec<f64>,
    alpha: Complex64,
    max_omega: u32,
}

impl TruncatedExp {
    pub fn new(primes: &[u64], alpha: Complex64, max_omega: u32) -> Self {
        Self {
            primes: primes.to_vec(),
            logs: primes.iter().map(|&p| (p as f64).ln()).collect(),
            inv_sqrt: primes.iter().map(|&p| 1.0 / (p as f64).sqrt()).collect(),
            alpha,
            max_omega,
        }
    }

    pub fn from_scheme(scheme: &IncrementScheme, spec: &MultiplicativeSpec) -> Result<Self> {
        let range = scheme.range(spec.j)?;
        Ok(Self::new(range, spec.alpha, spec.max_omega(scheme.variance(spec.j)?)))
    }

    pub fn max_omega(&self) -> u32 {
        self.max_omega
    }

    /// Prime sum `sum p^{-1/2 - it}`.
    pub fn prime_sum(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, w) in self.logs.iter().zip(&self.inv_sqrt) {
            let (s, c) = (t * l).sin_cos();
            acc += Complex64::new(c, -s) * *w;
        }
        acc
    }

    /// Value at `1/2 + it` given the prime sum there.
    pub fn eval_from_prime_sum(&self, prime_sum: Complex64) -> Complex64 {
        taylor_exp(self.alpha * prime_sum, self.max_omega)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.eval_from_prime_sum(self.prime_sum(t))
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }
}

/// `sum_{r <= depth} x^r / r!`.
pub fn taylor_exp(x: Complex64, depth: u32) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut acc = term;
    for r in 1..=depth {
        term = term * x / f64::from(r);
        acc += term;
    }
    acc
}

/// Result of comparing a truncated exponential with the Taylor polynomial of
/// `exp(alpha P_j(s))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpIdentityGap {
    /// `|N_j(1/2+it) - Taylor(exp)(alpha P_j(1/2+it))|`.
    pub gap: f64,
    /// Largest coefficient difference between the enumerated polynomial and
    /// the expanded powers of the prime-sum polynomial.
    pub coeff_mismatch: f64,
    pub terms: usize,
}

/// `exp_identity_gap` with both truncations at `taylor_depth`.
pub fn exp_identity_gap(
    scheme: &IncrementScheme,
    j: usize,
    alpha: Complex64,
    t: f64,
    taylor_depth: u32,
    cap: usize,
) -> Result<ExpIdentityGap> {
    let range = scheme.range(j)?;
    let explicit = truncated_exp_poly(range, alpha, taylor_depth, cap)?;
    let p_s = prime_power_sum(range, Complex64::new(0.5, t));
    let gap = (explicit.eval(t) - taylor_exp(alpha * p_s, taylor_depth)).norm();

    // sum_r alpha^r P^r / r! as Dirichlet polynomials
    let prime_poly = DirichletPoly::from_pairs(range.iter().map(|&p| (p, Complex64::new(1.0, 0.0))))?;
    let mut power = DirichletPoly::one();
    let mut expanded: HashMap<u64, Complex64> = HashMap::new();
    let mut scale = Complex64::new(1.0, 0.0);
    for r in 0..=taylor_depth {
        if r > 0 {
            power = power.mul(&prime_poly, cap)?;
            scale = scale * alpha / f64::from(r);
        }
        for (&n, &a) in power.coeffs() {
            *expanded.entry(n).or_default() += a * scale;
        }
    }
    let mut mismatch: f64 = 0.0;
    for (n, a) in &expanded {
        mismatch = mismatch.max((explicit.coeff(*n) - a).norm());
    }
    for (n, a) in explicit.coeffs() {
        if !expanded.contains_key(n) {
            mismatch = mismatch.max(a.norm());
        }
    }
    Ok(ExpIdentityGap { gap, coeff_mismatch: mismatch, terms: explicit.len() })
}

/// Exponent `E` with `prod_j N_j` of length at most `T^E`, from the Mertens
/// form `P_j ~ 2 log_j T - 2 log_{j+1} T`, for a scheme described by
/// `log_ell T` alone (`ell >= 2`). Only the top two increments contribute at
/// double precision; lower ones are `O(1 / exp(log_ell T))`.
pub fn tower_length_exponent(log_ell_t: f64, omega_cutoff: f64) -> f64 {
    // increment ell: log_ell T = L, log_{ell+1} T = ln L
    let l = log_ell_t;
    let top = omega_cutoff * (2.0 * l - 2.0 * l.ln()) / (l * l);
    // increment ell-1: log_{ell-1} T = e^L, negligible once L > 40
    let below = if l < 700.0 {
        let el = l.exp();
        omega_cutoff * (2.0 * el - 2.0 * l) / (el * el)
    } else {
        0.0
    };
    top + below
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::{custom_scheme, sieve_primes};
    use num_rational::Ratio;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn omega_and_g() {
        assert_eq!(big_omega(12), 3);
        assert_eq!(big_omega(1), 0);
        assert_eq!(big_omega(360), 6);
        assert_eq!(taylor_g(8), 1.0 / 6.0);
        assert_eq!(taylor_g(12), 0.5);
        assert_eq!(taylor_g(1), 1.0);
        for n in [2u64, 6, 30, 210, 2310, 9_699_690] {
            assert_eq!(taylor_g(n), 1.0);
        }
    }

    #[test]
    fn alpha_zero_gives_one() {
        let p = truncated_exp_poly(&[11, 13], c(0.0), 5, 100).unwrap();
        assert_eq!(p, DirichletPoly::one());
    }

    #[test]
    fn enumeration_on_eleven_thirteen() {
        let alpha = Complex64::new(0.3, -0.2);
        let p = truncated_exp_poly(&[11, 13], alpha, 2, 100).unwrap();
        let keys: Vec<u64> = p.coeffs().keys().copied().collect();
        assert_eq!(keys, vec![1, 11, 13, 121, 143, 169]);
        assert!((p.coeff(121) - alpha * alpha / 2.0).norm() < 1e-16);
        assert!((p.coeff(143) - alpha * alpha).norm() < 1e-16);
        assert_eq!(p.coeff(11), alpha);
        assert_eq!(p.length_bound(), 169);
    }

    #[test]
    fn build_nj_uses_cutoff_times_variance() {
        let primes = sieve_primes(100).unwrap();
        let s = custom_scheme(1e4, &[E * E, 14.0], &primes).unwrap();
        let p2 = s.variance(2).unwrap();
        // c * P_2 = 2.5 -> Omega <= 2
        let spec = MultiplicativeSpec::new(-1.0, 2, 2.5 / p2).unwrap();
        let nj = build_nj(&s, &spec, 100).unwrap();
        assert_eq!(nj.len(), 6);
        let bound = 13f64.powf(spec.omega_cutoff * p2);
        assert!((nj.length_bound() as f64) <= bound);
        for &p in s.range(2).unwrap() {
            assert_eq!(nj.coeff(p), c(-1.0));
        }
    }

    #[test]
    fn capacity_error_names_increment() {
        let primes = sieve_primes(1000).unwrap();
        let s = custom_scheme(1e6, &[E * E, 500.0], &primes).unwrap();
        let spec = MultiplicativeSpec::new(1.0, 2, 50.0).unwrap();
        match build_nj(&s, &spec, 1000) {
            Err(Error::Capacity(m)) => assert!(m.contains("j = 2")),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn eval_small_cases() {
        let p = DirichletPoly::from_real(&[(1, 1.0), (2, 1.0)]).unwrap();
        assert!((p.eval(0.0) - c(1.0 + 0.5f64.sqrt())).norm() < 1e-15);
        assert!((p.eval(0.0).re - 1.70711).abs() < 1e-5);
        assert_eq!(DirichletPoly::one().eval(123.4), c(1.0));
    }

    #[test]
    fn product_small_cases() {
        let a = DirichletPoly::from_real(&[(1, 1.0), (2, 1.0)]).unwrap();
        let b = DirichletPoly::from_real(&[(1, 1.0), (3, 1.0)]).unwrap();
        let ab = poly_product(&[a.clone(), b], 100).unwrap();
        let keys: Vec<u64> = ab.coeffs().keys().copied().collect();
        assert_eq!(keys, vec![1, 2, 3, 6]);
        assert!(ab.coeffs().values().all(|&v| v == c(1.0)));
        assert_eq!(ab.length_bound(), 6);
        assert_eq!(poly_product(&[a.clone(), DirichletPoly::one()], 100).unwrap(), a);
    }

    #[test]
    fn fast_evaluator_matches_explicit_polynomial() {
        let range = [11u64, 13, 17, 19, 23, 29];
        for alpha in [-1.0, -0.3, 0.7] {
            let explicit = truncated_exp_poly(&range, c(alpha), 7, 1_000_000).unwrap();
            let fast = TruncatedExp::new(&range, c(alpha), 7);
            for t in [0.0, 3.3, 1e4 + 0.5] {
                let d = (explicit.eval(t) - fast.eval(t)).norm();
                assert!(d < 1e-12 * (1.0 + t) * explicit.abs_bound(), "t={t} alpha={alpha} d={d}");
            }
        }
    }

    #[test]
    fn exp_gap_cases() {
        let primes = sieve_primes(100).unwrap();
        let s = custom_scheme(1e4, &[E * E, 14.0], &primes).unwrap();
        let g = exp_identity_gap(&s, 2, c(-1.0), 10.0, 6, 100_000).unwrap();
        assert!(g.gap < 1e-6);
        assert!(g.coeff_mismatch < 1e-15);
        let z = exp_identity_gap(&s, 2, c(0.0), 10.0, 6, 100_000).unwrap();
        assert_eq!(z.gap, 0.0);
    }

    #[test]
    fn coefficients_equal_exact_rationals() {
        let range = [11u64, 13, 17];
        for (num, den) in [(-1i64, 1i64), (1, 2), (-3, 4)] {
            let alpha = Ratio::new(num, den);
            let af = num as f64 / den as f64;
            let poly = truncated_exp_poly(&range, c(af), 8, 1_000_000).unwrap();
            for (&n, &a) in poly.coeffs() {
                if n > 1_000_000 {
                    continue;
                }
                let mut exact = Ratio::from_integer(1i64);
                for (_, e) in factorize(n) {
                    exact = exact * alpha.pow(e as i32) / Ratio::from_integer((1..=e as i64).product::<i64>());
                }
                let ef = *exact.numer() as f64 / *exact.denom() as f64;
                assert!((a.re - ef).abs() <= 4.0 * f64::EPSILON * ef.abs(), "n={n}");
                assert_eq!(a.im, 0.0);
            }
        }
    }

    #[test]
    fn tower_exponent_at_paper_threshold() {
        assert!(tower_length_exponent(1e4, 500.0) <= 0.1);
        assert!(tower_length_exponent(5e3, 500.0) > 0.1);
    }

    #[test]
    fn csv_round_trip() {
        let p = DirichletPoly::from_pairs([(1, c(1.0)), (6, Complex64::new(0.25, -3.5))]).unwrap();
        let back = DirichletPoly::from_csv(&p.to_csv()).unwrap();
        assert_eq!(p, back);
        assert!(p.to_csv().starts_with("n,re,im\n1,1,0\n"));
    }

    fn small_poly() -> impl Strategy<Value = DirichletPoly> {
        proptest::collection::vec((1u64..40, -2.0f64..2.0, -2.0f64..2.0), 1..6).prop_map(|v| {
            DirichletPoly::from_pairs(v.into_iter().map(|(n, a, b)| (n, Complex64::new(a, b)))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn product_is_evaluation_homomorphism(a in small_poly(), b in small_poly(), t in -50.0f64..5000.0) {
            let ab = a.mul(&b, 10_000).unwrap();
            let lhs = ab.eval(t);
            let rhs = a.eval(t) * b.eval(t);
            prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + a.abs_bound() * b.abs_bound()));
        }

        #[test]
        fn product_commutes_and_associates(a in small_poly(), b in small_poly(), c3 in small_poly()) {
            let ab = a.mul(&b, 10_000).unwrap();
            let ba = b.mul(&a, 10_000).unwrap();
            prop_assert_eq!(ab.coeffs().keys().collect::<Vec<_>>(), ba.coeffs().keys().collect::<Vec<_>>());
            for (n, v) in ab.coeffs() {
                prop_assert!((v - ba.coeff(*n)).norm() < 1e-12);
            }
            let l = ab.mul(&c3, 10_000).unwrap();
            let r = a.mul(&b.mul(&c3, 10_000).unwrap(), 10_000).unwrap();
            for (n, v) in l.coeffs() {
                prop_assert!((v - r.coeff(*n)).norm() < 1e-12);
            }
        }

        #[test]
        fn triangle_bound(a in small_poly(), t in -1e4f64..1e4) {
            prop_assert!(a.eval(t).norm() <= a.abs_bound() * (1.0 + 1e-12));
        }
    }
}
