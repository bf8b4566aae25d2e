//! Prime sieving, iterated logarithms and the increment scheme of prime
//! ranges `[T_{j-1}, T_j)` with their reciprocal sums `P_j`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt::Write as _;

/// Default upper limit for [`sieve_primes`].
pub const DEFAULT_SIEVE_CAP: u64 = 100_000_000;

const SEGMENT_LEN: u64 = 1 << 18;

/// All primes up to `limit`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Primes `p` with `lo <= p < hi` (real bounds).
    pub fn in_range(&self, lo: f64, hi: f64) -> &[u64] {
        let start = self.primes.partition_point(|&p| (p as f64) < lo);
        let end = self.primes.partition_point(|&p| (p as f64) < hi);
        &self.primes[start..end.max(start)]
    }
}

/// Segmented sieve of Eratosthenes up to `limit` (inclusive), capped at
/// [`DEFAULT_SIEVE_CAP`].
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    sieve_primes_with_cap(limit, DEFAULT_SIEVE_CAP)
}

pub fn sieve_primes_with_cap(limit: u64, cap: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::Bounds(format!("sieve limit {limit} is below 2")));
    }
    if limit > cap {
        return Err(Error::Bounds(format!("sieve limit {limit} exceeds cap {cap}")));
    }
    let root = isqrt(limit);
    let base = simple_sieve(root.max(2));
    let mut primes = Vec::with_capacity(estimate_prime_count(limit));
    let mut seg = vec![true; SEGMENT_LEN as usize];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEGMENT_LEN - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        seg[..len].iter_mut().for_each(|b| *b = true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut m = (p * p).max(lo.div_ceil(p) * p);
            while m <= hi {
                seg[(m - lo) as usize] = false;
                m += p;
            }
        }
        primes.extend(
            seg[..len]
                .iter()
                .enumerate()
                .filter(|(_, &is_p)| is_p)
                .map(|(i, _)| lo + i as u64),
        );
        lo = hi + 1;
    }
    Ok(PrimeTable { limit, primes })
}

fn simple_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut is_p = vec![true; n + 1];
    is_p[0] = false;
    if n >= 1 {
        is_p[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is_p[i] {
            let mut m = i * i;
            while m <= n {
                is_p[m] = false;
                m += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| is_p[k]).map(|k| k as u64).collect()
}

fn estimate_prime_count(n: u64) -> usize {
    let x = n as f64;
    if x < 17.0 {
        8
    } else {
        (1.26 * x / x.ln()) as usize
    }
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `j`-fold iterated natural logarithm. Every stage must stay positive.
pub fn iterated_log(x: f64, j: u32) -> Result<f64> {
    if j == 0 {
        return Err(Error::Domain("iterated_log needs j >= 1".into()));
    }
    let mut v = x;
    for stage in 0..j {
        if !(v > 0.0) {
            return Err(Error::Domain(format!(
                "log stage {stage} of {x} has non-positive argument {v}"
            )));
        }
        v = v.ln();
    }
    if !(v > 0.0) {
        return Err(Error::Domain(format!("log_{j}({x}) = {v} is not positive")));
    }
    Ok(v)
}

/// Sum of `p^{-s}` over `primes`, ascending. Real `s` uses `powf` so that
/// `s = 1` reproduces the variances bit for bit.
pub fn prime_power_sum(primes: &[u64], s: Complex64) -> Complex64 {
    if s.im == 0.0 {
        let mut acc = 0.0;
        for &p in primes {
            acc += (p as f64).powf(-s.re);
        }
        Complex64::new(acc, 0.0)
    } else {
        let mut acc = Complex64::new(0.0, 0.0);
        for &p in primes {
            acc += (-s * (p as f64).ln()).exp();
        }
        acc
    }
}

/// Partition of primes into consecutive ranges with reciprocal sums.
///
/// Indices follow the usual convention: boundaries are `T_1..T_ell`, ranges
/// and variances exist for `2 <= j <= ell`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementScheme {
    big_t: f64,
    threshold: Option<f64>,
    ell: usize,
    boundaries: Vec<f64>,
    ranges: Vec<Vec<u64>>,
    variances: Vec<f64>,
}

impl IncrementScheme {
    pub fn big_t(&self) -> f64 {
        self.big_t
    }

    pub fn log_t(&self) -> f64 {
        self.big_t.ln()
    }

    /// `None` in custom-boundary mode.
    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// `T_j` for `1 <= j <= ell`.
    pub fn boundary(&self, j: usize) -> Result<f64> {
        if j == 0 || j > self.ell {
            return Err(Error::Index(format!("boundary index {j} outside 1..={}", self.ell)));
        }
        Ok(self.boundaries[j - 1])
    }

    fn check_increment(&self, j: usize) -> Result<usize> {
        if j < 2 || j > self.ell {
            return Err(Error::Index(format!("increment index {j} outside 2..={}", self.ell)));
        }
        Ok(j - 2)
    }

    /// Primes of the `j`-th range.
    pub fn range(&self, j: usize) -> Result<&[u64]> {
        Ok(&self.ranges[self.check_increment(j)?])
    }

    /// `P_j`.
    pub fn variance(&self, j: usize) -> Result<f64> {
        Ok(self.variances[self.check_increment(j)?])
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    /// Increment indices whose range is empty.
    pub fn empty_increments(&self) -> Vec<usize> {
        (2..=self.ell).filter(|&j| self.ranges[j - 2].is_empty()).collect()
    }

    /// Increment indices with at least one prime.
    pub fn nonempty_increments(&self) -> Vec<usize> {
        (2..=self.ell).filter(|&j| !self.ranges[j - 2].is_empty()).collect()
    }

    /// `2 log_j T - 2 log_{j+1} T`, the Mertens prediction for `P_j`.
    pub fn mertens_prediction(&self, j: usize) -> Result<f64> {
        self.check_increment(j)?;
        let lj = iterated_log(self.big_t, j as u32)?;
        Ok(2.0 * lj - 2.0 * lj.ln())
    }

    /// `prime_sum_at`: the prime sum over the `j`-th range at `s`.
    pub fn prime_sum_at(&self, j: usize, s: Complex64) -> Result<Complex64> {
        Ok(prime_power_sum(self.range(j)?, s))
    }

    /// CSV with columns `j,T_j,P_j,range_prime_count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,T_j,P_j,range_prime_count\n");
        for j in 2..=self.ell {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                j,
                self.boundaries[j - 1],
                self.variances[j - 2],
                self.ranges[j - 2].len()
            );
        }
        out
    }

    fn assemble(
        big_t: f64,
        threshold: Option<f64>,
        boundaries: Vec<f64>,
        primes: &PrimeTable,
    ) -> Result<Self> {
        let ell = boundaries.len();
        let mut ranges = Vec::with_capacity(ell.saturating_sub(1));
        let mut variances = Vec::with_capacity(ell.saturating_sub(1));
        // Lower edge is the running maximum of earlier boundaries so that the
        // ranges stay disjoint when the boundary sequence is not monotone.
        let mut lower = boundaries[0];
        for &upper in &boundaries[1..] {
            if upper > lower && (primes.limit() as f64) + 1.0 < upper {
                return Err(Error::Coverage(format!(
                    "range [{lower}, {upper}) but table limit is {}",
                    primes.limit()
                )));
            }
            let r = if upper > lower { primes.in_range(lower, upper).to_vec() } else { Vec::new() };
            let p = prime_power_sum(&r, Complex64::new(1.0, 0.0)).re;
            ranges.push(r);
            variances.push(p);
            lower = lower.max(upper);
        }
        Ok(Self { big_t, threshold, ell, boundaries, ranges, variances })
    }
}

/// Boundaries `T_1 = e^2`, `T_j = exp(log T / (log_j T)^2)` for `j <= ell`,
/// where `ell` is the largest integer with `log_ell T >= threshold`.
pub fn scheme_boundaries(big_t: f64, threshold: f64) -> Result<Vec<f64>> {
    if !(threshold > 0.0) || !threshold.is_finite() {
        return Err(Error::Domain(format!("threshold {threshold} must be positive")));
    }
    if !(big_t > std::f64::consts::E) || !big_t.is_finite() {
        return Err(Error::Domain(format!("T = {big_t} must exceed e")));
    }
    let mut logs = Vec::new();
    while logs.len() <= 64 {
        match iterated_log(big_t, logs.len() as u32 + 1) {
            Ok(v) if v >= threshold => logs.push(v),
            _ => break,
        }
    }
    if logs.is_empty() {
        return Err(Error::SchemeUndefined(format!(
            "log T = {} is below threshold {threshold}",
            big_t.ln()
        )));
    }
    let log_t = big_t.ln();
    let mut boundaries = vec![std::f64::consts::E.powi(2)];
    for &lj in logs.iter().skip(1) {
        boundaries.push((log_t / (lj * lj)).exp());
    }
    Ok(boundaries)
}

/// Smallest prime-table limit that covers the scheme for `(T, threshold)`.
pub fn scheme_prime_limit(big_t: f64, threshold: f64) -> Result<u64> {
    let b = scheme_boundaries(big_t, threshold)?;
    Ok(b.iter().fold(0.0f64, |m, &x| m.max(x)).ceil() as u64)
}

/// Builds the increment scheme from [`scheme_boundaries`].
pub fn build_scheme(big_t: f64, threshold: f64, primes: &PrimeTable) -> Result<IncrementScheme> {
    let boundaries = scheme_boundaries(big_t, threshold)?;
    IncrementScheme::assemble(big_t, Some(threshold), boundaries, primes)
}

/// Scheme with caller-supplied boundaries `T_1 < T_2 < ... < T_ell`.
pub fn custom_scheme(big_t: f64, boundaries: &[f64], primes: &PrimeTable) -> Result<IncrementScheme> {
    if boundaries.is_empty() {
        return Err(Error::Domain("custom scheme needs at least one boundary".into()));
    }
    if !(boundaries[0] > 1.0) {
        return Err(Error::Domain("custom boundaries must exceed 1".into()));
    }
    if boundaries.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("custom boundaries must be strictly increasing".into()));
    }
    if !(big_t > 1.0) {
        return Err(Error::Domain(format!("T = {big_t} must exceed 1")));
    }
    IncrementScheme::assemble(big_t, None, boundaries.to_vec(), primes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn trial_division_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn small_tables() {
        assert_eq!(sieve_primes(30).unwrap().primes(), &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(sieve_primes(2).unwrap().primes(), &[2]);
    }

    #[test]
    fn bounds_errors() {
        assert!(matches!(sieve_primes(1), Err(Error::Bounds(_))));
        assert!(matches!(sieve_primes_with_cap(1001, 1000), Err(Error::Bounds(_))));
    }

    #[test]
    fn agrees_with_trial_division_up_to_ten_thousand() {
        let table = sieve_primes(10_000).unwrap();
        let oracle: Vec<u64> = (2..=10_000).filter(|&n| trial_division_is_prime(n)).collect();
        assert_eq!(table.primes(), oracle.as_slice());
        for n in [2u64, 3, 4, 97, 98, 1000, 7919] {
            let t = sieve_primes(n).unwrap();
            assert_eq!(t.len(), oracle.iter().filter(|&&p| p <= n).count());
        }
    }

    #[test]
    fn million_has_78498_primes() {
        // independent count: trial division by primes up to 1000
        let small: Vec<u64> = (2..=1000).filter(|&n| trial_division_is_prime(n)).collect();
        let count = (2..=1_000_000u64)
            .filter(|&n| small.iter().take_while(|&&p| p * p <= n).all(|&p| n % p != 0))
            .count();
        assert_eq!(count, 78498);
        assert_eq!(sieve_primes(1_000_000).unwrap().len(), count);
    }

    #[test]
    fn segment_boundaries_are_seamless() {
        let n = 3 * SEGMENT_LEN + 17;
        let t = sieve_primes(n).unwrap();
        assert!(t.primes().windows(2).all(|w| w[0] < w[1]));
        for &p in t.primes().iter().rev().take(200) {
            assert!(trial_division_is_prime(p));
        }
    }

    #[test]
    fn iterated_logs() {
        assert!((iterated_log(E.powf(E * E), 2).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(iterated_log(7.5, 1).unwrap(), 7.5f64.ln());
        let v = iterated_log(1e5, 2).unwrap();
        assert!((v - (1e5f64).ln().ln()).abs() < 1e-15);
        assert!((v - 2.4423).abs() < 2e-3);
        assert!(matches!(iterated_log(1e5, 4), Err(Error::Domain(_))));
        assert!(matches!(iterated_log(-1.0, 1), Err(Error::Domain(_))));
        assert!(matches!(iterated_log(0.5, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn scheme_at_e_to_e4() {
        let primes = sieve_primes(1000).unwrap();
        let s = build_scheme(E.powf(E.powi(4)), 2.0, &primes).unwrap();
        assert_eq!(s.ell(), 2);
        let t2 = s.boundary(2).unwrap();
        assert!((t2 - (E.powi(4) / 16.0).exp()).abs() < 1e-9);
        assert!((t2 - 30.3).abs() < 0.05);
        assert_eq!(s.range(2).unwrap(), &[11, 13, 17, 19, 23, 29]);
        let direct: f64 = [11.0, 13.0, 17.0, 19.0, 23.0, 29.0].iter().map(|p: &f64| 1.0 / p).sum();
        assert!((s.variance(2).unwrap() - direct).abs() < 1e-15);
        assert!((direct - 0.3573).abs() < 1e-4);
    }

    #[test]
    fn scheme_undefined_below_threshold() {
        let primes = sieve_primes(100).unwrap();
        assert!(matches!(build_scheme(1e5, 1e4, &primes), Err(Error::SchemeUndefined(_))));
    }

    #[test]
    fn coverage_error_when_table_too_small() {
        let primes = sieve_primes(20).unwrap();
        assert!(matches!(
            build_scheme(E.powf(E.powi(4)), 2.0, &primes),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn degenerate_scheme_has_empty_increment() {
        // log T ~ 11.5: T_2 ~ 6.9 < T_1 = e^2
        let primes = sieve_primes(2_000_000).unwrap();
        let s = build_scheme(1e5, 0.8, &primes).unwrap();
        assert_eq!(s.ell(), 3);
        assert_eq!(s.empty_increments(), vec![2]);
        assert_eq!(s.variance(2).unwrap(), 0.0);
        assert!(s.range(3).unwrap()[0] == 11);
    }

    #[test]
    fn mertens_check_on_synthetic_scheme() {
        // log T = 20, threshold 1: ell = 3, third range holds ~1e6 primes
        let big_t = 20f64.exp();
        let s0 = build_scheme(big_t, 1.0, &sieve_primes(100).unwrap());
        assert!(matches!(s0, Err(Error::Coverage(_))));
        let t3 = (20.0 / 20f64.ln().ln().powi(2)).exp();
        let primes = sieve_primes(t3 as u64 + 1).unwrap();
        let s = build_scheme(big_t, 1.0, &primes).unwrap();
        assert_eq!(s.ell(), 3);
        for j in s.nonempty_increments() {
            if s.range(j).unwrap().len() >= 50 {
                let ratio = s.variance(j).unwrap() / s.mertens_prediction(j).unwrap();
                assert!((ratio - 1.0).abs() <= 0.25, "j={j} ratio={ratio}");
            }
        }
    }

    #[test]
    fn prime_sums() {
        let primes = sieve_primes(100).unwrap();
        let s = custom_scheme(1e4, &[E * E, 14.0, 14.5, 50.0], &primes).unwrap();
        assert_eq!(s.range(2).unwrap(), &[11, 13]);
        let half = s.prime_sum_at(2, Complex64::new(0.5, 0.0)).unwrap();
        assert!((half.re - (11f64.powf(-0.5) + 13f64.powf(-0.5))).abs() < 1e-15);
        assert!((half.re - 0.5789).abs() < 1e-4);
        for j in 2..=4 {
            let one = s.prime_sum_at(j, Complex64::new(1.0, 0.0)).unwrap();
            assert_eq!(one.re, s.variance(j).unwrap());
        }
        assert_eq!(s.prime_sum_at(3, Complex64::new(0.5, 3.0)).unwrap(), Complex64::new(0.0, 0.0));
        assert!(matches!(s.prime_sum_at(1, Complex64::new(1.0, 0.0)), Err(Error::Index(_))));
        assert!(matches!(s.prime_sum_at(5, Complex64::new(1.0, 0.0)), Err(Error::Index(_))));
    }

    #[test]
    fn ranges_partition_primes() {
        let primes = sieve_primes(5000).unwrap();
        let s = custom_scheme(1e6, &[E * E, 40.0, 41.0, 300.0, 4000.0], &primes).unwrap();
        let mut all: Vec<u64> = (2..=s.ell()).flat_map(|j| s.range(j).unwrap().to_vec()).collect();
        let expected = primes.in_range(E * E, 4000.0).to_vec();
        all.sort_unstable();
        assert_eq!(all, expected);
    }

    #[test]
    fn csv_layout() {
        let primes = sieve_primes(1000).unwrap();
        let s = build_scheme(E.powf(E.powi(4)), 2.0, &primes).unwrap();
        let csv = s.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("j,T_j,P_j,range_prime_count"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "2");
        assert_eq!(row[3], "6");
    }
}
