//! Both sides of the pointwise interpolation bound
//!
//! `|f|^{2k-2} |f'|^2 <= 2k |f|^2 |f'|^2 prod |N_j(s;k-2)|^2 + (4-2k) |f'|^2 prod |N_j(s;k-1)|^2
//!                      + sum_v ( ... ) |P_v(s) / (c_p P_v)|^{2 ceil(c_p P_v)}`
//!
//! for `f = zeta` or `f = Z`, and Hölder checks on computed moments.

use crate::critline::{critical_sample, EvalAccuracy};
use crate::dirpoly::{build_nj, taylor_exp, MultiplicativeSpec};
use crate::error::{Error, Result};
use crate::moments::{MomentEstimate, Target};
use crate::primes::IncrementScheme;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProductVariant {
    /// Second summand of each `v` term carries `prod_{2 <= j <= ell}`.
    Full,
    /// Second summand of each `v` term carries `prod_{2 <= j < v}`.
    Partial,
}

impl ProductVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProductVariant::Full => "full_product",
            ProductVariant::Partial => "partial_product",
        }
    }
}

impl std::str::FromStr for ProductVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" | "full_product" => Ok(ProductVariant::Full),
            "partial" | "partial_product" => Ok(ProductVariant::Partial),
            other => Err(Error::Config(format!("unknown product variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationConfig {
    pub k: f64,
    pub scheme: IncrementScheme,
    pub c_omega: f64,
    pub c_p: f64,
    pub variant: ProductVariant,
    /// Evaluate each `N_j` from its enumerated coefficients, with this term
    /// cap, instead of from the prime sum.
    pub explicit_cap: Option<usize>,
    pub accuracy: EvalAccuracy,
}

impl InterpolationConfig {
    pub fn new(k: f64, scheme: IncrementScheme) -> Self {
        Self {
            k,
            scheme,
            c_omega: 500.0,
            c_p: 50.0,
            variant: ProductVariant::Full,
            explicit_cap: None,
            accuracy: EvalAccuracy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1.0..=2.0).contains(&self.k) {
            return Err(Error::Domain(format!("k must lie in [1, 2], got {}", self.k)));
        }
        if !(self.c_omega > 0.0 && self.c_omega.is_finite()) || !(self.c_p > 0.0 && self.c_p.is_finite()) {
            return Err(Error::Domain("c_omega and c_p must be positive".into()));
        }
        self.accuracy.validate()
    }
}

/// `ceil(c * sum 1/p)` from the upper bound `sum ceil(2^60 / p) / 2^60` of
/// the prime sum and the exact binary value of `c`.
pub fn ceil_scaled_reciprocal_sum(primes: &[u64], c: f64) -> Result<u64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("scale must be positive, got {c}")));
    }
    const SHIFT: u32 = 60;
    let one: u128 = 1 << SHIFT;
    let upper: u128 = primes.iter().map(|&p| one.div_ceil(u128::from(p))).sum();
    if upper == 0 {
        return Ok(0);
    }
    // c = mant * 2^exp exactly
    let bits = c.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if raw_exp == 0 { (frac, -1074) } else { (frac | (1 << 52), raw_exp - 1075) };
    let prod = u128::from(mant)
        .checked_mul(upper)
        .ok_or_else(|| Error::Capacity("scaled variance overflows".into()))?;
    let shift = exp - SHIFT as i32;
    let value = if shift >= 0 {
        if shift >= 64 || prod.leading_zeros() < shift as u32 + 64 {
            return Err(Error::Capacity("scaled variance exceeds u64".into()));
        }
        prod << shift
    } else {
        let s = (-shift) as u32;
        if s >= 128 {
            1
        } else {
            prod.div_ceil(1u128 << s)
        }
    };
    u64::try_from(value).map_err(|_| Error::Capacity("scaled variance exceeds u64".into()))
}

/// Per-increment data for repeated evaluation.
#[derive(Debug, Clone)]
struct Increment {
    logs: Vec<f64>,
    inv_sqrt: Vec<f64>,
    max_omega: u32,
    variance: f64,
    /// `ceil(c_p P_v)`.
    weight_power: u64,
    explicit: Option<(crate::DirichletPoly, crate::DirichletPoly)>,
}

impl Increment {
    fn prime_sum(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, w) in self.logs.iter().zip(&self.inv_sqrt) {
            let (s, c) = (t * l).sin_cos();
            acc += Complex64::new(c, -s) * *w;
        }
        acc
    }
}

/// Both sides at one height, with the pieces of the right side.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop2Sides {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// The two leading summands (coefficients `2k` and `4-2k`).
    pub leading: [f64; 2],
    /// Weighted `v` terms, indexed from `v = 2`; zero for empty increments.
    pub v_terms: Vec<f64>,
}

impl Prop2Sides {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Prepared evaluator for one configuration.
#[derive(Debug, Clone)]
pub struct Interpolator {
    cfg: InterpolationConfig,
    increments: Vec<Increment>,
}

impl Interpolator {
    pub fn new(cfg: InterpolationConfig) -> Result<Self> {
        cfg.validate()?;
        let scheme = &cfg.scheme;
        let mut increments = Vec::new();
        for j in 2..=scheme.ell() {
            let range = scheme.range(j)?;
            let variance = scheme.variance(j)?;
            let spec_lo = MultiplicativeSpec::new(cfg.k - 2.0, j, cfg.c_omega)?;
            let spec_hi = MultiplicativeSpec::new(cfg.k - 1.0, j, cfg.c_omega)?;
            let explicit = match cfg.explicit_cap {
                Some(cap) => Some((build_nj(scheme, &spec_lo, cap)?, build_nj(scheme, &spec_hi, cap)?)),
                None => None,
            };
            increments.push(Increment {
                logs: range.iter().map(|&p| (p as f64).ln()).collect(),
                inv_sqrt: range.iter().map(|&p| 1.0 / (p as f64).sqrt()).collect(),
                max_omega: spec_lo.max_omega(variance),
                variance,
                weight_power: ceil_scaled_reciprocal_sum(range, cfg.c_p)?,
                explicit,
            });
        }
        Ok(Self { cfg, increments })
    }

    pub fn config(&self) -> &InterpolationConfig {
        &self.cfg
    }

    /// `ceil(c_p P_v)` for `v = 2..=ell`.
    pub fn weight_powers(&self) -> Vec<u64> {
        self.increments.iter().map(|i| i.weight_power).collect()
    }

    /// `prop2_sides`.
    pub fn sides(&self, t: f64, target: Target) -> Result<Prop2Sides> {
        let s = critical_sample(t, &self.cfg.accuracy)?;
        let a = s.abs_zeta();
        let b = match target {
            Target::Zeta => s.abs_zeta_prime(),
            Target::HardyZ => s.z_prime.abs(),
        };
        Ok(self.sides_from_values(t, a, b))
    }

    /// Right and left sides given `|f|` and `|f'|` at height `t`.
    pub fn sides_from_values(&self, t: f64, a: f64, b: f64) -> Prop2Sides {
        let k = self.cfg.k;
        let c1 = 2.0 * k;
        let c2 = 4.0 - 2.0 * k;
        let (a2, b2) = (a * a, b * b);

        let mut n_lo = Vec::with_capacity(self.increments.len());
        let mut n_hi = Vec::with_capacity(self.increments.len());
        let mut log_w = Vec::with_capacity(self.increments.len());
        for inc in &self.increments {
            let p = inc.prime_sum(t);
            let (lo, hi) = match &inc.explicit {
                Some((plo, phi)) => (plo.eval(t), phi.eval(t)),
                None => (
                    taylor_exp(p * (k - 2.0), inc.max_omega),
                    taylor_exp(p * (k - 1.0), inc.max_omega),
                ),
            };
            n_lo.push(lo.norm_sqr());
            n_hi.push(hi.norm_sqr());
            log_w.push(if inc.variance > 0.0 {
                2.0 * inc.weight_power as f64 * (p.norm().ln() - (self.cfg.c_p * inc.variance).ln())
            } else {
                f64::NEG_INFINITY
            });
        }

        let prod_lo: f64 = n_lo.iter().product();
        let prod_hi: f64 = n_hi.iter().product();
        let lead1 = c1 * a2 * b2 * prod_lo;
        let lead2 = if c2 == 0.0 { 0.0 } else { c2 * b2 * prod_hi };

        let mut v_terms = Vec::with_capacity(self.increments.len());
        let mut partial_lo = 1.0;
        let mut partial_hi = 1.0;
        for (idx, inc) in self.increments.iter().enumerate() {
            let second_prod = match self.cfg.variant {
                ProductVariant::Full => prod_hi,
                ProductVariant::Partial => partial_hi,
            };
            let inner = c1 * a2 * b2 * partial_lo + if c2 == 0.0 { 0.0 } else { c2 * b2 * second_prod };
            let term = if inc.variance > 0.0 && inner > 0.0 { (inner.ln() + log_w[idx]).exp() } else { 0.0 };
            v_terms.push(term);
            partial_lo *= n_lo[idx];
            partial_hi *= n_hi[idx];
        }

        let lhs = if k == 1.0 { b2 } else { a.powf(2.0 * k - 2.0) * b2 };
        let rhs = lead1 + lead2 + v_terms.iter().sum::<f64>();
        Prop2Sides { t, lhs, rhs, leading: [lead1, lead2], v_terms }
    }
}

/// `prop2_sides` without a prepared evaluator.
pub fn prop2_sides(t: f64, cfg: &InterpolationConfig, target: Target) -> Result<Prop2Sides> {
    Interpolator::new(cfg.clone())?.sides(t, target)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationRow {
    pub t: f64,
    pub k: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InterpolationReport {
    pub rows: Vec<InterpolationRow>,
}

impl InterpolationReport {
    pub fn failures(&self) -> Vec<&InterpolationRow> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }

    /// Smallest `rhs - lhs`; `None` on an empty report.
    pub fn min_margin(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.margin).reduce(f64::min)
    }

    pub fn extend(&mut self, other: InterpolationReport) {
        self.rows.extend(other.rows);
    }

    /// CSV with columns `t,k,lhs,rhs,margin,pass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,k,lhs,rhs,margin,pass\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{},{}", r.t, r.k, r.lhs, r.rhs, r.margin, r.pass);
        }
        out
    }
}

/// `check_interpolation` over a grid of heights, in grid order.
/// `n` heights drawn uniformly from `[lo, hi)` by ChaCha8 seeded with `seed`.
pub fn sample_grid(seed: u64, n: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("sample interval [{lo}, {hi}) is empty")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| rng.gen_range(lo..hi)).collect())
}

pub fn check_interpolation(grid: &[f64], cfg: &InterpolationConfig, target: Target) -> Result<InterpolationReport> {
    let interp = Interpolator::new(cfg.clone())?;
    let rows = grid
        .par_iter()
        .map(|&t| {
            interp.sides(t, target).map(|s| InterpolationRow {
                t,
                k: cfg.k,
                lhs: s.lhs,
                rhs: s.rhs,
                margin: s.margin(),
                pass: s.holds(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InterpolationReport { rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderReport {
    pub h: f64,
    pub lhs: f64,
    /// `I(k,1)^h I(k,0)^{1-h}`.
    pub rhs: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Relative tolerance carried by the three quadratures into the Hölder bound.
pub fn holder_tolerance(m_k0: &MomentEstimate, m_k1: &MomentEstimate, m_kh: &MomentEstimate, h: f64) -> f64 {
    m_kh.est_rel_error + h * m_k1.est_rel_error + (1.0 - h) * m_k0.est_rel_error
}

/// `verify_holder`.
pub fn verify_holder(
    m_k0: &MomentEstimate,
    m_k1: &MomentEstimate,
    m_kh: &MomentEstimate,
    h: f64,
) -> Result<HolderReport> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::Domain(format!("Hölder exponent h must lie in [0, 1], got {h}")));
    }
    let r0 = &m_k0.request;
    for m in [m_k1, m_kh] {
        let r = &m.request;
        if r.big_t != r0.big_t || r.k != r0.k || r.target != r0.target || m.mesh != m_k0.mesh || m.panels != m_k0.panels
        {
            return Err(Error::Config("moment estimates must share T, k, target and mesh".into()));
        }
    }
    if m_k0.request.h != 0.0 || m_k1.request.h != 1.0 || m_kh.request.h != h {
        return Err(Error::Config("estimates must be at h = 0, h = 1 and the tested h".into()));
    }
    let rhs = m_k1.value.powf(h) * m_k0.value.powf(1.0 - h);
    let tol = holder_tolerance(m_k0, m_k1, m_kh, h);
    Ok(HolderReport { h, lhs: m_kh.value, rhs, tol, pass: m_kh.value <= rhs * (1.0 + tol) })
}
