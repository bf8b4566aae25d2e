//! Fast invariant suite behind the `selftest` command.
//!
//! Every check is a pure function of the seed; reductions are block-ordered,
//! so the CSV is byte-identical across runs and worker counts.

use crate::critline::{
    count_sign_changes, critical_sample, critical_sample_oracle, decode_records, encode_records, hardy_z,
    hardy_z_oracle, EvalAccuracy, GridRecord,
};
use crate::dirpoly::{exp_identity_gap, DirichletPoly};
use crate::error::{Error, Result};
use crate::inequality::{check_interpolation, sample_grid, verify_holder, InterpolationConfig, ProductVariant};
use crate::moments::{MomentBatch, Target};
use crate::primes::{build_scheme, custom_scheme, scheme_prime_limit, sieve_primes};
use crate::twisted::{
    cutoff_free_sum_check, f_sum, lemma1_main, rankin_bound_check, CutoffFn, ShiftConfig,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::E;

pub const SELFTEST_HEADER: &str = "suite,check,value,tolerance,pass";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Random points per sampled check.
    pub samples: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self { seed: 20_240_601, samples: 48 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestRow {
    pub suite: &'static str,
    pub check: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SelftestReport {
    pub rows: Vec<SelftestRow>,
}

impl SelftestReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SELFTEST_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{:e},{:e},{}\n", r.suite, r.check, r.value, r.tolerance, r.pass));
        }
        out
    }

    fn below(&mut self, suite: &'static str, check: &'static str, value: f64, tolerance: f64) {
        self.rows.push(SelftestRow { suite, check, value, tolerance, pass: value <= tolerance });
    }

    fn equal(&mut self, suite: &'static str, check: &'static str, value: f64, expected: f64) {
        self.rows.push(SelftestRow { suite, check, value, tolerance: expected, pass: value == expected });
    }
}

// Independent stream per suite so adding a check does not move the others.
fn stream(seed: u64, suite: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite);
    rng
}

pub fn run_selftest(cfg: &SelftestConfig) -> Result<SelftestReport> {
    if cfg.samples == 0 {
        return Err(Error::Config("selftest needs at least one sample".into()));
    }
    let acc = EvalAccuracy::default();
    let mut rep = SelftestReport::default();

    // critical line
    let mut rng = stream(cfg.seed, 1);
    let mut abs_gap: f64 = 0.0;
    let mut deriv_gap: f64 = 0.0;
    for _ in 0..cfg.samples {
        let t = rng.gen_range(50.0..5000.0);
        let s = critical_sample(t, &acc)?;
        let o = critical_sample_oracle(t, &acc)?;
        abs_gap = abs_gap.max((s.z.abs() - o.zeta.norm()).abs());
        if s.z.abs() > 1e-3 {
            let rhs = s.z_prime * s.z_prime + s.theta_prime * s.theta_prime * s.z * s.z;
            deriv_gap = deriv_gap.max((s.zeta_prime.norm_sqr() - rhs).abs() / rhs);
        }
    }
    rep.below("critline", "abs_z_vs_abs_zeta", abs_gap, 1e-8);
    rep.below("critline", "zeta_prime_identity", deriv_gap, 1e-6);
    let mut rs_gap: f64 = 0.0;
    for _ in 0..cfg.samples {
        let t = rng.gen_range(100.0..1e4);
        rs_gap = rs_gap.max((hardy_z(t, &acc)?.0 - hardy_z_oracle(t, &acc)?.0).abs());
    }
    rep.below("critline", "rs_vs_em", rs_gap, 1e-6);
    rep.equal("critline", "sign_changes_0_100", count_sign_changes(0.0, 100.0, 0.05, &acc)? as f64, 29.0);
    let recs: Vec<GridRecord> = (0..cfg.samples)
        .map(|_| GridRecord {
            t: rng.gen(),
            z: rng.gen(),
            z_prime: rng.gen(),
            theta: rng.gen(),
            theta_prime: rng.gen(),
        })
        .collect();
    let back = decode_records(&encode_records(&recs))?;
    rep.equal("critline", "cache_round_trip", f64::from(u8::from(back == recs)), 1.0);

    // prime scheme and Dirichlet polynomials
    let table = sieve_primes(scheme_prime_limit(1e5, 0.8)?)?;
    let scheme = build_scheme(1e5, 0.8, &table)?;
    let mut overlap = 0usize;
    for j in 2..=scheme.ell() {
        for i in 2..j {
            let (a, b) = (scheme.range(i)?, scheme.range(j)?);
            overlap += a.iter().filter(|p| b.contains(p)).count();
        }
    }
    rep.equal("primes_scheme", "range_overlap", overlap as f64, 0.0);
    let small = sieve_primes(1000)?;
    let toy = custom_scheme(1e4, &[E * E, 14.0, 40.0], &small)?;
    let mut rng = stream(cfg.seed, 2);
    let mut gap: f64 = 0.0;
    let mut mismatch: f64 = 0.0;
    for _ in 0..cfg.samples.min(8) {
        let t = rng.gen_range(1e4..1.1e4);
        let alpha = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let g = exp_identity_gap(&toy, 3, alpha, t, 4, 1_000_000)?;
        gap = gap.max(g.gap);
        mismatch = mismatch.max(g.coeff_mismatch);
    }
    rep.below("dirpoly", "exp_identity_gap", gap, 1e-10);
    rep.below("dirpoly", "exp_identity_coeffs", mismatch, 1e-12);

    // interpolation inequality
    let grid = sample_grid(cfg.seed ^ 3, cfg.samples, 1e4, 1.1e4)?;
    let mut failures = 0usize;
    for k in [1.0, 1.5, 2.0] {
        for variant in [ProductVariant::Full, ProductVariant::Partial] {
            let mut icfg = InterpolationConfig::new(k, toy.clone());
            icfg.variant = variant;
            failures += check_interpolation(&grid, &icfg, Target::Zeta)?.failures().len();
        }
    }
    rep.equal("inequality", "interpolation_failures", failures as f64, 0.0);

    // moments
    let batch = MomentBatch::new(1e3, 8, &acc, None)?;
    let mut violations = 0usize;
    let mut ratio = 0.0;
    for k in [1.0, 2.0] {
        let m0 = batch.estimate(k, 0.0, Target::Zeta)?;
        let m1 = batch.estimate(k, 1.0, Target::Zeta)?;
        if k == 1.0 {
            ratio = m0.ratio_to_conjectured_power();
        }
        for h in [0.25, 0.5, 0.75] {
            let mh = batch.estimate(k, h, Target::Zeta)?;
            violations += usize::from(!verify_holder(&m0, &m1, &mh, h)?.pass);
        }
    }
    rep.equal("moments", "holder_violations", violations as f64, 0.0);
    rep.below("moments", "second_moment_ratio_gap", (ratio - 1.0).abs(), 0.15);

    // twisted moments
    let mut rng = stream(cfg.seed, 4);
    let box_poly = random_box_poly(&mut rng)?;
    let z1 = Complex64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-1.0..1.0));
    let z2 = Complex64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-1.0..1.0));
    let brute = f_sum(&box_poly.0, z1, z2)?;
    let product = box_poly.1.iter().map(|f| f.f_local(z1, z2)).product::<Complex64>();
    rep.below("twisted", "f_sum_euler_product", (brute - product).norm() / product.norm(), 1e-12);
    let phi = CutoffFn::default();
    let one = DirichletPoly::one();
    let coarse = lemma1_main(&one, 1e4, &ShiftConfig::paper(1e4, 32), &phi, Target::Zeta)?.value;
    let fine = lemma1_main(&one, 1e4, &ShiftConfig::paper(1e4, 64), &phi, Target::Zeta)?.value;
    rep.below("twisted", "lemma1_node_doubling", ((coarse - fine) / fine).abs(), 1e-6);
    let window = [11, 13, 17, 19, 23, 29];
    let mut rankin_fail = 0usize;
    for r in 1..=4 {
        rankin_fail += usize::from(!rankin_bound_check(&window[..4], r)?.pass);
    }
    rep.equal("twisted", "rankin_failures", rankin_fail as f64, 0.0);
    let k = rng.gen_range(1.1..2.0);
    let euler = cutoff_free_sum_check(&window[..3], k, 4, z1 * 0.5, z2 * 0.5)?;
    rep.below("twisted", "cutoff_free_euler_identity", euler.rel_gap, 1e-10);
    Ok(rep)
}

// Multiplicative polynomial supported on {2^a 3^b 5^c} with per-prime caps.
struct LocalFactor {
    p: u64,
    coeffs: Vec<f64>,
}

impl LocalFactor {
    fn f_local(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        let lp = (self.p as f64).ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in self.coeffs.iter().enumerate() {
                let (lo, hi) = (i.min(j) as f64, i.max(j) as f64);
                let e = ((z1 + z2) * lo - z1 * i as f64 - z2 * j as f64 - hi) * lp;
                acc += a * b * e.exp();
            }
        }
        acc
    }
}

fn random_box_poly(rng: &mut ChaCha8Rng) -> Result<(DirichletPoly, Vec<LocalFactor>)> {
    let factors: Vec<LocalFactor> = [(2u64, 3usize), (3, 2), (5, 1)]
        .iter()
        .map(|&(p, cap)| {
            let mut coeffs = vec![1.0];
            coeffs.extend((0..cap).map(|_| rng.gen_range(-1.0..1.0)));
            LocalFactor { p, coeffs }
        })
        .collect();
    let mut pairs = vec![(1u64, 1.0)];
    for f in &factors {
        let mut next = Vec::new();
        for &(n, a) in &pairs {
            let mut pe = 1u64;
            for c in &f.coeffs {
                next.push((n * pe, a * c));
                pe *= f.p;
            }
        }
        pairs = next;
    }
    Ok((DirichletPoly::from_real(&pairs)?, factors))
}
