//! Contour-integral main terms of the twisted second moment of `zeta'` and
//! the twisted fourth moment with derivative.

use super::arith::{BSeriesConfig, PreparedPoly, DEFAULT_PAIR_CAP};
use super::cutoff::{CutoffFn, CutoffRule};
use crate::critline::{zeta_em, EvalAccuracy};
use crate::dirpoly::DirichletPoly;
use crate::error::{Error, Result};
use crate::moments::Target;
use crate::quad::{circle_nodes, pairwise_sum_complex, ComplexKahan};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Nearest admissible distance between shifts that meet in a `zeta(1 + .)`.
pub const POLE_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftConfig {
    pub log_t: f64,
    pub radii: [f64; 4],
    pub nodes_per_circle: usize,
    /// Coefficient of `e_4^2 log^2(t / 2 pi)` in the fourth-moment bracket.
    pub log_square_coefficient: f64,
}

/// Coefficient obtained by differentiating the shifted formula.
pub const DERIVED_LOG_SQUARE: f64 = 0.25;

impl ShiftConfig {
    /// Radii `3^j / log T`.
    pub fn paper(big_t: f64, nodes_per_circle: usize) -> Self {
        let l = big_t.ln();
        Self {
            log_t: l,
            radii: [3.0 / l, 9.0 / l, 27.0 / l, 81.0 / l],
            nodes_per_circle,
            log_square_coefficient: DERIVED_LOG_SQUARE,
        }
    }

    /// Radii `j / (2 log T)`.
    pub fn compact(big_t: f64, nodes_per_circle: usize) -> Self {
        let l = big_t.ln();
        Self {
            log_t: l,
            radii: [0.5 / l, 1.0 / l, 1.5 / l, 2.0 / l],
            nodes_per_circle,
            log_square_coefficient: DERIVED_LOG_SQUARE,
        }
    }

    pub fn with_nodes(mut self, nodes_per_circle: usize) -> Self {
        self.nodes_per_circle = nodes_per_circle;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.nodes_per_circle;
        if n < 16 || n % 2 == 1 {
            return Err(Error::Config(format!("nodes_per_circle must be even and >= 16, got {n}")));
        }
        if self.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::Config("contour radii must be positive".into()));
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if (self.radii[i] - self.radii[j]).abs() < POLE_GUARD {
                    return Err(Error::Pole(format!("radii {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }
}

/// Value of a contour main term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourEstimate {
    pub value: f64,
    /// Imaginary part of the quadrature, zero up to rounding for real data.
    pub imag_residual: f64,
    pub nodes_per_circle: usize,
}

/// `A(z1, z2, z3, z4)`, the ratio of four `zeta(1 + z_i + z_j)` and `zeta(2 + sum z)`.
pub fn a_ratio(z: &[Complex64; 4], acc: &EvalAccuracy) -> Result<Complex64> {
    let mut num = Complex64::new(1.0, 0.0);
    for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
        let x = z[i] + z[j];
        if x.norm() < POLE_GUARD {
            return Err(Error::Pole(format!("z{} + z{} = {x} is at the pole", i + 1, j + 1)));
        }
        num *= zeta_em(Complex64::new(1.0, 0.0) + x, acc)?.zeta;
    }
    let den = zeta_em(Complex64::new(2.0, 0.0) + z[0] + z[1] + z[2] + z[3], acc)?.zeta;
    Ok(num / den)
}

/// `prod_{j < k} (z_k - z_j)`.
pub fn vandermonde(z: &[Complex64; 4]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for j in 0..4 {
        for k in j + 1..4 {
            acc *= z[k] - z[j];
        }
    }
    acc
}

fn check_length(poly: &DirichletPoly, big_t: f64, exponent: f64) -> Result<()> {
    let limit = big_t.powf(exponent);
    if poly.max_index() as f64 > limit {
        return Err(Error::Domain(format!(
            "polynomial length {} exceeds T^{exponent} = {limit:.1}",
            poly.max_index()
        )));
    }
    Ok(())
}

/// `zeta(1 + x) x^2`, analytic at `x = 0`.
fn zeta_times_square(x: Complex64, acc: &EvalAccuracy) -> Result<Complex64> {
    if x.norm() < POLE_GUARD {
        return Err(Error::Pole(format!("shift difference {x} is at the pole")));
    }
    Ok(zeta_em(Complex64::new(1.0, 0.0) + x, acc)?.zeta * x * x)
}

/// `lemma1_main`: contour main term of `int |f'|^2 |A|^2 phi(t/T) dt` for
/// `f = zeta` or `f = Z`, on the circles `radii[0]`, `radii[1]`.
pub fn lemma1_main(
    poly: &DirichletPoly,
    big_t: f64,
    cfg: &ShiftConfig,
    phi: &CutoffFn,
    target: Target,
) -> Result<ContourEstimate> {
    cfg.validate()?;
    check_length(poly, big_t, 0.45)?;
    let acc = EvalAccuracy::default();
    let n = cfg.nodes_per_circle;
    let c1 = circle_nodes(cfg.radii[0], n, 0.0);
    let c2 = circle_nodes(cfg.radii[1], n, 0.0);
    let rule = CutoffRule::new(big_t, phi)?;
    let prepared = PreparedPoly::new(poly, DEFAULT_PAIR_CAP)?;
    let trivial = prepared.len() == 1 && prepared.n[0] == 1;

    let terms = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (z1, w1) = c1[idx / n];
            let (z2, w2) = c2[idx % n];
            let f = if trivial {
                prepared.a[0] * prepared.a[0].conj()
            } else {
                prepared.f_sum(z1, -z2)
            };
            let zq = zeta_times_square(z1 - z2, &acc)?;
            let w = (z1 - z2) * 0.5;
            let mut m0 = Complex64::new(0.0, 0.0);
            let mut m2 = Complex64::new(0.0, 0.0);
            for (l, wt) in rule.log_t.iter().zip(&rule.weight) {
                let e = (w * l).exp() * *wt;
                m0 += e;
                m2 += e * (l * l);
            }
            let sum = z1 + z2;
            let bracket = match target {
                Target::Zeta => sum * sum * m0 - (z1 * z2 * 0.5).powu(2) * m2,
                Target::HardyZ => sum * sum * m0,
            };
            Ok(w1 * w2 * f * zq * bracket / (z1.powu(4) * z2.powu(4)))
        })
        .collect::<Result<Vec<_>>>()?;
    let total = pairwise_sum_complex(&terms);
    Ok(ContourEstimate { value: total.re, imag_residual: total.im, nodes_per_circle: n })
}

/// Taylor coefficients of `1 / zeta(2 + s)` about `s = 0` (radius of
/// convergence 4) from a Cauchy integral on `|s| = 2`.
pub fn inverse_zeta_two_coeffs(degree: usize, acc: &EvalAccuracy) -> Result<Vec<Complex64>> {
    const RHO: f64 = 2.0;
    const NODES: usize = 256;
    let samples = (0..NODES)
        .map(|k| {
            let s = Complex64::from_polar(RHO, 2.0 * PI * k as f64 / NODES as f64);
            Ok(1.0 / zeta_em(Complex64::new(2.0, 0.0) + s, acc)?.zeta)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..=degree)
        .map(|d| {
            let mut c = Complex64::new(0.0, 0.0);
            for (k, f) in samples.iter().enumerate() {
                let ang = -2.0 * PI * ((d * k) % NODES) as f64 / NODES as f64;
                c += f * Complex64::from_polar(1.0, ang);
            }
            c / (NODES as f64 * RHO.powi(d as i32))
        })
        .collect())
}

fn horner_real(c: &[f64], x: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
}

fn horner_pair(c0: &[f64], c2: &[f64], x: Complex64) -> (Complex64, Complex64) {
    let mut a0 = Complex64::new(0.0, 0.0);
    let mut a2 = Complex64::new(0.0, 0.0);
    for (&b0, &b2) in c0.iter().zip(c2).rev() {
        a0 = a0 * x + b0;
        a2 = a2 * x + b2;
    }
    (a0, a2)
}

/// Largest `|s|` at which the `1 / zeta(2 + s)` expansion is used.
pub const MAX_SHIFT_SUM: f64 = 1.5;
const SERIES_DEGREE: usize = 48;

/// `lemma2_main`: contour main term of `int |f|^2 |f'|^2 |A|^2 phi(t/T) dt`.
pub fn lemma2_main(
    poly: &DirichletPoly,
    big_t: f64,
    cfg: &ShiftConfig,
    phi: &CutoffFn,
    target: Target,
    bcfg: &BSeriesConfig,
) -> Result<ContourEstimate> {
    cfg.validate()?;
    bcfg.validate()?;
    check_length(poly, big_t, 0.2)?;
    let reach: f64 = cfg.radii.iter().sum();
    if reach >= 4.0 {
        return Err(Error::Pole(format!(
            "shift sums reach |s| = {reach:.3}; 1/zeta(2 + s) has a pole at s = -4 inside the contours"
        )));
    }
    if reach > MAX_SHIFT_SUM {
        return Err(Error::Regime(format!(
            "shift sums reach |s| = {reach:.3} > {MAX_SHIFT_SUM}; use smaller radii"
        )));
    }
    let acc = EvalAccuracy::default();
    let n = cfg.nodes_per_circle;
    let circles: Vec<Vec<(Complex64, Complex64)>> = cfg.radii.iter().map(|&r| circle_nodes(r, n, 0.0)).collect();
    let rule = CutoffRule::new(big_t, phi)?;
    let l0 = rule.centre();
    let prepared = PreparedPoly::new(poly, DEFAULT_PAIR_CAP)?;
    let trivial = prepared.len() == 1 && prepared.n[0] == 1;
    let a11 = if trivial { prepared.a[0].norm_sqr() } else { 0.0 };

    // H_m(s) = mu_m(s/2) / zeta(2 + s) as a polynomial in s
    let inv_zeta = inverse_zeta_two_coeffs(SERIES_DEGREE, &acc)?;
    let series = |m: u32| -> Vec<Complex64> {
        let mu = rule.centred_moments(m, l0, SERIES_DEGREE);
        let mut scaled = Vec::with_capacity(mu.len());
        let mut f = 1.0;
        for (k, v) in mu.iter().enumerate() {
            if k > 0 {
                f *= 2.0 * k as f64;
            }
            scaled.push(v / f);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); SERIES_DEGREE + 1];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..=i {
                *o += inv_zeta[j] * scaled[i - j];
            }
        }
        let scale: f64 = out.iter().enumerate().map(|(k, c)| c.norm() * reach.powi(k as i32)).sum();
        let keep = out
            .iter()
            .enumerate()
            .rposition(|(k, c)| c.norm() * reach.powi(k as i32) > 1e-18 * scale)
            .unwrap_or(0);
        out.truncate(keep + 1);
        out
    };
    let h0 = series(0);
    let h2 = series(2);
    let degree = h0.len().max(h2.len());
    let real_coeffs = |h: &[Complex64]| -> Vec<f64> {
        let mut out: Vec<f64> = h.iter().map(|c| c.re).collect();
        out.resize(degree, 0.0);
        out
    };
    // zeta is real on the real axis, so the series coefficients are real
    let (h0, h2) = (real_coeffs(&h0), real_coeffs(&h2));

    // zeta(1 + z_a - z_b) (z_b - z_a)^2 for a in {1, 2}, b in {3, 4}
    let pair_table = |a: usize, b: usize| -> Result<Vec<Complex64>> {
        (0..n * n)
            .into_par_iter()
            .map(|idx| zeta_times_square(circles[a][idx / n].0 - circles[b][idx % n].0, &acc))
            .collect()
    };
    let q13 = pair_table(0, 2)?;
    let q14 = pair_table(0, 3)?;
    let q23 = pair_table(1, 2)?;
    let q24 = pair_table(1, 3)?;

    // per-node weights with z^{-6} and the separable part of e^{s l0 / 2}
    let weight = |c: usize, sign: f64| -> Vec<Complex64> {
        circles[c].iter().map(|&(z, w)| w / z.powu(6) * (z * (sign * 0.5 * l0)).exp()).collect()
    };
    let (al1, al2, al3, al4) = (weight(0, 1.0), weight(1, 1.0), weight(2, -1.0), weight(3, -1.0));
    let mut v34 = Vec::with_capacity(n * n);
    let mut p34 = Vec::with_capacity(n * n);
    let mut d34 = Vec::with_capacity(n * n);
    for (z3, _) in &circles[2] {
        for (z4, _) in &circles[3] {
            v34.push(z3 + z4);
            p34.push(z3 * z4);
            d34.push((z4 - z3) * (z4 - z3));
        }
    }
    let log_sq = cfg.log_square_coefficient;

    // For real coefficients the integrand at the conjugate node tuple is the
    // conjugate value, so only z1 in the closed upper half circle is needed.
    let real_data = prepared.a.iter().all(|a| a.im == 0.0);
    let rows: Vec<(usize, f64)> = if real_data {
        (0..=n / 2).map(|i1| (i1, if i1 == 0 || i1 == n / 2 { 1.0 } else { 2.0 })).collect()
    } else {
        (0..n).map(|i1| (i1, 1.0)).collect()
    };
    let outer = (0..rows.len() * n)
        .into_par_iter()
        .map(|idx| {
            let (i1, mult) = rows[idx / n];
            let i2 = idx % n;
            let (z1, z2) = (circles[0][i1].0, circles[1][i2].0);
            let u = z1 + z2;
            let p12 = z1 * z2;
            let pre = al1[i1] * al2[i2] * (z2 - z1) * (z2 - z1);
            let q4: Vec<Complex64> = (0..n).map(|i4| q14[i1 * n + i4] * q24[i2 * n + i4] * al4[i4]).collect();
            let mut acc_in = ComplexKahan::new();
            for i3 in 0..n {
                let q3 = q13[i1 * n + i3] * q23[i2 * n + i3] * al3[i3];
                let mut row = Complex64::new(0.0, 0.0);
                for i4 in 0..n {
                    let k = i3 * n + i4;
                    let s = u - v34[k];
                    let e3 = p12 * v34[k] + p34[k] * u;
                    let bracket = match target {
                        Target::Zeta => {
                            let (a0, a2) = horner_pair(&h0, &h2, s);
                            let e4 = p12 * p34[k];
                            e4 * e4 * log_sq * a2 - e3 * e3 * a0
                        }
                        Target::HardyZ => -e3 * e3 * horner_real(&h0, s),
                    };
                    let g = if trivial {
                        Complex64::new(a11, 0.0)
                    } else {
                        let (z3, z4) = (circles[2][i3].0, circles[3][i4].0);
                        prepared.g_sum(&[z1, z2, -z3, -z4], bcfg)?
                    };
                    row += q4[i4] * d34[k] * bracket * g;
                }
                acc_in.add(q3 * row);
            }
            let v = pre * acc_in.value();
            Ok(if mult == 1.0 { v } else { Complex64::new(mult * v.re, 0.0) })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = pairwise_sum_complex(&outer) * 0.25;
    Ok(ContourEstimate { value: total.re, imag_residual: total.im, nodes_per_circle: n })
}

/// `max |F(z1, z2)|` over the first two circles of `cfg`.
pub fn max_abs_f_on_circles(poly: &DirichletPoly, cfg: &ShiftConfig) -> Result<f64> {
    cfg.validate()?;
    let p = PreparedPoly::new(poly, DEFAULT_PAIR_CAP)?;
    let n = cfg.nodes_per_circle;
    let c1 = circle_nodes(cfg.radii[0], n, 0.0);
    let c2 = circle_nodes(cfg.radii[1], n, 0.0);
    Ok((0..n * n).map(|i| p.f_sum(c1[i / n].0, c2[i % n].0).norm()).fold(0.0, f64::max))
}

/// `max |G(z1, z2, z3, z4)|` over the four circles of `cfg`.
pub fn max_abs_g_on_circles(poly: &DirichletPoly, cfg: &ShiftConfig, bcfg: &BSeriesConfig) -> Result<f64> {
    cfg.validate()?;
    let p = PreparedPoly::new(poly, DEFAULT_PAIR_CAP)?;
    let n = cfg.nodes_per_circle;
    let cs: Vec<Vec<(Complex64, Complex64)>> = cfg.radii.iter().map(|&r| circle_nodes(r, n, 0.0)).collect();
    let mut best: f64 = 0.0;
    for idx in 0..n.pow(4) {
        let z = [cs[0][idx / n.pow(3)].0, cs[1][(idx / n / n) % n].0, cs[2][(idx / n) % n].0, cs[3][idx % n].0];
        best = best.max(p.g_sum(&z, bcfg)?.norm());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vandermonde_values() {
        let z = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        // (1)(2)(3)(1)(2)(1)
        assert!((vandermonde(&z) - c(12.0, 0.0)).norm() < 1e-14);
        let swapped = [z[1], z[0], z[2], z[3]];
        assert!((vandermonde(&swapped) + c(12.0, 0.0)).norm() < 1e-14);
        let equal = [z[0], z[0], z[2], z[3]];
        assert_eq!(vandermonde(&equal), c(0.0, 0.0));
    }

    #[test]
    fn a_ratio_poles_and_real_values() {
        let acc = EvalAccuracy::default();
        let z = [c(0.1, 0.0), c(0.2, 0.0), c(-0.1, 0.0), c(0.05, 0.0)];
        assert!(matches!(a_ratio(&z, &acc), Err(Error::Pole(_))));
        let z = [c(0.1, 0.0); 4];
        let v = a_ratio(&z, &acc).unwrap();
        let z12 = zeta_em(c(1.2, 0.0), &acc).unwrap().zeta.re;
        let z24 = zeta_em(c(2.4, 0.0), &acc).unwrap().zeta.re;
        assert!((v.re - z12.powi(4) / z24).abs() < 1e-10 * v.re);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn a_ratio_residue_rate() {
        // zeta(1 + x) ~ 1/x as x -> 0
        let acc = EvalAccuracy::default();
        let e = 1e-4;
        let z = [c(e / 2.0, 0.0), c(0.3, 0.0), c(e / 2.0, 0.0), c(0.3, 0.0)];
        let v = a_ratio(&z, &acc).unwrap() * e;
        let rest = zeta_em(c(1.3 + e / 2.0, 0.0), &acc).unwrap().zeta.powu(2)
            * zeta_em(c(1.6, 0.0), &acc).unwrap().zeta
            / zeta_em(c(2.6 + e, 0.0), &acc).unwrap().zeta;
        assert!((v / rest - c(1.0, 0.0)).norm() < 1e-3);
    }

    #[test]
    fn inverse_zeta_series_matches_direct() {
        let acc = EvalAccuracy::default();
        let coeffs = inverse_zeta_two_coeffs(60, &acc).unwrap();
        for s in [c(0.5, 0.0), c(-1.0, 0.3), c(0.0, 1.2)] {
            let series = coeffs.iter().rev().fold(c(0.0, 0.0), |a, &k| a * s + k);
            let direct = 1.0 / zeta_em(c(2.0, 0.0) + s, &acc).unwrap().zeta;
            assert!((series - direct).norm() < 1e-10, "s = {s}");
        }
        assert!(coeffs.iter().all(|k| k.im.abs() < 1e-14));
    }

    #[test]
    fn validation() {
        assert!(matches!(ShiftConfig::paper(1e4, 15).validate(), Err(Error::Config(_))));
        assert!(matches!(ShiftConfig::paper(1e4, 17).validate(), Err(Error::Config(_))));
        let mut cfg = ShiftConfig::paper(1e4, 16);
        cfg.radii[2] = cfg.radii[1];
        assert!(matches!(cfg.validate(), Err(Error::Pole(_))));
        let long = DirichletPoly::from_real(&[(1, 1.0), (200, 1.0)]).unwrap();
        let phi = CutoffFn::default();
        assert!(matches!(
            lemma1_main(&long, 1e4, &ShiftConfig::paper(1e4, 16), &phi, Target::Zeta),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn lemma1_converges_under_node_doubling() {
        let phi = CutoffFn::default();
        let a = DirichletPoly::from_real(&[(1, 1.0), (2, 1.0)]).unwrap();
        for target in [Target::Zeta, Target::HardyZ] {
            let coarse = lemma1_main(&a, 1e4, &ShiftConfig::paper(1e4, 32), &phi, target).unwrap();
            let fine = lemma1_main(&a, 1e4, &ShiftConfig::paper(1e4, 64), &phi, target).unwrap();
            assert!(((coarse.value - fine.value) / fine.value).abs() < 1e-8, "{coarse:?} {fine:?}");
            assert!(fine.imag_residual.abs() < 1e-9 * fine.value.abs());
            assert!(fine.value > 0.0);
        }
    }

    #[test]
    fn lemma1_z_variant_is_smaller() {
        // |zeta'|^2 = Z'^2 + theta'^2 Z^2 >= Z'^2
        let phi = CutoffFn::default();
        let one = DirichletPoly::one();
        let cfg = ShiftConfig::paper(1e4, 16);
        let zeta = lemma1_main(&one, 1e4, &cfg, &phi, Target::Zeta).unwrap().value;
        let z = lemma1_main(&one, 1e4, &cfg, &phi, Target::HardyZ).unwrap().value;
        assert!(z > 0.0 && z < zeta);
    }

    #[test]
    fn lemma2_paper_radii_enclose_the_pole() {
        let phi = CutoffFn::default();
        let one = DirichletPoly::one();
        let r = lemma2_main(&one, 1e5, &ShiftConfig::paper(1e5, 16), &phi, Target::Zeta, &BSeriesConfig::default());
        assert!(matches!(r, Err(Error::Pole(_))));
    }

    #[test]
    fn lemma2_converges_under_node_doubling() {
        let phi = CutoffFn::default();
        let one = DirichletPoly::one();
        let b = BSeriesConfig::default();
        let v16 = lemma2_main(&one, 1e4, &ShiftConfig::compact(1e4, 16), &phi, Target::Zeta, &b).unwrap();
        let v24 = lemma2_main(&one, 1e4, &ShiftConfig::compact(1e4, 24), &phi, Target::Zeta, &b).unwrap();
        assert!(((v16.value - v24.value) / v24.value).abs() < 1e-8);
        assert!(v24.imag_residual.abs() < 1e-9 * v24.value);
        let z = lemma2_main(&one, 1e4, &ShiftConfig::compact(1e4, 16), &phi, Target::HardyZ, &b).unwrap();
        assert!(z.value > 0.0 && z.value < v16.value);
    }

    #[test]
    fn max_abs_f_for_constant_poly() {
        let one = DirichletPoly::one();
        let m = max_abs_f_on_circles(&one, &ShiftConfig::paper(1e4, 16)).unwrap();
        assert!((m - 1.0).abs() < 1e-15);
    }
}
