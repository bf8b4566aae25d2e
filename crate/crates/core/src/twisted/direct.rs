//! Direct quadrature of `int w(t) |A(1/2 + it)|^2 phi(t/T) dt` on the
//! critical line.

use super::cutoff::{CutoffFn, SUPPORT};
use crate::critline::{critical_sample, EvalAccuracy, RS_MAX_HEIGHT};
use crate::dirpoly::DirichletPoly;
use crate::error::{Error, Result};
use crate::moments::mean_zero_gap;
use crate::quad::{pairwise_sum, KahanSum, REDUCTION_BLOCK};
use rayon::prelude::*;

/// Weight multiplying `|A|^2 phi(t/T)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DirectWeight {
    /// `|zeta'|^2`.
    DZeta2,
    /// `|zeta|^2 |zeta'|^2`.
    Zeta2DZeta2,
    /// `Z'^2`.
    DZ2,
    /// `Z^2 Z'^2`.
    Z2DZ2,
}

impl DirectWeight {
    pub const ALL: [DirectWeight; 4] =
        [DirectWeight::DZeta2, DirectWeight::Zeta2DZeta2, DirectWeight::DZ2, DirectWeight::Z2DZ2];

    pub fn as_str(&self) -> &'static str {
        match self {
            DirectWeight::DZeta2 => "dzeta2",
            DirectWeight::Zeta2DZeta2 => "zeta2dzeta2",
            DirectWeight::DZ2 => "dZ2",
            DirectWeight::Z2DZ2 => "Z2dZ2",
        }
    }

    fn apply(&self, z: f64, z_prime: f64, abs_zeta_prime_sq: f64) -> f64 {
        match self {
            DirectWeight::DZeta2 => abs_zeta_prime_sq,
            DirectWeight::Zeta2DZeta2 => z * z * abs_zeta_prime_sq,
            DirectWeight::DZ2 => z_prime * z_prime,
            DirectWeight::Z2DZ2 => z * z * z_prime * z_prime,
        }
    }
}

impl std::str::FromStr for DirectWeight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DirectWeight::ALL
            .into_iter()
            .find(|w| w.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown weight `{s}`")))
    }
}

/// Midpoint layout on `[3T/4, 9T/4]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectGrid {
    pub big_t: f64,
    pub mesh: f64,
    pub panels: usize,
    pub step: f64,
}

impl DirectGrid {
    pub fn new(big_t: f64, points_per_gap: u32) -> Result<Self> {
        if points_per_gap == 0 {
            return Err(Error::Config("points_per_gap must be positive".into()));
        }
        let (lo, hi) = (SUPPORT.0 * big_t, SUPPORT.1 * big_t);
        if !(lo >= 10.0) || hi > RS_MAX_HEIGHT {
            return Err(Error::Regime(format!(
                "direct integral needs [3T/4, 9T/4] inside [10, {RS_MAX_HEIGHT}], got T = {big_t}"
            )));
        }
        let mesh = mean_zero_gap(big_t) / f64::from(points_per_gap);
        let panels = ((hi - lo) / mesh).ceil() as usize;
        Ok(Self { big_t, mesh, panels, step: (hi - lo) / panels as f64 })
    }

    pub fn node(&self, i: usize) -> f64 {
        SUPPORT.0 * self.big_t + (i as f64 + 0.5) * self.step
    }
}

/// `twisted_direct` for several polynomials and weights sharing one pass
/// over the samples; result indexed `[poly][weight]`.
pub fn twisted_direct_many(
    polys: &[DirichletPoly],
    big_t: f64,
    weights: &[DirectWeight],
    phi: &CutoffFn,
    points_per_gap: u32,
    acc: &EvalAccuracy,
) -> Result<(Vec<Vec<f64>>, DirectGrid)> {
    let grid = DirectGrid::new(big_t, points_per_gap)?;
    acc.validate()?;
    let np = polys.len();
    let nw = weights.len();
    let blocks = grid.panels.div_ceil(REDUCTION_BLOCK);
    let partial: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * REDUCTION_BLOCK;
            let hi = (lo + REDUCTION_BLOCK).min(grid.panels);
            let mut sums = vec![KahanSum::new(); np * nw];
            for i in lo..hi {
                let t = grid.node(i);
                let cut = phi.eval(t / big_t);
                if cut == 0.0 {
                    continue;
                }
                let s = critical_sample(t, acc).expect("height validated by the grid");
                let dz2 = s.zeta_prime.norm_sqr();
                for (pi, poly) in polys.iter().enumerate() {
                    let a2 = poly.eval(t).norm_sqr() * cut;
                    for (wi, w) in weights.iter().enumerate() {
                        sums[pi * nw + wi].add(w.apply(s.z, s.z_prime, dz2) * a2);
                    }
                }
            }
            sums.iter().map(KahanSum::value).collect()
        })
        .collect();
    let out = (0..np)
        .map(|pi| {
            (0..nw)
                .map(|wi| {
                    let col: Vec<f64> = partial.iter().map(|p| p[pi * nw + wi]).collect();
                    pairwise_sum(&col) * grid.step
                })
                .collect()
        })
        .collect();
    Ok((out, grid))
}

/// `twisted_direct` for one polynomial and weight.
pub fn twisted_direct(
    poly: &DirichletPoly,
    big_t: f64,
    weight: DirectWeight,
    phi: &CutoffFn,
    points_per_gap: u32,
    acc: &EvalAccuracy,
) -> Result<f64> {
    let (v, _) = twisted_direct_many(std::slice::from_ref(poly), big_t, &[weight], phi, points_per_gap, acc)?;
    Ok(v[0][0])
}
