//! Joint moments `I_T(k, h) = int_T^{2T} |zeta|^{2k-2h} |zeta'|^{2h} dt` and
//! their Hardy `Z` counterparts, by composite midpoint quadrature.

use crate::critline::{critical_sample, read_grid_cache, write_grid_cache, EvalAccuracy, GridRecord};
use crate::error::{Error, Result};
use crate::quad::deterministic_sum;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

pub const MIN_HEIGHT: f64 = 1e3;
pub const MAX_HEIGHT: f64 = 1e7;
pub const DEFAULT_POINTS_PER_GAP: u32 = 20;
/// Floor applied to `|zeta|` when its exponent is negative.
pub const ZERO_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Zeta,
    HardyZ,
}

impl Target {
    pub fn as_str(&self) -> &'static str {
        match self {
            Target::Zeta => "zeta",
            Target::HardyZ => "hardyZ",
        }
    }
}

impl std::str::FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zeta" => Ok(Target::Zeta),
            "hardyZ" | "hardy_z" | "Z" => Ok(Target::HardyZ),
            other => Err(Error::Config(format!("unknown target `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRequest {
    pub big_t: f64,
    pub k: f64,
    pub h: f64,
    pub target: Target,
    pub points_per_gap: u32,
}

impl MomentRequest {
    pub fn new(big_t: f64, k: f64, h: f64, target: Target) -> Self {
        Self { big_t, k, h, target, points_per_gap: DEFAULT_POINTS_PER_GAP }
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_HEIGHT..=MAX_HEIGHT).contains(&self.big_t) {
            return Err(Error::Regime(format!(
                "T must lie in [{MIN_HEIGHT}, {MAX_HEIGHT}], got {}",
                self.big_t
            )));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::Domain(format!("k must be positive, got {}", self.k)));
        }
        if !(self.h >= 0.0 && self.h <= self.k + 0.5) {
            return Err(Error::Domain(format!("h must lie in [0, k + 1/2], got h = {} for k = {}", self.h, self.k)));
        }
        if self.points_per_gap == 0 {
            return Err(Error::Config("points_per_gap must be positive".into()));
        }
        Ok(())
    }

    /// `k^2 + 2h`.
    pub fn conjectured_exponent(&self) -> f64 {
        self.k * self.k + 2.0 * self.h
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub value: f64,
    /// Mean zero gap `2 pi / log(T / 2 pi)` over `points_per_gap`.
    pub mesh: f64,
    pub panels: usize,
    pub est_rel_error: f64,
    /// Samples where `|zeta| < ZERO_FLOOR` met a negative exponent.
    pub clamped_samples: usize,
    pub request: MomentRequest,
}

impl MomentEstimate {
    pub fn ratio_to_conjectured_power(&self) -> f64 {
        let t = self.request.big_t;
        self.value / (t * t.ln().powf(self.request.conjectured_exponent()))
    }

    pub fn csv_row(&self) -> String {
        let r = &self.request;
        format!(
            "{},{},{},{},{},{},{},{},{}",
            r.big_t,
            r.k,
            r.h,
            r.target.as_str(),
            self.value,
            self.mesh,
            self.panels,
            self.est_rel_error,
            self.ratio_to_conjectured_power()
        )
    }
}

pub const RESULTS_HEADER: &str = "T,k,h,target,value,mesh,panels,est_rel_error,ratio_to_conjectured_power";

pub fn results_csv(estimates: &[MomentEstimate]) -> String {
    let mut out = format!("{RESULTS_HEADER}\n");
    for e in estimates {
        out.push_str(&e.csv_row());
        out.push('\n');
    }
    out
}

/// Average spacing of zeta zeros at height `t`.
pub fn mean_zero_gap(t: f64) -> f64 {
    2.0 * PI / (t / (2.0 * PI)).ln()
}

/// Midpoint layout on `[T, 2T]`; `level` halves the step `level` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointGrid {
    pub big_t: f64,
    pub mesh: f64,
    pub panels: usize,
    pub step: f64,
}

impl MidpointGrid {
    pub fn new(big_t: f64, points_per_gap: u32, level: u32) -> Self {
        let mesh = mean_zero_gap(big_t) / f64::from(points_per_gap);
        let base = (big_t / mesh).ceil() as usize;
        let panels = base << level;
        Self { big_t, mesh, panels, step: big_t / panels as f64 }
    }

    pub fn node(&self, i: usize) -> f64 {
        self.big_t + (i as f64 + 0.5) * self.step
    }
}

/// Integrand value from `|zeta|` and `|zeta'|` (or `|Z|`, `|Z'|`); the flag
/// reports a clamped zero.
pub fn integrand(abs_f: f64, abs_df: f64, k: f64, h: f64) -> (f64, bool) {
    let e1 = 2.0 * k - 2.0 * h;
    let e2 = 2.0 * h;
    let mut clamped = false;
    let a = if e1 == 0.0 {
        1.0
    } else if e1 < 0.0 && abs_f < ZERO_FLOOR {
        clamped = true;
        ZERO_FLOOR.powf(e1)
    } else {
        abs_f.powf(e1)
    };
    let b = if e2 == 0.0 { 1.0 } else { abs_df.powf(e2) };
    (a * b, clamped)
}

fn record_magnitudes(r: &GridRecord, target: Target) -> (f64, f64) {
    let abs_f = r.z.abs();
    let abs_df = match target {
        Target::HardyZ => r.z_prime.abs(),
        Target::Zeta => r.z_prime.hypot(r.theta_prime * r.z),
    };
    (abs_f, abs_df)
}

fn record_at(t: f64, acc: &EvalAccuracy) -> GridRecord {
    // heights are validated by the caller; the fast path covers [1e3, 2e7]
    let s = critical_sample(t, acc).expect("height inside the Riemann–Siegel range");
    GridRecord::from(&s)
}

fn midpoint_sum(grid: &MidpointGrid, req: &MomentRequest, acc: &EvalAccuracy) -> (f64, usize) {
    let value = grid.step
        * deterministic_sum(grid.panels, |i| {
            let r = record_at(grid.node(i), acc);
            let (a, b) = record_magnitudes(&r, req.target);
            integrand(a, b, req.k, req.h).0
        });
    let clamped = if 2.0 * req.k - 2.0 * req.h < 0.0 {
        (0..grid.panels)
            .into_par_iter()
            .filter(|&i| record_at(grid.node(i), acc).z.abs() < ZERO_FLOOR)
            .count()
    } else {
        0
    };
    (value, clamped)
}

/// `joint_moment`: midpoint rule at the nominal mesh, error from one halving.
pub fn joint_moment(req: &MomentRequest, acc: &EvalAccuracy) -> Result<MomentEstimate> {
    req.validate()?;
    acc.validate()?;
    let coarse = MidpointGrid::new(req.big_t, req.points_per_gap, 0);
    let fine = MidpointGrid::new(req.big_t, req.points_per_gap, 1);
    let (value, clamped) = midpoint_sum(&coarse, req, acc);
    let (refined, _) = midpoint_sum(&fine, req, acc);
    Ok(MomentEstimate {
        value,
        mesh: coarse.mesh,
        panels: coarse.panels,
        est_rel_error: rel_diff(value, refined),
        clamped_samples: clamped,
        request: *req,
    })
}

fn rel_diff(coarse: f64, fine: f64) -> f64 {
    if fine == 0.0 {
        if coarse == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (coarse - fine).abs() / fine.abs()
    }
}

/// Stored samples on one midpoint grid, shared by many `(k, h, target)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub grid: MidpointGrid,
    pub records: Vec<GridRecord>,
}

impl SampleGrid {
    pub fn build(big_t: f64, points_per_gap: u32, level: u32, acc: &EvalAccuracy) -> Result<Self> {
        MomentRequest { points_per_gap, ..MomentRequest::new(big_t, 1.0, 0.0, Target::Zeta) }.validate()?;
        acc.validate()?;
        let grid = MidpointGrid::new(big_t, points_per_gap, level);
        let records = (0..grid.panels).into_par_iter().map(|i| record_at(grid.node(i), acc)).collect();
        Ok(Self { grid, records })
    }

    /// As [`SampleGrid::build`], reading and writing a `ZML1` cache file in `dir`.
    pub fn build_cached(big_t: f64, points_per_gap: u32, level: u32, acc: &EvalAccuracy, dir: &Path) -> Result<Self> {
        let grid = MidpointGrid::new(big_t, points_per_gap, level);
        let path = dir.join(format!(
            "grid_T{}_ppg{}_L{}_rs{}.zml",
            big_t, points_per_gap, level, acc.rs_correction_terms
        ));
        if path.exists() {
            let records = read_grid_cache(&path)?;
            let matches = records.len() == grid.panels
                && records.first().map(|r| r.t) == Some(grid.node(0))
                && records.last().map(|r| r.t) == Some(grid.node(grid.panels - 1));
            if matches {
                return Ok(Self { grid, records });
            }
        }
        let built = Self::build(big_t, points_per_gap, level, acc)?;
        std::fs::create_dir_all(dir)?;
        write_grid_cache(&path, &built.records)?;
        Ok(built)
    }

    /// Midpoint sum for one exponent pair, plus the clamp count.
    pub fn integrate(&self, k: f64, h: f64, target: Target) -> (f64, usize) {
        let recs = &self.records;
        let value = self.grid.step
            * deterministic_sum(recs.len(), |i| {
                let (a, b) = record_magnitudes(&recs[i], target);
                integrand(a, b, k, h).0
            });
        let clamped = recs
            .iter()
            .filter(|r| {
                let (a, b) = record_magnitudes(r, target);
                integrand(a, b, k, h).1
            })
            .count();
        (value, clamped)
    }

    /// Smallest integrand sample, for the nonnegativity check.
    pub fn min_integrand(&self, k: f64, h: f64, target: Target) -> f64 {
        self.records
            .iter()
            .map(|r| {
                let (a, b) = record_magnitudes(r, target);
                integrand(a, b, k, h).0
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Many requests at one `(T, points_per_gap)` evaluated on shared grids.
#[derive(Debug, Clone)]
pub struct MomentBatch {
    pub coarse: SampleGrid,
    pub fine: SampleGrid,
}

impl MomentBatch {
    pub fn new(big_t: f64, points_per_gap: u32, acc: &EvalAccuracy, cache_dir: Option<&Path>) -> Result<Self> {
        let (coarse, fine) = match cache_dir {
            Some(d) => (
                SampleGrid::build_cached(big_t, points_per_gap, 0, acc, d)?,
                SampleGrid::build_cached(big_t, points_per_gap, 1, acc, d)?,
            ),
            None => (
                SampleGrid::build(big_t, points_per_gap, 0, acc)?,
                SampleGrid::build(big_t, points_per_gap, 1, acc)?,
            ),
        };
        Ok(Self { coarse, fine })
    }

    pub fn estimate(&self, k: f64, h: f64, target: Target) -> Result<MomentEstimate> {
        let g = &self.coarse.grid;
        let points_per_gap = (mean_zero_gap(g.big_t) / g.mesh).round() as u32;
        let request = MomentRequest { points_per_gap, ..MomentRequest::new(g.big_t, k, h, target) };
        request.validate()?;
        let (value, clamped) = self.coarse.integrate(k, h, target);
        let (refined, _) = self.fine.integrate(k, h, target);
        Ok(MomentEstimate {
            value,
            mesh: g.mesh,
            panels: g.panels,
            est_rel_error: rel_diff(value, refined),
            clamped_samples: clamped,
            request,
        })
    }
}

/// One row of a scaling table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub big_t: f64,
    pub value: f64,
    pub ratio: f64,
    pub est_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub k: f64,
    pub h: f64,
    pub target: Target,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `log(value / T)` against `log log T`.
    pub slope: f64,
    /// `k^2 + 2h`.
    pub conjectured_exponent: f64,
}

impl ScalingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("T,k,h,target,value,ratio_to_conjectured_power,est_rel_error\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.big_t,
                self.k,
                self.h,
                self.target.as_str(),
                r.value,
                r.ratio,
                r.est_rel_error
            );
        }
        let _ = writeln!(out, "# slope,{},conjectured,{}", self.slope, self.conjectured_exponent);
        out
    }
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn scaling_report(
    t_list: &[f64],
    k: f64,
    h: f64,
    target: Target,
    points_per_gap: u32,
    acc: &EvalAccuracy,
) -> Result<ScalingReport> {
    if t_list.len() < 3 {
        return Err(Error::Domain(format!("scaling report needs at least 3 heights, got {}", t_list.len())));
    }
    if t_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("heights must be strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(t_list.len());
    for &big_t in t_list {
        let req = MomentRequest { points_per_gap, ..MomentRequest::new(big_t, k, h, target) };
        let e = joint_moment(&req, acc)?;
        rows.push(ScalingRow {
            big_t,
            value: e.value,
            ratio: e.ratio_to_conjectured_power(),
            est_rel_error: e.est_rel_error,
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.big_t.ln().ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| (r.value / r.big_t).ln()).collect();
    Ok(ScalingReport { k, h, target, slope: ls_slope(&x, &y), conjectured_exponent: k * k + 2.0 * h, rows })
}
