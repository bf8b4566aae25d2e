use crate::config::RunConfig;
use crate::error::CliError;
use rayon::prelude::*;
use std::fmt::Write as _;
use zetalab::critline::{critical_sample, critical_sample_oracle, riemann_siegel, CriticalPointSample, EvalAccuracy};
use zetalab::dirpoly::{build_nj, DirichletPoly, MultiplicativeSpec, DEFAULT_TERM_CAP};
use zetalab::inequality::{check_interpolation, sample_grid, verify_holder, InterpolationConfig, ProductVariant};
use zetalab::moments::{results_csv, MomentBatch, Target, DEFAULT_POINTS_PER_GAP};
use zetalab::primes::{build_scheme, custom_scheme, scheme_prime_limit, sieve_primes, IncrementScheme};
use zetalab::selftest::{run_selftest, SelftestConfig};
use zetalab::twisted::{
    comparison_csv, lemma1_main, lemma2_main, twisted_direct_many, BSeriesConfig, ComparisonRow, CutoffFn,
    DirectWeight, ShiftConfig,
};

type Out = Result<String, CliError>;

const DEFAULT_THRESHOLD: f64 = 1.0;
const DEFAULT_NODES: usize = 64;
const DEFAULT_SAMPLES: usize = 1000;
const DEFAULT_SEED: u64 = 20_240_601;

fn parse<T: std::str::FromStr<Err = zetalab::Error>>(v: &Option<String>, default: T) -> Result<T, CliError> {
    match v {
        Some(s) => Ok(s.parse()?),
        None => Ok(default),
    }
}

fn scheme_from(cfg: &RunConfig, big_t: f64) -> Result<IncrementScheme, CliError> {
    match &cfg.boundaries {
        Some(b) => {
            let top = b.iter().fold(0.0f64, |m, &x| m.max(x));
            let primes = sieve_primes(top.ceil().max(2.0) as u64)?;
            Ok(custom_scheme(big_t, b, &primes)?)
        }
        None => {
            let threshold = cfg.threshold.unwrap_or(DEFAULT_THRESHOLD);
            let primes = sieve_primes(scheme_prime_limit(big_t, threshold)?.max(2))?;
            Ok(build_scheme(big_t, threshold, &primes)?)
        }
    }
}

pub fn scheme(cfg: &RunConfig) -> Out {
    let big_t = cfg.require_t()?;
    let scheme = scheme_from(cfg, big_t)?;
    if let Some(j) = cfg.j {
        let spec = MultiplicativeSpec::new(cfg.alpha.unwrap_or(1.0), j, cfg.c_omega.unwrap_or(500.0))?;
        let poly = build_nj(&scheme, &spec, DEFAULT_TERM_CAP)?;
        match &cfg.poly_output {
            Some(path) => std::fs::write(path, poly.to_csv())?,
            None => return Err(CliError::Config("--J needs --poly-output".into())),
        }
    }
    Ok(scheme.to_csv())
}

pub const EVAL_HEADER: &str =
    "t,Z,Z_prime,theta,theta_prime,zeta_re,zeta_im,zeta_prime_re,zeta_prime_im,est_abs_error";

fn heights(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    if let Some(t) = &cfg.t {
        return Ok(t.clone());
    }
    let (Some(lo), Some(hi)) = (cfg.t_min, cfg.t_max) else {
        return Err(CliError::Config("eval needs --t or --t-min/--t-max".into()));
    };
    let step = cfg.step.unwrap_or(1.0);
    if !(step > 0.0) || !(hi >= lo) {
        return Err(CliError::Config("eval needs t_min <= t_max and step > 0".into()));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(CliError::Core(zetalab::Error::Capacity(format!("{n} heights requested"))));
    }
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

pub fn eval(cfg: &RunConfig) -> Out {
    let ts = heights(cfg)?;
    let acc = EvalAccuracy::default();
    let method = cfg.method.as_deref().unwrap_or("auto");
    let one = |t: f64| -> zetalab::Result<CriticalPointSample> {
        match method {
            "auto" => critical_sample(t, &acc),
            "em" => critical_sample_oracle(t, &acc),
            "rs" => {
                let v = riemann_siegel(t, acc.rs_correction_terms)?;
                Ok(CriticalPointSample::from_hardy(t, v.theta, v.theta_prime, v.z, v.z_prime, v.est_abs_error))
            }
            other => Err(zetalab::Error::Config(format!("unknown eval method `{other}`"))),
        }
    };
    let samples = ts.par_iter().map(|&t| one(t)).collect::<zetalab::Result<Vec<_>>>()?;
    let mut out = format!("{EVAL_HEADER}\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.t,
            s.z,
            s.z_prime,
            s.theta,
            s.theta_prime,
            s.zeta.re,
            s.zeta.im,
            s.zeta_prime.re,
            s.zeta_prime.im,
            s.est_abs_error
        );
    }
    Ok(out)
}

fn batch(cfg: &RunConfig, big_t: f64) -> Result<MomentBatch, CliError> {
    let ppg = cfg.points_per_gap.unwrap_or(DEFAULT_POINTS_PER_GAP);
    Ok(MomentBatch::new(big_t, ppg, &EvalAccuracy::default(), cfg.cache_dir.as_deref())?)
}

pub fn moments(cfg: &RunConfig) -> Out {
    let big_t = cfg.require_t()?;
    let target = parse(&cfg.target, Target::Zeta)?;
    let ks = cfg.k.clone().unwrap_or_else(|| vec![1.0]);
    let hs = cfg.h.clone().unwrap_or_else(|| vec![0.0]);
    let b = batch(cfg, big_t)?;
    let mut est = Vec::with_capacity(ks.len() * hs.len());
    for &k in &ks {
        for &h in &hs {
            est.push(b.estimate(k, h, target)?);
        }
    }
    Ok(results_csv(&est))
}

pub const HOLDER_HEADER: &str = "T,k,h,target,lhs,rhs,tol,pass";

pub fn inequality(cfg: &RunConfig) -> Out {
    let target = parse(&cfg.target, Target::Zeta)?;
    let ks = cfg.k.clone().unwrap_or_else(|| vec![1.0]);
    if cfg.holder {
        let big_t = cfg.big_t.unwrap_or(1e4);
        let hs = cfg.h.clone().unwrap_or_else(|| vec![0.25, 0.5, 0.75]);
        let b = batch(cfg, big_t)?;
        let mut out = format!("{HOLDER_HEADER}\n");
        for &k in &ks {
            let m0 = b.estimate(k, 0.0, target)?;
            let m1 = b.estimate(k, 1.0, target)?;
            for &h in &hs {
                let r = verify_holder(&m0, &m1, &b.estimate(k, h, target)?, h)?;
                let _ = writeln!(out, "{big_t},{k},{h},{},{},{},{},{}", target.as_str(), r.lhs, r.rhs, r.tol, r.pass);
            }
        }
        return Ok(out);
    }
    let big_t = cfg.big_t.unwrap_or(1e4);
    let scheme = scheme_from(cfg, big_t)?;
    let lo = cfg.t_min.unwrap_or(big_t);
    let hi = cfg.t_max.unwrap_or(1.1 * big_t);
    let grid = sample_grid(cfg.seed.unwrap_or(DEFAULT_SEED), cfg.samples.unwrap_or(DEFAULT_SAMPLES), lo, hi)?;
    let variant = parse(&cfg.variant, ProductVariant::Full)?;
    let mut report = None;
    for &k in &ks {
        let mut icfg = InterpolationConfig::new(k, scheme.clone());
        icfg.variant = variant;
        if let Some(c) = cfg.c_omega {
            icfg.c_omega = c;
        }
        if let Some(c) = cfg.c_p {
            icfg.c_p = c;
        }
        let r = check_interpolation(&grid, &icfg, target)?;
        match &mut report {
            None => report = Some(r),
            Some(all) => all.extend(r),
        }
    }
    Ok(report.map(|r| r.to_csv()).unwrap_or_default())
}

fn load_poly(id: &str) -> Result<DirichletPoly, CliError> {
    match id {
        "one" => Ok(DirichletPoly::one()),
        "two" => Ok(DirichletPoly::from_real(&[(1, 1.0), (2, 1.0)])?),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("polynomial `{path}`: {e}")))?;
            Ok(DirichletPoly::from_csv(&text)?)
        }
    }
}

fn contour_configs(cfg: &RunConfig, big_t: f64) -> Result<(ShiftConfig, ShiftConfig), CliError> {
    let n = cfg.nodes_per_circle.unwrap_or(DEFAULT_NODES);
    let (mut first, mut second) = match cfg.radii.as_deref() {
        None => (ShiftConfig::paper(big_t, n), ShiftConfig::compact(big_t, n)),
        Some("paper") => (ShiftConfig::paper(big_t, n), ShiftConfig::paper(big_t, n)),
        Some("compact") => (ShiftConfig::compact(big_t, n), ShiftConfig::compact(big_t, n)),
        Some(other) => return Err(CliError::Config(format!("unknown radii `{other}`"))),
    };
    if let Some(c) = cfg.log_square {
        first.log_square_coefficient = c;
        second.log_square_coefficient = c;
    }
    Ok((first, second))
}

pub fn twisted(cfg: &RunConfig) -> Out {
    let big_t = cfg.require_t()?;
    let ids = cfg.poly.clone().unwrap_or_else(|| vec!["one".into(), "two".into()]);
    let (run_direct, run_contour) = match cfg.method.as_deref().unwrap_or("both") {
        "direct" => (true, false),
        "contour" => (false, true),
        "both" => (true, true),
        other => return Err(CliError::Config(format!("unknown twisted method `{other}`"))),
    };
    let lemmas: &[u8] = match cfg.lemma.as_deref().unwrap_or("both") {
        "1" => &[1],
        "2" => &[2],
        "both" => &[1, 2],
        other => return Err(CliError::Config(format!("unknown lemma `{other}`"))),
    };
    let weights: Vec<(DirectWeight, u8, Target)> = [
        (DirectWeight::DZeta2, 1, Target::Zeta),
        (DirectWeight::DZ2, 1, Target::HardyZ),
        (DirectWeight::Zeta2DZeta2, 2, Target::Zeta),
        (DirectWeight::Z2DZ2, 2, Target::HardyZ),
    ]
    .into_iter()
    .filter(|w| lemmas.contains(&w.1))
    .collect();
    let polys = ids.iter().map(|id| load_poly(id)).collect::<Result<Vec<_>, _>>()?;
    let phi = CutoffFn::default();
    let (c1, c2) = contour_configs(cfg, big_t)?;
    let bcfg = BSeriesConfig::default();

    let direct = if run_direct {
        let ws: Vec<DirectWeight> = weights.iter().map(|w| w.0).collect();
        let ppg = cfg.points_per_gap.unwrap_or(DEFAULT_POINTS_PER_GAP);
        Some(twisted_direct_many(&polys, big_t, &ws, &phi, ppg, &EvalAccuracy::default())?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for (pi, (id, poly)) in ids.iter().zip(&polys).enumerate() {
        for (wi, &(weight, lemma, target)) in weights.iter().enumerate() {
            let contour = if run_contour {
                Some(match lemma {
                    1 => lemma1_main(poly, big_t, &c1, &phi, target)?,
                    _ => lemma2_main(poly, big_t, &c2, &phi, target, &bcfg)?,
                })
            } else {
                None
            };
            let dv = direct.as_ref().map(|(v, g)| (v[pi][wi], g.mesh));
            let ratio = match (dv, contour) {
                (Some((d, _)), Some(c)) => d / c.value,
                _ => f64::NAN,
            };
            if let Some((value, mesh)) = dv {
                rows.push(ComparisonRow {
                    big_t,
                    polynomial_id: id.clone(),
                    method: "direct",
                    weight: weight.as_str(),
                    value,
                    nodes: 0,
                    mesh,
                    ratio,
                });
            }
            if let Some(c) = contour {
                rows.push(ComparisonRow {
                    big_t,
                    polynomial_id: id.clone(),
                    method: "contour",
                    weight: weight.as_str(),
                    value: c.value,
                    nodes: c.nodes_per_circle,
                    mesh: 0.0,
                    ratio,
                });
            }
        }
    }
    Ok(comparison_csv(&rows))
}

/// Selftest CSV and the names of failed checks.
pub fn selftest(cfg: &RunConfig) -> Result<(String, Vec<&'static str>), CliError> {
    let mut st = SelftestConfig::default();
    if let Some(seed) = cfg.seed {
        st.seed = seed;
    }
    if let Some(n) = cfg.samples {
        st.samples = n;
    }
    let report = run_selftest(&st)?;
    let failed = report.rows.iter().filter(|r| !r.pass).map(|r| r.check).collect();
    Ok((report.to_csv(), failed))
}
