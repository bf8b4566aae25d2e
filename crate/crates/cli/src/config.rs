//! Run configuration shared by every subcommand: flags, optionally merged
//! over a TOML file.

use crate::error::CliError;
use clap::Args;
use serde::{Deserialize, Deserializer};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Height scale T.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub big_t: Option<f64>,
    /// Explicit heights (eval), comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub t: Option<Vec<f64>>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Height spacing for eval ranges.
    #[arg(long)]
    pub step: Option<f64>,
    /// Moment exponent(s) k, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub k: Option<Vec<f64>>,
    /// Exponent(s) h, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub h: Option<Vec<f64>>,
    /// `zeta` or `hardyZ`.
    #[arg(long)]
    pub target: Option<String>,
    /// Threshold for the number of increments.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Custom increment boundaries T_1 < T_2 < ..., comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub boundaries: Option<Vec<f64>>,
    #[arg(long)]
    pub c_omega: Option<f64>,
    #[arg(long)]
    pub c_p: Option<f64>,
    /// `full` or `partial`.
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub points_per_gap: Option<u32>,
    #[arg(long)]
    pub nodes_per_circle: Option<usize>,
    /// Contour radii: `paper` or `compact` (default: paper for the second
    /// moment, compact for the fourth).
    #[arg(long)]
    pub radii: Option<String>,
    /// Coefficient of the squared-log term in the fourth-moment bracket.
    #[arg(long)]
    pub log_square: Option<f64>,
    /// Increment index for the N_j dump.
    #[arg(long = "J")]
    #[serde(rename = "J")]
    pub j: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of sampled heights.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Destination of the N_j coefficient dump.
    #[arg(long)]
    pub poly_output: Option<PathBuf>,
    /// Twisting polynomials: `one`, `two` (1 + 2^-s) or a path to an `n,re,im` CSV.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub poly: Option<Vec<String>>,
    /// eval: `auto`, `rs` or `em`; twisted: `direct`, `contour` or `both`.
    #[arg(long)]
    pub method: Option<String>,
    /// twisted: `1`, `2` or `both`.
    #[arg(long)]
    pub lemma: Option<String>,
    /// inequality: check the Hoelder bound on moments instead.
    #[arg(long)]
    #[serde(default)]
    pub holder: bool,
    /// Worker threads.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

fn one_or_many<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    Ok(Option::<OneOrMany<T>>::deserialize(d)?.map(|v| match v {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(xs) => xs,
    }))
}

macro_rules! merge_fields {
    ($a:ident, $b:ident; $($f:ident),*) => {
        RunConfig { $($f: $a.$f.or($b.$f),)* holder: $a.holder || $b.holder }
    };
}

impl RunConfig {
    /// Flags in `self` win over values from `file`.
    pub fn merge(self, file: RunConfig) -> RunConfig {
        merge_fields!(self, file; big_t, t, t_min, t_max, step, k, h, target, threshold, boundaries,
            c_omega, c_p, variant, points_per_gap, nodes_per_circle, radii, log_square, j, alpha,
            samples, seed, cache_dir, output, poly_output, poly, method, lemma, workers)
    }

    pub fn from_toml(text: &str) -> Result<RunConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config file: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn require_t(&self) -> Result<f64, CliError> {
        self.big_t.ok_or_else(|| CliError::Config("--T is required".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_scalars_and_lists() {
        let c = RunConfig::from_toml("T = 1e4\nk = 1.5\nh = [0.25, 0.5]\ntarget = \"zeta\"\nJ = 3").unwrap();
        assert_eq!(c.big_t, Some(1e4));
        assert_eq!(c.k, Some(vec![1.5]));
        assert_eq!(c.h, Some(vec![0.25, 0.5]));
        assert_eq!(c.j, Some(3));
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        assert!(matches!(RunConfig::from_toml("bogus = 1"), Err(CliError::Config(_))));
    }

    #[test]
    fn flags_win() {
        let flags = RunConfig { big_t: Some(2e4), ..Default::default() };
        let file = RunConfig { big_t: Some(1e4), seed: Some(9), ..Default::default() };
        let m = flags.merge(file);
        assert_eq!(m.big_t, Some(2e4));
        assert_eq!(m.seed, Some(9));
    }
}
