//! Twisted joint moments: arithmetic sums, contour main terms, direct
//! integrals, and the arithmetic bounds used on prime-power twists.

mod arith;
mod bounds;
mod contour;
mod cutoff;
mod direct;

pub use arith::{
    b_factor, b_prime_factor, f_sum, g_sum, gcd, lcm, sigma_shift, BFactor, BSeriesConfig, PreparedPoly,
    DEFAULT_PAIR_CAP,
};
pub use bounds::{cutoff_free_sum_check, rankin_bound_check, EulerIdentityReport, RankinReport, DEFAULT_ENUM_CAP};
pub use contour::{
    a_ratio, inverse_zeta_two_coeffs, lemma1_main, lemma2_main, max_abs_f_on_circles, max_abs_g_on_circles,
    vandermonde, ContourEstimate, ShiftConfig, DERIVED_LOG_SQUARE, MAX_SHIFT_SUM, POLE_GUARD,
};
pub use cutoff::{mellin_weight, CutoffFn, CutoffRule, PLATEAU, SUPPORT};
pub use direct::{twisted_direct, twisted_direct_many, DirectGrid, DirectWeight};

use std::fmt::Write as _;

/// One line of the direct-versus-contour comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub big_t: f64,
    pub polynomial_id: String,
    /// `direct` or `contour`.
    pub method: &'static str,
    pub weight: &'static str,
    pub value: f64,
    pub nodes: usize,
    pub mesh: f64,
    /// Direct value over the matching contour value.
    pub ratio: f64,
}

pub const COMPARISON_HEADER: &str = "T,polynomial_id,method,weight,value,nodes,mesh,ratio";

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = format!("{COMPARISON_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.big_t, r.polynomial_id, r.method, r.weight, r.value, r.nodes, r.mesh, r.ratio
        );
    }
    out
}
