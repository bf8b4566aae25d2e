//! Numerical laboratory for joint moments of the Riemann zeta function and
//! its derivative on the critical line.
//!
//! The crate is organised bottom-up:
//!
//! * [`primes`] sieves primes and builds the increment scheme of prime ranges.
//! * [`critline`] evaluates `theta`, `Z`, `Z'`, `zeta` and `zeta'` on the
//!   critical line (Riemann–Siegel fast path, Euler–Maclaurin oracle).
//! * [`dirpoly`] holds sparse Dirichlet polynomials and the truncated
//!   exponentials of prime sums.
//! * [`inequality`] evaluates both sides of the pointwise interpolation
//!   bound and checks Hölder's inequality on computed moments.
//! * [`moments`] integrates joint moments over `[T, 2T]`.
//! * [`twisted`] implements the twisted-moment arithmetic sums and their
//!   contour-integral main terms.
//! * [`selftest`] bundles quick invariant checks into a reproducible report.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod critline;
pub mod dirpoly;
pub mod error;
pub mod inequality;
pub mod moments;
pub mod primes;
pub mod quad;
pub mod selftest;
pub mod twisted;

pub use critline::{CriticalPointSample, EvalAccuracy};
pub use dirpoly::{DirichletPoly, MultiplicativeSpec};
pub use moments::{MomentEstimate, MomentRequest, Target};

pub use error::{Error, Result};
pub use inequality::{InterpolationConfig, ProductVariant};


pub use num_complex::Complex64;
pub use primes::{IncrementScheme, PrimeTable};
pub use twisted::{BSeriesConfig, CutoffFn, ShiftConfig};

