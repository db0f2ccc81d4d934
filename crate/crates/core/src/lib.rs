//! Mean-cut regularized incomplete beta values.
//!
//! For integers `k, l >= 1` the quantity
//!
//! ```text
//! P(k, l) = (k+l)! / ((k-1)! l!) * ∫_{k/(k+l)}^1 t^(k-1) (1-t)^l dt
//! ```
//!
//! is computed four independent ways:
//!
//! * [`exact`]: arbitrary-precision rationals through the finite binomial sum,
//! * [`float_eval`]: an overflow-proof floating evaluation of the same sum,
//! * [`raab`]: the product `U * V` built from Binet integrals ([`binet`]),
//! * [`analysis`]: the Poisson-tail and constant approximants for extreme
//!   parameter regimes, plus the regression machinery that checks their
//!   error exponents.

pub mod analysis;
pub mod binet;
mod error;
pub mod exact;
pub mod float_eval;
pub mod jet;
pub mod quadrature;
pub mod raab;
pub mod stirling;
pub mod sum;

pub use error::{Error, Result};
pub use exact::{ExactRational, IntervalRational, ParamPair};
