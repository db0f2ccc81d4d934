//! Asymptotic approximants of P(k, l), their limits, and empirical checks of
//! the claimed error orders and bounds.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::exact::{exact_p, ExactRational, ParamPair};
use crate::float_eval::{
    log_p, poisson_central_mass, poisson_tail, poisson_upper, rational_to_f64,
};
use crate::{Error, Result};

/// Largest `k + l` for which [`oracle_p`] uses exact arithmetic.
pub const EXACT_ORACLE_MAX_N: u64 = 2000;

/// Largest `max(k, l)` scanned exactly by [`bounds_scan`].
pub const EXACT_SCAN_MAX: u64 = 60;

/// Float tolerance used by [`bounds_scan`] beyond the exact region.
pub const SCAN_MARGIN: f64 = 1e-9;

/// Minimum r² for a passing fit.
pub const MIN_R2: f64 = 0.98;

/// Which approximant of P(k, l).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApproxKind {
    /// `e^{-k} Σ_{ν<k} k^ν/ν!`, error `O(k²/l)`.
    PoissonLower,
    /// `1 - e^{-l} Σ_{ν<=l} l^ν/ν!`, error `O(l²/k)`.
    PoissonUpper,
    /// `1/2`, error `O(1/sqrt(min(k, l)))`.
    Half,
}

impl ApproxKind {
    pub const ALL: [ApproxKind; 3] = [
        ApproxKind::PoissonLower,
        ApproxKind::PoissonUpper,
        ApproxKind::Half,
    ];

    /// Short name as used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            ApproxKind::PoissonLower => "eq1",
            ApproxKind::PoissonUpper => "eq2",
            ApproxKind::Half => "eq3",
        }
    }

    /// Accepted interval for the fitted log-log slope.
    pub fn slope_window(&self) -> (f64, f64) {
        match self {
            ApproxKind::PoissonLower | ApproxKind::PoissonUpper => (-1.15, -0.85),
            ApproxKind::Half => (-0.6, -0.4),
        }
    }

    /// Expected intercept and allowed deviation, where the order constant is known.
    pub fn intercept_target(&self) -> Option<(f64, f64)> {
        match self {
            // |P(n,n) - 1/2| ~ 1/(2 sqrt(π n))
            ApproxKind::Half => Some(((0.5 / std::f64::consts::PI.sqrt()).ln(), 0.1)),
            _ => None,
        }
    }
}

impl fmt::Display for ApproxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ApproxKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq1" | "poisson-lower" => Ok(ApproxKind::PoissonLower),
            "eq2" | "poisson-upper" => Ok(ApproxKind::PoissonUpper),
            "eq3" | "half" => Ok(ApproxKind::Half),
            _ => Err(Error::Parse(format!("unknown approximant {s:?}"))),
        }
    }
}

pub fn approximant(p: ParamPair, kind: ApproxKind) -> f64 {
    match kind {
        ApproxKind::PoissonLower => poisson_tail(p.k()).expect("k >= 1"),
        ApproxKind::PoissonUpper => poisson_upper(p.l()).expect("l >= 1"),
        ApproxKind::Half => 0.5,
    }
}

/// The accumulation point of `{P(k, l)}` belonging to `kind` and parameter `n`.
///
/// The Poisson sums start at `ν = 0`, matching the approximants they are limits of.
pub fn accumulation_limit(kind: ApproxKind, n: u64) -> Result<f64> {
    match kind {
        ApproxKind::PoissonLower => poisson_tail(n),
        ApproxKind::PoissonUpper => poisson_upper(n),
        ApproxKind::Half => Ok(0.5),
    }
}

/// Reference value of P: exact for `k + l <= 2000`, floating beyond.
pub fn oracle_p(p: ParamPair) -> f64 {
    if p.n() <= EXACT_ORACLE_MAX_N {
        rational_to_f64(&exact_p(p))
    } else {
        log_p(p)
    }
}

/// Least-squares line through `(log_abscissa, log_error)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: Vec<(f64, f64)>,
}

impl FitResult {
    /// Slope inside the window for `kind`, r² at least [`MIN_R2`], and the
    /// intercept near its target when one exists.
    pub fn passes(&self, kind: ApproxKind) -> bool {
        let (lo, hi) = kind.slope_window();
        let intercept_ok = kind
            .intercept_target()
            .is_none_or(|(c, tol)| (self.intercept - c).abs() <= tol);
        self.slope >= lo && self.slope <= hi && self.r2 >= MIN_R2 && intercept_ok
    }
}

pub fn linear_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::InvalidGrid(format!(
            "fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::InvalidArgument("fit points must be finite".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidGrid("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        slope,
        intercept,
        r2,
        points: points.to_vec(),
    })
}

/// The pair for grid value `g` under `kind` (the varying parameter is `g`).
fn grid_pair(kind: ApproxKind, fixed: u64, g: u64) -> Result<ParamPair> {
    match kind {
        ApproxKind::PoissonLower => ParamPair::new(fixed, g),
        ApproxKind::PoissonUpper => ParamPair::new(g, fixed),
        ApproxKind::Half => ParamPair::new(g, g),
    }
}

/// Checks the grid against the regime the error order is claimed for.
pub fn check_regime(kind: ApproxKind, fixed: u64, grid: &[u64]) -> Result<()> {
    if grid.len() < 4 {
        return Err(Error::InvalidGrid(format!(
            "need at least 4 grid points, got {}",
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid(
            "grid must be strictly increasing".into(),
        ));
    }
    if grid[0] < 1 || (kind != ApproxKind::Half && fixed < 1) {
        return Err(Error::InvalidGrid("parameters must be >= 1".into()));
    }
    let f2 = fixed.saturating_mul(fixed);
    match kind {
        ApproxKind::PoissonLower if grid.iter().any(|&l| f2 >= l) => {
            Err(Error::GridViolatesRegime("k^2 < l"))
        }
        ApproxKind::PoissonUpper if grid.iter().any(|&k| f2 >= k) => {
            Err(Error::GridViolatesRegime("l^2 < k"))
        }
        _ => Ok(()),
    }
}

/// Regression of `ln |P - approximant|` on the log of the varying parameter.
///
/// For [`ApproxKind::PoissonLower`] `fixed` is `k` and the grid runs over
/// `l`; for [`ApproxKind::PoissonUpper`] the roles swap; for
/// [`ApproxKind::Half`] the grid is the diagonal `k = l = n` and `fixed` is
/// ignored.
pub fn error_fit(kind: ApproxKind, fixed: u64, grid: &[u64]) -> Result<FitResult> {
    check_regime(kind, fixed, grid)?;
    let points: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&g| {
            let p = grid_pair(kind, fixed, g)?;
            let err = (oracle_p(p) - approximant(p, kind)).abs();
            Ok(((g as f64).ln(), err.ln()))
        })
        .collect::<Result<_>>()?;
    linear_fit(&points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// `P >= 1/4`
    Lower,
    /// `P <= 1/2`
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub k: u64,
    pub l: u64,
    pub bound: Bound,
    pub value: f64,
    /// Whether the violation was established in exact arithmetic.
    pub exact: bool,
}

fn exact_bound_check(p: ParamPair) -> Option<BoundViolation> {
    let v: ExactRational = exact_p(p);
    let (num, den) = (v.numer(), v.denom());
    let bound = if num * BigInt::from(4) < *den {
        Bound::Lower
    } else if num * BigInt::from(2) > *den {
        Bound::Upper
    } else {
        return None;
    };
    Some(BoundViolation {
        k: p.k(),
        l: p.l(),
        bound,
        value: rational_to_f64(&v),
        exact: true,
    })
}

fn float_bound_check(p: ParamPair, margin: f64) -> Option<BoundViolation> {
    let v = log_p(p);
    let bound = if v < 0.25 - margin {
        Bound::Lower
    } else if v > 0.5 + margin {
        Bound::Upper
    } else {
        return None;
    };
    Some(BoundViolation {
        k: p.k(),
        l: p.l(),
        bound,
        value: v,
        exact: false,
    })
}

fn grid_pairs(kmax: u64, lmax: u64) -> Vec<ParamPair> {
    (1..=kmax)
        .flat_map(|k| (1..=lmax).map(move |l| ParamPair::new(k, l).expect("k, l >= 1")))
        .collect()
}

/// Exact check of `1/4 <= P <= 1/2` over `[1, kmax] x [1, lmax]`.
pub fn scan_exact(kmax: u64, lmax: u64) -> Vec<BoundViolation> {
    grid_pairs(kmax, lmax)
        .into_par_iter()
        .filter_map(exact_bound_check)
        .collect()
}

/// Floating check of `1/4 - margin <= P <= 1/2 + margin`.
pub fn scan_float(kmax: u64, lmax: u64, margin: f64) -> Vec<BoundViolation> {
    grid_pairs(kmax, lmax)
        .into_par_iter()
        .filter_map(|p| float_bound_check(p, margin))
        .collect()
}

/// Vietoris / Alzer–Kwong bounds over `[1, kmax] x [1, lmax]`: exact where
/// `max(k, l) <= 60`, floating with margin 1e-9 elsewhere.
pub fn bounds_scan(kmax: u64, lmax: u64) -> Result<Vec<BoundViolation>> {
    if kmax < 1 || lmax < 1 {
        return Err(Error::InvalidArgument("scan bounds must be >= 1".into()));
    }
    Ok(grid_pairs(kmax, lmax)
        .into_par_iter()
        .filter_map(|p| {
            if p.k().max(p.l()) <= EXACT_SCAN_MAX {
                exact_bound_check(p)
            } else {
                float_bound_check(p, SCAN_MARGIN)
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corollary2 {
    /// `P(k, L)` standing in for the limit `l → ∞`.
    pub observed: f64,
    /// `1/2 - 1/sqrt(2πk)`.
    pub bound: f64,
    pub margin: f64,
}

/// Compares `P(k, big_l)` for `big_l >= 100 k²` against `1/2 - 1/sqrt(2πk)`.
pub fn corollary2_check(k: u64, big_l: u64) -> Result<Corollary2> {
    if k < 1 {
        return Err(Error::Domain {
            name: "k",
            min: 1,
            value: k,
        });
    }
    let need = k.saturating_mul(k).saturating_mul(100);
    if big_l < need {
        return Err(Error::InvalidArgument(format!(
            "big_l must be >= 100 k^2 = {need}, got {big_l}"
        )));
    }
    let observed = log_p(ParamPair::new(k, big_l)?);
    let bound = 0.5 - 1.0 / (2.0 * std::f64::consts::PI * k as f64).sqrt();
    Ok(Corollary2 {
        observed,
        bound,
        margin: observed - bound,
    })
}

/// `poisson_tail(m) + poisson_upper(m) + e^{-m} m^m/m! - 1`, identically zero.
pub fn limit_identity_residual(m: u64) -> Result<f64> {
    Ok(poisson_tail(m)? + poisson_upper(m)? + poisson_central_mass(m)? - 1.0)
}
