//! Floating evaluation of P(k, l) and of the two Poisson approximants.
//!
//! All three quantities are sums of probability masses, so every term lies
//! in `(0, 1]` once the leading factor is applied. Terms are generated by
//! their multiplicative recurrence; when the leading factor underflows the
//! accumulation runs in a rescaled frame tracked by a [`LogReal`] exponent.

use std::f64::consts::{LN_2, PI};
use std::ops::{Div, Mul};

use num_traits::ToPrimitive;

use crate::exact::{ExactRational, ParamPair};
use crate::stirling;
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Largest `k + l` inside the documented accuracy envelope.
pub const ENVELOPE: u64 = 100_000_000;

/// Longest forward recurrence before switching to the saddle-point start.
const DIRECT_MAX_TERMS: u64 = 10_000;

/// Downward recurrence stops once a term drops below this fraction of the sum.
const DOWNWARD_CUTOFF: f64 = 1e-20;

/// A real number stored as `sign * exp(log_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogReal {
    sign: i8,
    log_abs: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };

    pub fn new(sign: i8, log_abs: f64) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            LogReal {
                sign: sign.signum(),
                log_abs,
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogReal::new(if x > 0.0 { 1 } else { -1 }, x.abs().ln())
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn log_abs(&self) -> f64 {
        self.log_abs
    }

    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => s as f64 * self.log_abs.exp(),
        }
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 || rhs.sign == 0 {
            return LogReal::ZERO;
        }
        LogReal::new(self.sign * rhs.sign, self.log_abs + rhs.log_abs)
    }
}

impl Div for LogReal {
    type Output = LogReal;
    fn div(self, rhs: LogReal) -> LogReal {
        assert!(rhs.sign != 0, "LogReal division by zero");
        if self.sign == 0 {
            return LogReal::ZERO;
        }
        LogReal::new(self.sign * rhs.sign, self.log_abs - rhs.log_abs)
    }
}

/// Nearest `f64` to an exact rational.
pub fn rational_to_f64(r: &ExactRational) -> f64 {
    r.as_ratio().to_f64().unwrap_or(f64::NAN)
}

const RESCALE_EXP: i32 = 600;

/// Positive-term series accumulated in a frame scaled by `exp(log_scale)`.
struct ScaledSeries {
    term: f64,
    log_scale: f64,
    acc: CompensatedSum,
}

impl ScaledSeries {
    /// Starts at a first term `exp(log_first)`.
    fn starting_at(log_first: f64) -> Self {
        let (term, log_scale) = if log_first > -700.0 {
            (log_first.exp(), 0.0)
        } else {
            (1.0, log_first)
        };
        let mut acc = CompensatedSum::new();
        acc.add(term);
        ScaledSeries {
            term,
            log_scale,
            acc,
        }
    }

    fn push_ratio(&mut self, ratio: f64) {
        self.term *= ratio;
        if self.term > 2f64.powi(RESCALE_EXP) {
            let down = 2f64.powi(-RESCALE_EXP);
            self.term *= down;
            self.acc.scale(down);
            self.log_scale += RESCALE_EXP as f64 * LN_2;
        }
        self.acc.add(self.term);
    }

    fn finish(&self) -> LogReal {
        let s = self.acc.value();
        LogReal::new(1, self.log_scale + s.ln())
    }
}

/// Sum of `count` terms starting from `exp(log_first)` with ratios
/// `ratio(i) = term_{i+1} / term_i`.
fn forward_sum(log_first: f64, count: u64, ratio: impl Fn(u64) -> f64) -> f64 {
    let mut series = ScaledSeries::starting_at(log_first);
    for i in 0..count - 1 {
        series.push_ratio(ratio(i));
    }
    series.finish().to_f64()
}

/// Sum of a decreasing tail starting at top term `exp(log_top)` going down
/// with `ratio(i) = term_{i-1} / term_i` for `i = top, top-1, ..., 1`.
fn downward_sum(log_top: f64, top: u64, ratio: impl Fn(u64) -> f64) -> f64 {
    let mut term = log_top.exp();
    let mut acc = CompensatedSum::new();
    acc.add(term);
    let mut i = top;
    while i > 0 {
        term *= ratio(i);
        acc.add(term);
        if term < DOWNWARD_CUTOFF * acc.value() {
            break;
        }
        i -= 1;
    }
    acc.value()
}

/// Deviance `x ln(x/m) + m - x`, computed without cancellation near `x = m`.
fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

/// `ln` of the Binomial(n, p) mass at `x`, with `np` and `nq` given exactly.
fn ln_binom_pmf(x: u64, n: u64, np: f64, nq: f64) -> f64 {
    let (xf, nf) = (x as f64, n as f64);
    let yf = (n - x) as f64;
    let lc = stirling::binet_mu(nf)
        - stirling::binet_mu(xf)
        - stirling::binet_mu(yf)
        - bd0(xf, np)
        - bd0(yf, nq);
    let lf = (2.0 * PI).ln() + xf.ln() + (-xf / nf).ln_1p();
    lc - 0.5 * lf
}

/// `ln` of the Poisson(λ) mass at `x >= 1`.
fn ln_poisson_pmf(x: u64, lambda: f64) -> f64 {
    let xf = x as f64;
    -stirling::binet_mu(xf) - bd0(xf, lambda) - 0.5 * (2.0 * PI * xf).ln()
}

fn envelope_warning(n: u64) {
    if n > ENVELOPE {
        log::warn!("k + l = {n} exceeds the accuracy envelope {ENVELOPE}");
    }
}

/// `Σ_{ν<k} C(n,ν) (k/n)^ν (l/n)^(n-ν)` summed directly.
fn lower_binomial_sum(k: u64, l: u64) -> f64 {
    let n = k + l;
    let (kf, lf, nf) = (k as f64, l as f64, n as f64);
    if k <= DIRECT_MAX_TERMS {
        let lead = -nf * (kf / lf).ln_1p();
        forward_sum(lead, k, |nu| {
            ((n - nu) as f64 * kf) / ((nu + 1) as f64 * lf)
        })
    } else {
        let top = k - 1;
        downward_sum(ln_binom_pmf(top, n, kf, lf), top, |nu| {
            (nu as f64 * lf) / ((n - nu + 1) as f64 * kf)
        })
    }
}

/// P(k, l) in floating point.
///
/// The side of the binomial with the smaller leading exponent is summed:
/// directly for `k <= l`, as `1 - Σ_{ν>=k}` otherwise. Both complements are
/// at least 1/4, so the subtraction loses at most a factor 3 in relative
/// accuracy.
pub fn log_p(p: ParamPair) -> f64 {
    envelope_warning(p.n());
    let (k, l) = (p.k(), p.l());
    if k <= l {
        lower_binomial_sum(k, l)
    } else {
        // Σ_{ν>=k} pmf(ν) = Σ_{μ<=l} C(n,μ) (l/n)^μ (k/n)^(n-μ) = lower sum of (l+1, ...) shape
        let n = k + l;
        let (kf, lf, nf) = (k as f64, l as f64, n as f64);
        let upper = if l < DIRECT_MAX_TERMS {
            let lead = -nf * (lf / kf).ln_1p();
            forward_sum(lead, l + 1, |mu| {
                ((n - mu) as f64 * lf) / ((mu + 1) as f64 * kf)
            })
        } else {
            downward_sum(ln_binom_pmf(l, n, lf, kf), l, |mu| {
                (mu as f64 * kf) / ((n - mu + 1) as f64 * lf)
            })
        };
        1.0 - upper
    }
}

/// `e^{-m} Σ_{ν<=last} m^ν/ν!`, for `last <= m`.
fn poisson_cdf(m: u64, last: u64) -> f64 {
    debug_assert!(last <= m);
    let mf = m as f64;
    if last < DIRECT_MAX_TERMS {
        forward_sum(-mf, last + 1, |nu| mf / (nu + 1) as f64)
    } else {
        downward_sum(ln_poisson_pmf(last, mf), last, |nu| nu as f64 / mf)
    }
}

/// `e^{-k} Σ_{ν=0}^{k-1} k^ν/ν!`, the ℓ → ∞ limit of P(k, l).
pub fn poisson_tail(k: u64) -> Result<f64> {
    if k < 1 {
        return Err(Error::Domain {
            name: "k",
            min: 1,
            value: k,
        });
    }
    envelope_warning(k);
    Ok(poisson_cdf(k, k - 1))
}

/// `1 - e^{-l} Σ_{ν=0}^{l} l^ν/ν!` (upper limit inclusive), the k → ∞ limit of P(k, l).
pub fn poisson_upper(l: u64) -> Result<f64> {
    if l < 1 {
        return Err(Error::Domain {
            name: "l",
            min: 1,
            value: l,
        });
    }
    envelope_warning(l);
    Ok(1.0 - poisson_cdf(l, l))
}

/// `e^{-m} m^m / m!`, the Poisson mass at its mean.
pub fn poisson_central_mass(m: u64) -> Result<f64> {
    if m < 1 {
        return Err(Error::Domain {
            name: "m",
            min: 1,
            value: m,
        });
    }
    Ok(ln_poisson_pmf(m, m as f64).exp())
}
