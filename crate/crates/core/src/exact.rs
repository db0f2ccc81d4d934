//! Exact rational evaluation of P(k, l) and the identities around it.
//!
//! Every value here is an exact rational; nothing in this module rounds.
//! The other evaluation routes are checked against these values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::{Error, Result};

/// The shape parameters `(k, l)`, both at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamPair {
    k: u64,
    l: u64,
}

impl ParamPair {
    pub fn new(k: u64, l: u64) -> Result<Self> {
        if k < 1 {
            return Err(Error::Domain {
                name: "k",
                min: 1,
                value: k,
            });
        }
        if l < 1 {
            return Err(Error::Domain {
                name: "l",
                min: 1,
                value: l,
            });
        }
        Ok(ParamPair { k, l })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    /// `k + l`, the binomial size.
    pub fn n(&self) -> u64 {
        self.k + self.l
    }

    pub fn swapped(&self) -> ParamPair {
        ParamPair {
            k: self.l,
            l: self.k,
        }
    }
}

impl fmt::Display for ParamPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k, self.l)
    }
}

/// An arbitrary-precision rational in lowest terms with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    /// Builds `num / den`, reducing to lowest terms.
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(ExactRational(BigRational::new(num, den)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(n.into()))
    }

    /// `num / den` for machine integers.
    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        Self::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        ExactRational(r)
    }
}

impl Add for &ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: &ExactRational) -> ExactRational {
        ExactRational(&self.0 + &rhs.0)
    }
}

impl Sub for &ExactRational {
    type Output = ExactRational;
    fn sub(self, rhs: &ExactRational) -> ExactRational {
        ExactRational(&self.0 - &rhs.0)
    }
}

impl Mul for &ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: &ExactRational) -> ExactRational {
        ExactRational(&self.0 * &rhs.0)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

fn parse_bigint(s: &str, signed: bool) -> Result<BigInt> {
    let digits = match s.strip_prefix('-') {
        Some(rest) if signed => rest,
        _ => s,
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a decimal integer: {s:?}")));
    }
    BigInt::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

impl FromStr for ExactRational {
    type Err = Error;

    /// Parses `"num/den"` with an optional leading `-` on the numerator.
    fn from_str(s: &str) -> Result<Self> {
        let (num, den) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected num/den, got {s:?}")))?;
        let num = parse_bigint(num, true)?;
        let den = parse_bigint(den, false)?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        ExactRational::new(num, den)
    }
}

/// A closed rational interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalRational {
    lo: ExactRational,
    hi: ExactRational,
}

impl IntervalRational {
    pub fn new(lo: ExactRational, hi: ExactRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "interval lower end {lo} exceeds upper end {hi}"
            )));
        }
        Ok(IntervalRational { lo, hi })
    }

    pub fn lo(&self) -> &ExactRational {
        &self.lo
    }

    pub fn hi(&self) -> &ExactRational {
        &self.hi
    }

    pub fn width(&self) -> ExactRational {
        &self.hi - &self.lo
    }

    pub fn contains_strictly(&self, x: &ExactRational) -> bool {
        &self.lo < x && x < &self.hi
    }
}

impl fmt::Display for IntervalRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.lo, self.hi)
    }
}

impl FromStr for IntervalRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected lo,hi, got {s:?}")))?;
        IntervalRational::new(lo.parse()?, hi.parse()?)
    }
}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

/// Integer numerator `Σ_{ν<k} C(n,ν) k^ν l^(n-ν)` of P(k, l) over `n^n`.
fn binomial_sum_numerator(p: ParamPair) -> BigInt {
    let (k, l, n) = (p.k(), p.l(), p.n());
    let mut term: BigInt = Pow::pow(big(l), n);
    let mut sum = term.clone();
    for nu in 0..k - 1 {
        // term_{ν+1} = term_ν (n-ν) k / ((ν+1) l); the division is exact.
        term *= big((n - nu) * k);
        let divisor = big((nu + 1) * l);
        debug_assert!(term.is_multiple_of(&divisor));
        term /= divisor;
        sum += &term;
    }
    sum
}

/// P(k, l) as an exact rational.
pub fn exact_p(p: ParamPair) -> ExactRational {
    let den: BigInt = Pow::pow(big(p.n()), p.n());
    ExactRational(BigRational::new(binomial_sum_numerator(p), den))
}

/// `C(k+l, k) k^k l^l / (k+l)^(k+l)`, which equals `1 - P(k,l) - P(l,k)`.
pub fn exact_swap_defect(p: ParamPair) -> ExactRational {
    let (k, l, n) = (p.k(), p.l(), p.n());
    let binom = num_integer::binomial(big(n), big(k.min(l)));
    let num = binom * Pow::pow(big(k), k) * Pow::pow(big(l), l);
    let den: BigInt = Pow::pow(big(n), n);
    ExactRational(BigRational::new(num, den))
}

/// Running partial sums of `Σ_j m^j / j!`, kept as the integer `T_j = j! Σ_{i<=j} m^i/i!`.
struct ExpSeries {
    m: BigInt,
    j: u64,
    scaled_sum: BigInt,
    factorial: BigInt,
    power: BigInt,
}

impl ExpSeries {
    fn new(m: u64) -> Self {
        ExpSeries {
            m: big(m),
            j: 0,
            scaled_sum: BigInt::one(),
            factorial: BigInt::one(),
            power: BigInt::one(),
        }
    }

    fn advance_to(&mut self, n: u64) {
        while self.j < n {
            self.j += 1;
            self.power *= &self.m;
            self.factorial *= big(self.j);
            self.scaled_sum = &self.scaled_sum * big(self.j) + &self.power;
        }
    }

    /// `(T_j, j!)`.
    fn parts(&self) -> (&BigInt, &BigInt) {
        (&self.scaled_sum, &self.factorial)
    }

    /// Taylor enclosure of `e^m` at the current order `N`:
    /// `lo = S_N`, `hi = S_N + 3 m^(N+1)/(N+1)!`. Valid once `N >= 2m`.
    fn enclosure(&self) -> ((BigInt, BigInt), (BigInt, BigInt)) {
        let next = big(self.j + 1);
        let lo = (self.scaled_sum.clone(), self.factorial.clone());
        let hi_den = &self.factorial * &next;
        let hi_num = &self.scaled_sum * &next + BigInt::from(3) * &self.power * &self.m;
        (lo, (hi_num, hi_den))
    }
}

/// Exact `Σ_{ν=0}^{n} m^ν / ν!`.
pub fn poisson_partial_sum(m: u64, n: u64) -> Result<ExactRational> {
    if m < 1 {
        return Err(Error::Domain {
            name: "m",
            min: 1,
            value: m,
        });
    }
    let mut series = ExpSeries::new(m);
    series.advance_to(n);
    let (num, den) = series.parts();
    ExactRational::new(num.clone(), den.clone())
}

fn initial_order(l: u64) -> u64 {
    (2 * l).max(4)
}

fn refine_order(n: u64) -> u64 {
    n + n / 2 + 1
}

/// A rational interval strictly containing `e^l`, of width at most `eps`.
pub fn e_power_interval(l: u64, eps: &ExactRational) -> Result<IntervalRational> {
    if l < 1 {
        return Err(Error::Domain {
            name: "l",
            min: 1,
            value: l,
        });
    }
    if !eps.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let mut series = ExpSeries::new(l);
    let mut order = initial_order(l);
    loop {
        series.advance_to(order);
        let ((lo_n, lo_d), (hi_n, hi_d)) = series.enclosure();
        // width = 3 l^(N+1) / (N+1)!
        let width_num = BigInt::from(3) * &series.power * &series.m;
        let width_den = &series.factorial * big(series.j + 1);
        if width_num * eps.denom() <= eps.numer() * &width_den {
            return IntervalRational::new(
                ExactRational::new(lo_n, lo_d)?,
                ExactRational::new(hi_n, hi_d)?,
            );
        }
        order = refine_order(order);
    }
}

/// Refinement cap for [`karamata_check`].
pub const KARAMATA_MAX_DEPTH: usize = 64;

/// `a/b` vs `c/d` for positive denominators.
fn cmp_frac(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Ordering {
    debug_assert!(b.sign() == Sign::Plus && d.sign() == Sign::Plus);
    (a * d).cmp(&(c * b))
}

/// Decides `Σ_{ν<l} l^ν/ν! < e^l/2 < Σ_{ν<=l} l^ν/ν!` exactly.
///
/// Both partial sums are exact; `e^l` is enclosed by a rational Taylor
/// interval that is tightened until each comparison is decided.
pub fn karamata_check(l: u64) -> Result<(bool, bool)> {
    if l < 1 {
        return Err(Error::Domain {
            name: "l",
            min: 1,
            value: l,
        });
    }
    let mut series = ExpSeries::new(l);
    series.advance_to(l - 1);
    let (a_num, a_den) = series.parts();
    // 2A and 2B as fractions.
    let two_a = (a_num * 2, a_den.clone());
    series.advance_to(l);
    let (b_num, b_den) = series.parts();
    let two_b = (b_num * 2, b_den.clone());

    let mut lower: Option<bool> = None;
    let mut upper: Option<bool> = None;
    let mut order = initial_order(l);
    for _ in 0..KARAMATA_MAX_DEPTH {
        series.advance_to(order);
        let ((lo_n, lo_d), (hi_n, hi_d)) = series.enclosure();
        if lower.is_none() {
            if cmp_frac(&two_a.0, &two_a.1, &lo_n, &lo_d) != Ordering::Greater {
                lower = Some(true);
            } else if cmp_frac(&two_a.0, &two_a.1, &hi_n, &hi_d) != Ordering::Less {
                lower = Some(false);
            }
        }
        if upper.is_none() {
            if cmp_frac(&hi_n, &hi_d, &two_b.0, &two_b.1) != Ordering::Greater {
                upper = Some(true);
            } else if cmp_frac(&lo_n, &lo_d, &two_b.0, &two_b.1) != Ordering::Less {
                upper = Some(false);
            }
        }
        if let (Some(lo), Some(hi)) = (lower, upper) {
            return Ok((lo, hi));
        }
        order = refine_order(order);
    }
    Err(Error::Undecided {
        depth: KARAMATA_MAX_DEPTH,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(k: u64, l: u64) -> ParamPair {
        ParamPair::new(k, l).unwrap()
    }

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    /// Independent oracle: direct binomials and powers, no recurrence.
    fn brute_p(k: u64, l: u64) -> ExactRational {
        let n = k + l;
        let mut num = BigInt::zero();
        for nu in 0..k {
            let c = num_integer::binomial(big(n), big(nu));
            num += c * Pow::pow(big(k), nu) * Pow::pow(big(l), n - nu);
        }
        ExactRational::new(num, Pow::pow(big(n), n)).unwrap()
    }

    #[test]
    fn exact_p_examples() {
        assert_eq!(exact_p(pair(1, 1)), q("1/4"));
        assert_eq!(exact_p(pair(2, 2)), q("5/16"));
        assert_eq!(exact_p(pair(3, 5)), q("6203125/16777216"));
    }

    #[test]
    fn exact_p_matches_brute_force() {
        for k in 1..=12 {
            for l in 1..=12 {
                assert_eq!(exact_p(pair(k, l)), brute_p(k, l), "({k},{l})");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert_eq!(
            ParamPair::new(0, 1).unwrap_err().to_string(),
            "k must be >= 1, got 0"
        );
        assert!(ParamPair::new(1, 0).is_err());
        assert!(poisson_partial_sum(0, 3).is_err());
        assert!(karamata_check(0).is_err());
    }

    #[test]
    fn swap_defect_examples() {
        assert_eq!(exact_swap_defect(pair(1, 1)), q("1/2"));
        assert_eq!(exact_swap_defect(pair(2, 2)), q("3/8"));
        assert_eq!(exact_swap_defect(pair(1, 2)), q("4/9"));
        assert_eq!(exact_p(pair(1, 2)), q("8/27"));
        assert_eq!(exact_p(pair(2, 1)), q("7/27"));
    }

    #[test]
    fn poisson_partial_sum_examples() {
        assert_eq!(poisson_partial_sum(1, 0).unwrap(), q("1/1"));
        assert_eq!(poisson_partial_sum(2, 2).unwrap(), q("5/1"));
        assert_eq!(poisson_partial_sum(3, 3).unwrap(), q("13/1"));
    }

    #[test]
    fn e_interval_examples() {
        // e = 2.71828182845904523536..., e^2 = 7.38905609893065022723...
        let e_lo = q("271828182845904523/100000000000000000");
        let e_hi = q("271828182845904524/100000000000000000");
        let iv = e_power_interval(1, &q("1/1000000000")).unwrap();
        assert!(iv.width() <= q("1/1000000000"));
        assert!(iv.lo() < &e_lo && &e_hi < iv.hi());

        let e2_lo = q("738905609893065022/100000000000000000");
        let e2_hi = q("738905609893065023/100000000000000000");
        let iv = e_power_interval(2, &q("1/1000000")).unwrap();
        assert!(iv.width() <= q("1/1000000"));
        assert!(iv.lo() < &e2_lo && &e2_hi < iv.hi());

        let coarse = e_power_interval(1, &q("1/1")).unwrap();
        assert!(coarse.lo() >= &q("2/1") && coarse.hi() <= &q("7/2"));
        assert!(coarse.width() <= q("1/1"));
    }

    #[test]
    fn e_interval_rejects_nonpositive_eps() {
        assert!(e_power_interval(1, &q("0/1")).is_err());
        assert!(e_power_interval(1, &q("-1/2")).is_err());
    }

    #[test]
    fn karamata_small() {
        for l in 1..=3 {
            assert_eq!(karamata_check(l).unwrap(), (true, true));
        }
    }

    #[test]
    fn rational_text_format() {
        assert_eq!(q("6/8").to_string(), "3/4");
        assert_eq!(q("-2/4").to_string(), "-1/2");
        assert_eq!(q("5/1").to_string(), "5/1");
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!("1".parse::<ExactRational>().is_err());
        assert!("1/-2".parse::<ExactRational>().is_err());
        assert!("+1/2".parse::<ExactRational>().is_err());
        assert!(" 1/2".parse::<ExactRational>().is_err());
        let iv: IntervalRational = "1/3,1/2".parse().unwrap();
        assert_eq!(iv.to_string(), "1/3,1/2");
        assert!("1/2,1/3".parse::<IntervalRational>().is_err());
    }
}
