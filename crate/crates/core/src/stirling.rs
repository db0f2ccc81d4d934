//! Stirling-series evaluation of the Binet function
//! `μ(x) = ln Γ(x) - (x - 1/2) ln x + x - ln(2π)/2`.
//!
//! This is the closed-form route, kept independent of the quadrature in
//! [`crate::binet`].

/// `B_{2n} / (2n (2n - 1))` for `n = 1..=10`.
pub const STIRLING_COEFFS: [f64; 10] = [
    8.3333333333333333e-2,
    -2.7777777777777778e-3,
    7.9365079365079365e-4,
    -5.9523809523809524e-4,
    8.4175084175084175e-4,
    -1.9175269175269175e-3,
    6.4102564102564103e-3,
    -2.9550653594771242e-2,
    1.7964437236883057e-1,
    -1.3924322169059011,
];

/// Terms used by [`stirling_series`] callers at `x >= SHIFT_TARGET`.
pub const DEFAULT_TERMS: usize = 8;

/// Arguments below this are shifted upward before the series is applied.
pub const SHIFT_TARGET: f64 = 16.0;

/// Asymptotic series `Σ_{n=1}^{terms} B_{2n} / (2n(2n-1) x^{2n-1})`.
pub fn stirling_series(x: f64, terms: usize) -> f64 {
    let terms = terms.min(STIRLING_COEFFS.len());
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    STIRLING_COEFFS[..terms]
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * inv2 + c)
        * inv
}

/// Magnitude of the first omitted series term, a bound on the truncation error.
pub fn stirling_truncation(x: f64, terms: usize) -> f64 {
    let n = terms.min(STIRLING_COEFFS.len() - 1);
    STIRLING_COEFFS[n].abs() * x.powi(-(2 * n as i32 + 1))
}

/// `μ(x)` for any `x > 0`.
///
/// Uses `μ(x) = μ(x+1) + (x + 1/2) ln(1 + 1/x) - 1` until the argument
/// reaches [`SHIFT_TARGET`], then the eight-term series (truncation below 1e-21).
pub fn binet_mu(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0;
    let mut y = x;
    while y < SHIFT_TARGET {
        acc += (y + 0.5) * (1.0 / y).ln_1p() - 1.0;
        y += 1.0;
    }
    acc + stirling_series(y, DEFAULT_TERMS)
}

/// `ln Γ(x)` through [`binet_mu`].
pub fn ln_gamma(x: f64) -> f64 {
    binet_mu(x) + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln()
}
