//! Truncated Taylor series ("jets") for forward-mode higher derivatives.
//!
//! A `Jet<N>` holds `f(t0 + h) = Σ_{i<N} a_i h^i`, so `f^{(i)}(t0) = i! a_i`.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<const N: usize> {
    pub coeffs: [f64; N],
}

impl<const N: usize> Jet<N> {
    pub fn constant(c: f64) -> Self {
        let mut coeffs = [0.0; N];
        coeffs[0] = c;
        Jet { coeffs }
    }

    /// The independent variable expanded at `t0`.
    pub fn variable(t0: f64) -> Self {
        let mut j = Self::constant(t0);
        if N > 1 {
            j.coeffs[1] = 1.0;
        }
        j
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `f^{(order)}(t0)`.
    pub fn derivative(&self, order: usize) -> f64 {
        let fact: f64 = (1..=order).map(|i| i as f64).product();
        self.coeffs[order] * fact
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn offset(&self, c: f64) -> Self {
        let mut out = *self;
        out.coeffs[0] += c;
        out
    }

    pub fn exp(&self) -> Self {
        let mut b = [0.0; N];
        b[0] = self.coeffs[0].exp();
        for n in 1..N {
            let s: f64 = (1..=n).map(|k| k as f64 * self.coeffs[k] * b[n - k]).sum();
            b[n] = s / n as f64;
        }
        Jet { coeffs: b }
    }

    /// `self^p` for a jet with positive constant term.
    pub fn powf(&self, p: f64) -> Self {
        let a = &self.coeffs;
        debug_assert!(a[0] > 0.0);
        let mut b = [0.0; N];
        b[0] = a[0].powf(p);
        for n in 1..N {
            let s: f64 = (1..=n)
                .map(|k| (p * k as f64 - (n - k) as f64) * a[k] * b[n - k])
                .sum();
            b[n] = s / (n as f64 * a[0]);
        }
        Jet { coeffs: b }
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.coeffs
            .iter_mut()
            .zip(rhs.coeffs)
            .for_each(|(a, b)| *a += b);
        self
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.coeffs
            .iter_mut()
            .zip(rhs.coeffs)
            .for_each(|(a, b)| *a -= b);
        self
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = [0.0; N];
        for i in 0..N {
            for j in 0..N - i {
                c[i + j] += self.coeffs[i] * rhs.coeffs[j];
            }
        }
        Jet { coeffs: c }
    }
}
