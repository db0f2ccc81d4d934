//! Locale-free number rendering with 17 significant digits.
//!
//! Digits are rounded to 17 significant places, which is enough to round-trip
//! every `f64`. Trailing zeros are then dropped, so 0.25 prints as `0.25`.
//! Decimal exponents from -5 to 16 print positionally, everything else as
//! `d.ddde±x`.

use meancut::ExactRational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub const SIG_DIGITS: usize = 17;

/// `digits` holds the significant digits, most significant first, standing
/// for `0.d1d2… × 10^(exp+1)`, i.e. `d1` sits at decimal position `exp`.
fn render(negative: bool, digits: &str, exp: i64) -> String {
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-5..=16).contains(&exp) {
        if exp < 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
            out.push_str(digits);
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                out.push_str(digits);
                out.extend(std::iter::repeat_n('0', int_len - digits.len()));
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push_str(&exp.to_string());
    }
    out
}

pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let s = format!("{:.*e}", SIG_DIGITS - 1, x.abs());
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    render(x < 0.0, &digits, exp.parse().expect("integer exponent"))
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// Correctly rounded (half to even) 17-significant-digit decimal of `r`.
pub fn format_rational(r: &ExactRational) -> String {
    let (num, den) = (r.numer(), r.denom());
    if num.is_zero() {
        return "0".into();
    }
    let negative = num.is_negative();
    let num = num.abs();
    // Decimal exponent of the leading digit, from a digit-count estimate
    // corrected below.
    let mut exp = num.to_string().len() as i64 - den.to_string().len() as i64;
    let ge_pow = |e: i64| -> bool {
        if e >= 0 {
            num >= den * pow10(e as u32)
        } else {
            &num * pow10((-e) as u32) >= *den
        }
    };
    while !ge_pow(exp) {
        exp -= 1;
    }
    while ge_pow(exp + 1) {
        exp += 1;
    }
    let shift = SIG_DIGITS as i64 - 1 - exp;
    let (n, d) = if shift >= 0 {
        (&num * pow10(shift as u32), den.clone())
    } else {
        (num.clone(), den * pow10((-shift) as u32))
    };
    let (mut q, rem) = n.div_rem(&d);
    let twice = &rem * BigInt::from(2);
    if twice > d || (twice == d && q.is_odd()) {
        q += 1;
    }
    let mut digits = q.to_string();
    if digits.len() > SIG_DIGITS {
        // rounded up to the next power of ten
        exp += 1;
        digits.truncate(SIG_DIGITS);
    }
    render(negative, &digits, exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn floats() {
        assert_eq!(format_f64(0.25), "0.25");
        assert_eq!(format_f64(1.0), "1");
        assert_eq!(format_f64(-2.5), "-2.5");
        assert_eq!(format_f64(0.1), "0.10000000000000001");
        assert_eq!(format_f64(1e-5), "0.000010000000000000001");
        assert_eq!(format_f64(2f64.powi(-16)), "0.0000152587890625");
        assert_eq!(format_f64(1.5e-6), "1.5e-6");
        assert_eq!(format_f64(1e16), "10000000000000000");
        assert_eq!(format_f64(1e17), "1e17");
        assert_eq!(format_f64(123.456), "123.456");
        assert_eq!(format_f64(0.0), "0");
        assert_eq!(format_f64(f64::NAN), "NaN");
    }

    #[test]
    fn floats_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            std::f64::consts::PI,
            6.02e23,
            5e-324,
            f64::MAX,
            -1e-300,
            0.36787944117144233,
        ] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn rationals() {
        assert_eq!(format_rational(&rat("1/4")), "0.25");
        assert_eq!(format_rational(&rat("5/16")), "0.3125");
        assert_eq!(
            format_rational(&rat("6203125/16777216")),
            "0.36973506212234497"
        );
        assert_eq!(format_rational(&rat("1/3")), "0.33333333333333333");
        assert_eq!(format_rational(&rat("2/3")), "0.66666666666666667");
        assert_eq!(format_rational(&rat("-7/1")), "-7");
        assert_eq!(
            format_rational(&rat("999999999999999999/1000000000000000000")),
            "1"
        );
        assert_eq!(format_rational(&rat("1/1000000")), "1e-6");
        assert_eq!(format_rational(&rat("0/5")), "0");
    }

    #[test]
    fn rational_matches_float_where_both_exact() {
        for s in ["1/8", "3/1024", "12345/64"] {
            let r = rat(s);
            assert_eq!(
                format_rational(&r),
                format_f64(meancut::float_eval::rational_to_f64(&r))
            );
        }
    }
}
