//! Exact decimal rendering of rationals: round-half-even at a requested
//! number of fractional digits, with no floating point anywhere.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::exact::Rational;

/// Renders `value` with exactly `digits` fractional digits, rounding the last
/// digit half-to-even. `digits = 0` renders an integer.
pub(crate) fn round_half_even(value: &Rational, digits: usize) -> String {
    let negative = value.is_negative();
    let v = value.abs();
    let scale = BigInt::from(10u8).pow(digits as u32);
    let num = v.numer() * &scale;
    let den = v.denom();
    let (mut q, r) = num_integer::Integer::div_rem(&num, den);
    // half-even on the remainder
    let twice = &r * 2;
    if twice > *den || (twice == *den && num_integer::Integer::is_odd(&q)) {
        q += 1;
    }
    let digits_str = q.to_string();
    let unsigned = if digits == 0 {
        digits_str
    } else if digits_str.len() <= digits {
        format!("0.{:0>width$}", digits_str, width = digits)
    } else {
        let split = digits_str.len() - digits;
        format!("{}.{}", &digits_str[..split], &digits_str[split..])
    };
    if negative && !q.is_zero() {
        format!("-{unsigned}")
    } else {
        unsigned
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn rounding_ties_go_to_even() {
        assert_eq!(round_half_even(&rat(1, 2), 0), "0");
        assert_eq!(round_half_even(&rat(3, 2), 0), "2");
        assert_eq!(round_half_even(&rat(5, 2), 0), "2");
    }

    #[test]
    fn rounding_cases() {
        assert_eq!(round_half_even(&rat(1, 8), 2), "0.12"); // 0.125 -> even
        assert_eq!(round_half_even(&rat(3, 8), 2), "0.38"); // 0.375 -> even
        assert_eq!(round_half_even(&rat(1, 3), 4), "0.3333");
        assert_eq!(round_half_even(&rat(2, 3), 4), "0.6667");
        assert_eq!(round_half_even(&rat(-5, 4), 3), "-1.250");
        assert_eq!(round_half_even(&rat(1, 1), 5), "1.00000");
        assert_eq!(round_half_even(&rat(0, 1), 3), "0.000");
        assert_eq!(round_half_even(&rat(999, 1000), 2), "1.00");
    }
}
