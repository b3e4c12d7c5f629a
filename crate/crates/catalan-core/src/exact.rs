//! Exact scalar arithmetic: arbitrary-precision rationals, Gaussian rationals,
//! and linear forms `a + b*G` in Catalan's constant.
//!
//! All values are immutable after construction and fully reduced, so equality
//! is structural and denominators can be read off directly for divisibility
//! certificates.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::decimal;
use crate::error::{Error, Result};

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num/den`, reducing to lowest terms. Panics if `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Rational::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Reciprocal; panics on zero.
    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // fall back to separate conversion for out-of-range components
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    /// Decimal expansion with `digits` fractional digits, round-half-even.
    /// This is exact: no intermediate floating point is involved.
    pub fn to_decimal(&self, digits: usize) -> String {
        decimal::round_half_even(self, digits)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `p` or `p/q`.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_int = |t: &str| {
            BigInt::from_str(t.trim())
                .map_err(|_| Error::Domain(format!("invalid integer literal `{t}`")))
        };
        match s.split_once('/') {
            None => Ok(Rational::from_integer(parse_int(s)?)),
            Some((n, d)) => {
                let den = parse_int(d)?;
                if den.is_zero() {
                    return Err(Error::Domain("zero denominator".into()));
                }
                Ok(Rational::new(parse_int(n)?, den))
            }
        }
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);
rational_binop!(Div, div);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

/// Shorthand used throughout the tests and internal tables.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

/// An element of Q(i), stored as `re + im*i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_rational(re: Rational) -> Self {
        GaussianRational {
            re,
            im: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational::new(Rational::zero(), Rational::one())
    }

    /// `i^e` for any (possibly negative) exponent.
    pub fn i_pow(e: i64) -> Self {
        match e.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::i(),
            2 => -Self::one(),
            _ => -Self::i(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        GaussianRational::new(self.re.clone(), -&self.im)
    }

    /// `|z|^2 = re^2 + im^2`, an exact rational.
    pub fn norm_sq(&self) -> Rational {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    /// Reciprocal; panics on zero.
    pub fn recip(&self) -> Self {
        let n = self.norm_sq();
        let inv = n.recip();
        GaussianRational::new(&self.re * &inv, -&(&self.im * &inv))
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}*i", self.im)
        } else if self.im.is_negative() {
            write!(f, "({} - {}*i)", self.re, self.im.abs())
        } else {
            write!(f, "({} + {}*i)", self.re, self.im)
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self * &rhs.recip()
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

/// The value `a + b*G`, where `G` is Catalan's constant. Arithmetic acts
/// componentwise; the numeric value is only materialized on demand through
/// [`linear_form_decimal`].
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LinearForm {
    pub a: Rational,
    pub b: Rational,
}

impl LinearForm {
    pub fn new(a: Rational, b: Rational) -> Self {
        LinearForm { a, b }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        LinearForm::new(&self.a * c, &self.b * c)
    }

    /// `a + b*G` in f64 precision, for quick comparisons against quadrature.
    pub fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * crate::oracle::CATALAN_F64
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        LinearForm::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        LinearForm::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.b.is_negative() {
            write!(f, "{} - {}*G", self.a, self.b.abs())
        } else {
            write!(f, "{} + {}*G", self.a, self.b)
        }
    }
}

impl fmt::Debug for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Decimal expansion of `a + b*G` with `digits` fractional digits,
/// round-half-even. Catalan's constant is taken at a working precision at
/// least 10 guard digits beyond the request and escalated until the rounding
/// is provably stable.
pub fn linear_form_decimal(form: &LinearForm, digits: usize) -> Result<String> {
    if digits == 0 {
        return Err(Error::Domain("digit count must be >= 1".into()));
    }
    if form.b.is_zero() {
        return Ok(form.a.to_decimal(digits));
    }
    let mut prec = digits + 12;
    for _ in 0..6 {
        let g = crate::oracle::catalan_rational(prec)?;
        let value = &form.a + &(&form.b * &g);
        // catalan_rational is accurate to 4 ulp at scale `prec`
        let err = &form.b.abs() * &Rational::new(4, BigInt::from(10u8).pow(prec as u32));
        let lo = decimal::round_half_even(&(&value - &err), digits);
        let hi = decimal::round_half_even(&(&value + &err), digits);
        if lo == hi {
            return Ok(lo);
        }
        prec *= 2;
    }
    Err(Error::Internal(
        "decimal rounding did not stabilize under precision escalation".into(),
    ))
}

static LCM_TABLE: Mutex<Vec<BigInt>> = Mutex::new(Vec::new());

/// `L_m = lcm(1, ..., m)`. Values are filled in incrementally and cached,
/// since every denominator certificate up to the search degree budget reads
/// from this table.
pub fn lcm_upto(m: u32) -> Result<BigInt> {
    if m == 0 {
        return Err(Error::Domain("lcm_upto requires m >= 1".into()));
    }
    let mut table = LCM_TABLE.lock().expect("lcm table lock");
    if table.is_empty() {
        table.push(BigInt::one()); // L_1
    }
    while table.len() < m as usize {
        let next = table.len() as u32 + 1;
        let last = table.last().expect("nonempty").clone();
        table.push(last.lcm(&BigInt::from(next)));
    }
    Ok(table[m as usize - 1].clone())
}

/// `L_m` extended with the empty product `L_0 = 1`; used where a degree-0
/// polynomial needs a certificate bound.
pub(crate) fn lcm_upto_or_one(m: u32) -> BigInt {
    if m == 0 {
        BigInt::one()
    } else {
        lcm_upto(m).expect("m >= 1")
    }
}

/// Total order on exact rationals by value; handy for tests.
pub fn cmp_rationals(a: &Rational, b: &Rational) -> Ordering {
    a.0.cmp(&b.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rationals_reduce_and_normalize_sign() {
        let r = Rational::new(4, -6);
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
        assert_eq!(rat(1, 2) + rat(1, 3), rat(5, 6));
    }

    #[test]
    fn lcm_upto_small_values() {
        assert_eq!(lcm_upto(1).unwrap(), BigInt::from(1));
        assert_eq!(lcm_upto(6).unwrap(), BigInt::from(60));
        assert_eq!(lcm_upto(10).unwrap(), BigInt::from(2520));
        assert!(matches!(lcm_upto(0), Err(Error::Domain(_))));
    }

    #[test]
    fn lcm_upto_ratio_is_one_or_prime_power() {
        for m in 1..60u32 {
            let ratio = lcm_upto(m + 1).unwrap() / lcm_upto(m).unwrap();
            if ratio.is_one() {
                continue;
            }
            // a prime power has exactly one prime divisor
            let mut n = ratio.clone();
            let mut distinct = 0u32;
            let mut p = BigInt::from(2);
            while &p * &p <= n {
                if (&n % &p).is_zero() {
                    distinct += 1;
                    while (&n % &p).is_zero() {
                        n /= &p;
                    }
                }
                p += 1;
            }
            if !n.is_one() {
                distinct += 1;
            }
            assert_eq!(distinct, 1, "L_{}/L_{} = {} not a prime power", m + 1, m, ratio);
        }
    }

    #[test]
    fn gaussian_field_basics() {
        let z = GaussianRational::new(rat(1, 2), rat(-3, 4));
        assert_eq!(z.conjugate().conjugate(), z);
        assert_eq!(z.norm_sq(), rat(13, 16));
        let w = GaussianRational::new(rat(2, 1), rat(1, 1));
        assert_eq!(&(&z * &w) / &w, z);
        assert_eq!(GaussianRational::i_pow(-1), -GaussianRational::i());
        assert_eq!(GaussianRational::i_pow(6), -GaussianRational::one());
    }

    #[test]
    fn rational_roundtrip_strings() {
        let r: Rational = "-5/48".parse().unwrap();
        assert_eq!(r, rat(-5, 48));
        assert_eq!(r.to_string(), "-5/48");
        assert_eq!(rat(6, 3).to_string(), "2");
        assert!("1/0".parse::<Rational>().is_err());
    }

    proptest! {
        #[test]
        fn addition_and_multiplication_are_exact(
            (an, ad, bn, bd) in (-1000i64..1000, 1i64..1000, -1000i64..1000, 1i64..1000)
        ) {
            let r = rat(an, ad);
            let s = rat(bn, bd);
            prop_assert_eq!(&(&r + &s) - &s, r.clone());
            if !s.is_zero() {
                prop_assert_eq!(&(&r * &s) / &s, r);
            }
        }

        #[test]
        fn conjugation_distributes(
            (a, b, c, d) in (-50i64..50, -50i64..50, -50i64..50, -50i64..50)
        ) {
            let z = GaussianRational::new(rat(a, 7), rat(b, 5));
            let w = GaussianRational::new(rat(c, 3), rat(d, 11));
            prop_assert_eq!((&z + &w).conjugate(), &z.conjugate() + &w.conjugate());
            prop_assert_eq!((&z * &w).conjugate(), &z.conjugate() * &w.conjugate());
        }
    }
}
