//! The simple-pole engine: exact evaluation of
//! `\int_simplex F dxdy / (1 - x^2 - y^2)` as `a + b*G` for sigma-invariant
//! `F`, together with denominator certificates.
//!
//! The G-coefficient is a residue computation: writing `F` in the variables
//! `z = x + iy`, `w = x - iy`, `b_F` is the constant term of `F` at
//! `w = z^(-1)`, i.e. the sum of the diagonal coefficients `lambda_{k,k}`.
//! The 1-coefficient expands over two exact one-dimensional integral
//! families along the hypotenuse:
//!
//! * type 1 (`k > l >= 0`, `k = l (mod 4)`):
//!   `\int (z^k w^l + z^l w^k)/(1 - zw) dxdy
//!      = 1/(2(k-l)) \int_0^1 i f(1-y,y) (2y-1)/(y(1-y)) dy`
//!   with `f = (x+iy)^k (x-iy)^l - (x+iy)^l (x-iy)^k`; the integrand is a
//!   polynomial with integer coefficients of degree at most `k+l-1`, so the
//!   value has denominator dividing `2(k-l) L_{k+l}`;
//! * type 2 (`k >= 1`):
//!   `\int (z^k w^k - 1)/(1 - zw) dxdy
//!      = -1/2 \int_0^1 sum_{j<k} (2y^2-2y+1)^j/(j+1) dy`,
//!   with denominator dividing `2 L_k L_{2k-1}`.
//!
//! Both families are memoized; the search harness re-reads them across
//! thousands of candidates.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::One;

use crate::bipoly::{
    integrate_01, restrict_hypotenuse, to_zw, GPoly, QPoly, UniPoly,
};
use crate::error::{Error, Result};
use crate::exact::{lcm_upto_or_one, GaussianRational, LinearForm, Rational};

/// The coefficient of `G`: the constant term of `F((z+w)/2, (z-w)/(2i))` at
/// `w = z^(-1)`, i.e. the diagonal sum of the `z,w`-coefficients. Defined for
/// every `F` in `Q[x,y]`; the imaginary parts must cancel exactly.
pub fn b_coefficient(poly: &QPoly) -> Result<Rational> {
    let zw = to_zw(poly);
    let mut acc = GaussianRational::zero();
    for (&(k, l), lam) in zw.terms() {
        if k == l {
            acc = &acc + lam;
        }
    }
    acc.try_to_rational_strict("diagonal sum of z,w-coefficients")
}

impl GaussianRational {
    fn try_to_rational_strict(&self, what: &str) -> Result<Rational> {
        if self.is_rational() {
            Ok(self.re.clone())
        } else {
            Err(Error::Internal(format!(
                "{what} has nonvanishing imaginary part {}",
                self.im
            )))
        }
    }
}

static TYPE1_MEMO: Mutex<Option<HashMap<(u32, u32), Rational>>> = Mutex::new(None);
static TYPE2_MEMO: Mutex<Option<HashMap<u32, Rational>>> = Mutex::new(None);

fn memo_get<K: std::hash::Hash + Eq + Copy>(
    memo: &Mutex<Option<HashMap<K, Rational>>>,
    key: K,
) -> Option<Rational> {
    memo.lock().expect("memo lock").as_ref()?.get(&key).cloned()
}

fn memo_put<K: std::hash::Hash + Eq + Copy>(
    memo: &Mutex<Option<HashMap<K, Rational>>>,
    key: K,
    value: &Rational,
) {
    memo.lock()
        .expect("memo lock")
        .get_or_insert_with(HashMap::new)
        .insert(key, value.clone());
}

/// `\int_simplex (z^k w^l + z^l w^k)/(1 - zw) dxdy` for `k > l >= 0` with
/// `k = l (mod 4)`. The congruence is part of the domain: the case
/// `k - l = 2 (mod 4)` is handled upstream by tau-antisymmetry, so reaching
/// it here indicates a pipeline bug and is rejected loudly.
pub fn integral_type1(k: u32, l: u32) -> Result<Rational> {
    if k <= l {
        return Err(Error::Domain(format!(
            "type-1 integral requires k > l >= 0, got ({k}, {l})"
        )));
    }
    if (k - l) % 4 != 0 {
        return Err(Error::Domain(format!(
            "type-1 integral requires k = l (mod 4), got ({k}, {l})"
        )));
    }
    if let Some(v) = memo_get(&TYPE1_MEMO, (k, l)) {
        return Ok(v);
    }

    // f = (x+iy)^k (x-iy)^l - (x+iy)^l (x-iy)^k over Q(i)
    let zp = GPoly::from_terms([
        (1, 0, GaussianRational::one()),
        (0, 1, GaussianRational::i()),
    ]);
    let wp = GPoly::from_terms([
        (1, 0, GaussianRational::one()),
        (0, 1, -GaussianRational::i()),
    ]);
    let f = zp.pow(k).mul(&wp.pow(l)).sub(&zp.pow(l).mul(&wp.pow(k)));

    // restrict to the hypotenuse and divide out the forced zeros at 0 and 1
    let restricted = restrict_hypotenuse(&f);
    let y_one_minus_y = UniPoly::from_coeffs(vec![
        GaussianRational::zero(),
        GaussianRational::one(),
        -GaussianRational::one(),
    ]);
    let quotient = restricted.div_exact(&y_one_minus_y).map_err(|_| {
        Error::Internal(format!(
            "type-1 integrand for ({k}, {l}) not divisible by y(1-y)"
        ))
    })?;
    // multiply by i*(2y - 1)
    let i_times = UniPoly::from_coeffs(vec![
        -GaussianRational::i(),
        GaussianRational::new(Rational::zero(), Rational::from_integer(2)),
    ]);
    let integrand_g = quotient.mul(&i_times);

    // the result must be a polynomial over Z of degree at most k + l - 1
    let mut integrand = UniPoly::zero();
    for (d, c) in integrand_g.coeffs().iter().enumerate() {
        let r = c.try_to_rational_strict("type-1 integrand coefficient")?;
        if !r.is_integer() {
            return Err(Error::Internal(format!(
                "type-1 integrand for ({k}, {l}) has non-integer coefficient {r}"
            )));
        }
        integrand.insert_add(d, r);
    }
    if integrand.degree().is_some_and(|d| d as u32 > k + l - 1) {
        return Err(Error::Internal(format!(
            "type-1 integrand for ({k}, {l}) exceeds degree bound {}",
            k + l - 1
        )));
    }

    let value = &integrate_01(&integrand) * &Rational::new(1, 2 * (k as i64 - l as i64));
    memo_put(&TYPE1_MEMO, (k, l), &value);
    Ok(value)
}

/// `\int_simplex (z^k w^k - 1)/(1 - zw) dxdy` for `k >= 1`:
/// `-1/2 \int_0^1 sum_{j=0}^{k-1} (2y^2 - 2y + 1)^j / (j+1) dy`.
pub fn integral_type2(k: u32) -> Result<Rational> {
    if k == 0 {
        return Err(Error::Domain("type-2 integral requires k >= 1".into()));
    }
    if let Some(v) = memo_get(&TYPE2_MEMO, k) {
        return Ok(v);
    }
    let base = UniPoly::from_coeffs(vec![
        Rational::one(),
        Rational::from_integer(-2),
        Rational::from_integer(2),
    ]);
    let mut sum = UniPoly::zero();
    let mut pow = UniPoly::from_coeffs(vec![Rational::one()]);
    for j in 0..k {
        sum = sum.add(&pow.scale(&Rational::new(1, j as i64 + 1)));
        if j + 1 < k {
            pow = pow.mul(&base);
        }
    }
    let value = &integrate_01(&sum) * &Rational::new(-1, 2);
    memo_put(&TYPE2_MEMO, k, &value);
    Ok(value)
}

/// Exact `(a, b)` with `\int_simplex F/(1 - x^2 - y^2) dxdy = a + b*G`,
/// for sigma-invariant `F` in `Q[x,y]`.
///
/// The G-coefficient comes from the diagonal residue; the 1-coefficient is
/// computed from the tau-symmetric part alone (the tau-antisymmetric part
/// integrates to zero), whose `z,w`-coefficients are asserted to be rational
/// and symmetric before the integral families are summed.
pub fn linear_form_t0(poly: &QPoly) -> Result<LinearForm> {
    if !poly.is_sigma_invariant() {
        return Err(Error::Precondition("F is not sigma-invariant".into()));
    }
    let b = b_coefficient(poly)?;

    let (plus, _minus) = poly.tau_split();
    let zw = to_zw(&plus);
    let mut a = Rational::zero();
    for (&(k, l), lam) in zw.terms() {
        let lam_q = lam.try_to_rational_strict("z,w-coefficient of the tau-symmetric part")?;
        let mirrored = zw.coeff(l, k).try_to_rational_strict("mirrored z,w-coefficient")?;
        if lam_q != mirrored {
            return Err(Error::Internal(format!(
                "lambda asymmetry at ({k}, {l}): {lam_q} vs {mirrored}"
            )));
        }
        if k > l {
            if (k - l) % 4 != 0 {
                return Err(Error::Internal(format!(
                    "tau-symmetric sigma-invariant part has k - l = 2 (mod 4) at ({k}, {l})"
                )));
            }
            a += &(&lam_q * &integral_type1(k, l)?);
        } else if k == l && k > 0 {
            a += &(&lam_q * &integral_type2(k)?);
        }
    }
    Ok(LinearForm::new(a, b))
}

/// Divisibility certificate: for sigma-invariant `F` in `Z[x,y]` of total
/// degree `N`, both `2^N b_F` and `2^(N+3) L_N L_(N/2) a_F` are integers.
#[derive(Clone, PartialEq, Debug)]
pub struct DenominatorCertificate {
    pub degree: u32,
    pub b_bound: BigInt,
    pub a_bound: BigInt,
    pub b_ok: bool,
    pub a_ok: bool,
}

impl DenominatorCertificate {
    pub fn holds(&self) -> bool {
        self.b_ok && self.a_ok
    }
}

/// Checks the certificate bounds against a computed linear form.
pub fn denominator_certificate(
    poly: &QPoly,
    form: &LinearForm,
) -> Result<DenominatorCertificate> {
    if poly.terms().any(|(_, c)| !c.is_integer()) {
        return Err(Error::Precondition(
            "denominator certificate requires integer coefficients".into(),
        ));
    }
    if !poly.is_sigma_invariant() {
        return Err(Error::Precondition("F is not sigma-invariant".into()));
    }
    let Some(degree) = poly.degree() else {
        return Err(Error::Precondition(
            "denominator certificate requires a nonzero polynomial".into(),
        ));
    };
    if degree % 2 != 0 {
        return Err(Error::Internal(format!(
            "sigma-invariant polynomial with odd total degree {degree}"
        )));
    }
    let b_bound = BigInt::one() << degree;
    let a_bound: BigInt = (BigInt::one() << (degree + 3))
        * lcm_upto_or_one(degree)
        * lcm_upto_or_one(degree / 2);
    let is_int = |bound: &BigInt, r: &Rational| (r * &Rational::from_integer(bound.clone())).is_integer();
    Ok(DenominatorCertificate {
        degree,
        b_ok: is_int(&b_bound, &form.b),
        a_ok: is_int(&a_bound, &form.a),
        b_bound,
        a_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::SymKind;
    use crate::exact::rat;

    fn mono(i: u32, j: u32) -> QPoly {
        QPoly::monomial(i, j, Rational::one())
    }

    #[test]
    fn b_coefficient_values() {
        assert_eq!(b_coefficient(&mono(2, 2)).unwrap(), rat(1, 8));
        assert_eq!(b_coefficient(&QPoly::one()).unwrap(), rat(1, 1));
        assert_eq!(b_coefficient(&mono(4, 4)).unwrap(), rat(3, 128));
    }

    #[test]
    fn type1_values() {
        assert_eq!(integral_type1(4, 0).unwrap(), rat(1, 3));
        // frozen from the univariate reduction evaluated independently
        assert_eq!(integral_type1(5, 1).unwrap(), rat(4, 15));
        assert_eq!(integral_type1(8, 0).unwrap(), rat(19, 105));
        assert_eq!(integral_type1(6, 2).unwrap(), rat(23, 105));
        assert_eq!(integral_type1(9, 1).unwrap(), rat(10, 63));
        assert_eq!(integral_type1(12, 4).unwrap(), rat(1019, 9009));
        assert!(matches!(integral_type1(4, 2), Err(Error::Domain(_))));
        assert!(matches!(integral_type1(3, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn type1_denominator_bound() {
        // denominator divides 2 (k-l) L_{k+l}
        for (k, l) in [(4u32, 0u32), (5, 1), (8, 0), (8, 4), (9, 5), (12, 0), (13, 1)] {
            let v = integral_type1(k, l).unwrap();
            let bound = Rational::from_integer(
                BigInt::from(2 * (k - l) as i64) * lcm_upto_or_one(k + l),
            );
            assert!(
                (&v * &bound).is_integer(),
                "I1({k},{l}) = {v} violates the denominator bound"
            );
        }
    }

    #[test]
    fn type2_values() {
        assert_eq!(integral_type2(1).unwrap(), rat(-1, 2));
        assert_eq!(integral_type2(2).unwrap(), rat(-2, 3));
        assert_eq!(integral_type2(3).unwrap(), rat(-67, 90));
        assert_eq!(integral_type2(4).unwrap(), rat(-248, 315));
        assert_eq!(integral_type2(5).unwrap(), rat(-2563, 3150));
        assert!(matches!(integral_type2(0), Err(Error::Domain(_))));
        // denominator divides 2 L_k L_{2k-1}
        for k in 1..=12u32 {
            let v = integral_type2(k).unwrap();
            let bound = Rational::from_integer(
                BigInt::from(2) * lcm_upto_or_one(k) * lcm_upto_or_one(2 * k - 1),
            );
            assert!((&v * &bound).is_integer(), "I2({k}) = {v} violates the bound");
        }
    }

    #[test]
    fn linear_form_t0_table_entries() {
        let lf = linear_form_t0(&mono(2, 2)).unwrap();
        assert_eq!(lf, LinearForm::new(rat(-5, 48), rat(1, 8)));
        let lf = linear_form_t0(&mono(4, 4)).unwrap();
        assert_eq!(lf, LinearForm::new(rat(-569, 26880), rat(3, 128)));
    }

    #[test]
    fn linear_form_t0_derived_values() {
        // x^4 + y^4: lambda = (1/8, 6/8, 1/8) on (z^4, z^2 w^2, w^4)
        let p = QPoly::from_terms([(4, 0, rat(1, 1)), (0, 4, rat(1, 1))]);
        assert_eq!(
            linear_form_t0(&p).unwrap(),
            LinearForm::new(rat(-11, 24), rat(3, 4))
        );
        // 3 x^2 y^4 + 3 x^4 y^2, the odd-step image of x^4 y^4
        let p = QPoly::from_terms([(2, 4, rat(3, 1)), (4, 2, rat(3, 1))]);
        assert_eq!(
            linear_form_t0(&p).unwrap(),
            LinearForm::new(rat(-79, 240), rat(3, 8))
        );
        let lf = linear_form_t0(&mono(6, 6)).unwrap();
        assert_eq!(lf, LinearForm::new(rat(-94973, 21288960), rat(5, 1024)));
    }

    #[test]
    fn tau_antisymmetric_part_vanishes() {
        for (m, n) in [(3u32, 1u32), (5, 1), (5, 3)] {
            let psi = QPoly::symmetric_basis(SymKind::Psi, m, n);
            let lf = linear_form_t0(&psi).unwrap();
            assert!(lf.is_zero(), "psi_{{{m},{n}}} gave {lf}");
        }
    }

    #[test]
    fn rejects_non_invariant_input() {
        let err = linear_form_t0(&mono(1, 0)).unwrap_err();
        assert_eq!(err, Error::Precondition("F is not sigma-invariant".into()));
    }

    #[test]
    fn certificates_on_table_entries() {
        let lf = LinearForm::new(rat(-5, 48), rat(1, 8));
        let cert = denominator_certificate(&mono(2, 2), &lf).unwrap();
        assert_eq!(cert.degree, 4);
        assert_eq!(cert.b_bound, BigInt::from(16));
        assert_eq!(cert.a_bound, BigInt::from(128 * 12 * 2));
        assert!(cert.holds());

        let lf = LinearForm::new(rat(-569, 26880), rat(3, 128));
        let cert = denominator_certificate(&mono(4, 4), &lf).unwrap();
        assert_eq!(cert.degree, 8);
        assert_eq!(cert.b_bound, BigInt::from(256));
        assert!(cert.holds());

        // scaling by 2 cannot create denominators
        let doubled = mono(2, 2).scale(&rat(2, 1));
        let lf = LinearForm::new(rat(-5, 24), rat(1, 4));
        assert!(denominator_certificate(&doubled, &lf).unwrap().holds());
    }

    #[test]
    fn certificate_preconditions() {
        let half = QPoly::monomial(2, 2, rat(1, 2));
        assert!(matches!(
            denominator_certificate(&half, &LinearForm::zero()),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            denominator_certificate(&QPoly::zero(), &LinearForm::zero()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn linearity_of_t0() {
        let f = mono(2, 2);
        let h = QPoly::from_terms([(4, 0, rat(1, 1)), (0, 4, rat(1, 1))]);
        let combo = f.scale(&rat(3, 7)).add(&h);
        let lf = linear_form_t0(&combo).unwrap();
        let lf_f = linear_form_t0(&f).unwrap();
        let lf_h = linear_form_t0(&h).unwrap();
        let expected = &lf_f.scale(&rat(3, 7)) + &lf_h;
        assert_eq!(lf, expected);
    }
}
