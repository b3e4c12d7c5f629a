//! Pole-order reduction: exact evaluation of
//! `\int_simplex F dxdy / g^(t+1)` for `t >= 1` by pushing the pole order
//! down two (even `t`) or one (odd `t`) at a time, absorbing an exact
//! rational boundary term at each step, until the simple-pole engine takes
//! over.
//!
//! The workhorses are the operators `D1 F = d/dx (F/x)` and
//! `D2 F = d/dy (F/y)`. For even `t >= 2` with `x^t y^t | F` and
//! `f = F/(x^t y^t)`:
//!
//! ```text
//! int F/g^(t+1) = -1/(4t(t-1)2^(t-1)) (int_0^1 f_x(1-y,y) dy + f(0,1))
//!                 + 1/(4t(t-1)) int (D2 D1 F)/g^(t-1)
//! ```
//!
//! where the two boundary pieces come from the hypotenuse and from the
//! exceptional direction over `Q = (0,1)` (the contribution over `P`
//! vanishes). For odd `t >= 1` with `x^(t+1) y^(t+1) | F` and
//! `f = F/(x^(t+1) y^(t+1))`, averaging the two one-variable reductions
//! gives
//!
//! ```text
//! int F/g^(t+1) = 1/(4t 2^t) int_0^1 f(1-y,y) dy - 1/(4t) int ((D1+D2) F)/g^t
//! ```
//!
//! Each step re-checks its divisibility precondition even where the algebra
//! guarantees it, so a silent algebra bug turns into a loud error. Boundary
//! terms only ever feed the rational component; the G-coefficient arises
//! solely from the simple-pole base case.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::bipoly::{
    integrate_01, restrict_hypotenuse, simplex_integral_poly, to_xyg_basis, QPoly,
};
use crate::error::{Error, Result};
use crate::exact::{LinearForm, Rational};
use crate::linform::linear_form_t0;

/// The integrand `F dxdy / g^(t+1)` with `g = 1 - x^2 - y^2`.
#[derive(Clone, PartialEq, Debug)]
pub struct IntegrandSpec {
    pub poly: QPoly,
    pub t: u32,
}

impl IntegrandSpec {
    pub fn new(poly: QPoly, t: u32) -> Self {
        IntegrandSpec { poly, t }
    }
}

/// One reduction step: `int omega_current = boundary + scale * int omega_next`.
#[derive(Clone, PartialEq, Debug)]
pub struct ReductionStep {
    pub boundary: Rational,
    pub scale: Rational,
    pub next: IntegrandSpec,
}

/// `D1 F = d/dx (F/x)`; requires `x | F` so the result is a polynomial.
pub fn d1(poly: &QPoly) -> Result<QPoly> {
    let quotient = poly
        .div_monomial(1, 0)
        .map_err(|_| Error::Precondition("x does not divide F".into()))?;
    Ok(quotient.diff_first())
}

/// `D2 F = d/dy (F/y)`; requires `y | F`.
pub fn d2(poly: &QPoly) -> Result<QPoly> {
    let quotient = poly
        .div_monomial(0, 1)
        .map_err(|_| Error::Precondition("y does not divide F".into()))?;
    Ok(quotient.diff_second())
}

/// Even-step reduction (`t` even, `t >= 2`, `x^t y^t | F`): drops the pole
/// order by two via `D2 D1`, absorbing the hypotenuse and over-`Q` boundary
/// contributions.
pub fn reduce_even(spec: &IntegrandSpec) -> Result<ReductionStep> {
    let t = spec.t;
    if t < 2 || t % 2 != 0 {
        return Err(Error::Domain(format!(
            "even-step reduction requires even t >= 2, got t = {t}"
        )));
    }
    let f = spec.poly.div_monomial(t, t).map_err(|_| {
        Error::Domain(format!("x^{t}*y^{t} does not divide F (required for t = {t})"))
    })?;
    let t_i64 = t as i64;
    let outer = Rational::new(1, 4 * t_i64 * (t_i64 - 1));

    let fx_on_hyp = restrict_hypotenuse(&f.diff_first());
    let hyp_term = integrate_01(&fx_on_hyp);
    let at_q = f.eval(&Rational::zero(), &Rational::one());
    let inner = &(&hyp_term + &at_q) * &Rational::new(-1, 1i64 << (t - 1));
    let boundary = &outer * &inner;

    let next_poly = d2(&d1(&spec.poly)?)?;
    Ok(ReductionStep {
        boundary,
        scale: outer,
        next: IntegrandSpec::new(next_poly, t - 2),
    })
}

/// Odd-step reduction (`t` odd, `t >= 1`, `x^(t+1) y^(t+1) | F`): drops the
/// pole order by one via `D1 + D2`. The two mirrored exact 1-forms contribute
/// `(1/2^t) int_0^1 y f(1-y,y) dy` and `-(1/2^t) int_0^1 (1-y) f(1-y,y) dy`,
/// which combine into a single integral of `f` along the hypotenuse.
pub fn reduce_odd(spec: &IntegrandSpec) -> Result<ReductionStep> {
    let t = spec.t;
    if t % 2 != 1 {
        return Err(Error::Domain(format!(
            "odd-step reduction requires odd t >= 1, got t = {t}"
        )));
    }
    let need = t + 1;
    let f = spec.poly.div_monomial(need, need).map_err(|_| {
        Error::Domain(format!(
            "x^{need}*y^{need} does not divide F (required for t = {t})"
        ))
    })?;
    let t_i64 = t as i64;
    let boundary = &integrate_01(&restrict_hypotenuse(&f))
        * &Rational::new(1, (4 * t_i64) * (1i64 << t));
    let next_poly = d1(&spec.poly)?.add(&d2(&spec.poly)?);
    Ok(ReductionStep {
        boundary,
        scale: Rational::new(-1, 4 * t_i64),
        next: IntegrandSpec::new(next_poly, t - 1),
    })
}

/// Exact `(a, b)` with `int_simplex F/g^(t+1) = a + b*G`, for sigma-invariant
/// `F` divisible by `x^(2 ceil(t/2)) y^(2 ceil(t/2))`.
///
/// Iterates the parity-appropriate reduction until `t = 0`, then delegates to
/// the simple-pole engine. Every intermediate divisibility is re-verified.
pub fn linear_form(spec: &IntegrandSpec) -> Result<LinearForm> {
    if !spec.poly.is_sigma_invariant() {
        return Err(Error::Precondition("F is not sigma-invariant".into()));
    }
    let mut acc_a = Rational::zero();
    let mut scale = Rational::one();
    let mut current = spec.clone();
    while current.t > 0 {
        let step = if current.t % 2 == 0 {
            reduce_even(&current)?
        } else {
            reduce_odd(&current)?
        };
        acc_a += &(&scale * &step.boundary);
        scale = &scale * &step.scale;
        current = step.next;
    }
    let base = linear_form_t0(&current.poly)?;
    Ok(LinearForm::new(&acc_a + &(&scale * &base.a), &scale * &base.b))
}

/// Exact `(a, b)` for any sigma-invariant `F` with `F/g^(t+1)` integrable
/// (corner vanishing orders at least `t`), via the `(x^2y^2, g)` basis.
///
/// The tau-antisymmetric part integrates to zero. The tau-symmetric part
/// rewrites as `sum e_{m,r} (xy)^m g^r`; terms with `r <= t` reduce to the
/// monomial family `(xy)^m / g^(t-r+1)` (integrability guarantees
/// `m >= t - r`, which is re-verified), and the `r > t` leftover is a
/// polynomial handled by the exact simplex integral.
pub fn linear_form_integrable(spec: &IntegrandSpec) -> Result<LinearForm> {
    if !spec.poly.is_sigma_invariant() {
        return Err(Error::Precondition("F is not sigma-invariant".into()));
    }
    if !spec.poly.is_integrable(spec.t) {
        return Err(Error::Domain(format!(
            "F/g^{} is not integrable over the simplex (corner vanishing order below {})",
            spec.t + 1,
            spec.t
        )));
    }
    let (plus, _minus) = spec.poly.tau_split();
    let rep = to_xyg_basis(&plus)?;

    let mut total = LinearForm::zero();
    let mut leftover = QPoly::zero();
    for (&(m, r), e) in rep.terms() {
        if r <= spec.t {
            let s = spec.t - r;
            if m < s {
                return Err(Error::Internal(format!(
                    "basis term (xy)^{m} g^{r} of an integrable form has m < t - r = {s}"
                )));
            }
            let mono = QPoly::monomial(m, m, Rational::one());
            if !mono.is_integrable(s) {
                return Err(Error::Internal(format!(
                    "(xy)^{m}/g^{} unexpectedly not integrable",
                    s + 1
                )));
            }
            let part = linear_form(&IntegrandSpec::new(mono, s))?.scale(e);
            total = &total + &part;
        } else {
            // e * (xy)^m g^(r - t - 1), a polynomial integrand
            let g_pow = QPoly::circle_g().pow(r - spec.t - 1);
            leftover = leftover.add(&g_pow.mul_monomial(m, m).scale(e));
        }
    }
    let poly_part = simplex_integral_poly(&leftover);
    Ok(LinearForm::new(&total.a + &poly_part, total.b))
}

/// The integer form obtained by clearing the lowest common denominator:
/// `p = D a`, `q = D b` with `D = lcm(den(a), den(b))`, plus a decimal
/// rendering of `p + q*G`. The magnitude of this cleared value is the
/// quantity that must approach zero for an irrationality argument.
#[derive(Clone, PartialEq, Debug)]
pub struct ClearedForm {
    pub p: BigInt,
    pub q: BigInt,
    pub denominator: BigInt,
    pub value: String,
}

/// Number of fractional digits in [`ClearedForm::value`].
pub const CLEARED_DIGITS: usize = 12;

pub fn cleared_form(form: &LinearForm) -> Result<ClearedForm> {
    let denominator = form.a.denom().lcm(form.b.denom());
    let p = (&form.a * &Rational::from_integer(denominator.clone()))
        .numer()
        .clone();
    let q = (&form.b * &Rational::from_integer(denominator.clone()))
        .numer()
        .clone();
    let cleared = LinearForm::new(
        Rational::from_integer(p.clone()),
        Rational::from_integer(q.clone()),
    );
    let value = crate::exact::linear_form_decimal(&cleared, CLEARED_DIGITS)?;
    Ok(ClearedForm {
        p,
        q,
        denominator,
        value,
    })
}

/// [`cleared_form`] with the integer content `gcd(p, q)` divided out, so the
/// magnitude is invariant under integer scaling of `F`. The zero form stays
/// `(0, 0)`.
pub fn cleared_form_primitive(form: &LinearForm) -> Result<ClearedForm> {
    let raw = cleared_form(form)?;
    let content = raw.p.gcd(&raw.q);
    if content.is_zero() || content.is_one() {
        return Ok(raw);
    }
    let p = &raw.p / &content;
    let q = &raw.q / &content;
    let value = crate::exact::linear_form_decimal(
        &LinearForm::new(Rational::from_integer(p.clone()), Rational::from_integer(q.clone())),
        CLEARED_DIGITS,
    )?;
    Ok(ClearedForm {
        p,
        q,
        denominator: raw.denominator,
        value,
    })
}

/// `|p + q*G|` of the cleared form as an exact decimal string with
/// `CLEARED_DIGITS` fractional digits.
pub fn cleared_abs(cleared: &ClearedForm) -> String {
    cleared.value.trim_start_matches('-').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use num_bigint::BigInt;

    fn mono(i: u32, j: u32) -> QPoly {
        QPoly::monomial(i, j, Rational::one())
    }

    #[test]
    fn d_operators() {
        assert_eq!(d1(&mono(2, 2)).unwrap(), mono(0, 2));
        assert_eq!(d2(&d1(&mono(2, 2)).unwrap()).unwrap(), QPoly::one());
        assert_eq!(
            d2(&d1(&mono(4, 4)).unwrap()).unwrap(),
            QPoly::monomial(2, 2, rat(9, 1))
        );
        assert!(matches!(d1(&QPoly::one()), Err(Error::Precondition(_))));
    }

    #[test]
    fn even_step_examples() {
        let step = reduce_even(&IntegrandSpec::new(mono(2, 2), 2)).unwrap();
        assert_eq!(step.boundary, rat(-1, 16));
        assert_eq!(step.scale, rat(1, 8));
        assert_eq!(step.next, IntegrandSpec::new(QPoly::one(), 0));

        let step = reduce_even(&IntegrandSpec::new(mono(4, 4), 2)).unwrap();
        assert_eq!(step.boundary, rat(-1, 96));
        assert_eq!(
            step.next,
            IntegrandSpec::new(QPoly::monomial(2, 2, rat(9, 1)), 0)
        );

        // x^3 y^3 at t = 2: not sigma-invariant, but the step itself applies
        let step = reduce_even(&IntegrandSpec::new(mono(3, 3), 2)).unwrap();
        assert_eq!(step.boundary, rat(-1, 32));

        assert!(matches!(
            reduce_even(&IntegrandSpec::new(mono(2, 2), 3)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            reduce_even(&IntegrandSpec::new(mono(1, 1), 2)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn odd_step_examples() {
        let step = reduce_odd(&IntegrandSpec::new(mono(2, 2), 1)).unwrap();
        assert_eq!(step.boundary, rat(1, 8));
        assert_eq!(step.scale, rat(-1, 4));
        assert_eq!(
            step.next,
            IntegrandSpec::new(
                QPoly::from_terms([(2, 0, rat(1, 1)), (0, 2, rat(1, 1))]),
                0
            )
        );

        let step = reduce_odd(&IntegrandSpec::new(mono(4, 4), 1)).unwrap();
        assert_eq!(
            step.next,
            IntegrandSpec::new(
                QPoly::from_terms([(2, 4, rat(3, 1)), (4, 2, rat(3, 1))]),
                0
            )
        );

        assert!(matches!(
            reduce_odd(&IntegrandSpec::new(mono(2, 2), 3)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn linear_form_table() {
        let lf = linear_form(&IntegrandSpec::new(mono(2, 2), 0)).unwrap();
        assert_eq!(lf, LinearForm::new(rat(-5, 48), rat(1, 8)));
        let lf = linear_form(&IntegrandSpec::new(mono(4, 4), 2)).unwrap();
        assert_eq!(lf, LinearForm::new(rat(-49, 384), rat(9, 64)));
    }

    #[test]
    fn linear_form_derived_values() {
        let cases: &[(u32, u32, i64, i64, i64, i64)] = &[
            // (exponent, t, a_num, a_den, b_num, b_den), frozen independently
            (2, 1, 1, 4, -1, 4),
            (2, 2, -1, 16, 1, 8),
            (4, 1, 83, 960, -3, 32),
            (4, 3, 17, 192, -3, 32),
            (4, 4, -11, 768, 3, 128),
            (6, 2, -14417, 215040, 75, 1024),
            (6, 3, 2063, 23040, -25, 256),
            (6, 4, -137, 2048, 75, 1024),
        ];
        for &(e, t, an, ad, bn, bd) in cases {
            let lf = linear_form(&IntegrandSpec::new(mono(e, e), t)).unwrap();
            assert_eq!(
                lf,
                LinearForm::new(rat(an, ad), rat(bn, bd)),
                "x^{e}y^{e} at t = {t}"
            );
        }
    }

    #[test]
    fn linear_form_rejects_bad_inputs() {
        let err = linear_form(&IntegrandSpec::new(mono(1, 0), 0)).unwrap_err();
        assert_eq!(err, Error::Precondition("F is not sigma-invariant".into()));
        // sigma-invariant but insufficient divisibility for t = 3
        let err = linear_form(&IntegrandSpec::new(mono(2, 2), 3)).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn integrable_pipeline_matches_direct() {
        let lf = linear_form_integrable(&IntegrandSpec::new(mono(2, 2), 0)).unwrap();
        assert_eq!(lf, LinearForm::new(rat(-5, 48), rat(1, 8)));

        // g * x^2 y^2 at t = 1 denotes the same form as x^2 y^2 at t = 0
        let shifted = QPoly::circle_g().mul(&mono(2, 2));
        let lf = linear_form_integrable(&IntegrandSpec::new(shifted, 1)).unwrap();
        assert_eq!(lf, LinearForm::new(rat(-5, 48), rat(1, 8)));

        // the integrable quartic at t = 2: g^2 - 4 x^2 y^2 over g^3
        let quartic = QPoly::circle_g()
            .pow(2)
            .sub(&mono(2, 2).scale(&rat(4, 1)));
        let lf = linear_form_integrable(&IntegrandSpec::new(quartic, 2)).unwrap();
        assert_eq!(lf, LinearForm::new(rat(1, 4), rat(1, 2)));
    }

    #[test]
    fn integrable_pipeline_rejects() {
        let err = linear_form_integrable(&IntegrandSpec::new(mono(2, 2), 3)).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn cleared_forms_of_table() {
        let c = cleared_form(&LinearForm::new(rat(-5, 48), rat(1, 8))).unwrap();
        assert_eq!((c.p.clone(), c.q.clone()), (BigInt::from(-5), BigInt::from(6)));
        assert_eq!(c.denominator, BigInt::from(48));
        assert!(c.value.starts_with("0.4957935"));

        let c = cleared_form(&LinearForm::new(rat(-569, 26880), rat(3, 128))).unwrap();
        assert_eq!((c.p.clone(), c.q.clone()), (BigInt::from(-569), BigInt::from(630)));
        assert!(c.value.starts_with("8.058"));

        let c = cleared_form(&LinearForm::new(rat(-49, 384), rat(9, 64))).unwrap();
        assert_eq!((c.p.clone(), c.q.clone()), (BigInt::from(-49), BigInt::from(54)));
        assert!(c.value.starts_with("0.4621"));
    }

    #[test]
    fn primitive_cleared_form_removes_content() {
        // a = 2/3, b = 4/3 clears to (2, 4); the primitive form is (1, 2)
        let c = cleared_form_primitive(&LinearForm::new(rat(2, 3), rat(4, 3))).unwrap();
        assert_eq!((c.p, c.q), (BigInt::from(1), BigInt::from(2)));
        let c = cleared_form_primitive(&LinearForm::zero()).unwrap();
        assert_eq!((c.p, c.q), (BigInt::from(0), BigInt::from(0)));
    }
}
