//! Sparse bivariate polynomial algebra over Q and Q(i).
//!
//! Everything revolves around four pieces of structure on `Q[x,y]`:
//!
//! * the order-4 substitution `sigma: (x,y) -> (-y,x)` and the swap
//!   `tau: (x,y) -> (y,x)`, whose invariants select the admissible
//!   integrands;
//! * the change of variables `z = x + iy`, `w = x - iy`, under which the
//!   circle `g = 1 - x^2 - y^2 = 0` becomes `zw = 1` and invariance
//!   conditions turn into congruences on exponents;
//! * vanishing orders at the two corner points `P = (1,0)` and `Q = (0,1)`,
//!   which control integrability of `F/g^(t+1)` over the simplex;
//! * the rewriting of sigma,tau-invariant polynomials in the `(x^2y^2, g)`
//!   basis, which reduces general integrands to the monomial family
//!   `(xy)^m / g^(s+1)`.
//!
//! Polynomials are immutable values with no stored zero coefficients; all
//! operations are pure functions.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exact::{GaussianRational, Rational};

/// Coefficient ring for sparse polynomials; implemented by [`Rational`]
/// and [`GaussianRational`], both fields.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Field division; `rhs` must be nonzero.
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(r: Rational) -> Self;
    fn to_gaussian(&self) -> GaussianRational;
    /// Exact conversion back to Q when the imaginary part vanishes.
    fn try_to_rational(&self) -> Option<Rational>;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn to_gaussian(&self) -> GaussianRational {
        GaussianRational::from_rational(self.clone())
    }
    fn try_to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl Scalar for GaussianRational {
    fn zero() -> Self {
        GaussianRational::zero()
    }
    fn one() -> Self {
        GaussianRational::one()
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: Rational) -> Self {
        GaussianRational::from_rational(r)
    }
    fn to_gaussian(&self) -> GaussianRational {
        self.clone()
    }
    fn try_to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.re.clone())
    }
}

/// Compile-time tag for the variable pair a polynomial lives in.
pub trait VarPair: Clone + Copy + PartialEq + fmt::Debug + Send + Sync + 'static {
    const FIRST: &'static str;
    const SECOND: &'static str;
}

/// The affine variables `(x, y)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Xy;

/// The rotated variables `(z, w) = (x + iy, x - iy)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Zw;

impl VarPair for Xy {
    const FIRST: &'static str = "x";
    const SECOND: &'static str = "y";
}

impl VarPair for Zw {
    const FIRST: &'static str = "z";
    const SECOND: &'static str = "w";
}

/// A sparse bivariate polynomial: exponent pair -> nonzero coefficient.
#[derive(Clone, PartialEq)]
pub struct BiPoly<C: Scalar, V: VarPair = Xy> {
    terms: BTreeMap<(u32, u32), C>,
    _vars: PhantomData<V>,
}

/// Polynomials in `Q[x,y]`, the main working type.
pub type QPoly = BiPoly<Rational, Xy>;

/// Polynomials in `Q(i)[x,y]`.
pub type GPoly = BiPoly<GaussianRational, Xy>;

/// Polynomials in `Q(i)[z,w]`.
pub type ZwPoly = BiPoly<GaussianRational, Zw>;

impl<C: Scalar, V: VarPair> Default for BiPoly<C, V> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Scalar, V: VarPair> BiPoly<C, V> {
    pub fn zero() -> Self {
        BiPoly {
            terms: BTreeMap::new(),
            _vars: PhantomData,
        }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    /// `c * v1^i * v2^j`.
    pub fn monomial(i: u32, j: u32, c: C) -> Self {
        let mut p = Self::zero();
        p.insert_add(i, j, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, C)>) -> Self {
        let mut p = Self::zero();
        for (i, j, c) in terms {
            p.insert_add(i, j, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, or `None` for the zero polynomial (the intent is an
    /// explicit sentinel rather than -1 arithmetic).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> C {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &C)> {
        self.terms.iter()
    }

    pub fn insert_add(&mut self, i: u32, j: u32, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((i, j)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.insert_add(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.insert_add(i, j, c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            out.terms.insert((i, j), c.neg());
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                out.insert_add(i1 + i2, j1 + j2, c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (&(i, j), v) in &self.terms {
            out.terms.insert((i, j), v.mul(c));
        }
        out
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&C::from_rational(r.clone()))
    }

    /// Multiplies by the monomial `v1^i * v2^j`.
    pub fn mul_monomial(&self, i: u32, j: u32) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            out.terms.insert((a + i, b + j), c.clone());
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn eval(&self, v1: &C, v2: &C) -> C {
        let mut acc = C::zero();
        // cache powers; exponents are small in practice
        let max_i = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let max_j = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let pows1 = power_table(v1, max_i);
        let pows2 = power_table(v2, max_j);
        for (&(i, j), c) in &self.terms {
            acc = acc.add(&c.mul(&pows1[i as usize]).mul(&pows2[j as usize]));
        }
        acc
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> BiPoly<D, V> {
        let mut out = BiPoly::zero();
        for (&(i, j), c) in &self.terms {
            out.insert_add(i, j, f(c));
        }
        out
    }

    /// Exact conversion to rational coefficients; `None` if any coefficient
    /// has a nonvanishing imaginary part.
    pub fn try_to_rational(&self) -> Option<BiPoly<Rational, V>> {
        let mut out = BiPoly::zero();
        for (&(i, j), c) in &self.terms {
            out.insert_add(i, j, c.try_to_rational()?);
        }
        Some(out)
    }

    /// Substitutes polynomials for the two variables, landing in whatever
    /// scalar/variable pair the substituted values live in.
    pub fn substitute<D: Scalar, W: VarPair>(
        &self,
        v1: &BiPoly<D, W>,
        v2: &BiPoly<D, W>,
        embed: impl Fn(&C) -> D,
    ) -> BiPoly<D, W> {
        let max_i = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let max_j = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let pows1 = poly_power_table(v1, max_i);
        let pows2 = poly_power_table(v2, max_j);
        let mut out = BiPoly::zero();
        for (&(i, j), c) in &self.terms {
            let term = pows1[i as usize]
                .mul(&pows2[j as usize])
                .scale(&embed(c));
            out = out.add(&term);
        }
        out
    }

    /// Exact polynomial division: returns `q` with `q * d = self`.
    /// Division by zero and non-exact division are distinct errors.
    pub fn exact_div(&self, d: &Self) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let (dk, dc) = d.terms.iter().next_back().expect("nonzero divisor");
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((&rk, rc)) = rem.terms.iter().next_back() {
            if rk.0 < dk.0 || rk.1 < dk.1 {
                return Err(Error::NotDivisible(format!(
                    "{} does not divide {}",
                    d, self
                )));
            }
            let qk = (rk.0 - dk.0, rk.1 - dk.1);
            let qc = rc.div(dc);
            // rem -= qc * v^qk * d
            for (&(i, j), c) in &d.terms {
                rem.insert_add(i + qk.0, j + qk.1, c.mul(&qc).neg());
            }
            quot.insert_add(qk.0, qk.1, qc);
        }
        Ok(quot)
    }

    /// True when `v1^a * v2^b` divides every monomial.
    pub fn divisible_by_monomial(&self, a: u32, b: u32) -> bool {
        self.terms.keys().all(|&(i, j)| i >= a && j >= b)
    }

    /// Quotient by `v1^a * v2^b`; requires divisibility.
    pub fn div_monomial(&self, a: u32, b: u32) -> Result<Self> {
        if !self.divisible_by_monomial(a, b) {
            return Err(Error::NotDivisible(format!(
                "{}^{}*{}^{} does not divide {}",
                V::FIRST,
                a,
                V::SECOND,
                b,
                self
            )));
        }
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            out.terms.insert((i - a, j - b), c.clone());
        }
        Ok(out)
    }

    /// Partial derivative in the first variable.
    pub fn diff_first(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                let factor = C::from_rational(Rational::from_integer(i as i64));
                out.insert_add(i - 1, j, c.mul(&factor));
            }
        }
        out
    }

    /// Partial derivative in the second variable.
    pub fn diff_second(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            if j > 0 {
                let factor = C::from_rational(Rational::from_integer(j as i64));
                out.insert_add(i, j - 1, c.mul(&factor));
            }
        }
        out
    }

    fn sorted_terms_for_display(&self) -> Vec<((u32, u32), &C)> {
        let mut v: Vec<_> = self.terms.iter().map(|(&k, c)| (k, c)).collect();
        v.sort_by(|a, b| {
            let da = a.0 .0 + a.0 .1;
            let db = b.0 .0 + b.0 .1;
            db.cmp(&da).then(b.0.cmp(&a.0))
        });
        v
    }
}

fn power_table<C: Scalar>(base: &C, max: u32) -> Vec<C> {
    let mut pows = Vec::with_capacity(max as usize + 1);
    pows.push(C::one());
    for k in 1..=max as usize {
        pows.push(pows[k - 1].mul(base));
    }
    pows
}

fn poly_power_table<C: Scalar, V: VarPair>(base: &BiPoly<C, V>, max: u32) -> Vec<BiPoly<C, V>> {
    let mut pows = Vec::with_capacity(max as usize + 1);
    pows.push(BiPoly::one());
    for k in 1..=max as usize {
        pows.push(pows[k - 1].mul(base));
    }
    pows
}

impl<C: Scalar, V: VarPair> fmt::Display for BiPoly<C, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((i, j), c) in self.sorted_terms_for_display() {
            let (sign, mag) = coeff_sign_magnitude(c);
            if first {
                if sign {
                    write!(f, "-")?;
                }
                first = false;
            } else if sign {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if mag != "1" || (i == 0 && j == 0) {
                parts.push(mag);
            }
            if i > 0 {
                parts.push(if i == 1 {
                    V::FIRST.to_string()
                } else {
                    format!("{}^{}", V::FIRST, i)
                });
            }
            if j > 0 {
                parts.push(if j == 1 {
                    V::SECOND.to_string()
                } else {
                    format!("{}^{}", V::SECOND, j)
                });
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Splits a coefficient into (is_negative, magnitude string) for rendering.
/// Gaussian coefficients with a genuine imaginary part render in parentheses
/// and are treated as positive.
fn coeff_sign_magnitude<C: Scalar>(c: &C) -> (bool, String) {
    if let Some(r) = c.try_to_rational() {
        (r.is_negative(), r.abs().to_string())
    } else {
        (false, c.to_string())
    }
}

impl<C: Scalar, V: VarPair> fmt::Debug for BiPoly<C, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// --------------------------------------------------------------------------
// Symmetry operators
// --------------------------------------------------------------------------

/// Basis kinds for sigma-invariant polynomials; `Phi` is the symmetric
/// combination, `Psi` the antisymmetric one.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SymKind {
    Phi,
    Psi,
}

impl<C: Scalar> BiPoly<C, Xy> {
    /// The order-4 substitution `(x, y) -> (-y, x)`.
    pub fn sigma_act(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            // x^i y^j -> (-y)^i x^j
            let coeff = if i % 2 == 1 { c.neg() } else { c.clone() };
            out.terms.insert((j, i), coeff);
        }
        out
    }

    /// The swap `(x, y) -> (y, x)`.
    pub fn tau_act(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            out.terms.insert((j, i), c.clone());
        }
        out
    }

    /// Eigen-decomposition under tau: `(F + tau F)/2` and `(F - tau F)/2`.
    pub fn tau_split(&self) -> (Self, Self) {
        let half = Rational::new(1, 2);
        let t = self.tau_act();
        let plus = self.add(&t).scale_rational(&half);
        let minus = self.sub(&t).scale_rational(&half);
        (plus, minus)
    }
}

impl QPoly {
    /// `g = 1 - x^2 - y^2`, the defining polynomial of the unit circle.
    pub fn circle_g() -> Self {
        QPoly::from_terms([
            (0, 0, Rational::one()),
            (2, 0, -Rational::one()),
            (0, 2, -Rational::one()),
        ])
    }

    /// Coefficient-level test for sigma-invariance: for every `(m, n)`,
    /// `coeff(n, m) = (-1)^m coeff(m, n)`. Agrees with the structural test
    /// `sigma_act(F) == F`.
    pub fn is_sigma_invariant(&self) -> bool {
        self.terms.iter().all(|(&(m, n), c)| {
            let mirrored = self.coeff(n, m);
            let expected = if m % 2 == 1 { c.neg() } else { c.clone() };
            mirrored == expected
        })
    }

    /// True when `F` is fixed by both sigma and tau.
    pub fn is_sigma_tau_invariant(&self) -> bool {
        self.is_sigma_invariant() && self.tau_act() == *self
    }

    /// `phi_{m,n} = x^m y^n + x^n y^m` or `psi_{m,n} = x^m y^n - x^n y^m`.
    pub fn symmetric_basis(kind: SymKind, m: u32, n: u32) -> Self {
        let mut p = QPoly::monomial(m, n, Rational::one());
        let second = match kind {
            SymKind::Phi => Rational::one(),
            SymKind::Psi => -Rational::one(),
        };
        p.insert_add(n, m, second);
        p
    }
}

// --------------------------------------------------------------------------
// The z/w coordinates
// --------------------------------------------------------------------------

/// Rewrites `F(x, y)` in the variables `z = x + iy`, `w = x - iy`, i.e.
/// substitutes `x = (z+w)/2`, `y = (z-w)/(2i)`.
pub fn to_zw<C: Scalar>(poly: &BiPoly<C, Xy>) -> ZwPoly {
    let half = GaussianRational::from_rational(Rational::new(1, 2));
    // 1/(2i) = -i/2
    let minus_half_i = GaussianRational::new(Rational::zero(), Rational::new(-1, 2));
    let x_sub = ZwPoly::from_terms([(1, 0, half.clone()), (0, 1, half)]);
    let y_sub = ZwPoly::from_terms([
        (1, 0, minus_half_i.clone()),
        (0, 1, -&minus_half_i),
    ]);
    poly.substitute(&x_sub, &y_sub, |c| c.to_gaussian())
}

/// Inverse of [`to_zw`]: substitutes `z = x + iy`, `w = x - iy`.
pub fn from_zw(poly: &ZwPoly) -> GPoly {
    let one = GaussianRational::one();
    let i = GaussianRational::i();
    let z_sub = GPoly::from_terms([(1, 0, one.clone()), (0, 1, i.clone())]);
    let w_sub = GPoly::from_terms([(1, 0, one), (0, 1, -&i)]);
    poly.substitute(&z_sub, &w_sub, |c| c.clone())
}

/// Invariance of a `z,w`-polynomial under the symmetry group, read off the
/// coefficients `lambda_{k,l}`:
///
/// * sigma-fixed  <=>  every nonzero `lambda_{k,l}` has `k = l (mod 4)`;
/// * tau-fixed    <=>  `lambda_{l,k} =  i^(k-l) lambda_{k,l}`;
/// * tau-anti     <=>  `-lambda_{l,k} = i^(k-l) lambda_{k,l}`;
/// * rational in x,y  <=>  `lambda_{l,k} = conj(lambda_{k,l})`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ZwFlags {
    pub sigma_fixed: bool,
    pub tau_fixed: bool,
    pub tau_anti: bool,
    pub rational_xy: bool,
}

pub fn zw_invariance_flags(poly: &ZwPoly) -> ZwFlags {
    let mut flags = ZwFlags {
        sigma_fixed: true,
        tau_fixed: true,
        tau_anti: true,
        rational_xy: true,
    };
    // Check each (k,l) with the mirrored key; iterating stored keys covers
    // both orientations because a one-sided nonzero fails at the stored key.
    for (&(k, l), lam) in &poly.terms {
        if (k as i64 - l as i64).rem_euclid(4) != 0 {
            flags.sigma_fixed = false;
        }
        let mirrored = poly.coeff(l, k);
        let rotated = &GaussianRational::i_pow(k as i64 - l as i64) * lam;
        if mirrored != rotated {
            flags.tau_fixed = false;
        }
        if mirrored.neg() != rotated {
            flags.tau_anti = false;
        }
        if mirrored != lam.conjugate() {
            flags.rational_xy = false;
        }
    }
    flags
}

// --------------------------------------------------------------------------
// Vanishing orders and integrability
// --------------------------------------------------------------------------

impl QPoly {
    /// Order of vanishing at `P = (1, 0)`: the least `p + q` over nonzero
    /// Taylor coefficients of `(x-1)^p y^q`. Equivalently the largest `s`
    /// with `(x-1)^s | F(x, u(x-1))`, since that substitution sends the
    /// Taylor term `(x-1)^p y^q` to `u^q (x-1)^(p+q)`.
    pub fn ord_at_p(&self) -> Result<u32> {
        self.ord_at_point(true)
    }

    /// Order of vanishing at `Q = (0, 1)`; the mirror of [`Self::ord_at_p`].
    pub fn ord_at_q(&self) -> Result<u32> {
        self.ord_at_point(false)
    }

    fn ord_at_point(&self, at_p: bool) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::Domain(
                "vanishing order of the zero polynomial is undefined".into(),
            ));
        }
        // Group by the power of the variable that vanishes at the point and
        // take the multiplicity of the other factor at 1.
        let mut rows: BTreeMap<u32, UniPoly<Rational>> = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            let (vanishing, unit) = if at_p { (j, i) } else { (i, j) };
            rows.entry(vanishing)
                .or_insert_with(UniPoly::zero)
                .insert_add(unit as usize, c.clone());
        }
        let mut best: Option<u32> = None;
        for (vanishing, row) in rows {
            if let Some(cap) = best {
                if vanishing >= cap {
                    break; // rows are ordered; no later row can improve
                }
            }
            let mult = row.multiplicity_at(&Rational::one());
            let total = vanishing + mult as u32;
            best = Some(best.map_or(total, |b| b.min(total)));
        }
        Ok(best.expect("nonzero polynomial has a nonzero row"))
    }

    /// Integrability of `F dxdy / g^(t+1)` over the simplex: both corner
    /// vanishing orders at least `t`. The zero polynomial is vacuously
    /// integrable.
    pub fn is_integrable(&self, t: u32) -> bool {
        if self.is_zero() || t == 0 {
            return true;
        }
        self.ord_at_p().expect("nonzero") >= t && self.ord_at_q().expect("nonzero") >= t
    }
}

// --------------------------------------------------------------------------
// The (x^2 y^2, g) basis
// --------------------------------------------------------------------------

/// Coefficients `e_{m,r}` of a sigma,tau-invariant polynomial written as
/// `sum e_{m,r} (xy)^m g^r` with every `m` even.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct XygRepresentation {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl XygRepresentation {
    pub fn coeff(&self, m: u32, r: u32) -> Rational {
        self.terms.get(&(m, r)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    /// Expands back to `Q[x,y]`; exact inverse of [`to_xyg_basis`].
    pub fn reconstruct(&self) -> QPoly {
        let g = QPoly::circle_g();
        let mut out = QPoly::zero();
        for (&(m, r), e) in &self.terms {
            let term = g.pow(r).mul_monomial(m, m).scale(e);
            out = out.add(&term);
        }
        out
    }
}

/// Rewrites a sigma,tau-invariant polynomial in the `(x^2y^2, g)` basis.
///
/// Such an `F` is a symmetric polynomial in `X = x^2`, `Y = y^2`; repeated
/// division by `e2 = XY` with remainder a univariate polynomial in
/// `e1 = X + Y` gives `F = sum_j e2^j s_j(e1)` deterministically, and the
/// substitution `e1 = 1 - g` finishes the rewrite.
pub fn to_xyg_basis(poly: &QPoly) -> Result<XygRepresentation> {
    if !poly.is_sigma_tau_invariant() {
        return Err(Error::Precondition(
            "F is not sigma- and tau-invariant".into(),
        ));
    }
    // View in X = x^2, Y = y^2; sigma,tau-invariance forces even exponents.
    let mut sym: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    for (&(i, j), c) in &poly.terms {
        if i % 2 != 0 || j % 2 != 0 {
            return Err(Error::Internal(format!(
                "sigma,tau-invariant polynomial with odd exponent pair ({i},{j})"
            )));
        }
        sym.insert((i / 2, j / 2), c.clone());
    }

    let mut rep = XygRepresentation::default();
    let mut j = 0u32;
    while !sym.is_empty() {
        // remainder on Y = 0: univariate in X
        let s_j: UniPoly<Rational> = {
            let mut u = UniPoly::zero();
            for (&(a, b), c) in &sym {
                if b == 0 {
                    u.insert_add(a as usize, c.clone());
                }
            }
            u
        };
        // subtract s_j(X + Y), then divide by XY
        let mut next: BTreeMap<(u32, u32), Rational> = sym.clone();
        for (d, c) in s_j.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // (X + Y)^d expanded binomially
            for k in 0..=d {
                let bin = binomial(d, k);
                let sub = c * &Rational::from_integer(bin);
                merge_term(&mut next, (k as u32, (d - k) as u32), -sub);
            }
        }
        let mut quotient: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
        for ((a, b), c) in next {
            if a == 0 || b == 0 {
                return Err(Error::Internal(
                    "symmetric reduction left a term not divisible by XY".into(),
                ));
            }
            quotient.insert((a - 1, b - 1), c);
        }
        // record s_j(1 - g) into e_{2j, r}
        for (d, c) in s_j.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for r in 0..=d {
                let sign = if r % 2 == 0 { 1 } else { -1 };
                let coeff = c * &Rational::from_integer(binomial(d, r) * sign);
                merge_term(&mut rep.terms, (2 * j, r as u32), coeff);
            }
        }
        sym = quotient;
        j += 1;
    }
    Ok(rep)
}

fn merge_term(map: &mut BTreeMap<(u32, u32), Rational>, key: (u32, u32), val: Rational) {
    if val.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(val);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = &*e.get() + &val;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

// --------------------------------------------------------------------------
// Elementary exact integrals
// --------------------------------------------------------------------------

/// Exact `\int_simplex F dxdy` by linearity and the monomial identity
/// `\int x^a y^b dxdy = a! b! / (a+b+2)!`.
pub fn simplex_integral_poly(poly: &QPoly) -> Rational {
    let mut acc = Rational::zero();
    for (&(a, b), c) in &poly.terms {
        // a! b! / (a+b+2)! = 1 / (C(a+b, a) * (a+b+1) * (a+b+2))
        let n = (a + b) as usize;
        let den = binomial(n, a as usize)
            * BigInt::from(n as u64 + 1)
            * BigInt::from(n as u64 + 2);
        acc += &(c * &Rational::new(BigInt::one(), den));
    }
    acc
}

/// Restriction of `F` to the hypotenuse, parametrized as `(1-y, y)` for `y`
/// from 0 to 1: returns the univariate polynomial `F(1-y, y)`.
pub fn restrict_hypotenuse<C: Scalar>(poly: &BiPoly<C, Xy>) -> UniPoly<C> {
    let max_i = poly.terms.keys().map(|k| k.0).max().unwrap_or(0);
    // cache (1-y)^i
    let one_minus_y = UniPoly::from_coeffs(vec![C::one(), C::one().neg()]);
    let mut pows = Vec::with_capacity(max_i as usize + 1);
    pows.push(UniPoly::from_coeffs(vec![C::one()]));
    for k in 1..=max_i as usize {
        pows.push(pows[k - 1].mul(&one_minus_y));
    }
    let mut out = UniPoly::zero();
    for (&(i, j), c) in &poly.terms {
        out = out.add(&pows[i as usize].shift(j as usize).scale(c));
    }
    out
}

/// Exact `\int_0^1 p(y) dy = sum c_k / (k+1)`.
pub fn integrate_01(p: &UniPoly<Rational>) -> Rational {
    let mut acc = Rational::zero();
    for (k, c) in p.coeffs().iter().enumerate() {
        acc += &(c * &Rational::new(1, k as i64 + 1));
    }
    acc
}

// --------------------------------------------------------------------------
// Univariate polynomials
// --------------------------------------------------------------------------

/// Dense univariate polynomial; coefficient of `y^k` at index `k`.
#[derive(Clone, PartialEq)]
pub struct UniPoly<C: Scalar> {
    coeffs: Vec<C>,
}

impl<C: Scalar> UniPoly<C> {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(C::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn insert_add(&mut self, k: usize, c: C) {
        if c.is_zero() {
            return;
        }
        if self.coeffs.len() <= k {
            self.coeffs.resize(k + 1, C::zero());
        }
        self.coeffs[k] = self.coeffs[k].add(&c);
        self.trim();
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in rhs.coeffs.iter().enumerate() {
            out.insert_add(k, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in rhs.coeffs.iter().enumerate() {
            out.insert_add(k, c.neg());
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Multiplies by `y^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        UniPoly { coeffs }
    }

    pub fn eval(&self, at: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(at).add(c);
        }
        acc
    }

    /// Exact division; errors distinguish a zero divisor from inexactness.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let mut rem = self.clone();
        let mut quot = vec![C::zero(); self.coeffs.len().saturating_sub(d.coeffs.len() - 1)];
        let dlead = d.coeffs.last().expect("nonzero");
        while !rem.is_zero() {
            if rem.coeffs.len() < d.coeffs.len() {
                return Err(Error::NotDivisible(
                    "univariate division leaves a remainder".into(),
                ));
            }
            let shift = rem.coeffs.len() - d.coeffs.len();
            let factor = rem.coeffs.last().expect("nonzero").div(dlead);
            quot[shift] = quot[shift].add(&factor);
            for (k, c) in d.coeffs.iter().enumerate() {
                let delta = c.mul(&factor).neg();
                if !delta.is_zero() {
                    rem.coeffs[shift + k] = rem.coeffs[shift + k].add(&delta);
                }
            }
            rem.trim();
        }
        Ok(Self::from_coeffs(quot))
    }

    /// Multiplicity of the root `at` (0 when not a root).
    pub fn multiplicity_at(&self, at: &C) -> usize {
        debug_assert!(!self.is_zero());
        let divisor = UniPoly::from_coeffs(vec![at.neg(), C::one()]);
        let mut mult = 0;
        let mut p = self.clone();
        while p.eval(at).is_zero() {
            p = p.div_exact(&divisor).expect("root found, division exact");
            mult += 1;
            if p.is_zero() {
                break;
            }
        }
        mult
    }
}

impl<C: Scalar> fmt::Debug for UniPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly{:?}", self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn q(terms: &[(u32, u32, i64, i64)]) -> QPoly {
        QPoly::from_terms(terms.iter().map(|&(i, j, n, d)| (i, j, rat(n, d))))
    }

    fn x2y2() -> QPoly {
        q(&[(2, 2, 1, 1)])
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(x2y2().sigma_act(), x2y2());
        let x = q(&[(1, 0, 1, 1)]);
        assert_eq!(x.sigma_act(), q(&[(0, 1, -1, 1)]));
        let psi31 = QPoly::symmetric_basis(SymKind::Psi, 3, 1);
        assert_eq!(psi31.sigma_act(), psi31);
    }

    #[test]
    fn sigma_invariance_flags() {
        assert!(x2y2().is_sigma_invariant());
        assert!(!q(&[(1, 0, 1, 1)]).is_sigma_invariant());
        assert!(q(&[(4, 0, 1, 1), (0, 4, 1, 1)]).is_sigma_invariant());
        // one-sided coefficient must be caught
        assert!(!q(&[(4, 0, 1, 1)]).is_sigma_invariant());
    }

    #[test]
    fn tau_examples() {
        assert_eq!(q(&[(2, 4, 1, 1)]).tau_act(), q(&[(4, 2, 1, 1)]));
        assert_eq!(x2y2().tau_act(), x2y2());
        let psi = QPoly::symmetric_basis(SymKind::Psi, 3, 1);
        assert_eq!(psi.tau_act(), psi.neg());
    }

    #[test]
    fn tau_split_examples() {
        let (p, m) = x2y2().tau_split();
        assert_eq!(p, x2y2());
        assert!(m.is_zero());

        let x3y = q(&[(3, 1, 1, 1)]);
        let (p, m) = x3y.tau_split();
        assert_eq!(p, QPoly::symmetric_basis(SymKind::Phi, 3, 1).scale(&rat(1, 2)));
        assert_eq!(m, QPoly::symmetric_basis(SymKind::Psi, 3, 1).scale(&rat(1, 2)));
        assert_eq!(p.add(&m), x3y);

        let psi = QPoly::symmetric_basis(SymKind::Psi, 3, 1);
        let (p, m) = psi.tau_split();
        assert!(p.is_zero());
        assert_eq!(m, psi);
    }

    #[test]
    fn symmetric_basis_examples() {
        assert_eq!(
            QPoly::symmetric_basis(SymKind::Phi, 2, 2),
            q(&[(2, 2, 2, 1)])
        );
        assert_eq!(
            QPoly::symmetric_basis(SymKind::Psi, 3, 1),
            q(&[(3, 1, 1, 1), (1, 3, -1, 1)])
        );
        assert!(QPoly::symmetric_basis(SymKind::Psi, 1, 1).is_zero());
    }

    #[test]
    fn zw_of_x2y2_matches_expansion() {
        // x^2 y^2 = -(z^4 - 2 z^2 w^2 + w^4)/16
        let zw = to_zw(&x2y2());
        let expected = ZwPoly::from_terms([
            (4, 0, GaussianRational::from_rational(rat(-1, 16))),
            (2, 2, GaussianRational::from_rational(rat(1, 8))),
            (0, 4, GaussianRational::from_rational(rat(-1, 16))),
        ]);
        assert_eq!(zw, expected);
    }

    #[test]
    fn zw_simple_substitutions() {
        let x = q(&[(1, 0, 1, 1)]);
        let half = GaussianRational::from_rational(rat(1, 2));
        assert_eq!(
            to_zw(&x),
            ZwPoly::from_terms([(1, 0, half.clone()), (0, 1, half)])
        );
        let sum_sq = q(&[(2, 0, 1, 1), (0, 2, 1, 1)]);
        assert_eq!(
            to_zw(&sum_sq),
            ZwPoly::monomial(1, 1, GaussianRational::one())
        );
    }

    #[test]
    fn zw_flags_examples() {
        let f = zw_invariance_flags(&to_zw(&x2y2()));
        assert_eq!(
            f,
            ZwFlags {
                sigma_fixed: true,
                tau_fixed: true,
                tau_anti: false,
                rational_xy: true
            }
        );
        let zw = ZwPoly::monomial(1, 1, GaussianRational::one());
        let f = zw_invariance_flags(&zw);
        assert!(f.sigma_fixed && f.tau_fixed && !f.tau_anti && f.rational_xy);
        let z4 = ZwPoly::monomial(4, 0, GaussianRational::one());
        let f = zw_invariance_flags(&z4);
        assert_eq!(
            f,
            ZwFlags {
                sigma_fixed: true,
                tau_fixed: false,
                tau_anti: false,
                rational_xy: false
            }
        );
    }

    #[test]
    fn vanishing_orders() {
        assert_eq!(QPoly::circle_g().ord_at_p().unwrap(), 1);
        assert_eq!(QPoly::circle_g().ord_at_q().unwrap(), 1);
        assert_eq!(q(&[(3, 3, 1, 1)]).ord_at_p().unwrap(), 3);
        assert_eq!(q(&[(3, 3, 1, 1)]).ord_at_q().unwrap(), 3);
        // (1-x-y)(1-x+y)(1+x-y)(1+x+y) = g^2 - 4 x^2 y^2
        let quartic = QPoly::circle_g()
            .pow(2)
            .sub(&x2y2().scale(&rat(4, 1)));
        assert_eq!(quartic.ord_at_p().unwrap(), 2);
        assert_eq!(quartic.ord_at_q().unwrap(), 2);
        assert!(QPoly::zero().ord_at_p().is_err());
    }

    #[test]
    fn integrability_examples() {
        assert!(q(&[(4, 4, 1, 1)]).is_integrable(2));
        let quartic = QPoly::circle_g()
            .pow(2)
            .sub(&x2y2().scale(&rat(4, 1)));
        assert!(quartic.is_integrable(2));
        assert!(!x2y2().is_integrable(3));
        assert!(QPoly::zero().is_integrable(7));
    }

    #[test]
    fn xyg_basis_examples() {
        // x^2 + y^2 = 1 - g
        let rep = to_xyg_basis(&q(&[(2, 0, 1, 1), (0, 2, 1, 1)])).unwrap();
        assert_eq!(rep.coeff(0, 0), rat(1, 1));
        assert_eq!(rep.coeff(0, 1), rat(-1, 1));
        assert_eq!(rep.terms().count(), 2);

        let rep = to_xyg_basis(&x2y2()).unwrap();
        assert_eq!(rep.coeff(2, 0), rat(1, 1));
        assert_eq!(rep.terms().count(), 1);

        // x^4 + y^4 = (1-g)^2 - 2 (xy)^2
        let rep = to_xyg_basis(&q(&[(4, 0, 1, 1), (0, 4, 1, 1)])).unwrap();
        assert_eq!(rep.coeff(0, 0), rat(1, 1));
        assert_eq!(rep.coeff(0, 1), rat(-2, 1));
        assert_eq!(rep.coeff(0, 2), rat(1, 1));
        assert_eq!(rep.coeff(2, 0), rat(-2, 1));
        assert_eq!(rep.reconstruct(), q(&[(4, 0, 1, 1), (0, 4, 1, 1)]));

        assert!(to_xyg_basis(&q(&[(1, 0, 1, 1)])).is_err());
    }

    #[test]
    fn simplex_integrals() {
        assert_eq!(simplex_integral_poly(&QPoly::one()), rat(1, 2));
        assert_eq!(simplex_integral_poly(&q(&[(1, 0, 1, 1)])), rat(1, 6));
        assert_eq!(simplex_integral_poly(&x2y2()), rat(1, 180));
    }

    #[test]
    fn hypotenuse_restriction() {
        let xy_sum = q(&[(1, 0, 1, 1), (0, 1, 1, 1)]);
        assert_eq!(
            restrict_hypotenuse(&xy_sum),
            UniPoly::from_coeffs(vec![rat(1, 1)])
        );
        // g = 2y(1-y) on the hypotenuse
        assert_eq!(
            restrict_hypotenuse(&QPoly::circle_g()),
            UniPoly::from_coeffs(vec![rat(0, 1), rat(2, 1), rat(-2, 1)])
        );
        let xy = q(&[(1, 1, 1, 1)]);
        assert_eq!(
            restrict_hypotenuse(&xy),
            UniPoly::from_coeffs(vec![rat(0, 1), rat(1, 1), rat(-1, 1)])
        );
    }

    #[test]
    fn unit_interval_integrals() {
        assert_eq!(
            integrate_01(&UniPoly::from_coeffs(vec![rat(1, 1)])),
            rat(1, 1)
        );
        assert_eq!(
            integrate_01(&UniPoly::from_coeffs(vec![rat(-1, 1), rat(2, 1)])),
            rat(0, 1)
        );
        // (1-2y)^2 = 1 - 4y + 4y^2
        assert_eq!(
            integrate_01(&UniPoly::from_coeffs(vec![
                rat(1, 1),
                rat(-4, 1),
                rat(4, 1)
            ])),
            rat(1, 3)
        );
    }

    #[test]
    fn exact_division() {
        let xy = q(&[(1, 1, 1, 1)]);
        assert_eq!(x2y2().exact_div(&xy).unwrap(), xy);
        let y = q(&[(0, 1, 1, 1)]);
        let p = q(&[(0, 1, 1, 1), (0, 3, -1, 1)]);
        assert_eq!(p.exact_div(&y).unwrap(), q(&[(0, 0, 1, 1), (0, 2, -1, 1)]));
        let sum_sq = q(&[(2, 0, 1, 1), (0, 2, 1, 1)]);
        let x = q(&[(1, 0, 1, 1)]);
        assert!(matches!(
            sum_sq.exact_div(&x),
            Err(Error::NotDivisible(_))
        ));
        assert!(matches!(
            sum_sq.exact_div(&QPoly::zero()),
            Err(Error::ZeroDivisor)
        ));
        // a non-monomial divisor
        let g = QPoly::circle_g();
        let prod = g.mul(&x2y2());
        assert_eq!(prod.exact_div(&g).unwrap(), x2y2());
    }

    #[test]
    fn display_roundtrips_through_grammar_shape() {
        let p = q(&[(2, 2, 4, 1), (1, 0, -1, 2), (0, 0, 1, 3)]);
        assert_eq!(p.to_string(), "4*x^2*y^2 - 1/2*x + 1/3");
        assert_eq!(QPoly::zero().to_string(), "0");
    }
}
