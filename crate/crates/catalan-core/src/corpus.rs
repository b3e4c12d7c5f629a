//! Named regression inputs and seeded random families shared by the
//! verification CLI and the acceptance suite.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::bipoly::{QPoly, SymKind};
use crate::exact::Rational;
use crate::reduction::IntegrandSpec;

/// The quartic `(1-x-y)(1-x+y)(1+x-y)(1+x+y) = g^2 - 4 x^2 y^2`, integrable
/// against `g^3`.
pub fn boundary_quartic() -> QPoly {
    QPoly::circle_g()
        .pow(2)
        .sub(&QPoly::monomial(2, 2, Rational::from_integer(4)))
}

/// Named integrands exercised by `verify --suite`: the three table entries,
/// the vanishing tau-antisymmetric family, and a spread of integrable cases.
pub fn regression_suite() -> Vec<(String, IntegrandSpec)> {
    let mono = |i: u32, j: u32| QPoly::monomial(i, j, Rational::one());
    let mut suite: Vec<(String, IntegrandSpec)> = vec![
        ("x^2*y^2 / g".into(), IntegrandSpec::new(mono(2, 2), 0)),
        ("x^4*y^4 / g".into(), IntegrandSpec::new(mono(4, 4), 0)),
        ("x^4*y^4 / g^3".into(), IntegrandSpec::new(mono(4, 4), 2)),
        (
            "psi(3,1) / g".into(),
            IntegrandSpec::new(QPoly::symmetric_basis(SymKind::Psi, 3, 1), 0),
        ),
        (
            "psi(5,1) / g".into(),
            IntegrandSpec::new(QPoly::symmetric_basis(SymKind::Psi, 5, 1), 0),
        ),
        (
            "psi(5,3) / g".into(),
            IntegrandSpec::new(QPoly::symmetric_basis(SymKind::Psi, 5, 3), 0),
        ),
        (
            "x^4+y^4 / g".into(),
            IntegrandSpec::new(
                QPoly::from_terms([(4, 0, Rational::one()), (0, 4, Rational::one())]),
                0,
            ),
        ),
        (
            "boundary quartic / g^3".into(),
            IntegrandSpec::new(boundary_quartic(), 2),
        ),
        (
            "g*x^2*y^2 / g^2".into(),
            IntegrandSpec::new(QPoly::circle_g().mul(&mono(2, 2)), 1),
        ),
        ("x^4*y^4 / g^2".into(), IntegrandSpec::new(mono(4, 4), 1)),
        ("x^4*y^4 / g^4".into(), IntegrandSpec::new(mono(4, 4), 3)),
        ("x^6*y^6 / g^5".into(), IntegrandSpec::new(mono(6, 6), 4)),
    ];
    for t in 0..=2u32 {
        suite.push((
            format!("(xy)^4*(1+g) / g^{}", t + 1),
            IntegrandSpec::new(
                QPoly::one().add(&QPoly::circle_g()).mul(&mono(4, 4)),
                t,
            ),
        ));
    }
    suite
}

/// Seeded generator of sigma-invariant polynomials with integer coefficients,
/// drawn as random combinations of the invariant basis
/// `phi_{m,n}` (m, n even) and `psi_{m,n}` (m, n odd), total degree at most
/// `max_degree`.
pub struct SigmaInvariantSampler {
    rng: ChaCha12Rng,
    basis: Vec<QPoly>,
    coeff_bound: i64,
}

impl SigmaInvariantSampler {
    pub fn new(seed: u64, max_degree: u32, coeff_bound: i64) -> Self {
        SigmaInvariantSampler {
            rng: ChaCha12Rng::seed_from_u64(seed),
            basis: sigma_invariant_basis(max_degree),
            coeff_bound,
        }
    }

    /// Draws a nonzero sigma-invariant polynomial.
    pub fn sample(&mut self) -> QPoly {
        loop {
            let mut p = QPoly::zero();
            for b in &self.basis {
                // keep the polynomials sparse
                if self.rng.gen_range(0..4) != 0 {
                    continue;
                }
                let c = self.rng.gen_range(-self.coeff_bound..=self.coeff_bound);
                if c != 0 {
                    p = p.add(&b.scale(&Rational::from_integer(c)));
                }
            }
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// Draws an admissible `(F, t)` pair for the direct reduction pipeline:
    /// `F = (xy)^(2 ceil(t/2)) * H` with `H` sigma-invariant, so both the
    /// divisibility and the integrability preconditions hold.
    pub fn sample_admissible(&mut self, t_max: u32) -> IntegrandSpec {
        let t = self.rng.gen_range(0..=t_max);
        let s = 2 * t.div_ceil(2);
        let h = self.sample();
        IntegrandSpec::new(h.mul_monomial(s, s), t)
    }
}

/// The sigma-invariant basis up to a total degree: `phi_{m,n}` with
/// `m >= n >= 0` both even, and `psi_{m,n}` with `m > n > 0` both odd.
pub fn sigma_invariant_basis(max_degree: u32) -> Vec<QPoly> {
    let mut basis = Vec::new();
    for m in 0..=max_degree {
        for n in 0..=m.min(max_degree - m) {
            if m % 2 == 0 && n % 2 == 0 {
                basis.push(QPoly::symmetric_basis(SymKind::Phi, m, n));
            } else if m > n && n > 0 && m % 2 == 1 && n % 2 == 1 {
                basis.push(QPoly::symmetric_basis(SymKind::Psi, m, n));
            }
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_sigma_invariant() {
        let mut sampler = SigmaInvariantSampler::new(7, 10, 5);
        for _ in 0..50 {
            let p = sampler.sample();
            assert!(p.is_sigma_invariant());
            assert!(p.degree().is_some_and(|d| d <= 10));
        }
    }

    #[test]
    fn admissible_samples_satisfy_preconditions() {
        let mut sampler = SigmaInvariantSampler::new(11, 8, 3);
        for _ in 0..50 {
            let spec = sampler.sample_admissible(4);
            assert!(spec.poly.is_sigma_invariant());
            let s = 2 * spec.t.div_ceil(2);
            assert!(spec.poly.divisible_by_monomial(s, s));
            assert!(spec.poly.is_integrable(spec.t));
        }
    }

    #[test]
    fn suite_entries_are_admissible_for_the_integrable_pipeline() {
        for (name, spec) in regression_suite() {
            assert!(spec.poly.is_sigma_invariant(), "{name}");
            assert!(spec.poly.is_integrable(spec.t), "{name}");
        }
    }
}
