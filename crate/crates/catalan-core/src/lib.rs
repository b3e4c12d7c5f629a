//! Exact linear forms in 1 and Catalan's constant.
//!
//! For a bivariate polynomial `F` fixed by the quarter-turn substitution
//! `sigma: (x, y) -> (-y, x)` and a pole order `t` compatible with `F`'s
//! vanishing at the two corner points `P = (1,0)` and `Q = (0,1)`, the
//! integral
//!
//! ```text
//! int_simplex F(x,y) dxdy / (1 - x^2 - y^2)^(t+1)
//! ```
//!
//! over the triangle with vertices (0,0), (1,0), (0,1) evaluates to
//! `a + b*G` with rational `a`, `b` and `G = 1 - 1/3^2 + 1/5^2 - ...`
//! Catalan's constant. This crate computes `(a, b)` exactly, certifies
//! denominator bounds, cross-checks every value against a high-precision
//! numeric oracle, and searches integer polynomial families for cleared
//! forms `p + q*G` of small magnitude.
//!
//! Module map:
//!
//! * [`exact`] - arbitrary-precision rationals, Gaussian rationals, linear
//!   forms, `lcm(1..m)`;
//! * [`bipoly`] - sparse bivariate polynomials: symmetry operators, the
//!   `z = x + iy`, `w = x - iy` coordinates, corner vanishing orders, the
//!   `(x^2y^2, g)` basis, exact elementary integrals;
//! * [`linform`] - the simple-pole engine `(a_F, b_F)` and denominator
//!   certificates;
//! * [`reduction`] - pole-order reduction for `t >= 1` and the general
//!   integrable pipeline;
//! * [`oracle`] - Catalan digits by dual accelerated summation, adaptive
//!   simplex quadrature, verification reports;
//! * [`search`] - the candidate search harness;
//! * [`corpus`] - named regression inputs and seeded random families.

pub mod bipoly;
pub mod corpus;
mod decimal;
pub mod error;
pub mod exact;
pub mod linform;
pub mod oracle;
pub mod reduction;
pub mod search;

pub use bipoly::{BiPoly, QPoly, SymKind, UniPoly, XygRepresentation, ZwFlags};
pub use error::{Error, Result};
pub use exact::{lcm_upto, linear_form_decimal, GaussianRational, LinearForm, Rational};
pub use linform::{b_coefficient, denominator_certificate, linear_form_t0, DenominatorCertificate};
pub use oracle::{catalan, check_linear_form, period_matrix_check, quadrature_simplex, VerificationReport};
pub use reduction::{
    cleared_form, cleared_form_primitive, linear_form, linear_form_integrable, ClearedForm,
    IntegrandSpec, ReductionStep,
};
pub use search::{run_search, CandidateFamily, SearchConfig, SearchReport, SearchStrategy};
