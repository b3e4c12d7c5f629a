//! Search harness over integer polynomial families: looks for linear forms
//! `a + b*G` whose cleared integer form `p + q*G` has small magnitude.
//!
//! Candidates are generator polynomials `H` with bounded degree and
//! coefficient height. The default family maps `H` to the symmetrized square
//! `F = sum_{i=0}^3 sigma^i(H^2)`, which is sigma-invariant and nonnegative
//! on the simplex, so the resulting linear form is nonzero; a raw
//! sigma-invariant-basis family is available as an alternative. Each
//! candidate is evaluated over the configured range of pole orders, skipping
//! non-integrable combinations.
//!
//! Evaluations are embarrassingly parallel; candidate order, tie-breaking,
//! and the ranking key are all deterministic, so a report depends only on
//! the configuration (never on the worker count).

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::bipoly::QPoly;
use crate::error::{Error, Result};
use crate::exact::{LinearForm, Rational};
use crate::linform::denominator_certificate;
use crate::oracle::check_linear_form;
use crate::reduction::{cleared_form_primitive, linear_form_integrable, IntegrandSpec};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SearchStrategy {
    Exhaustive,
    Random,
    HillClimb,
}

impl SearchStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            SearchStrategy::Exhaustive => "exhaustive",
            SearchStrategy::Random => "random",
            SearchStrategy::HillClimb => "hillclimb",
        }
    }
}

impl std::str::FromStr for SearchStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exhaustive" => Ok(SearchStrategy::Exhaustive),
            "random" => Ok(SearchStrategy::Random),
            "hillclimb" => Ok(SearchStrategy::HillClimb),
            other => Err(Error::Domain(format!(
                "unknown strategy `{other}` (expected exhaustive, random, or hillclimb)"
            ))),
        }
    }
}

/// Which integer family the generator coefficients parametrize.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CandidateFamily {
    /// `F = sum_i sigma^i(H^2)` over generators `H` of degree at most
    /// `max_degree / 2`: always sigma-invariant and nonnegative on the
    /// simplex.
    SymmetrizedSquares,
    /// Integer combinations of the sigma-invariant basis `phi`/`psi` up to
    /// `max_degree`.
    SigmaBasis,
}

impl CandidateFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CandidateFamily::SymmetrizedSquares => "squares",
            CandidateFamily::SigmaBasis => "sigma-basis",
        }
    }
}

impl std::str::FromStr for CandidateFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "squares" => Ok(CandidateFamily::SymmetrizedSquares),
            "sigma-basis" => Ok(CandidateFamily::SigmaBasis),
            other => Err(Error::Domain(format!(
                "unknown family `{other}` (expected squares or sigma-basis)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Even upper bound on the total degree of the evaluated polynomial `F`.
    pub max_degree: u32,
    /// Inclusive range of pole orders to sweep.
    pub t_min: u32,
    pub t_max: u32,
    pub strategy: SearchStrategy,
    /// Maximum number of candidate generators evaluated.
    pub budget: u64,
    pub seed: u64,
    /// Worker threads; 0 uses the machine default. The report is identical
    /// at any worker count.
    pub workers: usize,
    /// Coefficient height bound `|c| <= height` for generators.
    pub height: i64,
    /// Number of ranked entries retained and re-validated.
    pub top_k: usize,
    pub family: CandidateFamily,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_degree: 8,
            t_min: 0,
            t_max: 2,
            strategy: SearchStrategy::Exhaustive,
            budget: 1000,
            seed: 0,
            workers: 0,
            height: 1,
            top_k: 10,
            family: CandidateFamily::SymmetrizedSquares,
        }
    }
}

/// One ranked candidate. All ranking data is exact, so reports are
/// reproducible byte for byte.
#[derive(Clone, PartialEq, Debug)]
pub struct SearchEntry {
    pub poly: QPoly,
    pub t: u32,
    pub form: LinearForm,
    /// Cleared integer form with content removed: `p + q*G`.
    pub p: BigInt,
    pub q: BigInt,
    /// Decimal magnitude `|p + q*G|`.
    pub cleared_abs: String,
    /// `|G + a/b|` when `b` is nonzero.
    pub approx_error: Option<String>,
    /// Empirical lowest common denominator of `(a, b)`.
    pub denominator: BigInt,
    key: BigInt,
    candidate_index: u64,
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub evaluations: u64,
    /// Wall-clock time; excluded from serialized reports so that reruns are
    /// byte-identical.
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub entries: Vec<SearchEntry>,
    pub strategy: SearchStrategy,
    pub family: CandidateFamily,
    pub seed: u64,
    pub stats: SearchStats,
}

/// `sum_{i=0}^3 sigma^i(H^2)` for integer `H`: sigma-invariant and
/// nonnegative on the simplex (it is a sum of squares).
pub fn sigma_symmetrize_square(generator: &QPoly) -> Result<QPoly> {
    if generator.terms().any(|(_, c)| !c.is_integer()) {
        return Err(Error::Precondition(
            "symmetrized squares require integer coefficients".into(),
        ));
    }
    let square = generator.mul(generator);
    let mut acc = square.clone();
    let mut orbit = square;
    for _ in 0..3 {
        orbit = orbit.sigma_act();
        acc = acc.add(&orbit);
    }
    Ok(acc)
}

const KEY_DIGITS: usize = 30;

/// `|p + q*G|` of the primitive cleared form as a scaled integer at
/// `10^KEY_DIGITS`; the exact, total ranking key.
fn cleared_key(p: &BigInt, q: &BigInt) -> Result<BigInt> {
    let g = crate::oracle::catalan_rational(KEY_DIGITS + 10)?;
    let value = &Rational::from_integer(p.clone())
        + &(&Rational::from_integer(q.clone()) * &g);
    let scaled = &value.abs() * &Rational::from_integer(BigInt::from(10u8).pow(KEY_DIGITS as u32));
    Ok(scaled.numer() / scaled.denom())
}

fn evaluate_spec(poly: &QPoly, t: u32, candidate_index: u64) -> Result<Option<SearchEntry>> {
    let form = linear_form_integrable(&IntegrandSpec::new(poly.clone(), t))?;
    if form.is_zero() {
        // the zero form carries no approximation content
        return Ok(None);
    }
    let cleared = cleared_form_primitive(&form)?;
    let key = cleared_key(&cleared.p, &cleared.q)?;
    let approx_error = if form.b.is_zero() {
        None
    } else {
        let ratio = &form.a / &form.b;
        Some(
            crate::exact::linear_form_decimal(&LinearForm::new(ratio, Rational::one()), 12)?
                .trim_start_matches('-')
                .to_string(),
        )
    };
    Ok(Some(SearchEntry {
        poly: poly.clone(),
        t,
        form,
        p: cleared.p,
        q: cleared.q,
        cleared_abs: cleared.value.trim_start_matches('-').to_string(),
        approx_error,
        denominator: cleared.denominator,
        key,
        candidate_index,
    }))
}

/// The search objective for a single `(F, t)`: the cleared-form magnitude
/// `|p + q*G|` as a decimal string, and `|G + a/b|` when `b` is nonzero.
pub fn objective(poly: &QPoly, t: u32) -> Result<(String, Option<String>)> {
    match evaluate_spec(poly, t, 0)? {
        Some(entry) => Ok((entry.cleared_abs, entry.approx_error)),
        None => Ok((Rational::zero().to_decimal(crate::reduction::CLEARED_DIGITS), None)),
    }
}

// --------------------------------------------------------------------------
// Candidate generation
// --------------------------------------------------------------------------

/// Monomial support for generators: all `(i, j)` with `i + j <= deg`,
/// ordered by total degree then by the first exponent.
fn monomial_support(deg: u32) -> Vec<(u32, u32)> {
    let mut v = Vec::new();
    for d in 0..=deg {
        for i in 0..=d {
            v.push((i, d - i));
        }
    }
    v.sort_by_key(|&(i, j)| (i + j, i));
    v
}

struct FamilyContext {
    family: CandidateFamily,
    support: Vec<(u32, u32)>,
    basis: Vec<QPoly>,
}

impl FamilyContext {
    fn new(config: &SearchConfig) -> Self {
        match config.family {
            CandidateFamily::SymmetrizedSquares => FamilyContext {
                family: config.family,
                support: monomial_support(config.max_degree / 2),
                basis: Vec::new(),
            },
            CandidateFamily::SigmaBasis => FamilyContext {
                family: config.family,
                support: Vec::new(),
                basis: crate::corpus::sigma_invariant_basis(config.max_degree),
            },
        }
    }

    fn dimension(&self) -> usize {
        match self.family {
            CandidateFamily::SymmetrizedSquares => self.support.len(),
            CandidateFamily::SigmaBasis => self.basis.len(),
        }
    }

    /// Builds the evaluated polynomial `F` from a coefficient vector;
    /// `None` for the zero candidate.
    fn build(&self, coeffs: &[i64]) -> Result<Option<QPoly>> {
        if coeffs.iter().all(|&c| c == 0) {
            return Ok(None);
        }
        match self.family {
            CandidateFamily::SymmetrizedSquares => {
                let generator = QPoly::from_terms(
                    coeffs
                        .iter()
                        .zip(&self.support)
                        .filter(|(&c, _)| c != 0)
                        .map(|(&c, &(i, j))| (i, j, Rational::from_integer(c))),
                );
                Ok(Some(sigma_symmetrize_square(&generator)?))
            }
            CandidateFamily::SigmaBasis => {
                let mut f = QPoly::zero();
                for (&c, b) in coeffs.iter().zip(&self.basis) {
                    if c != 0 {
                        f = f.add(&b.scale(&Rational::from_integer(c)));
                    }
                }
                Ok(if f.is_zero() { None } else { Some(f) })
            }
        }
    }
}

/// Canonical representative of `{v, -v}`: first nonzero coefficient
/// positive. Both families are even in the generator sign.
fn canonicalize(coeffs: &mut [i64]) {
    if let Some(first) = coeffs.iter().find(|&&c| c != 0) {
        if *first < 0 {
            for c in coeffs.iter_mut() {
                *c = -*c;
            }
        }
    }
}

/// Exhaustive enumeration ordered by sparsity: all canonical vectors with
/// one nonzero coordinate, then two, and so on, coefficients bounded by
/// `height`. Capped at `budget` candidates.
fn enumerate_exhaustive(dim: usize, height: i64, budget: u64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    if budget == 0 || dim == 0 {
        return out;
    }
    // nonzero values in a deterministic order; the first position stays
    // positive for canonicality
    let positive: Vec<i64> = (1..=height).collect();
    let symmetric: Vec<i64> = (1..=height).flat_map(|v| [v, -v]).collect();
    for nnz in 1..=dim {
        if out.len() as u64 >= budget {
            break;
        }
        let mut positions = vec![0usize; nnz];
        enumerate_positions(dim, nnz, 0, &mut positions, &mut |positions| {
            if out.len() as u64 >= budget {
                return;
            }
            let mut values = vec![0usize; nnz];
            loop {
                if out.len() as u64 >= budget {
                    return;
                }
                let mut coeffs = vec![0i64; dim];
                for (slot, &pos) in positions.iter().enumerate() {
                    let table = if slot == 0 { &positive } else { &symmetric };
                    coeffs[pos] = table[values[slot]];
                }
                out.push(coeffs);
                // advance the mixed-radix value counter
                let mut slot = nnz;
                loop {
                    if slot == 0 {
                        return;
                    }
                    slot -= 1;
                    let table_len = if slot == 0 {
                        positive.len()
                    } else {
                        symmetric.len()
                    };
                    values[slot] += 1;
                    if values[slot] < table_len {
                        break;
                    }
                    values[slot] = 0;
                    if slot == 0 {
                        return;
                    }
                }
            }
        });
    }
    out
}

fn enumerate_positions(
    dim: usize,
    nnz: usize,
    slot: usize,
    positions: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if slot == nnz {
        emit(positions);
        return;
    }
    let start = if slot == 0 { 0 } else { positions[slot - 1] + 1 };
    for pos in start..=(dim - (nnz - slot)) {
        positions[slot] = pos;
        enumerate_positions(dim, nnz, slot + 1, positions, emit);
    }
}

fn random_vector(rng: &mut ChaCha12Rng, dim: usize, height: i64) -> Vec<i64> {
    loop {
        let mut v: Vec<i64> = (0..dim)
            .map(|_| rng.gen_range(-height..=height))
            .collect();
        if v.iter().any(|&c| c != 0) {
            canonicalize(&mut v);
            return v;
        }
    }
}

// --------------------------------------------------------------------------
// The search driver
// --------------------------------------------------------------------------

struct Evaluated {
    entries: Vec<SearchEntry>,
    /// Candidate objective: the best entry key, if any `t` was feasible.
    best: Option<BigInt>,
}

fn evaluate_candidate(
    ctx: &FamilyContext,
    config: &SearchConfig,
    coeffs: &[i64],
    index: u64,
) -> Result<Evaluated> {
    let Some(poly) = ctx.build(coeffs)? else {
        return Ok(Evaluated {
            entries: Vec::new(),
            best: None,
        });
    };
    let mut entries = Vec::new();
    for t in config.t_min..=config.t_max {
        if !poly.is_integrable(t) {
            continue;
        }
        if let Some(entry) = evaluate_spec(&poly, t, index)? {
            entries.push(entry);
        }
    }
    let best = entries.iter().map(|e| e.key.clone()).min();
    Ok(Evaluated { entries, best })
}

fn validate_config(config: &SearchConfig) -> Result<()> {
    if config.max_degree == 0 || config.max_degree % 2 != 0 {
        return Err(Error::Domain(
            "max_degree must be a positive even integer".into(),
        ));
    }
    if config.t_min > config.t_max {
        return Err(Error::Domain("t_min must not exceed t_max".into()));
    }
    if config.height < 1 {
        return Err(Error::Domain("height must be at least 1".into()));
    }
    Ok(())
}

/// Runs the configured search and returns the ranked, re-validated report.
/// Identical configurations produce identical reports at any worker count.
pub fn run_search(config: &SearchConfig) -> Result<SearchReport> {
    validate_config(config)?;
    let run = || run_search_inner(config);
    if config.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
        pool.install(run)
    } else {
        run()
    }
}

fn run_search_inner(config: &SearchConfig) -> Result<SearchReport> {
    let started = Instant::now();
    let ctx = FamilyContext::new(config);
    let mut evaluations = 0u64;
    let mut pool: Vec<SearchEntry> = Vec::new();

    match config.strategy {
        SearchStrategy::Exhaustive | SearchStrategy::Random => {
            let candidates: Vec<Vec<i64>> = match config.strategy {
                SearchStrategy::Exhaustive => {
                    enumerate_exhaustive(ctx.dimension(), config.height, config.budget)
                }
                SearchStrategy::Random => {
                    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
                    (0..config.budget)
                        .map(|_| random_vector(&mut rng, ctx.dimension(), config.height))
                        .collect()
                }
                SearchStrategy::HillClimb => unreachable!(),
            };
            evaluations = candidates.len() as u64;
            let results: Vec<Result<Evaluated>> = candidates
                .par_iter()
                .enumerate()
                .map(|(idx, coeffs)| evaluate_candidate(&ctx, config, coeffs, idx as u64))
                .collect();
            for r in results {
                pool.extend(r?.entries);
            }
        }
        SearchStrategy::HillClimb => {
            hill_climb(&ctx, config, &mut pool, &mut evaluations)?;
        }
    }

    // rank: ascending cleared magnitude, ties by candidate order then t
    pool.sort_by(|a, b| {
        a.key
            .cmp(&b.key)
            .then(a.candidate_index.cmp(&b.candidate_index))
            .then(a.t.cmp(&b.t))
    });
    pool.truncate(config.top_k);

    // every reported entry re-validates against the numeric oracle and the
    // denominator certificate
    for entry in &pool {
        let report = check_linear_form(&IntegrandSpec::new(entry.poly.clone(), entry.t), 1e-8)?;
        if !report.passed {
            return Err(Error::Internal(format!(
                "reported candidate failed oracle validation: {report}"
            )));
        }
        // the denominator theorem covers the simple-pole case; for t > 0 the
        // report records the empirical denominator instead
        if entry.t == 0 {
            let cert = denominator_certificate(&entry.poly, &entry.form)?;
            if !cert.holds() {
                return Err(Error::Internal(format!(
                    "reported candidate violates the denominator certificate: {}",
                    entry.poly
                )));
            }
        }
    }

    Ok(SearchReport {
        entries: pool,
        strategy: config.strategy,
        family: config.family,
        seed: config.seed,
        stats: SearchStats {
            evaluations,
            elapsed: started.elapsed(),
        },
    })
}

/// Coordinate-descent hill climbing with random restarts: from a seeded
/// start, evaluate all +-1 coordinate neighbors, move to the best strictly
/// improving one (ties broken by lexicographic coefficient order), restart
/// at a fresh random vector on local minima. The budget counts candidate
/// evaluations, including probes.
fn hill_climb(
    ctx: &FamilyContext,
    config: &SearchConfig,
    pool: &mut Vec<SearchEntry>,
    evaluations: &mut u64,
) -> Result<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let dim = ctx.dimension();
    let infinity = || BigInt::from(i64::MAX) * BigInt::from(i64::MAX);

    while *evaluations < config.budget {
        let mut current = random_vector(&mut rng, dim, config.height);
        let evaluated = evaluate_candidate(ctx, config, &current, *evaluations)?;
        *evaluations += 1;
        let mut current_obj = evaluated.best.clone().unwrap_or_else(infinity);
        pool.extend(evaluated.entries);

        loop {
            if *evaluations >= config.budget {
                return Ok(());
            }
            // generate neighbors in deterministic coordinate order
            let mut neighbors: Vec<Vec<i64>> = Vec::new();
            for coord in 0..dim {
                for delta in [1i64, -1] {
                    let mut n = current.clone();
                    n[coord] += delta;
                    if n[coord].abs() > config.height {
                        continue;
                    }
                    canonicalize(&mut n);
                    if n.iter().all(|&c| c == 0) {
                        continue;
                    }
                    neighbors.push(n);
                }
            }
            let remaining = (config.budget - *evaluations) as usize;
            neighbors.truncate(remaining);
            let base_index = *evaluations;
            let results: Vec<Result<Evaluated>> = neighbors
                .par_iter()
                .enumerate()
                .map(|(k, coeffs)| {
                    evaluate_candidate(ctx, config, coeffs, base_index + k as u64)
                })
                .collect();
            *evaluations += neighbors.len() as u64;

            let mut best_move: Option<(BigInt, Vec<i64>)> = None;
            for (coeffs, result) in neighbors.iter().zip(results) {
                let evaluated = result?;
                pool.extend(evaluated.entries);
                let obj = evaluated.best.unwrap_or_else(infinity);
                let candidate = (obj, coeffs.clone());
                best_move = Some(match best_move.take() {
                    None => candidate,
                    Some(best) => {
                        // strict key order, ties by lexicographic vector
                        if candidate.0 < best.0
                            || (candidate.0 == best.0 && candidate.1 < best.1)
                        {
                            candidate
                        } else {
                            best
                        }
                    }
                });
            }
            match best_move {
                Some((obj, coeffs)) if obj < current_obj => {
                    current = coeffs;
                    current_obj = obj;
                }
                _ => break, // local minimum: restart
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn symmetrized_squares() {
        let xy = QPoly::monomial(1, 1, rat(1, 1));
        assert_eq!(
            sigma_symmetrize_square(&xy).unwrap(),
            QPoly::monomial(2, 2, rat(4, 1))
        );
        assert_eq!(
            sigma_symmetrize_square(&QPoly::one()).unwrap(),
            QPoly::constant(rat(4, 1))
        );
        let x = QPoly::monomial(1, 0, rat(1, 1));
        assert_eq!(
            sigma_symmetrize_square(&x).unwrap(),
            QPoly::from_terms([(2, 0, rat(2, 1)), (0, 2, rat(2, 1))])
        );
        let half = QPoly::monomial(1, 0, rat(1, 2));
        assert!(matches!(
            sigma_symmetrize_square(&half),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn objective_on_table_entries() {
        let x2y2 = QPoly::monomial(2, 2, rat(1, 1));
        let (cleared, approx) = objective(&x2y2, 0).unwrap();
        assert!(cleared.starts_with("0.4957"), "{cleared}");
        assert!(approx.is_some());

        let x4y4 = QPoly::monomial(4, 4, rat(1, 1));
        let (cleared, _) = objective(&x4y4, 0).unwrap();
        assert!(cleared.starts_with("8.058"), "{cleared}");
        let (cleared, _) = objective(&x4y4, 2).unwrap();
        assert!(cleared.starts_with("0.4621"), "{cleared}");
    }

    #[test]
    fn objective_scaling_invariance() {
        let x2y2 = QPoly::monomial(2, 2, rat(1, 1));
        let scaled = x2y2.scale(&rat(9, 1)); // c = 3 squared
        assert_eq!(
            objective(&x2y2, 0).unwrap().0,
            objective(&scaled, 0).unwrap().0
        );
    }

    #[test]
    fn exhaustive_enumeration_is_sparse_first_and_canonical() {
        let candidates = enumerate_exhaustive(3, 1, 100);
        // 3 singletons, then pairs, then the full-support vectors
        assert_eq!(candidates[0], vec![1, 0, 0]);
        assert_eq!(candidates[1], vec![0, 1, 0]);
        assert_eq!(candidates[2], vec![0, 0, 1]);
        assert!(candidates.iter().all(|c| {
            c.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
        }));
        // budget zero means no candidates
        assert!(enumerate_exhaustive(3, 1, 0).is_empty());
    }

    #[test]
    fn empty_budget_gives_empty_report() {
        let config = SearchConfig {
            budget: 0,
            ..SearchConfig::default()
        };
        let report = run_search(&config).unwrap();
        assert!(report.entries.is_empty());
        assert_eq!(report.stats.evaluations, 0);
    }

    #[test]
    fn exhaustive_xy_generator_leads_the_ranking() {
        // height-1 singletons over degree-2 generators include H = xy, whose
        // symmetrized square is 4 x^2 y^2; at t = 0 its primitive cleared
        // form is -5 + 6G, magnitude ~0.496
        let config = SearchConfig {
            max_degree: 4,
            t_min: 0,
            t_max: 0,
            strategy: SearchStrategy::Exhaustive,
            budget: 6,
            seed: 0,
            workers: 1,
            height: 1,
            top_k: 3,
            family: CandidateFamily::SymmetrizedSquares,
        };
        let report = run_search(&config).unwrap();
        assert!(!report.entries.is_empty());
        let best = &report.entries[0];
        assert_eq!((best.p.clone(), best.q.clone()), (BigInt::from(-5), BigInt::from(6)));
        assert!(best.cleared_abs.starts_with("0.4957"));
    }
}
