//! `catalan` — exact linear forms in 1 and Catalan's constant from simplex
//! integrals of bivariate polynomials, with numeric verification and a
//! candidate search.

mod parse;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use catalan_core::bipoly::QPoly;
use catalan_core::exact::{linear_form_decimal, rat, LinearForm, Rational};
use catalan_core::linform::denominator_certificate;
use catalan_core::oracle;
use catalan_core::reduction::{
    cleared_form, linear_form, linear_form_integrable, IntegrandSpec,
};
use catalan_core::search::{
    run_search, CandidateFamily, SearchConfig, SearchReport, SearchStrategy,
};
use parse::PolyExpr;

#[derive(Parser)]
#[command(
    name = "catalan",
    version,
    about = "Exact linear forms a + b*G in Catalan's constant from integrals of F/(1-x^2-y^2)^(t+1) over the simplex"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Direct pole reduction; requires x^(2 ceil(t/2)) y^(2 ceil(t/2)) | F.
    Theorem1,
    /// General pipeline for any integrable F (default).
    Integrable,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the exact linear form a + b*G of F/(1-x^2-y^2)^(t+1)
    Eval {
        /// Polynomial in x, y, e.g. "x^2*y^2" or "(1-x-y)*(1-x+y)*(1+x-y)*(1+x+y)"
        #[arg(long)]
        poly: String,
        /// Pole order: the integrand denominator is g^(t+1)
        #[arg(long)]
        t: u32,
        #[arg(long, value_enum, default_value_t = Mode::Integrable)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check the exact value against adaptive quadrature
    Verify {
        #[arg(long, required_unless_present = "suite")]
        poly: Option<String>,
        #[arg(long, required_unless_present = "suite")]
        t: Option<u32>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Fractional digits shown for the exact value
        #[arg(long, default_value_t = 30)]
        digits: usize,
        /// Run the built-in regression suite instead of a single input
        #[arg(long)]
        suite: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the three reference linear forms with cleared integer forms
    Table,
    /// Print Catalan's constant to the requested number of digits
    Catalan {
        #[arg(long)]
        digits: usize,
    },
    /// Verify the five simplex periods of the de Rham basis by quadrature
    PeriodCheck {
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Search integer polynomial families for small cleared forms p + q*G
    Search {
        /// Even bound on the total degree of the evaluated polynomial
        #[arg(long = "max-deg")]
        max_deg: u32,
        #[arg(long = "t-min", default_value_t = 0)]
        t_min: u32,
        #[arg(long = "t-max", default_value_t = 2)]
        t_max: u32,
        /// exhaustive | random | hillclimb
        #[arg(long, default_value = "exhaustive")]
        strategy: String,
        /// Maximum number of candidate generators evaluated
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        /// Write the report to FILE.csv or FILE.json
        #[arg(long)]
        out: Option<PathBuf>,
        /// Coefficient height bound for generators
        #[arg(long, default_value_t = 1)]
        height: i64,
        /// Number of ranked entries reported
        #[arg(long, default_value_t = 10)]
        top: usize,
        /// squares | sigma-basis
        #[arg(long, default_value = "squares")]
        family: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), String> {
    match command {
        Command::Eval {
            poly,
            t,
            mode,
            format,
        } => eval_command(&poly, t, mode, format),
        Command::Verify {
            poly,
            t,
            tol,
            digits,
            suite,
            threads,
        } => {
            if suite {
                with_threads(threads, || verify_suite(tol))
            } else {
                let poly = poly.expect("clap enforces");
                let t = t.expect("clap enforces");
                verify_single(&poly, t, tol, digits)
            }
        }
        Command::Table => table_command(),
        Command::Catalan { digits } => {
            println!("{}", oracle::catalan(digits).map_err(stringify)?);
            Ok(())
        }
        Command::PeriodCheck { tol } => period_check_command(tol),
        Command::Search {
            max_deg,
            t_min,
            t_max,
            strategy,
            budget,
            seed,
            threads,
            out,
            height,
            top,
            family,
        } => {
            let config = SearchConfig {
                max_degree: max_deg,
                t_min,
                t_max,
                strategy: strategy.parse::<SearchStrategy>().map_err(stringify)?,
                budget,
                seed,
                workers: threads.unwrap_or(0),
                height,
                top_k: top,
                family: family.parse::<CandidateFamily>().map_err(stringify)?,
            };
            search_command(&config, out.as_deref())
        }
    }
}

fn stringify(e: catalan_core::Error) -> String {
    e.to_string()
}

fn parse_input(poly: &str) -> Result<(PolyExpr, QPoly), String> {
    let parsed = PolyExpr::parse(poly).map_err(|e| e.to_string())?;
    let bipoly = parsed.to_bipoly();
    // the AST and the constructed polynomial must agree pointwise
    let (px, py) = (rat(2, 7), rat(-3, 5));
    if parsed.eval(&px, &py) != bipoly.eval(&px, &py) {
        return Err("internal consistency error: expression evaluation mismatch".into());
    }
    Ok((parsed, bipoly))
}

fn with_threads(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<(), String> + Send,
) -> Result<(), String> {
    match threads {
        None | Some(0) => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| e.to_string())?
            .install(f),
    }
}

const EVAL_DIGITS: usize = 30;

fn rational_json(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn eval_form(poly: &QPoly, t: u32, mode: Mode) -> Result<LinearForm, String> {
    let spec = IntegrandSpec::new(poly.clone(), t);
    match mode {
        Mode::Theorem1 => linear_form(&spec).map_err(stringify),
        Mode::Integrable => linear_form_integrable(&spec).map_err(stringify),
    }
}

fn eval_command(poly_text: &str, t: u32, mode: Mode, format: Format) -> Result<(), String> {
    let (parsed, poly) = parse_input(poly_text)?;
    let form = eval_form(&poly, t, mode)?;
    let decimal = linear_form_decimal(&form, EVAL_DIGITS).map_err(stringify)?;
    let cleared = cleared_form(&form).map_err(stringify)?;
    // the denominator theorem covers integer simple-pole forms only
    let certificate = if t == 0 && !poly.is_zero() && poly.terms().all(|(_, c)| c.is_integer()) {
        Some(denominator_certificate(&poly, &form).map_err(stringify)?)
    } else {
        None
    };

    match format {
        Format::Json => {
            let cert_json = match &certificate {
                Some(c) => json!({"N": c.degree, "a_ok": c.a_ok, "b_ok": c.b_ok}),
                None => serde_json::Value::Null,
            };
            let payload = json!({
                "poly": parsed.source,
                "t": t,
                "a": rational_json(&form.a),
                "b": rational_json(&form.b),
                "decimal": decimal,
                "digits": EVAL_DIGITS,
                "cleared": {
                    "p": cleared.p.to_string(),
                    "q": cleared.q.to_string(),
                    "value": cleared.value,
                },
                "certificate": cert_json,
            });
            println!("{}", serde_json::to_string_pretty(&payload).expect("json"));
        }
        Format::Text => {
            println!("F = {}", parsed.render());
            println!("expanded: {}", poly);
            println!("t = {t} (denominator g^{})", t + 1);
            println!("a = {}", form.a);
            println!("b = {}", form.b);
            println!("a + b*G = {decimal}");
            println!(
                "cleared: {} + {}*G = {} (lcd {})",
                cleared.p, cleared.q, cleared.value, cleared.denominator
            );
            if let Some(c) = certificate {
                println!(
                    "certificate: N = {}, 2^N*b integer: {}, 2^(N+3)*L_N*L_(N/2)*a integer: {}",
                    c.degree, c.b_ok, c.a_ok
                );
            }
        }
    }
    Ok(())
}

fn verify_single(poly_text: &str, t: u32, tol: f64, digits: usize) -> Result<(), String> {
    let (_, poly) = parse_input(poly_text)?;
    let spec = IntegrandSpec::new(poly, t);
    let report = oracle::check_linear_form(&spec, tol).map_err(stringify)?;
    let exact = report.exact.as_ref().expect("linear form present");
    println!("exact:      a = {}, b = {}", exact.a, exact.b);
    println!(
        "decimal:    {}",
        linear_form_decimal(exact, digits).map_err(stringify)?
    );
    println!("quadrature: {:.17}", report.numeric);
    println!(
        "|error| = {:.3e} (tolerance {:.1e}): {}",
        report.abs_error,
        report.tolerance,
        if report.passed { "pass" } else { "FAIL" }
    );
    if report.passed {
        Ok(())
    } else {
        Err("verification failed".into())
    }
}

fn verify_suite(tol: f64) -> Result<(), String> {
    use rayon::prelude::*;
    let suite = catalan_core::corpus::regression_suite();
    let results: Vec<_> = suite
        .par_iter()
        .map(|(name, spec)| (name, oracle::check_linear_form(spec, tol)))
        .collect();
    let mut failures = 0;
    for (name, result) in results {
        match result {
            Ok(report) => {
                println!(
                    "{} {name}: |err| = {:.3e}",
                    if report.passed { "pass" } else { "FAIL" },
                    report.abs_error
                );
                if !report.passed {
                    failures += 1;
                }
            }
            Err(e) => {
                println!("FAIL {name}: {e}");
                failures += 1;
            }
        }
    }
    if failures == 0 {
        Ok(())
    } else {
        Err(format!("{failures} suite entries failed"))
    }
}

fn table_command() -> Result<(), String> {
    let entries: [(&str, u32); 3] = [("x^2*y^2", 0), ("x^4*y^4", 0), ("x^4*y^4", 2)];
    println!(
        "{:<10} {:>2}  {:<14} {:<8} {:<15} {:<16} {}",
        "F", "t", "a", "b", "cleared", "value", "|cleared|"
    );
    for (poly_text, t) in entries {
        let (_, poly) = parse_input(poly_text)?;
        let form = linear_form(&IntegrandSpec::new(poly, t)).map_err(stringify)?;
        let cleared = cleared_form(&form).map_err(stringify)?;
        let decimal = linear_form_decimal(&form, 12).map_err(stringify)?;
        let magnitude = cleared.value.trim_start_matches('-');
        println!(
            "{:<10} {:>2}  {:<14} {:<8} {:<15} {:<16} {}",
            poly_text,
            t,
            form.a.to_string(),
            form.b.to_string(),
            format!("{} + {}*G", cleared.p, cleared.q),
            decimal,
            magnitude
        );
    }
    Ok(())
}

fn period_check_command(tol: f64) -> Result<(), String> {
    let reports = oracle::period_matrix_check(tol).map_err(stringify)?;
    let mut failures = 0;
    for report in &reports {
        println!("{report}");
        if !report.passed {
            failures += 1;
        }
    }
    if failures == 0 {
        Ok(())
    } else {
        Err(format!("{failures} period checks failed"))
    }
}

fn search_command(config: &SearchConfig, out: Option<&Path>) -> Result<(), String> {
    let report = run_search(config).map_err(stringify)?;
    println!(
        "strategy {} over family {} (seed {}): {} evaluations in {:.2?}",
        report.strategy.name(),
        report.family.name(),
        report.seed,
        report.stats.evaluations,
        report.stats.elapsed
    );
    println!(
        "{:<4} {:<16} {:>2}  {:<22} {:<16} {}",
        "rank", "|p + q*G|", "t", "cleared", "lcd", "F"
    );
    for (rank, entry) in report.entries.iter().enumerate() {
        println!(
            "{:<4} {:<16} {:>2}  {:<22} {:<16} {}",
            rank + 1,
            entry.cleared_abs,
            entry.t,
            format!("{} + {}*G", entry.p, entry.q),
            entry.denominator.to_string(),
            entry.poly
        );
    }
    if let Some(path) = out {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => std::fs::write(path, report_csv(&report)).map_err(|e| e.to_string())?,
            Some("json") => {
                std::fs::write(path, report_json(&report)).map_err(|e| e.to_string())?
            }
            _ => return Err("output file must end in .csv or .json".into()),
        }
        println!("report written to {}", path.display());
    }
    Ok(())
}

/// Serialized reports carry only deterministic fields, so identical
/// configurations produce byte-identical files at any thread count.
fn report_json(report: &SearchReport) -> String {
    let entries: Vec<_> = report
        .entries
        .iter()
        .enumerate()
        .map(|(rank, e)| {
            json!({
                "rank": rank + 1,
                "poly": e.poly.to_string(),
                "t": e.t,
                "a": rational_json(&e.form.a),
                "b": rational_json(&e.form.b),
                "p": e.p.to_string(),
                "q": e.q.to_string(),
                "cleared_abs": e.cleared_abs,
                "approx_error": e.approx_error,
                "denominator": e.denominator.to_string(),
            })
        })
        .collect();
    let payload = json!({
        "strategy": report.strategy.name(),
        "family": report.family.name(),
        "seed": report.seed,
        "evaluations": report.stats.evaluations,
        "entries": entries,
    });
    let mut text = serde_json::to_string_pretty(&payload).expect("json");
    text.push('\n');
    text
}

fn report_csv(report: &SearchReport) -> String {
    let mut out = String::from("rank,poly,t,a,b,p,q,cleared_abs,approx_error,denominator\n");
    for (rank, e) in report.entries.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},\"{}\",{},{},{},{},{},{},{},{}",
            rank + 1,
            e.poly,
            e.t,
            rational_json(&e.form.a),
            rational_json(&e.form.b),
            e.p,
            e.q,
            e.cleared_abs,
            e.approx_error.as_deref().unwrap_or(""),
            e.denominator
        );
    }
    out
}
