//! Recursive-descent parser for polynomial expressions in `x`, `y` with
//! exact rational literals.
//!
//! Grammar (whitespace insignificant, juxtaposition is not multiplication):
//!
//! ```text
//! expr   := term { ("+"|"-") term }
//! term   := factor { "*" factor }
//! factor := ["-"] base [ "^" nat ]
//! base   := "x" | "y" | rat | "(" expr ")"
//! rat    := nat [ "/" nat ]
//! nat    := digit { digit }
//! ```

use std::fmt;

use catalan_core::bipoly::QPoly;
use catalan_core::exact::Rational;
use num_bigint::BigInt;

/// Syntax error with a 1-based column.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at column {}: {}", self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Neg(Box<Expr>),
    Lit(Rational),
    Var(Var),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// A parsed polynomial expression: the original source and its AST.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyExpr {
    pub source: String,
    pub ast: Expr,
}

impl PolyExpr {
    pub fn parse(text: &str) -> Result<PolyExpr, ParseError> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens, pos: 0 };
        let ast = parser.expr()?;
        if let Some(tok) = parser.peek() {
            return Err(ParseError {
                column: tok.column,
                message: format!("unexpected `{}`", tok.kind.describe()),
            });
        }
        Ok(PolyExpr {
            source: text.to_string(),
            ast,
        })
    }

    /// Canonical rendering; parsing it back yields the same AST.
    pub fn render(&self) -> String {
        render(&self.ast, 0)
    }

    pub fn to_bipoly(&self) -> QPoly {
        to_bipoly(&self.ast)
    }

    /// Evaluates the AST directly at a rational point (used to cross-check
    /// the constructed polynomial).
    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        eval(&self.ast, x, y)
    }
}

fn to_bipoly(expr: &Expr) -> QPoly {
    match expr {
        Expr::Add(l, r) => to_bipoly(l).add(&to_bipoly(r)),
        Expr::Sub(l, r) => to_bipoly(l).sub(&to_bipoly(r)),
        Expr::Mul(l, r) => to_bipoly(l).mul(&to_bipoly(r)),
        Expr::Pow(b, e) => to_bipoly(b).pow(*e),
        Expr::Neg(e) => to_bipoly(e).neg(),
        Expr::Lit(r) => QPoly::constant(r.clone()),
        Expr::Var(Var::X) => QPoly::monomial(1, 0, Rational::one()),
        Expr::Var(Var::Y) => QPoly::monomial(0, 1, Rational::one()),
    }
}

fn eval(expr: &Expr, x: &Rational, y: &Rational) -> Rational {
    match expr {
        Expr::Add(l, r) => &eval(l, x, y) + &eval(r, x, y),
        Expr::Sub(l, r) => &eval(l, x, y) - &eval(r, x, y),
        Expr::Mul(l, r) => &eval(l, x, y) * &eval(r, x, y),
        Expr::Pow(b, e) => eval(b, x, y).pow(*e),
        Expr::Neg(e) => -eval(e, x, y),
        Expr::Lit(r) => r.clone(),
        Expr::Var(Var::X) => x.clone(),
        Expr::Var(Var::Y) => y.clone(),
    }
}

// precedence levels: 1 add/sub, 2 mul, 3 unary minus, 4 power, 5 atom
fn level(expr: &Expr) -> u8 {
    match expr {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        Expr::Lit(r) if r.is_negative() => 3,
        Expr::Lit(_) | Expr::Var(_) => 5,
    }
}

fn render(expr: &Expr, _depth: u8) -> String {
    match expr {
        Expr::Add(l, r) => {
            let rs = paren_if(r, |e| level(e) <= 1);
            format!("{} + {}", render(l, 0), rs)
        }
        Expr::Sub(l, r) => {
            let rs = paren_if(r, |e| level(e) <= 1);
            format!("{} - {}", render(l, 0), rs)
        }
        Expr::Mul(l, r) => {
            let ls = paren_if(l, |e| level(e) < 2);
            let rs = paren_if(r, |e| level(e) <= 2);
            format!("{ls}*{rs}")
        }
        Expr::Pow(b, e) => {
            let bs = paren_if(b, |x| level(x) < 5);
            format!("{bs}^{e}")
        }
        Expr::Neg(e) => {
            // after unary minus the grammar expects a base
            let es = paren_if(e, |x| level(x) < 4);
            format!("-{es}")
        }
        Expr::Lit(r) => {
            if r.is_negative() {
                format!("({r})")
            } else {
                r.to_string()
            }
        }
        Expr::Var(Var::X) => "x".to_string(),
        Expr::Var(Var::Y) => "y".to_string(),
    }
}

fn paren_if(expr: &Expr, needs: impl Fn(&Expr) -> bool) -> String {
    let s = render(expr, 0);
    if needs(expr) {
        format!("({s})")
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Number(BigInt),
    X,
    Y,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Plus => "+".into(),
            TokenKind::Minus => "-".into(),
            TokenKind::Star => "*".into(),
            TokenKind::Slash => "/".into(),
            TokenKind::Caret => "^".into(),
            TokenKind::LParen => "(".into(),
            TokenKind::RParen => ")".into(),
            TokenKind::Number(n) => n.to_string(),
            TokenKind::X => "x".into(),
            TokenKind::Y => "y".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let column = i + 1;
        let c = chars[i];
        let kind = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '*' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '^' => TokenKind::Caret,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            'x' => TokenKind::X,
            'y' => TokenKind::Y,
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                tokens.push(Token {
                    kind: TokenKind::Number(digits.parse().expect("digits")),
                    column,
                });
                continue;
            }
            other => {
                return Err(ParseError {
                    column,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        tokens.push(Token { kind, column });
        i += 1;
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn end_column(&self) -> usize {
        self.tokens
            .last()
            .map(|t| t.column + t.kind.describe().len())
            .unwrap_or(1)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok.kind {
                TokenKind::Plus => {
                    self.advance();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                TokenKind::Minus => {
                    self.advance();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        while let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Star {
                self.advance();
                acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let negated = matches!(self.peek(), Some(t) if t.kind == TokenKind::Minus);
        if negated {
            self.advance();
        }
        let base = self.base()?;
        let powered = if matches!(self.peek(), Some(t) if t.kind == TokenKind::Caret) {
            self.advance();
            let exp = self.nat_u32()?;
            Expr::Pow(Box::new(base), exp)
        } else {
            base
        };
        Ok(if negated {
            Expr::Neg(Box::new(powered))
        } else {
            powered
        })
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.advance() else {
            return Err(ParseError {
                column: self.end_column(),
                message: "expected `x`, `y`, a number, or `(`".into(),
            });
        };
        match tok.kind {
            TokenKind::X => Ok(Expr::Var(Var::X)),
            TokenKind::Y => Ok(Expr::Var(Var::Y)),
            TokenKind::Number(num) => {
                if matches!(self.peek(), Some(t) if t.kind == TokenKind::Slash) {
                    self.advance();
                    let den_col = self.peek().map(|t| t.column).unwrap_or(self.end_column());
                    let den = self.nat_bigint()?;
                    if den == BigInt::from(0) {
                        return Err(ParseError {
                            column: den_col,
                            message: "zero denominator".into(),
                        });
                    }
                    Ok(Expr::Lit(Rational::new(num, den)))
                } else {
                    Ok(Expr::Lit(Rational::from_integer(num)))
                }
            }
            TokenKind::LParen => {
                let inner = self.expr()?;
                match self.advance() {
                    Some(t) if t.kind == TokenKind::RParen => Ok(inner),
                    Some(t) => Err(ParseError {
                        column: t.column,
                        message: format!("expected `)`, found `{}`", t.kind.describe()),
                    }),
                    None => Err(ParseError {
                        column: self.end_column(),
                        message: "expected `)`".into(),
                    }),
                }
            }
            other => Err(ParseError {
                column: tok.column,
                message: format!(
                    "expected `x`, `y`, a number, or `(`, found `{}`",
                    other.describe()
                ),
            }),
        }
    }

    fn nat_bigint(&mut self) -> Result<BigInt, ParseError> {
        match self.advance() {
            Some(Token {
                kind: TokenKind::Number(n),
                ..
            }) => Ok(n),
            Some(t) => Err(ParseError {
                column: t.column,
                message: format!(
                    "expected a nonnegative integer, found `{}`",
                    t.kind.describe()
                ),
            }),
            None => Err(ParseError {
                column: self.end_column(),
                message: "expected a nonnegative integer".into(),
            }),
        }
    }

    fn nat_u32(&mut self) -> Result<u32, ParseError> {
        let col = self.peek().map(|t| t.column).unwrap_or(self.end_column());
        let n = self.nat_bigint()?;
        u32::try_from(&n).map_err(|_| ParseError {
            column: col,
            message: format!("exponent {n} is too large"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use catalan_core::exact::rat;

    fn parse_poly(text: &str) -> Result<QPoly, ParseError> {
        Ok(PolyExpr::parse(text)?.to_bipoly())
    }

    #[test]
    fn parses_monomials_and_quartic() {
        assert_eq!(
            parse_poly("x^2*y^2").unwrap(),
            QPoly::monomial(2, 2, rat(1, 1))
        );
        let quartic = parse_poly("(1-x-y)*(1-x+y)*(1+x-y)*(1+x+y)").unwrap();
        let g = QPoly::circle_g();
        assert_eq!(
            quartic,
            g.pow(2).sub(&QPoly::monomial(2, 2, rat(4, 1)))
        );
    }

    #[test]
    fn rejects_negative_exponent() {
        let err = PolyExpr::parse("x^-1").unwrap_err();
        assert_eq!(err.column, 3);
        let err = PolyExpr::parse("x^(2)").unwrap_err();
        assert_eq!(err.column, 3);
    }

    #[test]
    fn rejects_juxtaposition() {
        let err = PolyExpr::parse("2x").unwrap_err();
        assert_eq!(err.column, 2);
        assert!(PolyExpr::parse("x y").is_err());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(
            parse_poly("5/7").unwrap(),
            QPoly::constant(rat(5, 7))
        );
        assert_eq!(
            parse_poly("1/2*x + 1/2*x").unwrap(),
            QPoly::monomial(1, 0, rat(1, 1))
        );
        let err = PolyExpr::parse("1/0").unwrap_err();
        assert_eq!(err.column, 3);
    }

    #[test]
    fn unary_minus_binds_to_the_factor() {
        // -x^2 is -(x^2)
        assert_eq!(
            parse_poly("-x^2").unwrap(),
            QPoly::monomial(2, 0, rat(-1, 1))
        );
        assert_eq!(parse_poly("-2*x").unwrap(), QPoly::monomial(1, 0, rat(-2, 1)));
    }

    #[test]
    fn render_parse_is_a_fixpoint() {
        for src in [
            "x^2*y^2",
            "(1-x-y)*(1-x+y)*(1+x-y)*(1+x+y)",
            "-x^2 + 5/7*y - (x - y)*(x + y)",
            "1 - 2*(3 - x)^4",
            "-(x + y)^2*x",
        ] {
            let parsed = PolyExpr::parse(src).unwrap();
            let rendered = parsed.render();
            let reparsed = PolyExpr::parse(&rendered).unwrap();
            assert_eq!(parsed.ast, reparsed.ast, "{src} -> {rendered}");
            assert_eq!(reparsed.render(), rendered);
        }
    }

    #[test]
    fn ast_eval_matches_bipoly_eval() {
        let samples = [
            "x^2*y^2 - 1/3",
            "(x + 2*y)^3 - x*y",
            "-(1 - x)^2*(1 + y)",
        ];
        let points = [(rat(1, 2), rat(1, 3)), (rat(-2, 1), rat(3, 5)), (rat(0, 1), rat(7, 4))];
        for src in samples {
            let parsed = PolyExpr::parse(src).unwrap();
            let poly = parsed.to_bipoly();
            for (px, py) in &points {
                assert_eq!(parsed.eval(px, py), poly.eval(px, py), "{src}");
            }
        }
    }
}
