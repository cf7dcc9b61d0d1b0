//! Text grammar for polynomials:
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := int | ident | '(' expr ')'
//! ident  := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! Variables are numbered in order of first appearance unless a fixed
//! variable list is supplied.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::bipoly::BiPoly;
use crate::multipoly::{Exp, MultiPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, msg: msg.into() }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn next_token(&mut self) -> Result<Token, ParseError> {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.bump();
        }
        let c = match self.peek() {
            None => return Ok(Token::End),
            Some(c) => c,
        };
        match c {
            b'+' => {
                self.bump();
                Ok(Token::Plus)
            }
            b'-' => {
                self.bump();
                Ok(Token::Minus)
            }
            b'*' => {
                self.bump();
                Ok(Token::Star)
            }
            b'^' => {
                self.bump();
                Ok(Token::Caret)
            }
            b'(' => {
                self.bump();
                Ok(Token::LParen)
            }
            b')' => {
                self.bump();
                Ok(Token::RParen)
            }
            b'0'..=b'9' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Token::Int(s.parse().unwrap()))
            }
            c if c.is_ascii_alphabetic() => {
                let start = self.pos;
                self.bump();
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.bump();
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Token::Ident(s.to_string()))
            }
            c => Err(self.error(format!("unexpected character '{}'", c as char))),
        }
    }
}

/// A term under construction: coefficient and (variable, exponent) pairs.
type RawTerm = (BigInt, Vec<(usize, Exp)>);

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Token,
    tok_line: usize,
    tok_col: usize,
    vars: Vec<String>,
    fixed_vars: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, vars: Option<&[String]>) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (l, c) = (lexer.line, lexer.col);
        let tok = lexer.next_token()?;
        Ok(Parser {
            lexer,
            tok,
            tok_line: l,
            tok_col: c,
            vars: vars.map(|v| v.to_vec()).unwrap_or_default(),
            fixed_vars: vars.is_some(),
        })
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError { line: self.tok_line, col: self.tok_col, msg: msg.into() }
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        self.tok_line = self.lexer.line;
        self.tok_col = self.lexer.col;
        self.tok = self.lexer.next_token()?;
        Ok(())
    }

    fn var_index(&mut self, name: &str) -> Result<usize, ParseError> {
        if let Some(i) = self.vars.iter().position(|v| v == name) {
            return Ok(i);
        }
        if self.fixed_vars {
            return Err(self.error(format!("unknown variable '{name}'")));
        }
        self.vars.push(name.to_string());
        Ok(self.vars.len() - 1)
    }

    // A polynomial under construction: list of (coeff, var -> exp) pairs.
    fn expr(&mut self) -> Result<Vec<RawTerm>, ParseError> {
        let mut sign = BigInt::one();
        if self.tok == Token::Minus {
            sign = -sign;
            self.advance()?;
        } else if self.tok == Token::Plus {
            self.advance()?;
        }
        let mut acc = scale(self.term()?, &sign);
        loop {
            let sign = match self.tok {
                Token::Plus => BigInt::one(),
                Token::Minus => -BigInt::one(),
                _ => break,
            };
            self.advance()?;
            acc.extend(scale(self.term()?, &sign));
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Vec<RawTerm>, ParseError> {
        let mut acc = self.factor()?;
        while self.tok == Token::Star {
            self.advance()?;
            let rhs = self.factor()?;
            acc = multiply(acc, rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Vec<RawTerm>, ParseError> {
        let base = self.base()?;
        if self.tok == Token::Caret {
            self.advance()?;
            let e = match &self.tok {
                Token::Int(n) => {
                    let e: Exp = n
                        .try_into()
                        .map_err(|_| self.error("exponent overflow"))?;
                    if e as u64 >= (1 << 31) {
                        return Err(self.error("exponent overflow"));
                    }
                    e
                }
                _ => return Err(self.error("expected integer exponent after '^'")),
            };
            self.advance()?;
            if base.len() == 1 {
                let (c, ve) = &base[0];
                let pe = ve.iter().map(|&(v, k)| (v, k * e)).collect();
                return Ok(vec![(c.pow(e), pe)]);
            }
            let mut acc = vec![(BigInt::one(), Vec::new())];
            for _ in 0..e {
                acc = merge_like_terms(multiply(acc, base.clone()));
                if acc.len() > 1_000_000 {
                    return Err(self.error("expression expansion too large"));
                }
            }
            Ok(acc)
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Vec<RawTerm>, ParseError> {
        match self.tok.clone() {
            Token::Int(n) => {
                self.advance()?;
                Ok(vec![(n, Vec::new())])
            }
            Token::Ident(name) => {
                self.advance()?;
                let i = self.var_index(&name)?;
                Ok(vec![(BigInt::one(), vec![(i, 1)])])
            }
            Token::LParen => {
                self.advance()?;
                let e = self.expr()?;
                if self.tok != Token::RParen {
                    return Err(self.error("expected ')'"));
                }
                self.advance()?;
                Ok(e)
            }
            _ => Err(self.error("expected integer, variable, or '('")),
        }
    }
}

fn scale(terms: Vec<RawTerm>, s: &BigInt) -> Vec<RawTerm> {
    if s.is_one() {
        return terms;
    }
    terms.into_iter().map(|(c, e)| (c * s, e)).collect()
}

fn multiply(a: Vec<RawTerm>, b: Vec<RawTerm>) -> Vec<RawTerm> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for (ca, ea) in &a {
        for (cb, eb) in &b {
            let mut e = ea.clone();
            for &(v, k) in eb {
                match e.iter_mut().find(|(w, _)| *w == v) {
                    Some((_, x)) => *x += k,
                    None => e.push((v, k)),
                }
            }
            out.push((ca * cb, e));
        }
    }
    out
}

fn merge_like_terms(terms: Vec<RawTerm>) -> Vec<RawTerm> {
    let mut norm: Vec<(Vec<(usize, Exp)>, BigInt)> = Vec::new();
    for (c, mut e) in terms {
        e.sort();
        e.retain(|&(_, k)| k > 0);
        match norm.iter_mut().find(|(k, _)| *k == e) {
            Some((_, acc)) => *acc += c,
            None => norm.push((e, c)),
        }
    }
    norm.retain(|(_, c)| !c.is_zero());
    norm.into_iter().map(|(e, c)| (c, e)).collect()
}

fn build_multipoly(vars: Vec<String>, terms: Vec<RawTerm>) -> MultiPoly {
    let n = vars.len();
    let raw = terms
        .into_iter()
        .map(|(c, e)| {
            let mut exps = vec![0; n];
            for (v, k) in e {
                exps[v] += k;
            }
            (c, exps)
        })
        .collect();
    MultiPoly::from_terms(vars, raw)
}

/// Parse an expression; variables are ordered by first appearance.
pub fn parse_multipoly(src: &str) -> Result<MultiPoly, ParseError> {
    let mut p = Parser::new(src, None)?;
    let terms = p.expr()?;
    if p.tok != Token::End {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(build_multipoly(p.vars.clone(), terms))
}

/// Parse over a fixed variable list; unknown identifiers are errors.
pub fn parse_multipoly_with_vars(src: &str, vars: &[String]) -> Result<MultiPoly, ParseError> {
    let mut p = Parser::new(src, Some(vars))?;
    let terms = p.expr()?;
    if p.tok != Token::End {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(build_multipoly(vars.to_vec(), terms))
}

/// Parse a bivariate polynomial over the fixed variables `x` and `t`.
pub fn parse_bipoly(src: &str) -> Result<BiPoly, ParseError> {
    let vars = vec!["x".to_string(), "t".to_string()];
    let p = parse_multipoly_with_vars(src, &vars)?;
    Ok(multi_to_bi(&p))
}

fn multi_to_bi(p: &MultiPoly) -> BiPoly {
    let raw = p
        .terms()
        .iter()
        .map(|(c, e)| (e[0], e[1], c.clone()))
        .collect();
    BiPoly::from_terms(raw)
}

/// Canonical text form: terms in canonical order, explicit `*` products,
/// `^` powers, no redundant unit coefficients.
pub fn format_multipoly(p: &MultiPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (c, exps)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push(if neg { '-' } else { '+' });
        }
        let abs = c.abs();
        let mut parts: Vec<String> = Vec::new();
        if !abs.is_one() || exps.iter().all(|&e| e == 0) {
            parts.push(abs.to_string());
        }
        for (v, &e) in p.vars().iter().zip(exps.iter()) {
            if e == 1 {
                parts.push(v.clone());
            } else if e > 1 {
                parts.push(format!("{v}^{e}"));
            }
        }
        out.push_str(&parts.join("*"));
    }
    out
}

/// Canonical text form of a bivariate polynomial, in variables `x` and `t`.
pub fn format_bipoly(f: &BiPoly) -> String {
    let vars = vec!["x".to_string(), "t".to_string()];
    let raw = f
        .terms()
        .iter()
        .map(|(x, t, c)| (c.clone(), vec![*x, *t]))
        .collect();
    format_multipoly(&MultiPoly::from_terms(vars, raw))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_simple() {
        let p = parse_multipoly("x^2-1").unwrap();
        assert_eq!(p.vars(), ["x".to_string()]);
        assert_eq!(format_multipoly(&p), "x^2-1");
    }

    #[test]
    fn parse_rejects_double_caret() {
        assert!(parse_multipoly("x^^2").is_err());
    }

    #[test]
    fn parse_parenthesized_powers() {
        let p = parse_multipoly("(x+1)^3").unwrap();
        assert_eq!(format_multipoly(&p), "x^3+3*x^2+3*x+1");
    }

    #[test]
    fn variables_in_first_appearance_order() {
        let p = parse_multipoly("b*a+a^2").unwrap();
        assert_eq!(p.vars(), ["b".to_string(), "a".to_string()]);
    }

    #[test]
    fn format_parse_round_trip_random() {
        use num_bigint::BigInt;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        for _ in 0..1000 {
            let raw: Vec<_> = (0..rng.random_range(1..8))
                .map(|_| {
                    (
                        BigInt::from(rng.random_range(-50i64..=50)),
                        vec![
                            rng.random_range(0..5u32),
                            rng.random_range(0..5),
                            rng.random_range(0..5),
                        ],
                    )
                })
                .collect();
            let p = MultiPoly::from_terms(vars.clone(), raw);
            let text = format_multipoly(&p);
            let q = parse_multipoly(&text).unwrap();
            assert_eq!(q.align_vars(&vars).unwrap(), p, "round trip failed for {text}");
        }
    }

    #[test]
    fn bipoly_round_trip() {
        let f = parse_bipoly("2*x^2*t-3*t^5+1").unwrap();
        assert_eq!(parse_bipoly(&format_bipoly(&f)).unwrap(), f);
    }
}
