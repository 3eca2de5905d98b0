use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::lexer::{lex, Tok, Token};
use super::{EquationAst, ParseError, ParseErrorKind, TExprAst, MAX_ORDER, MAX_TPOW};

const TERM: &[&str] = &["number", "'T'", "'T<k>'", "'y'"];
const FACTOR: &[&str] = &["number", "'t^a'", "'exp'", "'sin'", "'cos'", "'('", "'-'"];

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].offset
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError::new(
            self.offset(),
            ParseErrorKind::Unexpected {
                found: self.peek().describe(),
                expected: expected.to_vec(),
            },
        )
    }

    fn expect(&mut self, tok: &Tok, name: &'static str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == name)
    }

    fn expect_ident(&mut self, name: &'static str, label: &'static str) -> Result<(), ParseError> {
        if self.is_ident(name) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[label]))
        }
    }

    fn integer(&mut self) -> Result<(u32, usize), ParseError> {
        let at = self.offset();
        match *self.peek() {
            Tok::Num(x) if x >= 0.0 && crate::math::floor(x) == x && x <= f64::from(u32::MAX) => {
                self.bump();
                Ok((x as u32, at))
            }
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    pub(crate) fn equation(mut self) -> Result<EquationAst, ParseError> {
        let lhs_start = self.offset();
        let lhs = self.lhs()?;
        self.expect(&Tok::Eq, "'='")?;
        let rhs = if *self.peek() == Tok::End {
            return Err(self.unexpected(&["'0'", "forcing expression"]));
        } else {
            self.expr()?
        };
        if *self.peek() != Tok::End {
            return Err(self.unexpected(&["'+'", "'-'", "'*'", "end of input"]));
        }
        normalize(lhs, rhs, lhs_start)
    }

    fn lhs(&mut self) -> Result<Vec<(u32, f64, usize)>, ParseError> {
        let mut terms = Vec::new();
        let mut sign = if self.eat(&Tok::Minus) { -1.0 } else { 1.0 };
        loop {
            terms.push(self.term(sign)?);
            let (op, s) = match self.peek() {
                Tok::Plus => ('+', 1.0),
                Tok::Minus => ('-', -1.0),
                _ => break,
            };
            let at = self.offset();
            self.bump();
            if !self.starts_term() {
                return Err(ParseError::new(
                    at,
                    ParseErrorKind::DanglingOperator {
                        op,
                        expected: TERM.to_vec(),
                    },
                ));
            }
            sign = s;
        }
        Ok(terms)
    }

    fn starts_term(&self) -> bool {
        match self.peek() {
            Tok::Num(_) => true,
            Tok::Ident(s) => s == "y" || deriv_order(s).is_some(),
            _ => false,
        }
    }

    fn term(&mut self, sign: f64) -> Result<(u32, f64, usize), ParseError> {
        let at = self.offset();
        let mut coeff = sign;
        if let Tok::Num(x) = *self.peek() {
            coeff *= x;
            self.bump();
            self.eat(&Tok::Star);
        }
        let mut order = 0;
        if let Tok::Ident(s) = self.peek() {
            if let Some(k) = deriv_order(s) {
                let k = k.ok_or_else(|| self.unexpected(&["'T'", "'T<k>'"]))?;
                if k > MAX_ORDER {
                    return Err(ParseError::new(
                        self.offset(),
                        ParseErrorKind::DerivativeOrderTooLarge(k),
                    ));
                }
                order = k;
                self.bump();
            }
        }
        if !self.is_ident("y") {
            return Err(self.unexpected(if order == 0 { TERM } else { &["'y'"] }));
        }
        self.bump();
        Ok((order, coeff, at))
    }

    fn expr(&mut self) -> Result<TExprAst, ParseError> {
        let mut acc = self.prod()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => '+',
                Tok::Minus => '-',
                _ => return Ok(acc),
            };
            let at = self.offset();
            self.bump();
            if !self.starts_factor() {
                return Err(ParseError::new(
                    at,
                    ParseErrorKind::DanglingOperator {
                        op,
                        expected: FACTOR.to_vec(),
                    },
                ));
            }
            let rhs = self.prod()?;
            acc = if op == '+' {
                TExprAst::Add(Box::new(acc), Box::new(rhs))
            } else {
                TExprAst::Sub(Box::new(acc), Box::new(rhs))
            };
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Tok::Num(_) | Tok::Ident(_) | Tok::LParen | Tok::Minus)
    }

    fn prod(&mut self) -> Result<TExprAst, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if *self.peek() == Tok::Star {
                let at = self.offset();
                self.bump();
                if !self.starts_factor() {
                    return Err(ParseError::new(
                        at,
                        ParseErrorKind::DanglingOperator {
                            op: '*',
                            expected: FACTOR.to_vec(),
                        },
                    ));
                }
            } else if !matches!(self.peek(), Tok::Num(_) | Tok::Ident(_) | Tok::LParen) {
                return Ok(acc);
            }
            let rhs = self.factor()?;
            acc = TExprAst::Mul(Box::new(acc), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<TExprAst, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(TExprAst::Num(x))
            }
            Tok::Minus => {
                self.bump();
                if !self.starts_factor() {
                    return Err(self.unexpected(FACTOR));
                }
                Ok(match self.factor()? {
                    TExprAst::Num(x) => TExprAst::Num(-x),
                    f => TExprAst::Neg(Box::new(f)),
                })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                if *self.peek() != Tok::Caret {
                    return Ok(inner);
                }
                if inner != TExprAst::TPow(1) {
                    return Err(ParseError::new(
                        self.offset(),
                        ParseErrorKind::OutsideClass("a power of anything but t^a".into()),
                    ));
                }
                self.bump();
                let (k, kat) = self.integer()?;
                tpow(k, kat)
            }
            Tok::Ident(name) => match name.as_str() {
                "t" => self.tpow(),
                "exp" | "sin" | "cos" => {
                    self.bump();
                    let c = self.func_arg()?;
                    Ok(match name.as_str() {
                        "exp" => TExprAst::Exp(c),
                        "sin" => TExprAst::Sin(c),
                        _ => TExprAst::Cos(c),
                    })
                }
                "y" => Err(ParseError::new(
                    at,
                    ParseErrorKind::OutsideClass("'y' on the right-hand side".into()),
                )),
                _ if self.peek_at(1) == &Tok::LParen => Err(ParseError::new(at, ParseErrorKind::UnknownFunction(name))),
                _ => Err(self.unexpected(FACTOR)),
            },
            _ => Err(self.unexpected(FACTOR)),
        }
    }

    /// After `t`: `^a`, `^(k a)` or `^(k*a)`.
    fn tpow(&mut self) -> Result<TExprAst, ParseError> {
        let t_at = self.offset();
        self.bump();
        if *self.peek() != Tok::Caret {
            return Err(ParseError::new(
                t_at,
                ParseErrorKind::OutsideClass("bare 't' (only powers t^(k a) are allowed)".into()),
            ));
        }
        self.bump();
        if self.is_ident("a") {
            self.bump();
            return Ok(TExprAst::TPow(1));
        }
        if !self.eat(&Tok::LParen) {
            if matches!(self.peek(), Tok::Num(_)) {
                return Err(ParseError::new(
                    self.offset(),
                    ParseErrorKind::OutsideClass("a power of t that is not a multiple of a".into()),
                ));
            }
            return Err(self.unexpected(&["'a'", "'('"]));
        }
        let (k, kat) = self.integer()?;
        self.eat(&Tok::Star);
        self.expect_ident("a", "'a'")?;
        self.expect(&Tok::RParen, "')'")?;
        tpow(k, kat)
    }

    /// `( [[-] number [*]] [-] t^a )`, returning `c`.
    fn func_arg(&mut self) -> Result<f64, ParseError> {
        self.expect(&Tok::LParen, "'('")?;
        let mut c = 1.0;
        if self.eat(&Tok::Minus) {
            c = -c;
        }
        if let Tok::Num(x) = *self.peek() {
            c *= x;
            self.bump();
            self.eat(&Tok::Star);
            if self.eat(&Tok::Minus) {
                c = -c;
            }
        }
        if !self.is_ident("t") {
            if *self.peek() == Tok::RParen || matches!(self.peek(), Tok::Ident(_) | Tok::LParen) {
                return Err(ParseError::new(
                    self.offset(),
                    ParseErrorKind::OutsideClass("a function argument other than c t^a".into()),
                ));
            }
            return Err(self.unexpected(&["'t^a'"]));
        }
        let at = self.offset();
        match self.tpow()? {
            TExprAst::TPow(1) => {}
            _ => {
                return Err(ParseError::new(
                    at,
                    ParseErrorKind::OutsideClass("a function argument other than c t^a".into()),
                ))
            }
        }
        self.expect(&Tok::RParen, "')'")?;
        Ok(c)
    }
}

fn tpow(k: u32, at: usize) -> Result<TExprAst, ParseError> {
    match k {
        0 => Err(ParseError::new(
            at,
            ParseErrorKind::Unexpected {
                found: "0".to_string(),
                expected: alloc::vec!["positive integer"],
            },
        )),
        k if k > MAX_TPOW => Err(ParseError::new(at, ParseErrorKind::PowerTooLarge(k))),
        k => Ok(TExprAst::TPow(k)),
    }
}

/// `Some(Some(k))` for `T`/`T<k>`, `Some(None)` for a malformed `T…`
/// identifier, `None` for anything else.
fn deriv_order(s: &str) -> Option<Option<u32>> {
    let rest = s.strip_prefix('T')?;
    if rest.is_empty() {
        return Some(Some(1));
    }
    if rest.bytes().all(|b| b.is_ascii_digit()) {
        Some(rest.parse().ok())
    } else {
        None
    }
}

fn normalize(terms: Vec<(u32, f64, usize)>, rhs: TExprAst, lhs_start: usize) -> Result<EquationAst, ParseError> {
    let mut merged: Vec<(u32, f64)> = Vec::new();
    for &(k, c, _) in &terms {
        match merged.iter_mut().find(|(j, _)| *j == k) {
            Some(slot) => slot.1 += c,
            None => merged.push((k, c)),
        }
    }
    merged.sort_by_key(|&(k, _)| core::cmp::Reverse(k));
    let (n, lead) = merged[0];
    if n == 0 {
        return Err(ParseError::new(lhs_start, ParseErrorKind::NoDerivative));
    }
    if lead == 0.0 {
        let at = terms.iter().find(|t| t.0 == n).map_or(lhs_start, |t| t.2);
        return Err(ParseError::new(at, ParseErrorKind::ZeroLeadingCoefficient));
    }
    let lhs = merged
        .into_iter()
        .filter(|&(_, c)| c != 0.0)
        .map(|(k, c)| (k, if k == n { 1.0 } else { c / lead }))
        .collect();
    let rhs = match rhs {
        TExprAst::Num(0.0) => None,
        r if lead == 1.0 => Some(r),
        r => Some(TExprAst::Mul(Box::new(TExprAst::Num(1.0 / lead)), Box::new(r))),
    };
    Ok(EquationAst { lhs, rhs })
}
