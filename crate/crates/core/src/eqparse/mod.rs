//! The plain-text equation language.
//!
//! ```text
//! T2 y + 4 T y + 3 y = exp(2 t^a)
//! T3 y - 2 T y = 2 t^(2 a) + t^a - 3
//! T2 y + y = sin(2 t^a) * (t^a)^2
//! ```
//!
//! `T` is one conformable derivative, `T<k>` is `k` of them. The forcing side
//! may use numbers, `t^a` (meaning `t^α`), `t^(k a)` or `(t^a)^k`, and
//! `exp`/`sin`/`cos` of `c t^a`, combined with `+`, `-`, `*` and implicit
//! products. `α` is never written in the source; it is bound afterwards by
//! [`lower_forcing`] or [`EquationAst::to_problem`].
//!
//! Grammar:
//!
//! ```text
//! equation  := lhs "=" rhs
//! lhs       := ["-"] term { ("+"|"-") term }
//! term      := [number ["*"]] [deriv] "y"
//! deriv     := "T" | "T<k>"
//! rhs       := "0" | expr
//! expr      := prod { ("+"|"-") prod }
//! prod      := factor { ["*"] factor }
//! factor    := number | tpow | func | "(" expr ")" | "-" factor
//! tpow      := "t^a" | "t^(" integer ["*"] "a)" | "(t^a)^" integer
//! func      := ("exp"|"sin"|"cos") "(" [["-"] number ["*"]] ["-"] "t^a" ")"
//! ```

mod lexer;
mod parser;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::solver::{ProblemSpec, SolveError};
use crate::ualgebra::{SubstMap, UExpr, UTerm};

/// Largest `k` accepted in `t^{kα}`.
pub const MAX_TPOW: u32 = 64;
/// Largest derivative order accepted on the left side.
pub const MAX_ORDER: u32 = 12;

/// Forcing-side syntax tree. `TPow(k)` is `t^{kα}`; `Exp(c)`, `Sin(c)` and
/// `Cos(c)` are `e^{c·t^α}`, `sin(c·t^α)` and `cos(c·t^α)`.
#[derive(Clone, Debug, PartialEq)]
pub enum TExprAst {
    Num(f64),
    TPow(u32),
    Exp(f64),
    Sin(f64),
    Cos(f64),
    Add(Box<TExprAst>, Box<TExprAst>),
    Sub(Box<TExprAst>, Box<TExprAst>),
    Mul(Box<TExprAst>, Box<TExprAst>),
    Neg(Box<TExprAst>),
}

impl TExprAst {
    /// Direct evaluation in `t`, without going through `u`.
    pub fn eval_t(&self, t: f64, alpha: f64) -> f64 {
        let ta = math::pow(t, alpha);
        match self {
            TExprAst::Num(x) => *x,
            TExprAst::TPow(k) => math::pow(t, f64::from(*k) * alpha),
            TExprAst::Exp(c) => math::exp(c * ta),
            TExprAst::Sin(c) => math::sin(c * ta),
            TExprAst::Cos(c) => math::cos(c * ta),
            TExprAst::Add(a, b) => a.eval_t(t, alpha) + b.eval_t(t, alpha),
            TExprAst::Sub(a, b) => a.eval_t(t, alpha) - b.eval_t(t, alpha),
            TExprAst::Mul(a, b) => a.eval_t(t, alpha) * b.eval_t(t, alpha),
            TExprAst::Neg(a) => -a.eval_t(t, alpha),
        }
    }

    /// Like [`eval_t`](Self::eval_t) with every sum and difference replaced
    /// by the sum of magnitudes; a scale for relative comparisons.
    pub fn magnitude_t(&self, t: f64, alpha: f64) -> f64 {
        match self {
            TExprAst::Add(a, b) | TExprAst::Sub(a, b) => a.magnitude_t(t, alpha) + b.magnitude_t(t, alpha),
            TExprAst::Mul(a, b) => a.magnitude_t(t, alpha) * b.magnitude_t(t, alpha),
            TExprAst::Neg(a) => a.magnitude_t(t, alpha),
            leaf => math::abs(leaf.eval_t(t, alpha)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            TExprAst::Add(..) | TExprAst::Sub(..) => 1,
            TExprAst::Mul(..) => 2,
            TExprAst::Neg(..) => 3,
            TExprAst::Num(x) if x.is_sign_negative() => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            TExprAst::Num(x) => write!(f, "{x}")?,
            TExprAst::TPow(1) => f.write_str("t^a")?,
            TExprAst::TPow(k) => write!(f, "t^({k} a)")?,
            TExprAst::Exp(c) => fmt_func(f, "exp", *c)?,
            TExprAst::Sin(c) => fmt_func(f, "sin", *c)?,
            TExprAst::Cos(c) => fmt_func(f, "cos", *c)?,
            TExprAst::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(" + ")?;
                b.fmt_prec(f, 2)?;
            }
            TExprAst::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(" - ")?;
                b.fmt_prec(f, 2)?;
            }
            TExprAst::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" * ")?;
                b.fmt_prec(f, 3)?;
            }
            TExprAst::Neg(a) => {
                f.write_str("-")?;
                a.fmt_prec(f, 4)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn fmt_func(f: &mut fmt::Formatter<'_>, name: &str, c: f64) -> fmt::Result {
    if c == 1.0 {
        write!(f, "{name}(t^a)")
    } else if c == -1.0 {
        write!(f, "{name}(-t^a)")
    } else {
        write!(f, "{name}({c} t^a)")
    }
}

impl fmt::Display for TExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A parsed equation in monic form: the highest derivative has coefficient 1
/// and the forcing has been divided by the original leading coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationAst {
    /// `(derivative order, coefficient)` pairs, highest order first, one per
    /// order, zero coefficients dropped.
    pub lhs: Vec<(u32, f64)>,
    /// `None` for a homogeneous equation.
    pub rhs: Option<TExprAst>,
}

impl EquationAst {
    pub fn order(&self) -> u32 {
        self.lhs.first().map_or(0, |&(k, _)| k)
    }

    /// `p_0 … p_{n-1}` of the monic equation.
    pub fn coeffs(&self) -> Vec<f64> {
        let n = self.order() as usize;
        let mut p = alloc::vec![0.0; n];
        for &(k, c) in &self.lhs {
            if (k as usize) < n {
                p[k as usize] = c;
            }
        }
        p
    }

    pub fn to_problem(&self, alpha: f64) -> Result<ProblemSpec, SolveError> {
        let subst = SubstMap::new(alpha)?;
        let forcing = match &self.rhs {
            Some(ast) => lower_forcing(ast, &subst).map_err(|_| SolveError::NonFiniteCoefficient)?,
            None => UExpr::zero(),
        };
        ProblemSpec::new(self.coeffs(), alpha, forcing)
    }
}

impl fmt::Display for EquationAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(k, c)) in self.lhs.iter().enumerate() {
            let mag = math::abs(c);
            match (i, c < 0.0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if mag != 1.0 {
                write!(f, "{mag} ")?;
            }
            match k {
                0 => f.write_str("y")?,
                1 => f.write_str("T y")?,
                k => write!(f, "T{k} y")?,
            }
        }
        f.write_str(" = ")?;
        match &self.rhs {
            Some(ast) => ast.fmt(f),
            None => f.write_str("0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    InvalidNumber(String),
    /// `found` where one of `expected` should be.
    Unexpected {
        found: String,
        expected: Vec<&'static str>,
    },
    /// A binary operator with nothing usable after it.
    DanglingOperator {
        op: char,
        expected: Vec<&'static str>,
    },
    UnknownFunction(String),
    /// The forcing leaves the exponential-polynomial-trigonometric class.
    OutsideClass(String),
    ZeroLeadingCoefficient,
    /// The left side has no derivative of order at least 1.
    NoDerivative,
    DerivativeOrderTooLarge(u32),
    PowerTooLarge(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    /// Byte offset into the source.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn new(offset: usize, kind: ParseErrorKind) -> Self {
        ParseError { offset, kind }
    }

    pub fn expected(&self) -> &[&'static str] {
        match &self.kind {
            ParseErrorKind::Unexpected { expected, .. } | ParseErrorKind::DanglingOperator { expected, .. } => expected,
            _ => &[],
        }
    }
}

fn write_expected(f: &mut fmt::Formatter<'_>, expected: &[&str]) -> fmt::Result {
    match expected {
        [] => Ok(()),
        [one] => write!(f, "expected {one}"),
        many => {
            f.write_str("expected one of ")?;
            for (i, e) in many.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                f.write_str(e)?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: ", self.offset)?;
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number '{s}'"),
            ParseErrorKind::Unexpected { found, expected } => {
                write_expected(f, expected)?;
                write!(f, ", found {found}")
            }
            ParseErrorKind::DanglingOperator { op, expected } => {
                write!(f, "dangling '{op}': ")?;
                write_expected(f, expected)?;
                f.write_str(" after it")
            }
            ParseErrorKind::UnknownFunction(name) => {
                write!(f, "unknown function '{name}' (expected exp, sin or cos)")
            }
            ParseErrorKind::OutsideClass(what) => write!(
                f,
                "{what} is outside the supported forcing class (sums and products of constants, t^(k a), exp/sin/cos(c t^a))"
            ),
            ParseErrorKind::ZeroLeadingCoefficient => f.write_str("the highest derivative has coefficient zero"),
            ParseErrorKind::NoDerivative => f.write_str("the equation needs a derivative of order at least 1"),
            ParseErrorKind::DerivativeOrderTooLarge(k) => {
                write!(f, "derivative order {k} exceeds the maximum {MAX_ORDER}")
            }
            ParseErrorKind::PowerTooLarge(k) => write!(f, "power t^({k} a) exceeds the maximum k = {MAX_TPOW}"),
        }
    }
}

impl core::error::Error for ParseError {}

/// Failure to bring a [`TExprAst`] into the `u`-algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum LowerError {
    PowerTooLarge(u32),
    NonFinite,
}

impl fmt::Display for LowerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LowerError::PowerTooLarge(k) => write!(f, "power t^({k} a) exceeds the maximum k = {MAX_TPOW}"),
            LowerError::NonFinite => f.write_str("forcing has a non-finite constant"),
        }
    }
}

impl core::error::Error for LowerError {}

pub fn parse_equation(src: &str) -> Result<EquationAst, ParseError> {
    parser::Parser::new(src)?.equation()
}

/// Rewrite a `t`-domain forcing in `u = t^α/α`: `t^{kα} = (αu)^k`,
/// `e^{c t^α} = e^{cα u}`, `sin/cos(c t^α) = sin/cos(cα u)`.
pub fn lower_forcing(ast: &TExprAst, subst: &SubstMap) -> Result<UExpr, LowerError> {
    let alpha = subst.alpha();
    let finite = |x: f64| {
        if x.is_finite() {
            Ok(x)
        } else {
            Err(LowerError::NonFinite)
        }
    };
    Ok(match ast {
        TExprAst::Num(x) => UExpr::constant(finite(*x)?),
        TExprAst::TPow(k) => {
            if *k > MAX_TPOW {
                return Err(LowerError::PowerTooLarge(*k));
            }
            UTerm::power(math::powi(alpha, *k), *k).into()
        }
        TExprAst::Exp(c) => UTerm::exp(1.0, finite(*c)? * alpha).into(),
        TExprAst::Sin(c) => UTerm::sin(1.0, finite(*c)? * alpha).into(),
        TExprAst::Cos(c) => UTerm::cos(1.0, finite(*c)? * alpha).into(),
        TExprAst::Add(a, b) => lower_forcing(a, subst)?.add(&lower_forcing(b, subst)?),
        TExprAst::Sub(a, b) => lower_forcing(a, subst)?.sub(&lower_forcing(b, subst)?),
        TExprAst::Mul(a, b) => lower_forcing(a, subst)?.mul(&lower_forcing(b, subst)?),
        TExprAst::Neg(a) => lower_forcing(a, subst)?.scale(-1.0),
    })
}

#[cfg(test)]
mod tests;
