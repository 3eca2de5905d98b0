//! Deterministic text rendering, in `u` (`Display`) and in `t` ([`TForm`]).

use alloc::string::{String, ToString};
use core::fmt::{self, Write};

use super::term::{Trig, UTerm};
use super::UExpr;
use crate::math;

const MAX_DENOM: i64 = 1000;

/// Render a number: integers and short decimals plainly, other
/// small-denominator fractions as `(p/q)`, everything else rounded to 12
/// significant digits.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == math::round(x) && math::abs(x) < 1e15 {
        return (x as i64).to_string();
    }
    let decimal = format_decimal(x);
    if decimal.len() <= 6 {
        return decimal;
    }
    match rational_approx(x) {
        Some((p, q)) => alloc::format!("({p}/{q})"),
        None => decimal,
    }
}

/// Shortest decimal form of `x` rounded to 12 significant digits.
pub fn format_decimal(x: f64) -> String {
    let rounded: f64 = alloc::format!("{x:.11e}").parse().unwrap_or(x);
    rounded.to_string()
}

/// Continued-fraction search for `p/q ≈ x` with `q <= MAX_DENOM`.
fn rational_approx(x: f64) -> Option<(i64, i64)> {
    let tol = 1e-12 * math::abs(x).max(1.0);
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..20 {
        let a = math::floor(r);
        if math::abs(a) > 1e12 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_DENOM {
            return None;
        }
        if math::abs(x - h2 as f64 / k2 as f64) <= tol {
            return Some((h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a as f64;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// `"2u"`, `"-u"`, `"(1/3)u"`: a multiplier in front of a symbol, with unit
/// magnitudes elided.
fn scaled_symbol(k: f64, sym: &str) -> String {
    if k == 1.0 {
        sym.to_string()
    } else if k == -1.0 {
        alloc::format!("-{sym}")
    } else {
        alloc::format!("{}{sym}", format_number(k))
    }
}

fn write_sum<F>(f: &mut fmt::Formatter<'_>, terms: &[UTerm], mut body: F) -> fmt::Result
where
    F: FnMut(&UTerm) -> (f64, String),
{
    if terms.is_empty() {
        return f.write_str("0");
    }
    for (i, t) in terms.iter().enumerate() {
        let (coeff, factors) = body(t);
        let neg = coeff < 0.0;
        let mag = math::abs(coeff);
        match (i, neg) {
            (0, true) => f.write_str("-")?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        if factors.is_empty() {
            f.write_str(&format_number(mag))?;
        } else if mag == 1.0 {
            f.write_str(&factors)?;
        } else {
            write!(f, "{}·{}", format_number(mag), factors)?;
        }
    }
    Ok(())
}

fn join(parts: &[String]) -> String {
    let mut s = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            s.push('·');
        }
        s.push_str(p);
    }
    s
}

fn trig_factor(trig: Trig, arg: String) -> Option<String> {
    match trig {
        Trig::None => None,
        Trig::Cos => Some(alloc::format!("cos({arg})")),
        Trig::Sin => Some(alloc::format!("sin({arg})")),
    }
}

impl fmt::Display for UExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(f, self.terms(), |t| {
            let mut parts = alloc::vec::Vec::new();
            match t.upow() {
                0 => {}
                1 => parts.push("u".to_string()),
                k => parts.push(alloc::format!("u^{k}")),
            }
            if t.erate() != 0.0 {
                parts.push(alloc::format!("e^{{{}}}", scaled_symbol(t.erate(), "u")));
            }
            parts.extend(trig_factor(t.trig(), scaled_symbol(t.tfreq(), "u")));
            (t.coeff(), join(&parts))
        })
    }
}

/// Renders a [`UExpr`] in the original variable `t` for a fixed α, e.g.
/// `(1/15)·e^{2·t}` at α = 1 or `e^{10·t^0.5}` at α = 1/2.
pub struct TForm<'a> {
    pub expr: &'a UExpr,
    pub alpha: f64,
}

impl<'a> TForm<'a> {
    pub fn new(expr: &'a UExpr, alpha: f64) -> Self {
        TForm { expr, alpha }
    }
}

fn t_power(p: f64) -> String {
    if p == 1.0 {
        "t".to_string()
    } else {
        alloc::format!("t^{}", format_decimal(p))
    }
}

fn scaled_t_alpha(k: f64, t_alpha: &str) -> String {
    if k == 1.0 {
        t_alpha.to_string()
    } else if k == -1.0 {
        alloc::format!("-{t_alpha}")
    } else {
        alloc::format!("{}·{t_alpha}", format_number(k))
    }
}

impl fmt::Display for TForm<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alpha = self.alpha;
        let t_alpha = t_power(alpha);
        write_sum(f, self.expr.terms(), |t| {
            // u^k = t^{kα} / α^k
            let k = t.upow();
            let coeff = t.coeff() / math::powi(alpha, k);
            let mut parts = alloc::vec::Vec::new();
            if k > 0 {
                parts.push(t_power(k as f64 * alpha));
            }
            if t.erate() != 0.0 {
                parts.push(alloc::format!("e^{{{}}}", scaled_t_alpha(t.erate() / alpha, &t_alpha)));
            }
            parts.extend(trig_factor(t.trig(), scaled_t_alpha(t.tfreq() / alpha, &t_alpha)));
            (coeff, join(&parts))
        })
    }
}

impl UExpr {
    pub fn t_form(&self, alpha: f64) -> TForm<'_> {
        TForm::new(self, alpha)
    }

    /// `t`-form as an owned string.
    pub fn render_t(&self, alpha: f64) -> String {
        let mut s = String::new();
        let _ = write!(s, "{}", self.t_form(alpha));
        s
    }
}
