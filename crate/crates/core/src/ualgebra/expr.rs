use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use super::term::{Trig, UTerm};
use super::{AlgebraError, SubstMap};
use crate::math;

/// Relative prune threshold applied after like terms are merged.
pub const PRUNE_REL: f64 = 1e-12;

/// Two rates (or frequencies) closer than this, relative to `max(1, |x|)`,
/// are the same key. Sums of the same root values taken in different orders
/// differ in the last bits; without this they would never merge.
pub const KEY_TOL: f64 = 1e-11;

/// A canonical sum of [`UTerm`]s. The empty sum is zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UExpr {
    terms: Vec<UTerm>,
}

/// Merge like terms, prune cancellation noise and sort into canonical order.
pub fn canonicalize<I: IntoIterator<Item = UTerm>>(terms: I) -> UExpr {
    let mut raw: Vec<UTerm> = terms.into_iter().filter(|t| t.coeff() != 0.0).collect();
    if raw.is_empty() {
        return UExpr::zero();
    }
    unify_keys(&mut raw);
    raw.sort_by(|a, b| a.key_cmp(b));

    let mut out: Vec<UTerm> = Vec::with_capacity(raw.len());
    let mut i = 0;
    while i < raw.len() {
        let head = raw[i];
        let mut sum = 0.0;
        let mut largest: f64 = 0.0;
        while i < raw.len() && raw[i].same_key(&head) {
            sum += raw[i].coeff();
            largest = largest.max(math::abs(raw[i].coeff()));
            i += 1;
        }
        if math::abs(sum) >= PRUNE_REL * largest.max(1.0) {
            out.push(head.with_coeff(sum));
        }
    }
    UExpr { terms: out }
}

fn close(a: f64, b: f64) -> bool {
    math::abs(a - b) <= KEY_TOL * 1f64.max(math::abs(a)).max(math::abs(b))
}

/// Replace every rate / frequency by the smallest member of its cluster.
fn unify_keys(terms: &mut [UTerm]) {
    let snap = |values: &mut Vec<f64>| {
        values.sort_by(f64::total_cmp);
        values.dedup();
        let mut reps: Vec<(f64, f64)> = Vec::with_capacity(values.len());
        let mut rep = values[0];
        let mut prev = values[0];
        for &v in values.iter() {
            if !close(prev, v) {
                rep = v;
            }
            reps.push((v, rep));
            prev = v;
        }
        reps
    };
    let lookup = |reps: &[(f64, f64)], v: f64| {
        let i = reps
            .binary_search_by(|p| p.0.total_cmp(&v))
            .expect("value was collected");
        reps[i].1
    };

    let mut rates: Vec<f64> = terms.iter().map(|t| t.erate()).collect();
    let rate_reps = snap(&mut rates);
    let mut freqs: Vec<f64> = terms
        .iter()
        .filter(|t| t.trig() != Trig::None)
        .map(|t| t.tfreq())
        .collect();
    let freq_reps = if freqs.is_empty() { Vec::new() } else { snap(&mut freqs) };

    for t in terms.iter_mut() {
        let a = lookup(&rate_reps, t.erate());
        let b = if t.trig() == Trig::None {
            0.0
        } else {
            lookup(&freq_reps, t.tfreq())
        };
        *t = UTerm::new(t.coeff(), t.upow(), a, t.trig(), b);
    }
}

impl UExpr {
    pub fn zero() -> Self {
        UExpr { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        canonicalize([UTerm::constant(c)])
    }

    pub fn from_terms<I: IntoIterator<Item = UTerm>>(terms: I) -> Self {
        canonicalize(terms)
    }

    pub fn terms(&self) -> &[UTerm] {
        &self.terms
    }

    // `is_zero` is the emptiness test.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest absolute coefficient, 0 for the zero expression.
    pub fn max_coeff(&self) -> f64 {
        self.terms.iter().map(|t| math::abs(t.coeff())).fold(0.0, f64::max)
    }

    /// Coefficient of the term with the given key, 0 if absent. Rates and
    /// frequencies are matched with the same tolerance canonicalize uses.
    pub fn coeff_of(&self, upow: u32, erate: f64, trig: Trig, tfreq: f64) -> f64 {
        let probe = UTerm::new(1.0, upow, erate, trig, tfreq);
        self.terms
            .iter()
            .find(|t| {
                t.upow() == probe.upow()
                    && t.trig() == probe.trig()
                    && close(t.erate(), probe.erate())
                    && close(t.tfreq(), probe.tfreq())
            })
            .map_or(0.0, |t| t.coeff())
    }

    pub fn add(&self, other: &UExpr) -> UExpr {
        canonicalize(self.terms.iter().chain(other.terms.iter()).copied())
    }

    pub fn sub(&self, other: &UExpr) -> UExpr {
        canonicalize(
            self.terms
                .iter()
                .copied()
                .chain(other.terms.iter().map(|t| t.scaled(-1.0))),
        )
    }

    pub fn scale(&self, c: f64) -> UExpr {
        canonicalize(self.terms.iter().map(|t| t.scaled(c)))
    }

    pub fn mul(&self, other: &UExpr) -> UExpr {
        let mut raw = Vec::with_capacity(2 * self.len() * other.len());
        for f in &self.terms {
            for g in &other.terms {
                raw.extend(f.mul(g).into_iter().flatten());
            }
        }
        canonicalize(raw)
    }

    pub fn mul_term(&self, d: &UTerm) -> UExpr {
        canonicalize(self.terms.iter().flat_map(|t| t.mul(d)).flatten())
    }

    /// Divide by a single pure-exponential term `C·e^{a·u}`.
    pub fn div_by_term(&self, d: &UTerm) -> Result<UExpr, AlgebraError> {
        if !d.is_pure_exponential() {
            return Err(AlgebraError::DivisorOutsideAlgebra);
        }
        if d.coeff() == 0.0 {
            return Err(AlgebraError::ZeroDivisor);
        }
        Ok(self.mul_term(&UTerm::exp(1.0 / d.coeff(), -d.erate())))
    }

    /// `d/du`, which is `T_α` in the substituted variable.
    pub fn diff_u(&self) -> UExpr {
        canonicalize(self.terms.iter().flat_map(|t| t.diff()).flatten())
    }

    /// `order`-fold `d/du`.
    pub fn diff_u_n(&self, order: usize) -> UExpr {
        let mut out = self.clone();
        for _ in 0..order {
            out = out.diff_u();
        }
        out
    }

    /// Antiderivative in `u` with integration constant 0. This is the
    /// conformable integral `∫ x^{α-1} f(x) dx` in the substituted variable.
    pub fn integrate_u(&self) -> UExpr {
        let mut raw = Vec::new();
        for t in &self.terms {
            super::integrate::integrate_term(t, &mut raw);
        }
        canonicalize(raw)
    }

    /// Value at a given `u`.
    pub fn eval_u(&self, u: f64) -> f64 {
        self.terms.iter().map(|t| t.eval_u(u)).sum()
    }

    /// Value at `t > 0`, with `u = t^α/α`.
    pub fn eval(&self, t: f64, subst: &SubstMap) -> Result<f64, AlgebraError> {
        Ok(self.eval_u(subst.u_of(t)?))
    }
}

impl Add for &UExpr {
    type Output = UExpr;
    fn add(self, rhs: &UExpr) -> UExpr {
        UExpr::add(self, rhs)
    }
}

impl Sub for &UExpr {
    type Output = UExpr;
    fn sub(self, rhs: &UExpr) -> UExpr {
        UExpr::sub(self, rhs)
    }
}

impl Mul for &UExpr {
    type Output = UExpr;
    fn mul(self, rhs: &UExpr) -> UExpr {
        UExpr::mul(self, rhs)
    }
}

impl Neg for &UExpr {
    type Output = UExpr;
    fn neg(self) -> UExpr {
        self.scale(-1.0)
    }
}

impl From<UTerm> for UExpr {
    fn from(t: UTerm) -> Self {
        canonicalize([t])
    }
}

impl FromIterator<UTerm> for UExpr {
    fn from_iter<I: IntoIterator<Item = UTerm>>(iter: I) -> Self {
        canonicalize(iter)
    }
}
