use core::cmp::Ordering;

use crate::math;

/// Rates and frequencies with magnitude below this are treated as exactly
/// zero. Root finding and rate sums leave `~1e-16` dust where an exact zero
/// was meant (resonance, `cos(b-b)`), and `1/a` on that dust is catastrophic.
pub const ZERO_SNAP: f64 = 1e-10;

/// Trigonometric factor of a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trig {
    None,
    Cos,
    Sin,
}

impl Trig {
    pub fn name(self) -> &'static str {
        match self {
            Trig::None => "none",
            Trig::Cos => "cos",
            Trig::Sin => "sin",
        }
    }
}

/// A single term `coeff · u^upow · e^{erate·u} · trig(tfreq·u)`.
///
/// Constructors normalize the trigonometric part: frequencies are never
/// negative (`cos` is even, `sin` odd), `tfreq == 0` iff `trig == None`, and
/// `sin(0·u)` collapses the coefficient to zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UTerm {
    coeff: f64,
    upow: u32,
    erate: f64,
    trig: Trig,
    tfreq: f64,
}

impl UTerm {
    pub fn new(coeff: f64, upow: u32, erate: f64, trig: Trig, tfreq: f64) -> Self {
        let erate = if math::abs(erate) < ZERO_SNAP { 0.0 } else { erate };
        let (mut coeff, mut trig, mut tfreq) = (coeff, trig, tfreq);
        if trig == Trig::None || math::abs(tfreq) < ZERO_SNAP {
            if trig == Trig::Sin {
                coeff = 0.0;
            }
            trig = Trig::None;
            tfreq = 0.0;
        } else if tfreq < 0.0 {
            tfreq = -tfreq;
            if trig == Trig::Sin {
                coeff = -coeff;
            }
        }
        UTerm {
            coeff,
            upow,
            erate,
            trig,
            tfreq,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(c, 0, 0.0, Trig::None, 0.0)
    }

    /// `c · u^k`
    pub fn power(c: f64, k: u32) -> Self {
        Self::new(c, k, 0.0, Trig::None, 0.0)
    }

    /// `c · e^{a·u}`
    pub fn exp(c: f64, a: f64) -> Self {
        Self::new(c, 0, a, Trig::None, 0.0)
    }

    /// `c · cos(b·u)`
    pub fn cos(c: f64, b: f64) -> Self {
        Self::new(c, 0, 0.0, Trig::Cos, b)
    }

    /// `c · sin(b·u)`
    pub fn sin(c: f64, b: f64) -> Self {
        Self::new(c, 0, 0.0, Trig::Sin, b)
    }

    pub fn with_upow(self, k: u32) -> Self {
        Self { upow: k, ..self }
    }

    pub fn with_rate(self, a: f64) -> Self {
        Self::new(self.coeff, self.upow, a, self.trig, self.tfreq)
    }

    pub fn with_coeff(self, c: f64) -> Self {
        Self { coeff: c, ..self }
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn upow(&self) -> u32 {
        self.upow
    }

    pub fn erate(&self) -> f64 {
        self.erate
    }

    pub fn trig(&self) -> Trig {
        self.trig
    }

    pub fn tfreq(&self) -> f64 {
        self.tfreq
    }

    /// True when the term is `C·e^{a·u}` (no power of `u`, no trig factor).
    pub fn is_pure_exponential(&self) -> bool {
        self.upow == 0 && self.trig == Trig::None
    }

    /// Value at a given `u`.
    pub fn eval_u(&self, u: f64) -> f64 {
        let mut v = self.coeff * math::powi(u, self.upow);
        if self.erate != 0.0 {
            v *= math::exp(self.erate * u);
        }
        match self.trig {
            Trig::None => v,
            Trig::Cos => v * math::cos(self.tfreq * u),
            Trig::Sin => v * math::sin(self.tfreq * u),
        }
    }

    pub(crate) fn same_key(&self, other: &UTerm) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }

    /// Canonical order: rate, then frequency, then trig kind, then power of `u`.
    pub(crate) fn key_cmp(&self, other: &UTerm) -> Ordering {
        self.erate
            .total_cmp(&other.erate)
            .then(self.tfreq.total_cmp(&other.tfreq))
            .then(self.trig.cmp(&other.trig))
            .then(self.upow.cmp(&other.upow))
    }

    pub(crate) fn scaled(self, s: f64) -> Self {
        Self {
            coeff: self.coeff * s,
            ..self
        }
    }

    /// Product of two terms; trig×trig goes through product-to-sum, so the
    /// result may be two terms.
    pub(crate) fn mul(&self, other: &UTerm) -> [Option<UTerm>; 2] {
        let c = self.coeff * other.coeff;
        let k = self.upow + other.upow;
        let a = self.erate + other.erate;
        let (b1, b2) = (self.tfreq, other.tfreq);
        match (self.trig, other.trig) {
            (Trig::None, t) => [Some(UTerm::new(c, k, a, t, b2)), None],
            (t, Trig::None) => [Some(UTerm::new(c, k, a, t, b1)), None],
            (Trig::Cos, Trig::Cos) => [
                Some(UTerm::new(0.5 * c, k, a, Trig::Cos, b1 - b2)),
                Some(UTerm::new(0.5 * c, k, a, Trig::Cos, b1 + b2)),
            ],
            (Trig::Sin, Trig::Sin) => [
                Some(UTerm::new(0.5 * c, k, a, Trig::Cos, b1 - b2)),
                Some(UTerm::new(-0.5 * c, k, a, Trig::Cos, b1 + b2)),
            ],
            (Trig::Sin, Trig::Cos) => [
                Some(UTerm::new(0.5 * c, k, a, Trig::Sin, b1 + b2)),
                Some(UTerm::new(0.5 * c, k, a, Trig::Sin, b1 - b2)),
            ],
            (Trig::Cos, Trig::Sin) => [
                Some(UTerm::new(0.5 * c, k, a, Trig::Sin, b1 + b2)),
                Some(UTerm::new(0.5 * c, k, a, Trig::Sin, b2 - b1)),
            ],
        }
    }

    /// `d/du` by the product rule; at most three terms.
    pub(crate) fn diff(&self) -> [Option<UTerm>; 3] {
        let UTerm {
            coeff: c,
            upow: k,
            erate: a,
            trig,
            tfreq: b,
        } = *self;
        let from_power = (k > 0).then(|| UTerm::new(c * k as f64, k - 1, a, trig, b));
        let from_exp = (a != 0.0).then(|| UTerm::new(c * a, k, a, trig, b));
        let from_trig = match trig {
            Trig::None => None,
            Trig::Cos => Some(UTerm::new(-c * b, k, a, Trig::Sin, b)),
            Trig::Sin => Some(UTerm::new(c * b, k, a, Trig::Cos, b)),
        };
        [from_power, from_exp, from_trig]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_normalization() {
        let c = UTerm::cos(2.0, -3.0);
        assert_eq!((c.coeff(), c.tfreq()), (2.0, 3.0));
        let s = UTerm::sin(2.0, -3.0);
        assert_eq!((s.coeff(), s.tfreq()), (-2.0, 3.0));
    }

    #[test]
    fn zero_frequency_collapses() {
        let c = UTerm::cos(2.0, 0.0);
        assert_eq!(c.trig(), Trig::None);
        assert_eq!(c.coeff(), 2.0);
        let s = UTerm::sin(2.0, 0.0);
        assert_eq!(s.coeff(), 0.0);
        let none = UTerm::new(1.0, 0, 0.0, Trig::None, 5.0);
        assert_eq!(none.tfreq(), 0.0);
    }

    #[test]
    fn rate_dust_snaps_to_zero() {
        assert_eq!(UTerm::exp(1.0, 4e-16).erate(), 0.0);
        assert_eq!(UTerm::exp(1.0, -3.0).erate(), -3.0);
    }
}
