//! Antiderivatives of single terms.
//!
//! For `k > 0` the power of `u` is peeled off by parts,
//! `∫ u^k g = u^k G − k ∫ u^{k-1} G` with `G = ∫ g`, so only the `k = 0`
//! antiderivatives need closed forms:
//!
//! * `∫ 1 = u` (the `a = 0`, no-trig case, where resonance lands),
//! * `∫ e^{au} = e^{au}/a`,
//! * `∫ e^{au}cos(bu) = e^{au}(a·cos + b·sin)/(a²+b²)`,
//! * `∫ e^{au}sin(bu) = e^{au}(a·sin − b·cos)/(a²+b²)`.

use alloc::vec::Vec;

use super::term::{Trig, UTerm};

pub(crate) fn integrate_term(t: &UTerm, out: &mut Vec<UTerm>) {
    let (c, k, a, b) = (t.coeff(), t.upow(), t.erate(), t.tfreq());

    if a == 0.0 && t.trig() == Trig::None {
        out.push(UTerm::power(c / (k as f64 + 1.0), k + 1));
        return;
    }

    let base = antiderivative_k0(c, a, t.trig(), b);
    if k == 0 {
        out.extend(base);
        return;
    }
    // u^k·G − k·∫ u^{k-1}·G
    for g in base.iter() {
        out.push(g.with_upow(k));
        integrate_term(&g.with_upow(k - 1).scaled(-(k as f64)), out);
    }
}

fn antiderivative_k0(c: f64, a: f64, trig: Trig, b: f64) -> Vec<UTerm> {
    match trig {
        Trig::None => alloc::vec![UTerm::exp(c / a, a)],
        Trig::Cos | Trig::Sin => {
            let d = a * a + b * b;
            let (cos_c, sin_c) = match trig {
                Trig::Cos => (a / d, b / d),
                _ => (-b / d, a / d),
            };
            let mut v = Vec::with_capacity(2);
            if cos_c != 0.0 {
                v.push(UTerm::new(c * cos_c, 0, a, Trig::Cos, b));
            }
            if sin_c != 0.0 {
                v.push(UTerm::new(c * sin_c, 0, a, Trig::Sin, b));
            }
            v
        }
    }
}
