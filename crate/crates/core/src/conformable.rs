//! Numeric conformable calculus straight from the limit definitions.
//!
//! Nothing here touches the `u`-substitution, which is what makes it usable
//! as an independent check of the symbolic side:
//!
//! ```text
//! T_α f(t)     = lim_{ε→0} (f(t + ε t^{1-α}) − f(t)) / ε
//! I_α^a f(t)   = ∫_a^t x^{α-1} f(x) dx
//! ```
//!
//! The derivative uses the central form of the quotient. Higher orders apply
//! it recursively (`ⁿT_α = T_α ∘ … ∘ T_α`) with one Richardson step on top.

use core::fmt;

use crate::math;
use crate::ualgebra::{SubstMap, UExpr};

/// Smallest `t` any numeric operation will evaluate at.
pub const DOMAIN_FLOOR: f64 = 1e-6;
/// Absolute and relative quadrature tolerance.
pub const QUAD_TOL: f64 = 1e-10;
/// Maximum bisection depth of the adaptive Simpson rule.
pub const QUAD_MAX_DEPTH: u32 = 40;
/// Integrand evaluations allowed per integral.
pub const QUAD_MAX_EVALS: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum OracleError {
    /// `(t_lo, t_hi)` is not an interval inside `[DOMAIN_FLOOR, ∞)`.
    BadDomain {
        lo: f64,
        hi: f64,
    },
    InvalidAlpha(f64),
    ZeroOrder,
    /// A stencil or integration point fell outside the function's domain.
    DomainViolation {
        t: f64,
        lo: f64,
        hi: f64,
    },
    NonFinite {
        t: f64,
    },
    /// The quadrature ran out of depth or evaluations before meeting
    /// [`QUAD_TOL`]; `estimate` is the best value reached.
    QuadratureFailed {
        estimate: f64,
    },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::BadDomain { lo, hi } => write!(f, "invalid domain ({lo}, {hi})"),
            OracleError::InvalidAlpha(a) => write!(f, "alpha must lie in (0, 1], got {a}"),
            OracleError::ZeroOrder => f.write_str("derivative order must be at least 1"),
            OracleError::DomainViolation { t, lo, hi } => {
                write!(f, "t = {t} lies outside the domain ({lo}, {hi})")
            }
            OracleError::NonFinite { t } => write!(f, "function is not finite at t = {t}"),
            OracleError::QuadratureFailed { estimate } => {
                write!(f, "quadrature did not converge (estimate {estimate})")
            }
        }
    }
}

impl core::error::Error for OracleError {}

/// A real function of `t > 0` with the interval it may be evaluated on.
#[derive(Clone, Copy)]
pub struct GridFn<'a> {
    f: &'a dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
}

impl fmt::Debug for GridFn<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFn")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .finish()
    }
}

impl<'a> GridFn<'a> {
    /// The domain is clamped below at [`DOMAIN_FLOOR`].
    pub fn new(f: &'a dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Result<Self, OracleError> {
        let lo = if lo.is_nan() { lo } else { lo.max(DOMAIN_FLOOR) };
        if !(lo < hi) {
            return Err(OracleError::BadDomain { lo, hi });
        }
        Ok(GridFn { f, lo, hi })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn eval(&self, t: f64) -> Result<f64, OracleError> {
        if !(t >= self.lo && t <= self.hi) {
            return Err(OracleError::DomainViolation {
                t,
                lo: self.lo,
                hi: self.hi,
            });
        }
        let v = (self.f)(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(OracleError::NonFinite { t })
        }
    }
}

/// Evaluate a `UExpr` as a plain function of `t`; NaN where it cannot be.
pub fn uexpr_fn<'e>(e: &'e UExpr, subst: SubstMap) -> impl Fn(f64) -> f64 + 'e {
    move |t| e.eval(t, &subst).unwrap_or(f64::NAN)
}

fn check_alpha(alpha: f64) -> Result<(), OracleError> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(OracleError::InvalidAlpha(alpha))
    }
}

/// Richardson levels used on top of the recursive quotient of each order.
fn romberg_levels(order: u32) -> u32 {
    match order {
        0 | 1 => 0,
        2 => 1,
        _ => 2,
    }
}

/// Default quotient parameter for a derivative of the given order at `t`.
///
/// Order 1 is the plain central quotient, `ε = eps^{1/3}·max(1, t^α)`.
/// Higher orders are extrapolated over `L` halvings, so truncation goes
/// like `(ε/s)^{2L+2}` against round-off `eps/ε^n`. Each level moves `t` by
/// a relative `ε/t^α`, so for `α < 1` the `n`-level stencil stays clear of
/// the `t^α` branch point at zero when `s = min(1, t^α/n)`. Balancing gives
/// `ε = (eps·s^{2L+2})^{1/(n+2L+2)}·max(1, t^α)`.
pub fn default_step(t: f64, alpha: f64, order: u32) -> f64 {
    let ta = math::pow(t, alpha);
    if order <= 1 {
        return math::pow(f64::EPSILON, 1.0 / 3.0) * ta.max(1.0);
    }
    let s = if alpha < 1.0 {
        (ta / f64::from(order)).min(1.0)
    } else {
        1.0
    };
    let p = 2 * romberg_levels(order) + 2;
    let sp = math::powi(s, p);
    math::pow(f64::EPSILON * sp, 1.0 / f64::from(order + p)) * ta.max(1.0)
}

/// `ⁿT_α f(t)` for `n = order`, with the step from [`default_step`] and
/// Richardson extrapolation over successive halvings for `n ≥ 2`.
pub fn numeric_t_alpha_derivative(f: &GridFn<'_>, t: f64, alpha: f64, order: u32) -> Result<f64, OracleError> {
    if order == 0 {
        return Err(OracleError::ZeroOrder);
    }
    let eps = default_step(t, alpha, order);
    let levels = romberg_levels(order) as usize;
    let mut table = [0.0f64; 4];
    for i in 0..=levels {
        table[i] = numeric_t_alpha_derivative_with_step(f, t, alpha, order, eps / f64::from(1u32 << i))?;
        let mut factor = 4.0;
        for j in (0..i).rev() {
            table[j] = table[j + 1] + (table[j + 1] - table[j]) / (factor - 1.0);
            factor *= 4.0;
        }
    }
    Ok(table[0])
}

/// The recursive central quotient with an explicit `ε` and no extrapolation.
pub fn numeric_t_alpha_derivative_with_step(
    f: &GridFn<'_>,
    t: f64,
    alpha: f64,
    order: u32,
    eps: f64,
) -> Result<f64, OracleError> {
    check_alpha(alpha)?;
    if order == 0 {
        return Err(OracleError::ZeroOrder);
    }
    quotient(f, t, alpha, order, eps)
}

fn quotient(f: &GridFn<'_>, t: f64, alpha: f64, order: u32, eps: f64) -> Result<f64, OracleError> {
    if order == 0 {
        return f.eval(t);
    }
    let h = eps * math::pow(t, 1.0 - alpha);
    let (lo, hi) = (t - h, t + h);
    if lo < f.lo || hi > f.hi {
        let bad = if lo < f.lo { lo } else { hi };
        return Err(OracleError::DomainViolation {
            t: bad,
            lo: f.lo,
            hi: f.hi,
        });
    }
    let up = quotient(f, hi, alpha, order - 1, eps)?;
    let down = quotient(f, lo, alpha, order - 1, eps)?;
    Ok((up - down) / (2.0 * eps))
}

/// `I_α^a f(t) = ∫_a^t x^{α-1} f(x) dx` by adaptive Simpson.
pub fn numeric_conformable_integral(f: &GridFn<'_>, a: f64, t: f64, alpha: f64) -> Result<f64, OracleError> {
    check_alpha(alpha)?;
    if !(a > 0.0 && a < t) {
        return Err(OracleError::BadDomain { lo: a, hi: t });
    }
    f.eval(a)?;
    f.eval(t)?;
    let g = |x: f64| -> Result<f64, OracleError> { Ok(math::pow(x, alpha - 1.0) * f.eval(x)?) };
    integrate(&g, a, t)
}

struct Simpson<'g> {
    g: &'g dyn Fn(f64) -> Result<f64, OracleError>,
    evals: usize,
    failed: bool,
}

impl Simpson<'_> {
    fn eval(&mut self, x: f64) -> Result<f64, OracleError> {
        self.evals += 1;
        (self.g)(x)
    }

    #[allow(clippy::too_many_arguments)]
    fn step(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, OracleError> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let both = left + right;
        let delta = both - whole;
        let target = tol.max(QUAD_TOL * math::abs(both));
        if math::abs(delta) <= 15.0 * target {
            return Ok(both + delta / 15.0);
        }
        if depth >= QUAD_MAX_DEPTH || self.evals >= QUAD_MAX_EVALS {
            self.failed = true;
            return Ok(both + delta / 15.0);
        }
        Ok(self.step(a, m, fa, flm, fm, left, tol / 2.0, depth + 1)?
            + self.step(m, b, fm, frm, fb, right, tol / 2.0, depth + 1)?)
    }
}

fn integrate(g: &dyn Fn(f64) -> Result<f64, OracleError>, a: f64, b: f64) -> Result<f64, OracleError> {
    let mut s = Simpson {
        g,
        evals: 0,
        failed: false,
    };
    let fa = s.eval(a)?;
    let fm = s.eval(0.5 * (a + b))?;
    let fb = s.eval(b)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let estimate = s.step(a, b, fa, fm, fb, whole, QUAD_TOL, 0)?;
    if s.failed {
        Err(OracleError::QuadratureFailed { estimate })
    } else {
        Ok(estimate)
    }
}

/// `|∫_a^b f T_α g d_α − (fg|_a^b − ∫_a^b g T_α f d_α)|`, every piece
/// computed numerically from point evaluations of `f` and `g`.
pub fn integration_by_parts_check(f: &UExpr, g: &UExpr, a: f64, b: f64, alpha: f64) -> Result<f64, OracleError> {
    check_alpha(alpha)?;
    if !(a > 0.0 && a < b) {
        return Err(OracleError::BadDomain { lo: a, hi: b });
    }
    let subst = SubstMap::new(alpha).map_err(|_| OracleError::InvalidAlpha(alpha))?;
    let fv = uexpr_fn(f, subst);
    let gv = uexpr_fn(g, subst);
    let (lo, hi) = (a / 2.0, 2.0 * b);
    let ff = GridFn::new(&fv, lo, hi)?;
    let gf = GridFn::new(&gv, lo, hi)?;
    let weight = |x: f64| math::pow(x, alpha - 1.0);
    let lhs = integrate(
        &|x| Ok(weight(x) * ff.eval(x)? * numeric_t_alpha_derivative(&gf, x, alpha, 1)?),
        a,
        b,
    )?;
    let boundary = ff.eval(b)? * gf.eval(b)? - ff.eval(a)? * gf.eval(a)?;
    let rhs_int = integrate(
        &|x| Ok(weight(x) * gf.eval(x)? * numeric_t_alpha_derivative(&ff, x, alpha, 1)?),
        a,
        b,
    )?;
    Ok(math::abs(lhs - (boundary - rhs_int)))
}

/// Relative residual of `ⁿT_α y + Σ p_i ⁱT_α y − q` at `t`:
/// `|L y − q| / ((1 + Σ|p_i|)·max_k |ᵏT_α y| + |q|)`, or the absolute value
/// when that scale is zero.
///
/// The scale uses the whole derivative jet rather than the terms of the sum:
/// for oscillating `y` the terms that appear can all vanish at once (e.g.
/// `cos u` under `T4 + 5 T2 + 4`) while the stencil error does not.
pub fn operator_residual(
    y: &GridFn<'_>,
    coeffs: &[f64],
    q: &dyn Fn(f64) -> f64,
    t: f64,
    alpha: f64,
) -> Result<f64, OracleError> {
    check_alpha(alpha)?;
    let qt = q(t);
    if !qt.is_finite() {
        return Err(OracleError::NonFinite { t });
    }
    let n = coeffs.len() as u32;
    if n == 0 {
        return Err(OracleError::ZeroOrder);
    }
    let mut sum = numeric_t_alpha_derivative(y, t, alpha, n)?;
    let mut jet = math::abs(sum);
    let mut weight = 1.0;
    for (i, &p) in coeffs.iter().enumerate() {
        let d = if i == 0 {
            y.eval(t)?
        } else {
            numeric_t_alpha_derivative(y, t, alpha, i as u32)?
        };
        sum += p * d;
        jet = jet.max(math::abs(d));
        weight += math::abs(p);
    }
    sum -= qt;
    let scale = weight * jet + math::abs(qt);
    Ok(if scale > 0.0 {
        math::abs(sum) / scale
    } else {
        math::abs(sum)
    })
}

/// `count ≥ 2` points spaced evenly in `ln t` over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> alloc::vec::Vec<f64> {
    let (a, b) = (math::ln(lo), math::ln(hi));
    let last = count.max(2) - 1;
    (0..=last)
        .map(|i| match i {
            0 => lo,
            i if i == last => hi,
            i => math::exp(a + (b - a) * i as f64 / last as f64),
        })
        .collect()
}
