//! Characteristic polynomial `P(r) = r^n + p_{n-1} r^{n-1} + … + p_0` and its
//! roots with multiplicities.
//!
//! Roots come from Aberth–Ehrlich simultaneous iteration. Iterates of an
//! `m`-fold root scatter on a circle of radius `~ε^{1/m}`, so the raw roots
//! are merged into clusters, each cluster is polished with Newton on
//! `P^{(m-1)}` (where the root is simple), and finally conjugate pairs are
//! made exact.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::math;

pub const MAX_ITERATIONS: usize = 200;
/// Aberth stops when every correction is below `STEP_TOL·(1 + |z|)`.
pub const STEP_TOL: f64 = 1e-13;
/// Raw roots within `CLUSTER_RADIUS·(1 + |z|)` are one multiple root.
pub const CLUSTER_RADIUS: f64 = 1e-6;
/// Wider radius for the derivative-checked second merge pass.
pub const WIDE_CLUSTER_RADIUS: f64 = 1e-3;
/// `|Im z| < IMAG_SNAP·(1 + |z|)` puts the root on the real axis.
pub const IMAG_SNAP: f64 = 1e-8;
/// Multiplicity consistency: `|P^{(j)}(r)|` below `DERIV_SMALL·scale` for
/// `j < m`, above `DERIV_LARGE·scale` for `j = m`, `scale = max(1, max|p_i|)`.
pub const DERIV_SMALL: f64 = 1e-6;
pub const DERIV_LARGE: f64 = 1e-3;

/// Monic real polynomial, stored as its lower coefficients `p_0 … p_{n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly {
    coeffs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RootError {
    EmptyPolynomial,
    NonFiniteCoefficient,
    NonConvergence {
        poly: CharPoly,
        iterations: usize,
    },
    /// A non-real root had no conjugate partner of equal multiplicity.
    UnpairedComplexRoot {
        poly: CharPoly,
        re: f64,
        im: f64,
    },
}

impl fmt::Display for RootError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootError::EmptyPolynomial => f.write_str("characteristic polynomial must have degree >= 1"),
            RootError::NonFiniteCoefficient => f.write_str("characteristic polynomial has a non-finite coefficient"),
            RootError::NonConvergence { poly, iterations } => write!(
                f,
                "root finder did not converge after {iterations} iterations for {poly}"
            ),
            RootError::UnpairedComplexRoot { poly, re, im } => {
                write!(f, "complex root {re}{im:+}i of {poly} has no conjugate partner")
            }
        }
    }
}

impl core::error::Error for RootError {}

impl CharPoly {
    /// `coeffs[i]` is `p_i`; the degree is `coeffs.len()`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self, RootError> {
        if coeffs.is_empty() {
            return Err(RootError::EmptyPolynomial);
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(RootError::NonFiniteCoefficient);
        }
        Ok(CharPoly { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `max(1, max|p_i|)`
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| math::abs(*c)).fold(1.0, f64::max)
    }

    /// All `n + 1` coefficients, constant term first, leading 1 last.
    fn full(&self) -> impl DoubleEndedIterator<Item = f64> + '_ {
        self.coeffs.iter().copied().chain(core::iter::once(1.0))
    }

    pub fn eval(&self, r: Complex64) -> Complex64 {
        self.full().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * r + a)
    }

    /// `order`-th derivative at `r`, by Horner on the differentiated
    /// coefficients `a_i · i!/(i-order)!`.
    pub fn eval_deriv(&self, r: Complex64, order: usize) -> Complex64 {
        let n = self.degree();
        if order > n {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in self
            .full()
            .enumerate()
            .skip(order)
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
        {
            let falling: f64 = ((i - order + 1)..=i).map(|x| x as f64).product();
            acc = acc * r + a * falling;
        }
        acc
    }

    /// `Σ |a_i|·|z|^i`, the rounding-error scale of [`eval`](Self::eval).
    fn abs_eval(&self, z: f64) -> f64 {
        self.full().rev().fold(0.0, |acc, a| acc * z + math::abs(a))
    }

    fn abs_eval_deriv(&self, z: f64, order: usize) -> f64 {
        let mut acc = 0.0;
        for (i, a) in self
            .full()
            .enumerate()
            .skip(order)
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
        {
            let falling: f64 = ((i - order + 1)..=i).map(|x| x as f64).product();
            acc = acc * z + math::abs(a) * falling;
        }
        acc
    }

    pub fn find_roots(&self) -> Result<RootSet, RootError> {
        let raw = self.aberth()?;
        let clusters = self.cluster(&raw);
        let polished: Vec<(Complex64, u32)> = clusters.into_iter().map(|(z, m)| (self.polish(z, m), m)).collect();
        self.pair_conjugates(polished)
    }

    fn aberth(&self) -> Result<Vec<Complex64>, RootError> {
        let n = self.degree();
        let radius = 1.0 + self.coeffs.iter().map(|c| math::abs(*c)).fold(0.0, f64::max);
        // Offset angle keeps guesses off the real axis and away from symmetry.
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let theta = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.4;
                Complex64::from_polar(radius, theta)
            })
            .collect();
        let eps = f64::EPSILON;

        for _ in 0..MAX_ITERATIONS {
            let mut done = true;
            for k in 0..n {
                let zk = z[k];
                let p = self.eval(zk);
                if p.norm() <= 4.0 * eps * self.abs_eval(zk.norm()) {
                    continue;
                }
                let dp = self.eval_deriv(zk, 1);
                let ratio = p / dp;
                let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (zk - z[j]).inv()).sum();
                let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                if !w.re.is_finite() || !w.im.is_finite() {
                    continue;
                }
                z[k] = zk - w;
                if w.norm() >= STEP_TOL * (1.0 + z[k].norm()) {
                    done = false;
                }
            }
            if done {
                return Ok(z);
            }
        }
        Err(RootError::NonConvergence {
            poly: self.clone(),
            iterations: MAX_ITERATIONS,
        })
    }

    /// Two-pass clustering: plain radius merge, then a wider merge accepted
    /// only when the low-order derivatives vanish at the polished centre.
    fn cluster(&self, raw: &[Complex64]) -> Vec<(Complex64, u32)> {
        let mut clusters: Vec<(Complex64, u32)> = Vec::new();
        for &z in raw {
            let hit = clusters.iter_mut().find(|(c, m)| {
                let centre = *c / *m as f64;
                (centre - z).norm() <= CLUSTER_RADIUS * (1.0 + centre.norm())
            });
            match hit {
                Some((sum, m)) => {
                    *sum += z;
                    *m += 1;
                }
                None => clusters.push((z, 1)),
            }
        }
        let mut clusters: Vec<(Complex64, u32)> = clusters.into_iter().map(|(s, m)| (s / m as f64, m)).collect();

        let mut rejected: Vec<(usize, usize)> = Vec::new();
        loop {
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..clusters.len() {
                for j in (i + 1)..clusters.len() {
                    if rejected.contains(&(i, j)) {
                        continue;
                    }
                    let d = (clusters[i].0 - clusters[j].0).norm();
                    let reach = WIDE_CLUSTER_RADIUS * (1.0 + clusters[i].0.norm());
                    if d <= reach && best.is_none_or(|b| d < b.0) {
                        best = Some((d, i, j));
                    }
                }
            }
            let Some((_, i, j)) = best else { break };
            let (zi, mi) = clusters[i];
            let (zj, mj) = clusters[j];
            let m = mi + mj;
            let centre = self.polish((zi * mi as f64 + zj * mj as f64) / m as f64, m);
            if self.derivatives_vanish(centre, m) {
                clusters[i] = (centre, m);
                clusters.remove(j);
                rejected.clear();
            } else {
                rejected.push((i, j));
            }
        }
        clusters
    }

    fn derivatives_vanish(&self, z: Complex64, m: u32) -> bool {
        (0..m as usize)
            .all(|j| self.eval_deriv(z, j).norm() <= DERIV_SMALL * self.abs_eval_deriv(z.norm(), j).max(1e-300))
    }

    /// Newton on `P^{(m-1)}`, where an `m`-fold root of `P` is simple.
    fn polish(&self, start: Complex64, m: u32) -> Complex64 {
        let order = (m - 1) as usize;
        let limit = WIDE_CLUSTER_RADIUS * (1.0 + start.norm());
        let mut z = start;
        for _ in 0..8 {
            let f = self.eval_deriv(z, order);
            let df = self.eval_deriv(z, order + 1);
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            let next = z - step;
            if !next.re.is_finite() || !next.im.is_finite() || (next - start).norm() > limit {
                break;
            }
            z = next;
            if step.norm() <= f64::EPSILON * (1.0 + z.norm()) {
                break;
            }
        }
        z
    }

    fn pair_conjugates(&self, roots: Vec<(Complex64, u32)>) -> Result<RootSet, RootError> {
        let mut real = Vec::new();
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for (z, m) in roots {
            if math::abs(z.im) < IMAG_SNAP * (1.0 + z.norm()) {
                real.push(RootEntry {
                    root: Complex64::new(z.re, 0.0),
                    mult: m,
                });
            } else if z.im > 0.0 {
                upper.push((z, m));
            } else {
                lower.push((z, m));
            }
        }
        let mut entries = real;
        for (z, m) in upper {
            let partner = lower
                .iter()
                .enumerate()
                .filter(|(_, (_, mw))| *mw == m)
                .min_by(|a, b| (a.1 .0.conj() - z).norm().total_cmp(&(b.1 .0.conj() - z).norm()))
                .map(|(i, _)| i);
            let Some(i) = partner else {
                return Err(RootError::UnpairedComplexRoot {
                    poly: self.clone(),
                    re: z.re,
                    im: z.im,
                });
            };
            let (w, _) = lower.remove(i);
            let avg = (z + w.conj()) * 0.5;
            entries.push(RootEntry { root: avg, mult: m });
            entries.push(RootEntry {
                root: avg.conj(),
                mult: m,
            });
        }
        if let Some(&(z, _)) = lower.first() {
            return Err(RootError::UnpairedComplexRoot {
                poly: self.clone(),
                re: z.re,
                im: z.im,
            });
        }
        entries.sort_by(|a, b| a.root.re.total_cmp(&b.root.re).then(a.root.im.total_cmp(&b.root.im)));
        Ok(RootSet { entries })
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        match n {
            1 => f.write_str("r")?,
            _ => write!(f, "r^{n}")?,
        }
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { '-' } else { '+' };
            let mag = math::abs(c);
            match i {
                0 => write!(f, " {sign} {mag}")?,
                1 => write!(f, " {sign} {mag}r")?,
                _ => write!(f, " {sign} {mag}r^{i}")?,
            }
        }
        Ok(())
    }
}

/// A root and its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootEntry {
    pub root: Complex64,
    pub mult: u32,
}

impl RootEntry {
    pub fn is_real(&self) -> bool {
        self.root.im == 0.0
    }
}

/// Roots with multiplicities, sorted by `(re, im)`. Non-real roots come in
/// exact conjugate pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    entries: Vec<RootEntry>,
}

impl RootSet {
    pub fn entries(&self) -> &[RootEntry] {
        &self.entries
    }

    pub fn iter(&self) -> core::slice::Iter<'_, RootEntry> {
        self.entries.iter()
    }

    pub fn degree(&self) -> usize {
        self.entries.iter().map(|e| e.mult as usize).sum()
    }

    /// Expand `∏ (r - root)^mult` and return the lower coefficients
    /// `p_0 … p_{n-1}` (real parts; imaginary parts cancel for conjugate-closed
    /// sets).
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut poly = alloc::vec![Complex64::new(1.0, 0.0)];
        for e in &self.entries {
            for _ in 0..e.mult {
                let mut next = alloc::vec![Complex64::new(0.0, 0.0); poly.len() + 1];
                for (i, &c) in poly.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] -= c * e.root;
                }
                poly = next;
            }
        }
        poly.pop();
        poly.into_iter().map(|c| c.re).collect()
    }
}

impl<'a> IntoIterator for &'a RootSet {
    type Item = &'a RootEntry;
    type IntoIter = core::slice::Iter<'a, RootEntry>;
    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
