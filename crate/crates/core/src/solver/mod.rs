//! Homogeneous basis, the operator `L_α`, and particular solutions by
//! variation of parameters.
//!
//! Everything runs in `u = t^α/α`, where `ⁿT_α` is the `n`-fold `d/du`. The
//! variation-of-parameters system
//!
//! ```text
//! Σ c_i'(u) · d^j y_i/du^j = 0      j = 0 … n-2
//! Σ c_i'(u) · d^{n-1} y_i/du^{n-1} = q
//! ```
//!
//! is solved by Cramer's rule. Its determinant (the Wronskian) is a single
//! term `C·e^{-p_{n-1} u}`, so the only division needed stays inside the
//! algebra.

mod det;
mod linalg;

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::chareq::{CharPoly, RootError, RootSet};
use crate::ualgebra::{AlgebraError, SubstMap, Trig, UExpr, UTerm, PRUNE_REL};

#[derive(Clone, Debug, PartialEq)]
pub enum SolveError {
    EmptyEquation,
    NonFiniteCoefficient,
    Algebra(AlgebraError),
    Roots(RootError),
    /// The Wronskian did not collapse to one `C·e^{a·u}` term.
    WronskianBreakdown {
        terms: usize,
    },
    ZeroForcing,
    /// Expected `expected` values (basis size), got `got`.
    WrongTargetCount {
        expected: usize,
        got: usize,
    },
    SingularSystem,
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::EmptyEquation => f.write_str("equation must have order >= 1"),
            SolveError::NonFiniteCoefficient => f.write_str("equation has a non-finite coefficient"),
            SolveError::Algebra(e) => e.fmt(f),
            SolveError::Roots(e) => e.fmt(f),
            SolveError::WronskianBreakdown { terms } => write!(
                f,
                "Wronskian did not reduce to a single exponential term ({terms} terms survived)"
            ),
            SolveError::ZeroForcing => f.write_str("particular solution requested for a zero forcing term"),
            SolveError::WrongTargetCount { expected, got } => {
                write!(f, "expected {expected} initial values, got {got}")
            }
            SolveError::SingularSystem => f.write_str("initial-value system is numerically singular"),
        }
    }
}

impl core::error::Error for SolveError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            SolveError::Algebra(e) => Some(e),
            SolveError::Roots(e) => Some(e),
            _ => None,
        }
    }
}

impl From<AlgebraError> for SolveError {
    fn from(e: AlgebraError) -> Self {
        SolveError::Algebra(e)
    }
}

impl From<RootError> for SolveError {
    fn from(e: RootError) -> Self {
        SolveError::Roots(e)
    }
}

/// `ⁿT_α y + p_{n-1} ⁿ⁻¹T_α y + … + p_0 y = q(t)` with `q` already in `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    coeffs: Vec<f64>,
    subst: SubstMap,
    forcing: UExpr,
}

impl ProblemSpec {
    /// `coeffs[i]` is `p_i`; the order is `coeffs.len()`.
    pub fn new(coeffs: Vec<f64>, alpha: f64, forcing: UExpr) -> Result<Self, SolveError> {
        if coeffs.is_empty() {
            return Err(SolveError::EmptyEquation);
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(SolveError::NonFiniteCoefficient);
        }
        Ok(ProblemSpec {
            coeffs,
            subst: SubstMap::new(alpha)?,
            forcing,
        })
    }

    pub fn homogeneous(coeffs: Vec<f64>, alpha: f64) -> Result<Self, SolveError> {
        Self::new(coeffs, alpha, UExpr::zero())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn alpha(&self) -> f64 {
        self.subst.alpha()
    }

    pub fn subst(&self) -> &SubstMap {
        &self.subst
    }

    pub fn forcing(&self) -> &UExpr {
        &self.forcing
    }

    pub fn char_poly(&self) -> CharPoly {
        CharPoly::new(self.coeffs.clone()).expect("validated at construction")
    }

    /// `L_α[y] = ⁿT_α y + Σ p_i ⁱT_α y`, with `ⁱT_α` applied as repeated `d/du`.
    pub fn apply_operator(&self, y: &UExpr) -> UExpr {
        UExpr::from_terms(self.operator_terms(y))
    }

    fn operator_terms(&self, y: &UExpr) -> Vec<UTerm> {
        let mut terms = Vec::new();
        let mut d = y.clone();
        for &p in &self.coeffs {
            terms.extend(d.terms().iter().map(|t| t.with_coeff(p * t.coeff())));
            d = d.diff_u();
        }
        terms.extend_from_slice(d.terms());
        terms
    }

    /// `L_α[y] − q`, merged in a single canonicalization so the prune
    /// threshold sees every contribution to a key.
    pub fn residual(&self, y: &UExpr) -> UExpr {
        let mut terms = self.operator_terms(y);
        terms.extend(self.forcing.terms().iter().map(|t| t.with_coeff(-t.coeff())));
        UExpr::from_terms(terms)
    }

    pub fn homogeneous_basis(&self) -> Result<SolutionBasis, SolveError> {
        let roots = self.char_poly().find_roots()?;
        let mut elements = Vec::with_capacity(self.order());
        for entry in roots.iter() {
            let r = entry.root;
            if entry.is_real() {
                for l in 0..entry.mult {
                    elements.push(BasisElement {
                        expr: UTerm::exp(1.0, r.re).with_upow(l).into(),
                        root: r,
                        power: l,
                        part: BasisPart::Real,
                    });
                }
            } else if r.im > 0.0 {
                for l in 0..entry.mult {
                    for (trig, part) in [(Trig::Cos, BasisPart::Cos), (Trig::Sin, BasisPart::Sin)] {
                        elements.push(BasisElement {
                            expr: UTerm::new(1.0, l, r.re, trig, r.im).into(),
                            root: r,
                            power: l,
                            part,
                        });
                    }
                }
            }
        }
        Ok(SolutionBasis { elements, roots })
    }

    /// Homogeneous basis plus, for non-zero forcing, the particular solution.
    pub fn solve(&self) -> Result<GeneralSolution, SolveError> {
        let basis = self.homogeneous_basis()?;
        let particular = if self.forcing.is_zero() {
            None
        } else {
            Some(self.particular_solution(&basis)?.v)
        };
        Ok(GeneralSolution {
            basis,
            particular,
            constants: None,
        })
    }

    /// Variation of parameters: `c_i' = sign_i·minor_i·q / W`,
    /// `c_i = ∫ c_i' du`, `v = Σ c_i y_i`.
    ///
    /// Long cancellation chains (repeated roots, near-resonance) can leave
    /// `v` a few ulps off in a way the final canonicalization cannot see, so
    /// `v` gets up to [`REFINE_STEPS`] rounds of iterative refinement: the
    /// residual is fed back through the same Cramer solve and subtracted.
    /// The residual is normalized first so its terms clear the prune floor.
    pub fn particular_solution(&self, basis: &SolutionBasis) -> Result<ParticularSolution, SolveError> {
        if self.forcing.is_zero() {
            return Err(SolveError::ZeroForcing);
        }
        let cramer = Cramer::new(basis)?;
        let (mut v, cderivs, cfuncs) = cramer.solve(&self.forcing, basis)?;
        for _ in 0..REFINE_STEPS {
            let r = self.residual(&v);
            if r.is_zero() {
                break;
            }
            let scale = r.max_coeff();
            let (dv, _, _) = cramer.solve(&r.scale(1.0 / scale), basis)?;
            let mut terms = v.terms().to_vec();
            terms.extend(dv.terms().iter().map(|t| t.with_coeff(-scale * t.coeff())));
            v = UExpr::from_terms(terms);
        }
        Ok(ParticularSolution { v, cderivs, cfuncs })
    }
}

/// Maximum refinement rounds in [`ProblemSpec::particular_solution`].
pub const REFINE_STEPS: usize = 3;

struct Cramer {
    minors: Vec<UExpr>,
    wronskian: UTerm,
}

impl Cramer {
    fn new(basis: &SolutionBasis) -> Result<Self, SolveError> {
        let m = basis.derivative_matrix();
        let minors = det::last_row_minors(&m);
        let wronskian = wronskian_from_minors(&m, &minors)?;
        Ok(Cramer { minors, wronskian })
    }

    fn solve(&self, forcing: &UExpr, basis: &SolutionBasis) -> Result<(UExpr, Vec<UExpr>, Vec<UExpr>), SolveError> {
        let n = self.minors.len();
        let mut cderivs = Vec::with_capacity(n);
        let mut cfuncs = Vec::with_capacity(n);
        let mut v_terms = Vec::new();
        for (i, minor) in self.minors.iter().enumerate() {
            let numerator = minor.mul(forcing).scale(det::last_row_sign(n, i));
            let cd = numerator.div_by_term(&self.wronskian)?;
            let c = cd.integrate_u();
            v_terms.extend_from_slice(c.mul(basis.element(i)).terms());
            cderivs.push(cd);
            cfuncs.push(c);
        }
        Ok((UExpr::from_terms(v_terms), cderivs, cfuncs))
    }
}

/// Which member of the real-form basis an element is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisPart {
    /// `u^l e^{r u}` for a real root `r`.
    Real,
    /// `u^l e^{θu} cos(βu)` for the pair `θ ± iβ`.
    Cos,
    /// `u^l e^{θu} sin(βu)` for the pair `θ ± iβ`.
    Sin,
}

impl BasisPart {
    pub fn name(self) -> &'static str {
        match self {
            BasisPart::Real => "real",
            BasisPart::Cos => "cos",
            BasisPart::Sin => "sin",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisElement {
    pub expr: UExpr,
    /// Generating root; for complex pairs the member with positive imaginary part.
    pub root: Complex64,
    /// Power `l` of `u`.
    pub power: u32,
    pub part: BasisPart,
}

/// `n` linearly independent solutions of the homogeneous equation, in real form.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionBasis {
    elements: Vec<BasisElement>,
    roots: RootSet,
}

impl SolutionBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &UExpr {
        &self.elements[i].expr
    }

    pub fn exprs(&self) -> impl Iterator<Item = &UExpr> {
        self.elements.iter().map(|e| &e.expr)
    }

    pub fn roots(&self) -> &RootSet {
        &self.roots
    }

    /// Entry `(i, j)` is `ⁱT_α y_j`, i.e. `d^i y_j / du^i`.
    pub fn derivative_matrix(&self) -> Vec<Vec<UExpr>> {
        let n = self.len();
        let mut rows: Vec<Vec<UExpr>> = Vec::with_capacity(n);
        rows.push(self.exprs().cloned().collect());
        for i in 1..n {
            let next = rows[i - 1].iter().map(UExpr::diff_u).collect();
            rows.push(next);
        }
        rows
    }

    /// Determinant of [`derivative_matrix`](Self::derivative_matrix), which
    /// for a fundamental set is a single term `C·e^{a·u}`, `a = −p_{n-1}`.
    pub fn wronskian(&self) -> Result<UTerm, SolveError> {
        let m = self.derivative_matrix();
        let minors = det::last_row_minors(&m);
        wronskian_from_minors(&m, &minors)
    }
}

/// Expand along the last row and require a single `C·e^{a·u}` term. Other
/// surviving terms are tolerated only below the rounding floor of the whole
/// expansion (`PRUNE_REL` times its coefficient mass); the memoized minors
/// are canonicalized on the way up, which hides that mass from the final
/// merge.
fn wronskian_from_minors(m: &[Vec<UExpr>], minors: &[UExpr]) -> Result<UTerm, SolveError> {
    let n = m.len();
    let mut terms = Vec::new();
    for (i, minor) in minors.iter().enumerate() {
        let s = det::last_row_sign(n, i);
        terms.extend(
            m[n - 1][i]
                .mul(minor)
                .terms()
                .iter()
                .map(|t| t.with_coeff(s * t.coeff())),
        );
    }
    let w = UExpr::from_terms(terms);
    let floor = PRUNE_REL * det::expansion_mass(m);
    let significant: Vec<&UTerm> = w.terms().iter().filter(|t| t.coeff().abs() > floor).collect();
    match significant.as_slice() {
        [t] if t.is_pure_exponential() => Ok(**t),
        ts => Err(SolveError::WronskianBreakdown { terms: ts.len() }),
    }
}

/// Output of variation of parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticularSolution {
    /// `v = Σ c_i y_i`
    pub v: UExpr,
    /// `c_i' = T_α c_i`, the Cramer solutions.
    pub cderivs: Vec<UExpr>,
    /// `c_i`, antiderivatives with zero integration constant.
    pub cfuncs: Vec<UExpr>,
}

/// `y = Σ c_i y_i + v`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralSolution {
    pub basis: SolutionBasis,
    pub particular: Option<UExpr>,
    pub constants: Option<Vec<f64>>,
}

impl GeneralSolution {
    /// Solve for the constants so that `ⁱT_α y(t0) = targets[i]`,
    /// `i = 0 … n-1`.
    pub fn fit_constants(&self, t0: f64, targets: &[f64], subst: &SubstMap) -> Result<Vec<f64>, SolveError> {
        let n = self.basis.len();
        if targets.len() != n {
            return Err(SolveError::WrongTargetCount {
                expected: n,
                got: targets.len(),
            });
        }
        let u0 = subst.u_of(t0)?;
        let matrix: Vec<Vec<f64>> = self
            .basis
            .derivative_matrix()
            .iter()
            .map(|row| row.iter().map(|e| e.eval_u(u0)).collect())
            .collect();
        let mut rhs = targets.to_vec();
        if let Some(v) = &self.particular {
            let mut d = v.clone();
            for r in rhs.iter_mut() {
                *r -= d.eval_u(u0);
                d = d.diff_u();
            }
        }
        linalg::solve_dense(matrix, rhs).ok_or(SolveError::SingularSystem)
    }

    /// Fit and store the constants.
    pub fn with_initial_values(mut self, t0: f64, targets: &[f64], subst: &SubstMap) -> Result<Self, SolveError> {
        self.constants = Some(self.fit_constants(t0, targets, subst)?);
        Ok(self)
    }

    /// `Σ c_i y_i + v` as one expression. Missing constants default to 1.
    pub fn combined(&self) -> UExpr {
        let mut terms = Vec::new();
        for (i, y) in self.basis.exprs().enumerate() {
            let c = self.constants.as_ref().map_or(1.0, |cs| cs[i]);
            terms.extend(y.terms().iter().map(|t| t.with_coeff(c * t.coeff())));
        }
        if let Some(v) = &self.particular {
            terms.extend_from_slice(v.terms());
        }
        UExpr::from_terms(terms)
    }
}

#[cfg(test)]
mod tests;
