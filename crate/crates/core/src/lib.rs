//! Closed-form solver for sequential linear conformable fractional
//! differential equations with constant coefficients,
//!
//! ```text
//! ⁿT_α y + p_{n-1} ⁿ⁻¹T_α y + … + p_1 T_α y + p_0 y = q(t),   α ∈ (0, 1].
//! ```
//!
//! All symbolic work happens in the substituted variable `u = t^α/α`. Under
//! that change of variable the conformable derivative `T_α f = t^{1-α} f'`
//! becomes `d/du`, so the equation is a classical constant-coefficient ODE in
//! `u` and every function that shows up (basis elements, forcing terms,
//! variation-of-parameters coefficients) is a finite sum of
//! `c·u^k·e^{a·u}·{1, cos(b·u), sin(b·u)}` terms.
//!
//! Modules:
//!
//! * [`ualgebra`]: the canonical exponential-polynomial-trigonometric algebra.
//! * [`chareq`]: characteristic polynomial and root finding with multiplicities.
//! * [`solver`]: homogeneous basis, the operator `L_α`, Wronskian, variation of
//!   parameters and initial-value fitting.
//! * [`conformable`]: a numeric conformable derivative / integral used as an
//!   independent oracle.
//! * [`eqparse`]: the plain-text equation language.
//!
//! The crate is `no_std` and only needs `alloc`. IO, the CLI and the JSON/CSV
//! formats live in the companion `cfde` crate.

#![cfg_attr(not(test), no_std)]
// `!(a < b)` is how NaN gets rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod chareq;
pub mod conformable;
pub mod eqparse;
mod math;
pub mod solver;
pub mod ualgebra;

pub use chareq::{CharPoly, RootError, RootSet};
pub use conformable::{GridFn, OracleError};
pub use eqparse::{parse_equation, EquationAst, ParseError, TExprAst};
pub use solver::{GeneralSolution, ProblemSpec, SolutionBasis, SolveError};
pub use ualgebra::{AlgebraError, SubstMap, Trig, UExpr, UTerm};
