//! The JSON solution document. See `docs/json-schema.md`.

use cfde_core::chareq::RootSet;
use cfde_core::solver::BasisElement;
use cfde_core::{GeneralSolution, Trig, UExpr, UTerm};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub alpha: f64,
    pub equation: String,
    pub order: usize,
    /// `p_0 … p_{n-1}` of the monic equation.
    pub coeffs: Vec<f64>,
    pub roots: Vec<RootDoc>,
    pub basis: Vec<BasisDoc>,
    pub particular: Option<ExprDoc>,
    pub forcing: ExprDoc,
    pub constants: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootDoc {
    pub re: f64,
    pub im: f64,
    pub mult: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisDoc {
    pub root: RootDoc,
    pub power: u32,
    pub part: String,
    pub expr: ExprDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExprDoc {
    pub u_form: String,
    pub t_form: String,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    pub coeff: f64,
    pub upow: u32,
    pub erate: f64,
    pub trig: String,
    pub tfreq: f64,
}

impl ExprDoc {
    pub fn new(e: &UExpr, alpha: f64) -> Self {
        ExprDoc {
            u_form: e.to_string(),
            t_form: e.render_t(alpha),
            terms: e
                .terms()
                .iter()
                .map(|t| TermDoc {
                    coeff: t.coeff(),
                    upow: t.upow(),
                    erate: t.erate(),
                    trig: t.trig().name().to_string(),
                    tfreq: t.tfreq(),
                })
                .collect(),
        }
    }

    pub fn to_uexpr(&self) -> Result<UExpr, CliError> {
        self.terms
            .iter()
            .map(|t| {
                let trig = match t.trig.as_str() {
                    "none" => Trig::None,
                    "cos" => Trig::Cos,
                    "sin" => Trig::Sin,
                    other => return Err(CliError::Usage(format!("solution document: unknown trig '{other}'"))),
                };
                if ![t.coeff, t.erate, t.tfreq].iter().all(|x| x.is_finite()) {
                    return Err(CliError::Usage("solution document: non-finite term".into()));
                }
                Ok(UTerm::new(t.coeff, t.upow, t.erate, trig, t.tfreq))
            })
            .collect()
    }
}

fn roots_doc(roots: &RootSet) -> Vec<RootDoc> {
    roots
        .iter()
        .map(|e| RootDoc {
            re: e.root.re,
            im: e.root.im,
            mult: e.mult,
        })
        .collect()
}

fn basis_doc(el: &BasisElement, roots: &RootSet, alpha: f64) -> BasisDoc {
    let mult = roots.iter().find(|e| e.root == el.root).map_or(1, |e| e.mult);
    BasisDoc {
        root: RootDoc {
            re: el.root.re,
            im: el.root.im,
            mult,
        },
        power: el.power,
        part: el.part.name().to_string(),
        expr: ExprDoc::new(&el.expr, alpha),
    }
}

impl SolutionDoc {
    pub fn new(equation: &str, coeffs: &[f64], forcing: &UExpr, alpha: f64, sol: &GeneralSolution) -> Self {
        let roots = sol.basis.roots();
        SolutionDoc {
            alpha,
            equation: equation.to_string(),
            order: coeffs.len(),
            coeffs: coeffs.to_vec(),
            roots: roots_doc(roots),
            basis: sol
                .basis
                .elements()
                .iter()
                .map(|el| basis_doc(el, roots, alpha))
                .collect(),
            particular: sol.particular.as_ref().map(|v| ExprDoc::new(v, alpha)),
            forcing: ExprDoc::new(forcing, alpha),
            constants: sol.constants.clone(),
        }
    }
}
