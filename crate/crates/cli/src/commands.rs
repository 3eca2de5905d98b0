use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::process::ExitCode;
use std::thread;

use cfde_core::conformable::{log_grid, operator_residual, uexpr_fn, DOMAIN_FLOOR};
use cfde_core::{parse_equation, EquationAst, GeneralSolution, GridFn, SubstMap, UExpr, UTerm};
use serde::Serialize;

use crate::args::{Columns, Common, VerifyArgs};
use crate::doc::SolutionDoc;
use crate::error::CliError;

/// Default verification grid.
const VERIFY_LO: f64 = 0.01;
const VERIFY_HI: f64 = 3.0;
const VERIFY_COUNT: usize = 50;

struct Source {
    text: String,
    ast: EquationAst,
}

fn load_equation(c: &Common) -> Result<Option<Source>, CliError> {
    let text = match (&c.equation, &c.file) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?
            .trim()
            .to_string(),
        (None, None) => return Ok(None),
    };
    let ast = parse_equation(&text).map_err(|error| CliError::Parse {
        source: text.clone(),
        error,
    })?;
    Ok(Some(Source { text, ast }))
}

fn require_equation(c: &Common) -> Result<Source, CliError> {
    load_equation(c)?.ok_or_else(|| CliError::Usage("no equation given (pass it as an argument or with --file)".into()))
}

fn check_alpha(a: f64) -> Result<f64, CliError> {
    if a > 0.0 && a <= 1.0 {
        Ok(a)
    } else {
        Err(CliError::Usage(format!("alpha must lie in (0, 1], got {a}")))
    }
}

fn alphas(c: &Common) -> Result<Option<Vec<f64>>, CliError> {
    let list = match (&c.alpha, &c.alpha_list) {
        (Some(a), _) => vec![*a],
        (None, Some(l)) if !l.is_empty() => l.clone(),
        _ => return Ok(None),
    };
    list.into_iter()
        .map(check_alpha)
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn require_alphas(c: &Common) -> Result<Vec<f64>, CliError> {
    alphas(c)?.ok_or_else(|| CliError::Usage("--alpha (or --alpha-list) is required".into()))
}

fn number(s: &str, what: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Usage(format!("invalid {what} '{s}'")))
}

fn parse_ic(s: &str) -> Result<(f64, Vec<f64>), CliError> {
    let (t0, vals) = s
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("--ic expects t0:v0,v1,..., got '{s}'")))?;
    let t0 = number(t0, "--ic time")?;
    if t0 <= 0.0 {
        return Err(CliError::Usage(format!("--ic time must be positive, got {t0}")));
    }
    let vals = vals
        .split(',')
        .map(|v| number(v, "--ic value"))
        .collect::<Result<_, _>>()?;
    Ok((t0, vals))
}

struct Range {
    lo: f64,
    hi: f64,
    count: usize,
}

fn parse_range(s: &str) -> Result<Range, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(CliError::Usage(format!("--range expects lo:hi:n, got '{s}'")));
    };
    let lo = number(lo, "--range start")?;
    let hi = number(hi, "--range end")?;
    let count: usize = n
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid --range count '{n}'")))?;
    if lo <= 0.0 {
        return Err(CliError::Usage(format!("--range start must be positive, got {lo}")));
    }
    if hi <= lo {
        return Err(CliError::Usage(format!("--range end must exceed start, got {lo}:{hi}")));
    }
    if count < 2 {
        return Err(CliError::Usage(format!(
            "--range count must be at least 2, got {count}"
        )));
    }
    Ok(Range { lo, hi, count })
}

/// Everything needed to evaluate or check one solution at one α.
struct Solved {
    alpha: f64,
    coeffs: Vec<f64>,
    forcing: UExpr,
    basis: Vec<UExpr>,
    particular: Option<UExpr>,
    constants: Option<Vec<f64>>,
    doc: SolutionDoc,
}

impl Solved {
    fn combined(&self) -> UExpr {
        let mut terms: Vec<UTerm> = Vec::new();
        for (i, y) in self.basis.iter().enumerate() {
            let c = self.constants.as_ref().map_or(1.0, |c| c[i]);
            terms.extend(y.terms().iter().map(|t| t.with_coeff(c * t.coeff())));
        }
        if let Some(v) = &self.particular {
            terms.extend_from_slice(v.terms());
        }
        UExpr::from_terms(terms)
    }
}

fn solve_one(src: &Source, alpha: f64, c: &Common) -> Result<Solved, CliError> {
    let problem = src.ast.to_problem(alpha)?;
    let mut sol: GeneralSolution = problem.solve()?;
    if let Some(ic) = &c.ic {
        let (t0, vals) = parse_ic(ic)?;
        sol = sol.with_initial_values(t0, &vals, problem.subst())?;
    } else if let Some(consts) = &c.constants {
        if consts.len() != sol.basis.len() {
            return Err(CliError::Usage(format!(
                "--constants needs {} values, got {}",
                sol.basis.len(),
                consts.len()
            )));
        }
        sol.constants = Some(consts.clone());
    }
    let doc = SolutionDoc::new(&src.text, problem.coeffs(), problem.forcing(), alpha, &sol);
    Ok(Solved {
        alpha,
        coeffs: problem.coeffs().to_vec(),
        forcing: problem.forcing().clone(),
        basis: sol.basis.exprs().cloned().collect(),
        particular: sol.particular.clone(),
        constants: sol.constants.clone(),
        doc,
    })
}

/// Run `f` for every α, concurrently when there is more than one.
fn sweep<T: Send>(alphas: &[f64], f: impl Fn(f64) -> Result<T, CliError> + Sync) -> Result<Vec<T>, CliError> {
    if alphas.len() == 1 {
        return Ok(vec![f(alphas[0])?]);
    }
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = alphas.iter().map(|&a| s.spawn(move || f(a))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    })
}

fn out(s: &str) -> Result<(), CliError> {
    let mut stdout = io::stdout().lock();
    stdout
        .write_all(s.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
}

fn json_string<T: Serialize>(docs: &[T], single: bool) -> String {
    let mut s = if single {
        serde_json::to_string_pretty(&docs[0])
    } else {
        serde_json::to_string_pretty(docs)
    }
    .expect("documents serialize");
    s.push('\n');
    s
}

/// Six significant digits, trailing zeros trimmed.
fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&exp) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn render_solution(s: &Solved) -> String {
    let d = &s.doc;
    let mut o = String::new();
    let u = UExpr::from(UTerm::power(1.0, 1)).render_t(s.alpha);
    let _ = writeln!(o, "equation:       {}", d.equation);
    let _ = writeln!(o, "alpha:          {}   (u = t^a/a = {u})", s.alpha);
    let poly = cfde_core::CharPoly::new(s.coeffs.clone()).expect("validated coefficients");
    let _ = writeln!(o, "characteristic: {poly} = 0");
    let roots: Vec<String> = d
        .roots
        .iter()
        .map(|r| {
            let z = if r.im == 0.0 {
                sig6(r.re)
            } else {
                format!("{} ± {}i", sig6(r.re), sig6(r.im.abs()))
            };
            if r.mult > 1 {
                format!("{z} (multiplicity {})", r.mult)
            } else {
                z
            }
        })
        .collect();
    let _ = writeln!(o, "roots:          {}", roots.join(", "));
    let _ = writeln!(o, "basis:");
    for (i, b) in d.basis.iter().enumerate() {
        let _ = writeln!(o, "  y{} = {}    [t-form: {}]", i + 1, b.expr.u_form, b.expr.t_form);
    }
    if let Some(v) = &d.particular {
        let _ = writeln!(o, "particular:");
        let _ = writeln!(o, "  v = {}    [t-form: {}]", v.u_form, v.t_form);
        let coeffs: Vec<String> = v.terms.iter().map(|t| sig6(t.coeff)).collect();
        let _ = writeln!(o, "  u-coefficients: {}", coeffs.join(", "));
    }
    let names: Vec<String> = (1..=d.basis.len()).map(|i| format!("c{i}·y{i}")).collect();
    let tail = if d.particular.is_some() { " + v" } else { "" };
    let _ = writeln!(o, "general:        y = {}{tail}", names.join(" + "));
    if let Some(c) = &d.constants {
        let vals: Vec<String> = c
            .iter()
            .enumerate()
            .map(|(i, x)| format!("c{} = {}", i + 1, sig6(*x)))
            .collect();
        let _ = writeln!(o, "constants:      {}", vals.join(", "));
        let _ = writeln!(o, "  y = {}", s.combined());
    }
    o
}

pub fn solve(c: &Common) -> Result<ExitCode, CliError> {
    let src = require_equation(c)?;
    let alphas = require_alphas(c)?;
    let solved = sweep(&alphas, |a| solve_one(&src, a, c))?;
    if c.json {
        let docs: Vec<&SolutionDoc> = solved.iter().map(|s| &s.doc).collect();
        out(&json_string(&docs, c.alpha.is_some()))?;
    } else {
        let text: Vec<String> = solved.iter().map(render_solution).collect();
        out(&text.join("\n"))?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    pub name: String,
    pub max_residual: f64,
    pub worst_t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridDoc {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub spacing: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub alpha: f64,
    pub equation: String,
    pub grid: GridDoc,
    pub tolerance: f64,
    pub components: Vec<Component>,
    pub max_residual: f64,
    pub worst_t: f64,
    pub worst_component: String,
    pub pass: bool,
}

fn check_component(name: String, y: &UExpr, q: &UExpr, coeffs: &[f64], alpha: f64, grid: &[f64]) -> Component {
    let subst = SubstMap::new(alpha).expect("alpha validated");
    let yf = uexpr_fn(y, subst);
    let qf = uexpr_fn(q, subst);
    let hi = grid.last().copied().unwrap_or(1.0);
    let g = GridFn::new(&yf, DOMAIN_FLOOR, 2.0 * hi + 1.0).expect("valid domain");
    let mut worst = Component {
        name,
        max_residual: 0.0,
        worst_t: grid[0],
    };
    for &t in grid {
        // An oracle failure (non-finite values, stencil off the domain) counts
        // as an infinite residual at that point.
        let r = operator_residual(&g, coeffs, &qf, t, alpha).unwrap_or(f64::INFINITY);
        if !(r <= worst.max_residual) {
            worst.max_residual = r;
            worst.worst_t = t;
        }
    }
    worst
}

fn verify_one(s: &Solved, grid: &[f64], range: &GridDoc, tol: f64) -> VerifyReport {
    let zero = UExpr::zero();
    let mut components: Vec<Component> = s
        .basis
        .iter()
        .enumerate()
        .map(|(i, y)| check_component(format!("y{}", i + 1), y, &zero, &s.coeffs, s.alpha, grid))
        .collect();
    if let Some(v) = &s.particular {
        components.push(check_component(
            "particular".into(),
            v,
            &s.forcing,
            &s.coeffs,
            s.alpha,
            grid,
        ));
    }
    components.push(check_component(
        "y".into(),
        &s.combined(),
        &s.forcing,
        &s.coeffs,
        s.alpha,
        grid,
    ));
    let worst = components.iter().fold(
        &components[0],
        |w, c| if !(c.max_residual <= w.max_residual) { c } else { w },
    );
    VerifyReport {
        alpha: s.alpha,
        equation: s.doc.equation.clone(),
        grid: range.clone(),
        tolerance: tol,
        max_residual: worst.max_residual,
        worst_t: worst.worst_t,
        worst_component: worst.name.clone(),
        pass: worst.max_residual <= tol,
        components,
    }
}

fn render_report(r: &VerifyReport) -> String {
    let mut o = String::new();
    let _ = writeln!(
        o,
        "alpha {}: {} log-spaced points on [{}, {}], tolerance {:e}",
        r.alpha, r.grid.count, r.grid.lo, r.grid.hi, r.tolerance
    );
    for c in &r.components {
        let _ = writeln!(
            o,
            "  {:<12} max residual {:.3e} at t = {}",
            c.name,
            c.max_residual,
            sig6(c.worst_t)
        );
    }
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        o,
        "  {verdict}: max residual {:.3e} ({} at t = {})",
        r.max_residual,
        r.worst_component,
        sig6(r.worst_t)
    );
    o
}

fn read_solution(path: &str) -> Result<Vec<SolutionDoc>, CliError> {
    let text = if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Usage(format!("cannot read solution from stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?
    };
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("solution document: {e}")))?;
    let docs = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|d| vec![d])
    };
    docs.map_err(|e| CliError::Usage(format!("solution document: {e}")))
}

fn from_doc(doc: SolutionDoc, src: Option<&Source>, c: &Common) -> Result<Solved, CliError> {
    let alpha = check_alpha(doc.alpha)?;
    if let Some(a) = c.alpha {
        if a != alpha {
            return Err(CliError::Usage(format!(
                "--alpha {a} does not match the solution document (alpha {alpha})"
            )));
        }
    }
    let (coeffs, forcing) = match src {
        Some(src) => {
            let p = src.ast.to_problem(alpha)?;
            (p.coeffs().to_vec(), p.forcing().clone())
        }
        None => (doc.coeffs.clone(), doc.forcing.to_uexpr()?),
    };
    if doc.basis.len() != coeffs.len() {
        return Err(CliError::Usage(format!(
            "solution document has {} basis elements for an order-{} equation",
            doc.basis.len(),
            coeffs.len()
        )));
    }
    let basis = doc
        .basis
        .iter()
        .map(|b| b.expr.to_uexpr())
        .collect::<Result<Vec<_>, _>>()?;
    let particular = doc.particular.as_ref().map(|p| p.to_uexpr()).transpose()?;
    let constants = match &c.constants {
        Some(k) if k.len() != basis.len() => {
            return Err(CliError::Usage(format!(
                "--constants needs {} values, got {}",
                basis.len(),
                k.len()
            )))
        }
        Some(k) => Some(k.clone()),
        None => doc.constants.clone(),
    };
    if let Some(k) = &constants {
        if k.len() != basis.len() {
            return Err(CliError::Usage(
                "solution document: constants do not match the basis".into(),
            ));
        }
    }
    Ok(Solved {
        alpha,
        coeffs,
        forcing,
        basis,
        particular,
        constants,
        doc,
    })
}

pub fn verify(v: &VerifyArgs) -> Result<ExitCode, CliError> {
    let c = &v.common;
    let (lo, hi, count) = match &c.range {
        Some(r) => {
            let r = parse_range(r)?;
            (r.lo.max(VERIFY_LO), r.hi, r.count)
        }
        None => (VERIFY_LO, VERIFY_HI, VERIFY_COUNT),
    };
    if hi <= lo {
        return Err(CliError::Usage(format!("verification range [{lo}, {hi}] is empty")));
    }
    if !(c.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", c.tol)));
    }
    let grid = log_grid(lo, hi, count);
    let range = GridDoc {
        lo,
        hi,
        count,
        spacing: "log",
    };

    let solved: Vec<Solved> = match &v.solution {
        Some(path) => {
            if c.ic.is_some() {
                return Err(CliError::Usage("--ic cannot be combined with --solution".into()));
            }
            if c.alpha_list.is_some() {
                return Err(CliError::Usage(
                    "--alpha-list cannot be combined with --solution".into(),
                ));
            }
            let src = load_equation(c)?;
            read_solution(path)?
                .into_iter()
                .map(|d| from_doc(d, src.as_ref(), c))
                .collect::<Result<_, _>>()?
        }
        None => {
            let src = require_equation(c)?;
            let alphas = require_alphas(c)?;
            sweep(&alphas, |a| solve_one(&src, a, c))?
        }
    };
    let reports: Vec<VerifyReport> = thread::scope(|s| {
        let handles: Vec<_> = solved
            .iter()
            .map(|sol| s.spawn(|| verify_one(sol, &grid, &range, c.tol)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verify thread panicked"))
            .collect()
    });
    if c.json {
        out(&json_string(&reports, reports.len() == 1 && c.alpha_list.is_none()))?;
    } else {
        let text: Vec<String> = reports.iter().map(render_report).collect();
        out(&text.join("\n"))?;
    }
    match reports.iter().find(|r| !r.pass) {
        None => Ok(ExitCode::SUCCESS),
        Some(r) => Err(CliError::Verify(format!(
            "verification failed at alpha {}: residual {:.3e} of {} at t = {} exceeds tolerance {:e}",
            r.alpha,
            r.max_residual,
            r.worst_component,
            sig6(r.worst_t),
            r.tolerance
        ))),
    }
}

pub fn sample(c: &Common) -> Result<ExitCode, CliError> {
    let src = require_equation(c)?;
    let alphas = require_alphas(c)?;
    if alphas.len() != 1 {
        return Err(CliError::Usage("sample takes a single --alpha".into()));
    }
    let range = parse_range(
        c.range
            .as_deref()
            .ok_or_else(|| CliError::Usage("sample needs --range lo:hi:n".into()))?,
    )?;
    let s = solve_one(&src, alphas[0], c)?;
    let subst = SubstMap::new(s.alpha).expect("alpha validated");
    let y = s.combined();

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string(), "y".to_string()];
    if c.columns == Columns::Full {
        header.extend((1..=s.basis.len()).map(|i| format!("y_basis_{i}")));
        header.push("y_particular".into());
    }
    let csv_err = |e: csv::Error| CliError::Usage(format!("cannot write CSV: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    let last = range.count - 1;
    for i in 0..range.count {
        let t = if i == last {
            range.hi
        } else {
            range.lo + (range.hi - range.lo) * i as f64 / last as f64
        };
        let eval = |e: &UExpr| e.eval(t, &subst).expect("t validated positive");
        let mut row = vec![t, eval(&y)];
        if c.columns == Columns::Full {
            row.extend(s.basis.iter().map(eval));
            row.push(s.particular.as_ref().map_or(0.0, eval));
        }
        w.write_record(row.iter().map(|x| x.to_string())).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Usage(format!("cannot write CSV: {e}")))?;
    out(&String::from_utf8(bytes).expect("CSV is UTF-8"))?;
    Ok(ExitCode::SUCCESS)
}
