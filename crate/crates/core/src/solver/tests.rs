use super::*;
use proptest::prelude::*;

fn e(c: f64, a: f64) -> UExpr {
    UTerm::exp(c, a).into()
}

fn ue(c: f64, k: u32, a: f64) -> UExpr {
    UTerm::exp(c, a).with_upow(k).into()
}

fn spec(p: &[f64], alpha: f64, q: UExpr) -> ProblemSpec {
    ProblemSpec::new(p.to_vec(), alpha, q).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn operator_eigen_identity_at_two() {
    let s = spec(&[3.0, 4.0], 1.0, UExpr::zero());
    assert_eq!(s.apply_operator(&e(1.0, 2.0)), e(15.0, 2.0));
}

#[test]
fn operator_annihilates_roots() {
    let s = spec(&[3.0, 4.0], 0.5, UExpr::zero());
    assert!(s.apply_operator(&e(1.0, -3.0)).is_zero());
    let s = spec(&[25.0, -10.0], 0.5, UExpr::zero());
    assert!(s.apply_operator(&ue(1.0, 1, 5.0)).is_zero());
}

#[test]
fn operator_is_sequential_composition() {
    // T applied three times to u^3 is 6
    let s = spec(&[0.0, 0.0, 0.0], 0.3, UExpr::zero());
    assert_eq!(s.apply_operator(&UTerm::power(1.0, 3).into()), UExpr::constant(6.0));
}

#[test]
fn basis_distinct_real() {
    let b = spec(&[3.0, 4.0], 0.7, UExpr::zero()).homogeneous_basis().unwrap();
    assert_eq!(b.len(), 2);
    assert_eq!(b.element(0), &e(1.0, -3.0));
    assert_eq!(b.element(1), &e(1.0, -1.0));
    assert!(b.elements().iter().all(|x| x.part == BasisPart::Real && x.power == 0));
}

#[test]
fn basis_double_root() {
    let b = spec(&[25.0, -10.0], 0.5, UExpr::zero()).homogeneous_basis().unwrap();
    assert_eq!(b.len(), 2);
    assert_eq!(b.element(0), &e(1.0, 5.0));
    assert_eq!(b.element(1), &ue(1.0, 1, 5.0));
    assert_eq!(b.elements()[1].power, 1);
    assert_eq!(b.roots().entries()[0].mult, 2);
}

#[test]
fn basis_complex_pair() {
    let b = spec(&[1.0, 1.0], 0.25, UExpr::zero()).homogeneous_basis().unwrap();
    let h = 3f64.sqrt() / 2.0;
    assert_eq!(b.len(), 2);
    let [c, s] = [&b.elements()[0], &b.elements()[1]];
    assert_eq!((c.part, s.part), (BasisPart::Cos, BasisPart::Sin));
    let tc = c.expr.terms()[0];
    let ts = s.expr.terms()[0];
    assert!(close(tc.erate(), -0.5, 1e-12) && close(tc.tfreq(), h, 1e-12));
    assert_eq!((tc.trig(), ts.trig()), (Trig::Cos, Trig::Sin));
    assert_eq!((tc.erate(), tc.tfreq()), (ts.erate(), ts.tfreq()));
}

#[test]
fn derivative_matrix_examples() {
    let b = spec(&[3.0, 4.0], 1.0, UExpr::zero()).homogeneous_basis().unwrap();
    let m = b.derivative_matrix();
    assert_eq!(m[0], vec![e(1.0, -3.0), e(1.0, -1.0)]);
    assert_eq!(m[1], vec![e(-3.0, -3.0), e(-1.0, -1.0)]);

    let b = spec(&[2.0], 1.0, UExpr::zero()).homogeneous_basis().unwrap();
    let m = b.derivative_matrix();
    assert_eq!(m.len(), 1);
    assert_eq!(m[0], vec![e(1.0, -2.0)]);

    let b = spec(&[25.0, -10.0], 1.0, UExpr::zero()).homogeneous_basis().unwrap();
    let m = b.derivative_matrix();
    assert_eq!(m[1][0], e(5.0, 5.0));
    assert_eq!(m[1][1], e(1.0, 5.0).add(&ue(5.0, 1, 5.0)));
}

#[test]
fn wronskian_examples() {
    // e^{-3u}(-e^{-u}) - e^{-u}(-3e^{-3u}) = 2e^{-4u}
    let w = spec(&[3.0, 4.0], 1.0, UExpr::zero())
        .homogeneous_basis()
        .unwrap()
        .wronskian()
        .unwrap();
    assert!(close(w.coeff(), 2.0, 1e-12) && close(w.erate(), -4.0, 1e-12));
    // e^{5u}(e^{5u} + 5u e^{5u}) - u e^{5u}·5e^{5u} = e^{10u}
    let w = spec(&[25.0, -10.0], 1.0, UExpr::zero())
        .homogeneous_basis()
        .unwrap()
        .wronskian()
        .unwrap();
    assert!(close(w.coeff(), 1.0, 1e-12) && close(w.erate(), 10.0, 1e-12));
    // β e^{2θu} with θ = -1/2, β = √3/2
    let w = spec(&[1.0, 1.0], 1.0, UExpr::zero())
        .homogeneous_basis()
        .unwrap()
        .wronskian()
        .unwrap();
    assert!(close(w.coeff(), 3f64.sqrt() / 2.0, 1e-12) && close(w.erate(), -1.0, 1e-12));
}

#[test]
fn particular_exponential_forcing() {
    for alpha in [0.1, 0.25, 0.5, 0.75, 1.0] {
        let s = spec(&[3.0, 4.0], alpha, e(1.0, 2.0 * alpha));
        let b = s.homogeneous_basis().unwrap();
        let p = s.particular_solution(&b).unwrap();
        assert_eq!(p.v.len(), 1, "alpha {alpha}: {}", p.v);
        let t = p.v.terms()[0];
        let expect = 1.0 / (4.0 * alpha * alpha + 8.0 * alpha + 3.0);
        assert!(close(t.coeff(), expect, 1e-12));
        assert!(close(t.erate(), 2.0 * alpha, 1e-14));
        // c_1' = -1/2 e^{(2α+3)u}, c_2' = 1/2 e^{(2α+1)u}
        assert!(close(
            p.cderivs[0].coeff_of(0, 2.0 * alpha + 3.0, Trig::None, 0.0),
            -0.5,
            1e-12
        ));
        assert!(close(
            p.cderivs[1].coeff_of(0, 2.0 * alpha + 1.0, Trig::None, 0.0),
            0.5,
            1e-12
        ));
        // c_1 = -e^{(2α+3)u}/(4α+6) in u-form: coefficient -1/(2(2α+3))
        assert!(close(
            p.cfuncs[0].coeff_of(0, 2.0 * alpha + 3.0, Trig::None, 0.0),
            -1.0 / (4.0 * alpha + 6.0),
            1e-12
        ));
        assert!(s.residual(&p.v).is_zero());
    }
}

#[test]
fn particular_polynomial_forcing() {
    for alpha in [0.25, 0.5, 0.75, 1.0] {
        // 2t^{2α} + t^α − 3 = 2α²u² + αu − 3
        let q = UExpr::from_terms([
            UTerm::power(2.0 * alpha * alpha, 2),
            UTerm::power(alpha, 1),
            UTerm::constant(-3.0),
        ]);
        let s = spec(&[3.0, 4.0], alpha, q);
        let v = s.solve().unwrap().particular.unwrap();
        // t-form coefficient of t^{kα} is c_k / α^k
        let t2 = v.coeff_of(2, 0.0, Trig::None, 0.0) / (alpha * alpha);
        let t1 = v.coeff_of(1, 0.0, Trig::None, 0.0) / alpha;
        let t0 = v.coeff_of(0, 0.0, Trig::None, 0.0);
        assert!(close(t2, 2.0 / 3.0, 1e-12));
        assert!(close(t1, (3.0 - 16.0 * alpha) / 9.0, 1e-12));
        assert!(close(t0, (52.0 * alpha * alpha - 12.0 * alpha - 27.0) / 27.0, 1e-12));
        assert_eq!(v.len(), 3);
    }
}

#[test]
fn particular_resonant_forcing() {
    // α = 3/4: e^{-4t^α} = e^{-3u}, and -3 is a root
    let s = spec(&[3.0, 4.0], 0.75, e(1.0, -3.0));
    let v = s.solve().unwrap().particular.unwrap();
    assert!(close(v.coeff_of(1, -3.0, Trig::None, 0.0), -0.5, 1e-12), "{v}");
    assert!(s.residual(&v).is_zero());
    // α = 1/4: e^{-4t^α} = e^{-u}, and -1 is a root
    let s = spec(&[3.0, 4.0], 0.25, e(1.0, -1.0));
    let v = s.solve().unwrap().particular.unwrap();
    assert!(close(v.coeff_of(1, -1.0, Trig::None, 0.0), 0.5, 1e-12), "{v}");
    assert!(s.residual(&v).is_zero());
}

#[test]
fn particular_rejects_zero_forcing() {
    let s = spec(&[3.0, 4.0], 1.0, UExpr::zero());
    let b = s.homogeneous_basis().unwrap();
    assert_eq!(s.particular_solution(&b), Err(SolveError::ZeroForcing));
    assert_eq!(s.solve().unwrap().particular, None);
}

#[test]
fn fit_constants_examples() {
    let sub = SubstMap::new(1.0).unwrap();
    let s = spec(&[3.0, 4.0], 1.0, UExpr::zero());
    let g = s.solve().unwrap();
    // forward-evaluate c = (1, 1) at t0 = 1: y = e^{-3}+e^{-1}, T y = -3e^{-3}-e^{-1}
    let (a, b) = ((-3f64).exp(), (-1f64).exp());
    let c = g.fit_constants(1.0, &[a + b, -3.0 * a - b], &sub).unwrap();
    assert!(close(c[0], 1.0, 1e-12) && close(c[1], 1.0, 1e-12), "{c:?}");

    let g1 = spec(&[1.0], 1.0, UExpr::zero()).solve().unwrap();
    assert_eq!(g1.fit_constants(2.0, &[0.0], &sub).unwrap(), vec![0.0]);

    let c = g.fit_constants(0.5, &[0.0, 0.0], &sub).unwrap();
    assert!(c.iter().all(|x| *x == 0.0));

    assert_eq!(
        g.fit_constants(1.0, &[1.0], &sub),
        Err(SolveError::WrongTargetCount { expected: 2, got: 1 })
    );
    assert!(matches!(
        g.fit_constants(0.0, &[1.0, 1.0], &sub),
        Err(SolveError::Algebra(AlgebraError::NonPositiveTime(_)))
    ));
}

#[test]
fn fit_constants_with_particular() {
    let sub = SubstMap::new(0.5).unwrap();
    let s = spec(&[3.0, 4.0], 0.5, e(1.0, 1.0));
    let g = s.solve().unwrap();
    let g = g.with_initial_values(1.0, &[0.0, 0.0], &sub).unwrap();
    let y = g.combined();
    let u0 = sub.u_of(1.0).unwrap();
    assert!(y.eval_u(u0).abs() < 1e-13);
    assert!(y.diff_u().eval_u(u0).abs() < 1e-13);
    assert!(s.residual(&y).is_zero());
}

#[test]
fn spec_validation() {
    assert_eq!(
        ProblemSpec::new(vec![], 1.0, UExpr::zero()),
        Err(SolveError::EmptyEquation)
    );
    assert_eq!(
        ProblemSpec::new(vec![1.0], 1.5, UExpr::zero()),
        Err(SolveError::Algebra(AlgebraError::InvalidAlpha(1.5)))
    );
    assert_eq!(
        ProblemSpec::new(vec![f64::INFINITY], 1.0, UExpr::zero()),
        Err(SolveError::NonFiniteCoefficient)
    );
}

// ---- properties -----------------------------------------------------------

fn arb_coeffs(max_order: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 1..=max_order)
}

/// Coefficients built from well-separated roots, so multiple roots and
/// complex pairs actually occur.
fn arb_rooted_coeffs(max_order: usize) -> impl Strategy<Value = Vec<f64>> {
    let real = (-4i32..=4, 1u32..=3).prop_map(|(r, m)| (r as f64 / 2.0, 0.0, m));
    let pair = (-3i32..=3, 1i32..=3, 1u32..=2).prop_map(|(a, b, m)| (a as f64 / 2.0, b as f64 / 2.0, m));
    prop::collection::vec(prop_oneof![real, pair], 1..4).prop_map(move |v| {
        let mut poly = vec![1.0f64];
        let mut seen: Vec<(f64, f64)> = Vec::new();
        for (re, im, m) in v {
            let deg = if im == 0.0 { m } else { 2 * m } as usize;
            if poly.len() - 1 + deg > max_order || seen.iter().any(|&(a, b)| a == re && b == im) {
                continue;
            }
            seen.push((re, im));
            let factor: Vec<f64> = if im == 0.0 {
                vec![-re, 1.0]
            } else {
                vec![re * re + im * im, -2.0 * re, 1.0]
            };
            for _ in 0..m {
                let mut next = vec![0.0; poly.len() + factor.len() - 1];
                for (i, a) in poly.iter().enumerate() {
                    for (j, b) in factor.iter().enumerate() {
                        next[i + j] += a * b;
                    }
                }
                poly = next;
            }
        }
        poly.pop();
        poly
    })
}

fn arb_forcing() -> impl Strategy<Value = UExpr> {
    let term = (
        -3.0..3.0f64,
        0u32..3,
        prop_oneof![Just(0.0), -2.0..2.0f64],
        prop_oneof![Just(Trig::None), Just(Trig::Cos), Just(Trig::Sin)],
        0.3..2.5f64,
    )
        .prop_map(|(c, k, a, trig, b)| UTerm::new(c, k, a, trig, b));
    prop::collection::vec(term, 1..=3)
        .prop_map(UExpr::from_terms)
        .prop_filter("non-zero forcing", |q| !q.is_zero())
}

proptest! {
    #[test]
    fn basis_count_equals_order(p in prop_oneof![arb_coeffs(6), arb_rooted_coeffs(6)]) {
        let s = ProblemSpec::homogeneous(p.clone(), 0.5).unwrap();
        let b = s.homogeneous_basis().unwrap();
        prop_assert_eq!(b.len(), p.len());
    }

    #[test]
    fn basis_elements_are_annihilated(p in prop_oneof![arb_coeffs(5), arb_rooted_coeffs(5)]) {
        let s = ProblemSpec::homogeneous(p, 0.5).unwrap();
        let b = s.homogeneous_basis().unwrap();
        for y in b.exprs() {
            let r = s.apply_operator(y);
            prop_assert!(r.is_zero(), "L[{}] = {}", y, r);
        }
    }

    #[test]
    fn eigen_identity(p in arb_coeffs(6), r in -3.0..3.0f64) {
        let s = ProblemSpec::homogeneous(p, 1.0).unwrap();
        let lhs = s.apply_operator(&e(1.0, r));
        let pr = s.char_poly().eval(Complex64::new(r, 0.0)).re;
        let got = lhs.coeff_of(0, r, Trig::None, 0.0);
        prop_assert!(lhs.len() <= 1);
        prop_assert!((got - pr).abs() <= 1e-10 * pr.abs().max(1.0), "{} vs {}", got, pr);
    }

    #[test]
    fn wronskian_rate_is_minus_trace(p in prop_oneof![arb_coeffs(5), arb_rooted_coeffs(5)]) {
        let s = ProblemSpec::homogeneous(p.clone(), 1.0).unwrap();
        let w = s.homogeneous_basis().unwrap().wronskian();
        prop_assert!(w.is_ok(), "{:?} for {:?}: {:?}", w, p, s.homogeneous_basis().unwrap().roots());
        let w = w.unwrap();
        let trace = p[p.len() - 1];
        prop_assert!((w.erate() + trace).abs() <= 1e-8 * trace.abs().max(1.0), "{} vs {}", w.erate(), -trace);
        prop_assert!(w.coeff() != 0.0);
    }

    #[test]
    fn particular_solution_has_zero_residual(
        p in prop_oneof![arb_coeffs(4), arb_rooted_coeffs(4)],
        q in arb_forcing(),
    ) {
        let s = ProblemSpec::new(p.clone(), 0.5, q).unwrap();
        let b = s.homogeneous_basis().unwrap();
        let ps = s.particular_solution(&b);
        prop_assert!(ps.is_ok(), "{:?} for {:?}: {:?}", ps, p, b.roots());
        let ps = ps.unwrap();
        let r = s.residual(&ps.v);
        prop_assert!(r.is_zero(), "residual {} for v = {}", r, ps.v);

        // The first n-1 conditions vanish, the last reproduces q.
        let m = b.derivative_matrix();
        let n = b.len();
        for (j, row) in m.iter().enumerate() {
            let mut terms = Vec::new();
            for (cd, y) in ps.cderivs.iter().zip(row) {
                terms.extend_from_slice(cd.mul(y).terms());
            }
            let combo = UExpr::from_terms(terms);
            if j + 1 < n {
                prop_assert!(combo.is_zero(), "condition {} = {}", j, combo);
            } else {
                prop_assert!(combo.sub(s.forcing()).is_zero(), "last condition {}", combo);
            }
        }
    }

    #[test]
    fn basis_is_annihilated_numerically(
        p in prop_oneof![arb_coeffs(3), arb_rooted_coeffs(3)].prop_filter("order >= 1", |p| !p.is_empty()),
        alpha in 0.25..=1.0f64,
    ) {
        use crate::conformable::{log_grid, operator_residual, uexpr_fn, GridFn};
        let s = ProblemSpec::homogeneous(p.clone(), alpha).unwrap();
        let b = s.homogeneous_basis().unwrap();
        let zero = |_: f64| 0.0;
        for y in b.exprs() {
            let f = uexpr_fn(y, *s.subst());
            let g = GridFn::new(&f, 0.01, 3.0).unwrap();
            for t in log_grid(0.1, 2.0, 8) {
                let r = operator_residual(&g, &p, &zero, t, alpha).unwrap();
                prop_assert!(r < 1e-6, "residual {:e} at t = {} for {} ({:?})", r, t, y, p);
            }
        }
    }
}
