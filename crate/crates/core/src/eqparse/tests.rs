use super::*;
use crate::ualgebra::Trig;
use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec;
use proptest::prelude::*;

fn b(e: TExprAst) -> Box<TExprAst> {
    Box::new(e)
}

fn kind(src: &str) -> ParseErrorKind {
    parse_equation(src).unwrap_err().kind
}

#[test]
fn example_equations() {
    let eq = parse_equation("T2 y + 4 T y + 3 y = exp(2 t^a)").unwrap();
    assert_eq!(eq.lhs, vec![(2, 1.0), (1, 4.0), (0, 3.0)]);
    assert_eq!(eq.rhs, Some(TExprAst::Exp(2.0)));
    assert_eq!(eq.coeffs(), vec![3.0, 4.0]);
    assert_eq!(eq.order(), 2);

    let eq = parse_equation("T2 y - 10 T y + 25 y = 0").unwrap();
    assert_eq!(eq.lhs, vec![(2, 1.0), (1, -10.0), (0, 25.0)]);
    assert_eq!(eq.rhs, None);
}

#[test]
fn dangling_plus() {
    let err = parse_equation("T2 y + y + = 3").unwrap_err();
    assert_eq!(err.offset, 9);
    assert!(matches!(err.kind, ParseErrorKind::DanglingOperator { op: '+', .. }));
    assert!(err.expected().contains(&"'y'"));
    assert_eq!(
        err.to_string(),
        "at byte 9: dangling '+': expected one of number, 'T', 'T<k>', 'y' after it"
    );
}

#[test]
fn forcing_shapes() {
    let cases = [
        ("exp(2 t^a)", TExprAst::Exp(2.0)),
        ("exp(2*t^a)", TExprAst::Exp(2.0)),
        ("exp(-4 t^a)", TExprAst::Exp(-4.0)),
        ("exp(-t^a)", TExprAst::Exp(-1.0)),
        ("exp(t^a)", TExprAst::Exp(1.0)),
        ("sin(2 t^a)", TExprAst::Sin(2.0)),
        ("cos(0.5 t^a)", TExprAst::Cos(0.5)),
        ("t^(2 a)", TExprAst::TPow(2)),
        ("t^(3*a)", TExprAst::TPow(3)),
        ("(t^a)^2", TExprAst::TPow(2)),
        ("(t^a)", TExprAst::TPow(1)),
        (
            "2 t^(2 a) + t^a - 3",
            TExprAst::Sub(
                b(TExprAst::Add(
                    b(TExprAst::Mul(b(TExprAst::Num(2.0)), b(TExprAst::TPow(2)))),
                    b(TExprAst::TPow(1)),
                )),
                b(TExprAst::Num(3.0)),
            ),
        ),
        (
            "exp(2 t^a) t^a",
            TExprAst::Mul(b(TExprAst::Exp(2.0)), b(TExprAst::TPow(1))),
        ),
        ("-3", TExprAst::Num(-3.0)),
        ("-t^a", TExprAst::Neg(b(TExprAst::TPow(1)))),
        (
            "2 * -1.5e-3",
            TExprAst::Mul(b(TExprAst::Num(2.0)), b(TExprAst::Num(-1.5e-3))),
        ),
    ];
    for (src, want) in cases {
        let eq = parse_equation(&alloc::format!("T y = {src}")).unwrap();
        assert_eq!(eq.rhs, Some(want), "{src}");
    }
}

#[test]
fn monic_normalization() {
    let eq = parse_equation("2 T2 y + 8 T y + 6 y = exp(2 t^a)").unwrap();
    assert_eq!(eq.lhs, vec![(2, 1.0), (1, 4.0), (0, 3.0)]);
    assert_eq!(
        eq.rhs,
        Some(TExprAst::Mul(b(TExprAst::Num(0.5)), b(TExprAst::Exp(2.0))))
    );
    assert_eq!(eq.to_string(), "T2 y + 4 T y + 3 y = 0.5 * exp(2 t^a)");

    let eq = parse_equation("-T y + y = 0").unwrap();
    assert_eq!(eq.lhs, vec![(1, 1.0), (0, -1.0)]);
}

#[test]
fn duplicate_orders_merge() {
    let eq = parse_equation("T2 y + T y + 2 * T y + y - y = 0").unwrap();
    assert_eq!(eq.lhs, vec![(2, 1.0), (1, 3.0)]);
    assert_eq!(eq.coeffs(), vec![0.0, 3.0]);
    let eq = parse_equation("y + T3 y = 1").unwrap();
    assert_eq!(eq.lhs, vec![(3, 1.0), (0, 1.0)]);
    assert_eq!(eq.coeffs(), vec![1.0, 0.0, 0.0]);
}

#[test]
fn errors() {
    assert_eq!(kind("0 T2 y + y = 1"), ParseErrorKind::ZeroLeadingCoefficient);
    assert_eq!(parse_equation("y + 0 T2 y = 1").unwrap_err().offset, 4);
    assert_eq!(kind("T2 y - T2 y + T y = 0"), ParseErrorKind::ZeroLeadingCoefficient);
    assert_eq!(kind("3 y = 1"), ParseErrorKind::NoDerivative);
    assert_eq!(kind("T13 y = 1"), ParseErrorKind::DerivativeOrderTooLarge(13));
    assert_eq!(kind("T y = log(t^a)"), ParseErrorKind::UnknownFunction("log".into()));
    assert_eq!(kind("T y = t^(65 a)"), ParseErrorKind::PowerTooLarge(65));
    assert_eq!(kind("T y = (t^a)^70"), ParseErrorKind::PowerTooLarge(70));
    assert_eq!(kind("T y = 1 & 2"), ParseErrorKind::UnexpectedChar('&'));
    for src in [
        "T y = t",
        "T y = t^2",
        "T y = y",
        "T y = exp(t)",
        "T y = (t^a + 1)^2",
        "T y = exp(t^(2 a))",
        "T y = sin(x)",
    ] {
        assert!(
            matches!(kind(src), ParseErrorKind::OutsideClass(_)),
            "{src}: {:?}",
            kind(src)
        );
    }
    let err = parse_equation("T y + y").unwrap_err();
    assert_eq!(err.offset, 7);
    assert_eq!(err.expected(), ["'='"]);
    assert_eq!(parse_equation("T y = 1)").unwrap_err().offset, 7);
    assert_eq!(parse_equation("").unwrap_err().offset, 0);
    assert_eq!(parse_equation("T y = ").unwrap_err().offset, 6);
    assert_eq!(parse_equation("T y = 2 *").unwrap_err().offset, 8);
    assert_eq!(parse_equation("T y = (1 + 2").unwrap_err().expected(), ["')'"]);
    assert_eq!(parse_equation("T y = x").unwrap_err().offset, 6);
    assert!(matches!(kind("T y = 1e999"), ParseErrorKind::InvalidNumber(_)));
    assert!(matches!(kind("Tx y = 1"), ParseErrorKind::Unexpected { .. }));
    assert!(matches!(kind("T y = t^(0 a)"), ParseErrorKind::Unexpected { .. }));
}

#[test]
fn lowering_examples() {
    let s = SubstMap::new(0.5).unwrap();
    let e = lower_forcing(&TExprAst::Exp(2.0), &s).unwrap();
    assert_eq!(e, UExpr::from(UTerm::exp(1.0, 1.0)));

    for alpha in [0.25, 0.5, 0.75, 1.0] {
        let s = SubstMap::new(alpha).unwrap();
        let q = parse_equation("T y = 2 t^(2 a) + t^a - 3").unwrap().rhs.unwrap();
        let e = lower_forcing(&q, &s).unwrap();
        assert_eq!(e.len(), 3);
        assert!((e.coeff_of(2, 0.0, Trig::None, 0.0) - 2.0 * alpha * alpha).abs() < 1e-15);
        assert!((e.coeff_of(1, 0.0, Trig::None, 0.0) - alpha).abs() < 1e-15);
        assert_eq!(e.coeff_of(0, 0.0, Trig::None, 0.0), -3.0);

        let e = lower_forcing(&TExprAst::Sin(2.0), &s).unwrap();
        assert_eq!(e, UExpr::from(UTerm::sin(1.0, 2.0 * alpha)));
    }
    assert_eq!(
        lower_forcing(&TExprAst::TPow(65), &s),
        Err(LowerError::PowerTooLarge(65))
    );
    assert_eq!(lower_forcing(&TExprAst::Num(f64::NAN), &s), Err(LowerError::NonFinite));
}

#[test]
fn to_problem() {
    let eq = parse_equation("T2 y + 4 T y + 3 y = exp(2 t^a)").unwrap();
    let p = eq.to_problem(0.5).unwrap();
    assert_eq!(p.coeffs(), [3.0, 4.0]);
    assert_eq!(p.forcing(), &UExpr::from(UTerm::exp(1.0, 1.0)));
    assert!(eq.to_problem(1.5).is_err());
    let h = parse_equation("T y = 0").unwrap().to_problem(1.0).unwrap();
    assert!(h.forcing().is_zero());
}

const SOURCES: &[&str] = &[
    "T2 y + 4 T y + 3 y = exp(2 t^a)",
    "T2 y - 10 T y + 25 y = 0",
    "T2 y + T y + y = 0",
    "T2 y + 4 T y + 3 y = 2 t^(2 a) + t^a - 3",
    "T2 y + 4 T y + 3 y = sin(2 t^a)",
    "T2 y + 4 T y + 3 y = exp(2 t^a) t^a",
    "T2 y + 4 T y + 3 y = exp(-4 t^a)",
    "3 T2 y - y = -(t^a)^3 * cos(-0.25 t^a) - -2",
    "0.5 T4 y + 2 T2 y + y = exp(-t^a) - (t^a - 1) * (2 - sin(t^a))",
    "T y = -(-t^a)",
    "-2 T y + 1e-3 y = 1 - (2 - 3)",
];

#[test]
fn round_trip_sources() {
    for src in SOURCES {
        let eq = parse_equation(src).unwrap();
        let again = parse_equation(&eq.to_string()).unwrap_or_else(|e| panic!("{src} -> {eq}: {e}"));
        assert_eq!(eq, again, "{src} -> {eq}");
    }
}

fn arb_ast() -> impl Strategy<Value = TExprAst> {
    let leaf = prop_oneof![
        (-5.0..5.0f64).prop_map(TExprAst::Num),
        (1u32..4).prop_map(TExprAst::TPow),
        (-3.0..3.0f64).prop_map(TExprAst::Exp),
        (-3.0..3.0f64).prop_map(TExprAst::Sin),
        (-3.0..3.0f64).prop_map(TExprAst::Cos),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| TExprAst::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| TExprAst::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| TExprAst::Mul(b(x), b(y))),
            inner.prop_filter_map("parser folds negated literals", |x| match x {
                TExprAst::Num(_) => None,
                x => Some(TExprAst::Neg(b(x))),
            }),
        ]
    })
}

proptest! {
    #[test]
    fn lowering_is_sound(ast in arb_ast(), alpha in 0.05..=1.0f64, t in 0.05..3.0f64) {
        let s = SubstMap::new(alpha).unwrap();
        let lowered = lower_forcing(&ast, &s).unwrap().eval(t, &s).unwrap();
        let direct = ast.eval_t(t, alpha);
        let scale = ast.magnitude_t(t, alpha).max(1e-300);
        prop_assert!((lowered - direct).abs() <= 1e-10 * scale, "{} vs {} for {}", lowered, direct, ast);
    }

    #[test]
    fn rendering_round_trips(
        ast in arb_ast(),
        lhs in proptest::collection::vec((0u32..6, -4.0..4.0f64), 1..5),
        lead in prop_oneof![Just(1.0), -3.0..3.0f64],
    ) {
        let mut src = alloc::format!("{lead} T6 y");
        for (k, c) in &lhs {
            let op = if *c < 0.0 { '-' } else { '+' };
            src.push_str(&alloc::format!(" {op} {} T{k} y", c.abs()));
        }
        src.push_str(&alloc::format!(" = {ast}"));
        match parse_equation(&src) {
            Ok(eq) => {
                let again = parse_equation(&eq.to_string());
                prop_assert_eq!(Ok(eq.clone()), again, "{}", eq);
                if lead == 1.0 {
                    prop_assert_eq!(eq.rhs, Some(ast).filter(|a| *a != TExprAst::Num(0.0)));
                }
            }
            Err(e) => prop_assert_eq!(e.kind, ParseErrorKind::ZeroLeadingCoefficient),
        }
    }

    #[test]
    fn parser_is_total(words in proptest::collection::vec(
        prop_oneof![
            Just("T"), Just("T2"), Just("y"), Just("="), Just("+"), Just("-"), Just("*"), Just("("), Just(")"),
            Just("t^a"), Just("t^("), Just("a"), Just("^"), Just("exp("), Just("sin("), Just("2"), Just("0"),
            Just("1.5e"), Just("log("), Just("&"), Just(" "), Just("t"), Just("é"),
        ],
        0..16,
    )) {
        let src: alloc::string::String = words.concat();
        if let Err(e) = parse_equation(&src) {
            prop_assert!(e.offset <= src.len());
            prop_assert!(src.is_char_boundary(e.offset));
            prop_assert!(!e.to_string().is_empty());
        }
    }
}
