use super::*;

fn binary_endo(sig: Signature, names: &[&str]) -> Signature {
    names
        .iter()
        .fold(sig, |s, n| s.endo(n, ValueRange::binary()).unwrap())
}

fn v(name: &str) -> Expr {
    Expr::Var(VariableId::new(name).unwrap())
}

fn or(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinaryOp::Or, a, b)
}

fn and(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinaryOp::And, a, b)
}

/// ST, BT driven by exogenous throws; BH uses the SH form.
fn suzy() -> CausalModel {
    let sig = Signature::new()
        .exo("U_ST", ValueRange::binary())
        .unwrap()
        .exo("U_BT", ValueRange::binary())
        .unwrap();
    let sig = binary_endo(sig, &["ST", "BT", "SH", "BH", "BS"]);
    let eqs = vec![
        StructuralEquation::expr("ST", v("U_ST")).unwrap(),
        StructuralEquation::expr("BT", v("U_BT")).unwrap(),
        StructuralEquation::expr("SH", v("ST")).unwrap(),
        StructuralEquation::expr("BH", and(v("BT"), Expr::not(v("SH")))).unwrap(),
        StructuralEquation::expr("BS", or(v("SH"), v("BH"))).unwrap(),
    ];
    build_model(sig, eqs).unwrap()
}

fn example1() -> CausalModel {
    let sig = Signature::new().exo("U", ValueRange::binary()).unwrap();
    let sig = binary_endo(sig, &["A", "B", "C"]);
    let eqs = vec![
        StructuralEquation::expr("B", v("U")).unwrap(),
        StructuralEquation::expr("A", v("B")).unwrap(),
        StructuralEquation::expr("C", or(v("A"), and(Expr::not(v("A")), v("B")))).unwrap(),
    ];
    build_model(sig, eqs).unwrap()
}

fn val(m: &CausalModel, a: &TotalAssignment, name: &str) -> Value {
    let id = m.var(name).unwrap();
    m.value(id, a.get(id)).clone()
}

#[test]
fn variables_are_ordered_exogenous_first_then_by_name() {
    let m = suzy();
    let names: Vec<&str> = m.variables().map(|x| m.name(x)).collect();
    assert_eq!(names, ["U_BT", "U_ST", "BH", "BS", "BT", "SH", "ST"]);
    assert_eq!(m.context_count(), 4);
}

#[test]
fn suzy_both_throw() {
    let m = suzy();
    let u = m
        .context_from_values(&[("U_ST", 1.into()), ("U_BT", 1.into())])
        .unwrap();
    let a = m.evaluate(&u);
    assert_eq!(val(&m, &a, "SH"), Value::Int(1));
    assert_eq!(val(&m, &a, "BH"), Value::Int(0));
    assert_eq!(val(&m, &a, "BS"), Value::Int(1));

    let iv = Intervention::named(&m, &[("ST", 0.into())]).unwrap();
    let mi = m.intervene(&iv).unwrap();
    let b = mi.evaluate(&u);
    assert_eq!(val(&mi, &b, "SH"), Value::Int(0));
    assert_eq!(val(&mi, &b, "BH"), Value::Int(1));
    assert_eq!(val(&mi, &b, "BS"), Value::Int(1));
}

#[test]
fn suzy_graph_edges() {
    let m = suzy();
    let g = m.causal_graph();
    let id = |n| m.var(n).unwrap();
    for (p, c) in [("ST", "SH"), ("BT", "BH"), ("SH", "BH"), ("SH", "BS"), ("BH", "BS")] {
        assert!(g.has_edge(id(p), id(c)), "{p} -> {c}");
    }
    let endo_edges = g
        .edges()
        .iter()
        .filter(|e| m.is_endogenous(e.parent))
        .count();
    assert_eq!(endo_edges, 5);
    // witnesses re-check against the source equations
    for e in g.edges() {
        let eq = m.equation(e.child).unwrap();
        let run = |pv: ValueIdx| {
            let env = |name: &VariableId| {
                let id = m.var(name.as_str())?;
                if id == e.parent {
                    return Some(m.value(id, pv).clone());
                }
                e.witness
                    .others
                    .iter()
                    .find(|(o, _)| *o == id)
                    .map(|(o, x)| m.value(*o, *x).clone())
            };
            eq.eval_body(&env).unwrap()
        };
        let (x0, x1) = e.witness.parent_values;
        assert_ne!(run(x0), run(x1));
    }
}

#[test]
fn example1_interventions() {
    let m = example1();
    let iv = Intervention::named(&m, &[("A", 0.into()), ("B", 0.into())]).unwrap();
    let c0 = Formula::eq(&m, "C", 0).unwrap();
    let f = Formula::causal(iv, c0).unwrap();
    for u in m.contexts() {
        assert!(m.satisfies(&u, &f).unwrap());
    }
}

#[test]
fn cycle_is_rejected_with_names() {
    let sig = binary_endo(Signature::new(), &["A", "B"]);
    let eqs = vec![
        StructuralEquation::expr("A", v("B")).unwrap(),
        StructuralEquation::expr("B", v("A")).unwrap(),
    ];
    match build_model(sig, eqs) {
        Err(Error::CyclicModel { cycle }) => {
            assert!(cycle.contains(&"A".to_string()) && cycle.contains(&"B".to_string()))
        }
        other => panic!("expected cycle, got {other:?}"),
    }
}

#[test]
fn spurious_syntactic_parent_is_not_a_cycle() {
    // A mentions B but does not depend on it
    let sig = binary_endo(Signature::new(), &["A", "B"]);
    let eqs = vec![
        StructuralEquation::expr("A", or(Expr::int(1), v("B"))).unwrap(),
        StructuralEquation::expr("B", v("A")).unwrap(),
    ];
    let m = build_model(sig, eqs).unwrap();
    assert!(m.parents(m.var("A").unwrap()).is_empty());
}

#[test]
fn out_of_range_output_names_assignment() {
    let sig = Signature::new().exo("U", ValueRange::binary()).unwrap();
    let sig = binary_endo(sig, &["A"]);
    let eqs = vec![StructuralEquation::expr(
        "A",
        Expr::binary(BinaryOp::Add, v("U"), Expr::int(1)),
    )
    .unwrap()];
    match build_model(sig, eqs) {
        Err(Error::OutOfRangeEquationOutput { assignment, value, .. }) => {
            assert_eq!(assignment, "(U=1)");
            assert_eq!(value, "2");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn missing_and_duplicate_equations() {
    let sig = binary_endo(Signature::new(), &["A", "B"]);
    let only_a = vec![StructuralEquation::expr("A", Expr::int(0)).unwrap()];
    assert_eq!(
        build_model(sig.clone(), only_a).unwrap_err(),
        Error::MissingEquation("B".into())
    );
    let twice = vec![
        StructuralEquation::expr("A", Expr::int(0)).unwrap(),
        StructuralEquation::expr("A", Expr::int(1)).unwrap(),
        StructuralEquation::expr("B", Expr::int(1)).unwrap(),
    ];
    assert_eq!(
        build_model(sig, twice).unwrap_err(),
        Error::DuplicateEquation("A".into())
    );
}

#[test]
fn constant_equation_has_no_parents() {
    let sig = Signature::new().exo("U", ValueRange::binary()).unwrap();
    let sig = binary_endo(sig, &["O"]);
    let m = build_model(sig, vec![StructuralEquation::expr("O", Expr::int(0)).unwrap()]).unwrap();
    let o = m.var("O").unwrap();
    assert!(m.causal_graph().parents_of(o).next().is_none());
    for u in m.contexts() {
        assert_eq!(m.evaluate(&u).get(o), 0);
    }
}

#[test]
fn table_equation_with_default() {
    let sig = Signature::new()
        .exo("U", ValueRange::ints([1, 2, 3]).unwrap())
        .unwrap();
    let sig = binary_endo(sig, &["A"]);
    let t = TableEquation {
        parents: vec![VariableId::new("U").unwrap()],
        rows: vec![(vec![Value::Int(2)], Value::Int(1))],
        default: Value::Int(0),
    };
    let m = build_model(sig, vec![StructuralEquation::table("A", t).unwrap()]).unwrap();
    let a = m.var("A").unwrap();
    let got: Vec<ValueIdx> = m.contexts().map(|u| m.evaluate(&u).get(a)).collect();
    assert_eq!(got, [0, 1, 0]);
}

#[test]
fn scale_guard() {
    let mut sig = Signature::new();
    for i in 0..23 {
        sig = sig.exo(&format!("U{i}"), ValueRange::binary()).unwrap();
    }
    assert!(matches!(
        build_model(sig, vec![]),
        Err(Error::ScaleExceeded { .. })
    ));
}

#[test]
fn context_index_round_trips() {
    let m = suzy();
    for i in 0..m.context_count() {
        assert_eq!(m.context_index(&m.context(i)), i);
    }
    // first exogenous variable (U_BT) is most significant
    assert_eq!(m.context(2).values(), &[1, 0]);
}

#[test]
fn formula_display() {
    let m = example1();
    let iv = Intervention::named(&m, &[("A", 0.into())]).unwrap();
    let body = Formula::or(
        Formula::not(Formula::eq(&m, "C", 1).unwrap()),
        Formula::eq(&m, "B", 1).unwrap(),
    );
    let f = Formula::and(Formula::causal(iv, body).unwrap(), Formula::eq(&m, "A", 1).unwrap());
    assert_eq!(m.display_formula(&f), "[A<-0](C!=1 | B=1) & A=1");
}

#[test]
fn nested_intervention_rejected() {
    let m = example1();
    let inner = Formula::causal(
        Intervention::named(&m, &[("B", 1.into())]).unwrap(),
        Formula::eq(&m, "C", 1).unwrap(),
    )
    .unwrap();
    let outer = Formula::causal(Intervention::named(&m, &[("A", 0.into())]).unwrap(), inner);
    assert_eq!(outer.unwrap_err(), Error::NestedIntervention);
}
