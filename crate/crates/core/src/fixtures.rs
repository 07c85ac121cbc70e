//! Hand-built models shared by unit tests.

use crate::model::*;

fn var(name: &str) -> Expr {
    Expr::Var(VariableId::new(name).unwrap())
}

fn or(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinaryOp::Or, a, b)
}

fn and(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinaryOp::And, a, b)
}

fn eq(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinaryOp::Eq, a, b)
}

fn add(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinaryOp::Add, a, b)
}

fn eqn(target: &str, body: Expr) -> StructuralEquation {
    StructuralEquation::expr(target, body).unwrap()
}

fn binary(sig: Signature, exo: &[&str], endo: &[&str]) -> Signature {
    let sig = exo.iter().fold(sig, |s, n| s.exo(n, ValueRange::binary()).unwrap());
    endo.iter().fold(sig, |s, n| s.endo(n, ValueRange::binary()).unwrap())
}

pub fn suzy() -> CausalModel {
    let sig = binary(Signature::new(), &["U_ST", "U_BT"], &["ST", "BT", "SH", "BH", "BS"]);
    build_model(
        sig,
        vec![
            eqn("ST", var("U_ST")),
            eqn("BT", var("U_BT")),
            eqn("SH", var("ST")),
            eqn("BH", and(var("BT"), Expr::not(var("SH")))),
            eqn("BS", or(var("SH"), var("BH"))),
        ],
    )
    .unwrap()
}

pub fn example1() -> CausalModel {
    let sig = binary(Signature::new(), &["U"], &["A", "B", "C"]);
    build_model(
        sig,
        vec![
            eqn("B", var("U")),
            eqn("A", var("B")),
            eqn("C", or(var("A"), and(Expr::not(var("A")), var("B")))),
        ],
    )
    .unwrap()
}

/// One vote suffices to win.
pub fn voting() -> CausalModel {
    let sig = binary(Signature::new(), &["U_A", "U_B", "U_C"], &["A", "B", "C", "WIN"]);
    build_model(
        sig,
        vec![
            eqn("A", var("U_A")),
            eqn("B", var("U_B")),
            eqn("C", var("U_C")),
            eqn("WIN", or(or(var("A"), var("B")), var("C"))),
        ],
    )
    .unwrap()
}

/// Three scenario contexts; the third needs two matches.
pub fn arsonists() -> CausalModel {
    let sig = Signature::new()
        .exo("U", ValueRange::ints([1, 2, 3]).unwrap())
        .unwrap();
    let sig = binary(sig, &[], &["ML1", "ML2", "ML3", "FB"]);
    let u_is = |k| eq(var("U"), Expr::int(k));
    let matches = add(add(var("ML1"), var("ML2")), var("ML3"));
    build_model(
        sig,
        vec![
            eqn("ML1", Expr::int(1)),
            eqn("ML2", or(u_is(1), u_is(2))),
            eqn("ML3", or(u_is(2), u_is(3))),
            eqn(
                "FB",
                Expr::ite(
                    u_is(3),
                    Expr::binary(BinaryOp::Ge, matches.clone(), Expr::int(2)),
                    Expr::binary(BinaryOp::Ge, matches, Expr::int(1)),
                ),
            ),
        ],
    )
    .unwrap()
}

/// `O = X`, with `X` set by the context.
pub fn identity() -> CausalModel {
    let sig = binary(Signature::new(), &["U"], &["X", "O"]);
    build_model(sig, vec![eqn("X", var("U")), eqn("O", var("X"))]).unwrap()
}

pub fn ctx(m: &CausalModel, pairs: &[(&str, i64)]) -> Context {
    let pairs: Vec<(&str, Value)> = pairs.iter().map(|(n, v)| (*n, Value::Int(*v))).collect();
    m.context_from_values(&pairs).unwrap()
}

pub fn event(m: &CausalModel, name: &str, v: i64) -> Formula {
    Formula::eq(m, name, v).unwrap()
}
