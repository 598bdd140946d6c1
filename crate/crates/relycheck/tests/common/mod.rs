#![allow(dead_code)]

use proptest::prelude::*;
use relycheck::lang::ast::Prog;
use relycheck::logic::Expr;
use relycheck::structure::Structure;
use relycheck::syntax::{parse_assertion_with, parse_program_with, parse_source};

pub const DECLS: &str = "var x, y, t : 0..2; var b : bool; var a, c : 0..2;";

pub fn structure() -> Structure {
    parse_source(DECLS).unwrap().structure
}

pub fn prog(st: &Structure, src: &str) -> Prog {
    parse_program_with(src, st).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn expr(st: &Structure, src: &str) -> Expr {
    parse_assertion_with(src, st).unwrap_or_else(|e| panic!("{src}: {e}"))
}

const ATOMS: &[&str] = &[
    "skip",
    "x := y",
    "y := x",
    "x := 1",
    "y := 0",
    "x := 2 - y",
    "b := x = y",
    "b := not b",
];

const TESTS: &[&str] = &["x = y", "x < 2", "b", "not b", "y = 0", "true"];

fn pick(pool: &'static [&'static str]) -> impl Strategy<Value = String> {
    prop::sample::select(pool).prop_map(str::to_string)
}

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        6 => pick(ATOMS),
        1 => pick(ATOMS).prop_map(|a| format!("begin loc t; t := x; {a}; y := t end")),
        1 => (pick(TESTS), pick(ATOMS)).prop_map(|(e, a)| format!("await {e} do {a} od")),
    ]
}

/// Programs over `x`, `y`, `b` with optional loops and parallel composition.
pub fn program_text(depth: u32, loops: bool, par: bool) -> impl Strategy<Value = String> {
    leaf().prop_recursive(depth, 16, 2, move |inner| {
        let mut arms: Vec<BoxedStrategy<String>> = vec![
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p}; {q})")).boxed(),
            (pick(TESTS), inner.clone(), inner.clone())
                .prop_map(|(e, p, q)| format!("if {e} then {p} else {q} fi"))
                .boxed(),
        ];
        if loops {
            arms.push(inner.clone().prop_map(|p| format!("while x < 2 do {p}; x := min({{x + 1, 2}}) od")).boxed());
        }
        if par {
            arms.push((inner.clone(), inner).prop_map(|(p, q)| format!("par {{ {p} || {q} }}")).boxed());
        }
        prop::strategy::Union::new(arms)
    })
}

const UNARY: &[&str] = &["x = y", "x < 2", "b", "y = 0", "x = 1", "true", "false"];

pub fn unary_text() -> impl Strategy<Value = String> {
    pick(UNARY).prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p} and {q})")),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p} or {q})")),
            inner.prop_map(|p| format!("not ({p})")),
        ]
    })
}

const BINARY: &[&str] = &[
    "x = ~x",
    "y = ~y",
    "b = ~b",
    "x >= ~x",
    "y <= ~y",
    "x = ~y",
    "y = ~x + 1",
    "b => ~b",
    "x = 2",
    "true",
];

pub fn binary_text() -> impl Strategy<Value = String> {
    pick(BINARY).prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p} and {q})")),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p} or {q})")),
            inner.prop_map(|p| format!("not ({p})")),
        ]
    })
}

/// Reflexive and transitive relations, closed under conjunction.
pub const RELIES: &[&str] = &["I", "x = ~x", "y = ~y", "b = ~b", "x >= ~x", "y <= ~y", "true"];

pub fn rely_text() -> impl Strategy<Value = String> {
    prop::collection::btree_set(prop::sample::select(RELIES), 1..3)
        .prop_map(|s| s.into_iter().map(|r| format!("({r})")).collect::<Vec<_>>().join(" and "))
}
