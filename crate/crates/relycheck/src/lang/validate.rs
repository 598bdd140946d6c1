//! The four supplementary constraints on programs, plus sort checks.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::lang::ast::{Program, ProgramKind, Span};
use crate::lang::vars::{declared, hid_set, walk};
use crate::logic::typeck::{check_program_expr, TypeError};
use crate::logic::Expr;
use crate::structure::Structure;
use crate::value::Ty;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// Left- and right-hand side of an assignment have different sorts.
    AssignmentSort,
    /// A variable is declared twice, or a local is used outside its block.
    Declaration,
    /// A local is read before it is assigned.
    InitBeforeRead,
    /// A test inside a Par arm reads a variable not local to that arm.
    BooleanTest,
    /// An expression is ill-sorted or a test is not Boolean.
    Sort,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::AssignmentSort => "assignment-sort",
            Constraint::Declaration => "declaration",
            Constraint::InitBeforeRead => "init-before-read",
            Constraint::BooleanTest => "boolean-test",
            Constraint::Sort => "sort",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub span: Span,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.span, self.message, self.constraint)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("{span}: unknown variable `{name}`")]
    Unknown { name: String, span: Span },
    #[error("{} constraint violation(s): {}", .0.len(), .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Violations(Vec<Violation>),
}

/// Result of a successful validation: remarks that do not invalidate the program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Validated {
    pub notes: Vec<String>,
}

pub fn validate_program(z: &Program, st: &Structure) -> Result<Validated, ValidationError> {
    check_known(z, st)?;
    let mut out = Vec::new();
    check_sorts(z, st, &mut out);
    check_declarations(z, &mut out);
    let mut scope = BTreeSet::new();
    init_flow(z, &BTreeSet::new(), &mut scope, &mut out);
    let mut notes = Vec::new();
    check_tests(z, &mut out, &mut notes);
    if out.is_empty() {
        Ok(Validated { notes })
    } else {
        Err(ValidationError::Violations(out))
    }
}

fn expr_names(e: &Expr) -> BTreeSet<String> {
    e.free_vars()
}

fn check_known(z: &Program, st: &Structure) -> Result<(), ValidationError> {
    let mut err = None;
    walk(z, &mut |p| {
        if err.is_some() {
            return;
        }
        let mut names: Vec<String> = Vec::new();
        match &p.kind {
            ProgramKind::Assign { var, expr } => {
                names.push(var.clone());
                names.extend(expr_names(expr));
            }
            ProgramKind::Block { decls, .. } => names.extend(decls.iter().cloned()),
            ProgramKind::If { test, .. } | ProgramKind::While { test, .. } | ProgramKind::Await { test, .. } => {
                names.extend(expr_names(test))
            }
            _ => {}
        }
        if let Some(n) = names.into_iter().find(|n| st.var_id(n).is_none()) {
            err = Some(ValidationError::Unknown { name: n, span: p.span });
        }
    });
    err.map_or(Ok(()), Err)
}

fn check_sorts(z: &Program, st: &Structure, out: &mut Vec<Violation>) {
    walk(z, &mut |p| match &p.kind {
        ProgramKind::Assign { var, expr } => {
            let lhs = st.var_ty(st.var_id(var).expect("checked")).clone();
            match check_program_expr(expr, st) {
                Ok(t) if lhs.join(&t).is_some() => {}
                Ok(t) => out.push(Violation {
                    constraint: Constraint::AssignmentSort,
                    span: p.span,
                    message: format!("`{var}` has sort {lhs} but is assigned a value of sort {t}"),
                }),
                Err(e) => out.push(sort_violation(p, e)),
            }
        }
        ProgramKind::If { test, .. } | ProgramKind::While { test, .. } | ProgramKind::Await { test, .. } => {
            match check_program_expr(test, st) {
                Ok(t) if Ty::Bool.join(&t).is_some() => {}
                Ok(t) => out.push(Violation {
                    constraint: Constraint::Sort,
                    span: p.span,
                    message: format!("test has sort {t}, expected bool"),
                }),
                Err(e) => out.push(sort_violation(p, e)),
            }
        }
        _ => {}
    });
}

fn sort_violation(p: &Program, e: TypeError) -> Violation {
    Violation { constraint: Constraint::Sort, span: p.span, message: e.to_string() }
}

fn check_declarations(z: &Program, out: &mut Vec<Violation>) {
    let mut seen = BTreeSet::new();
    walk(z, &mut |p| {
        if let ProgramKind::Block { decls, .. } = &p.kind {
            for d in decls {
                if !seen.insert(d.clone()) {
                    out.push(Violation {
                        constraint: Constraint::Declaration,
                        span: p.span,
                        message: format!("`{d}` is declared more than once"),
                    });
                }
            }
        }
    });
    let locals = declared(z);
    escape(z, &locals, &mut Vec::new(), out);
}

fn escape(p: &Program, locals: &BTreeSet<String>, scope: &mut Vec<String>, out: &mut Vec<Violation>) {
    let mut used: BTreeSet<String> = BTreeSet::new();
    match &p.kind {
        ProgramKind::Assign { var, expr } => {
            used.insert(var.clone());
            used.extend(expr.free_vars());
        }
        ProgramKind::If { test, .. } | ProgramKind::While { test, .. } | ProgramKind::Await { test, .. } => {
            used.extend(test.free_vars())
        }
        _ => {}
    }
    for v in used {
        if locals.contains(&v) && !scope.contains(&v) {
            out.push(Violation {
                constraint: Constraint::Declaration,
                span: p.span,
                message: format!("local `{v}` is used outside its block"),
            });
        }
    }
    if let ProgramKind::Block { decls, body } = &p.kind {
        let n = scope.len();
        scope.extend(decls.iter().cloned());
        escape(body, locals, scope, out);
        scope.truncate(n);
    } else {
        for c in p.children() {
            escape(c, locals, scope, out);
        }
    }
}

/// Forward must-assign analysis. `init` holds the locals definitely assigned
/// on entry; returns those definitely assigned on exit.
fn init_flow(
    p: &Program,
    init: &BTreeSet<String>,
    scope: &mut BTreeSet<String>,
    out: &mut Vec<Violation>,
) -> BTreeSet<String> {
    let reads = |e: &Expr, init: &BTreeSet<String>, scope: &BTreeSet<String>, out: &mut Vec<Violation>| {
        for v in e.free_vars() {
            if scope.contains(&v) && !init.contains(&v) {
                out.push(Violation {
                    constraint: Constraint::InitBeforeRead,
                    span: p.span,
                    message: format!("local `{v}` may be read before it is initialised"),
                });
            }
        }
    };
    match &p.kind {
        ProgramKind::Skip => init.clone(),
        ProgramKind::Assign { var, expr } => {
            reads(expr, init, scope, out);
            let mut o = init.clone();
            o.insert(var.clone());
            o
        }
        ProgramKind::Block { decls, body } => {
            let mut inner = init.clone();
            let mut added = Vec::new();
            for d in decls {
                inner.remove(d);
                if scope.insert(d.clone()) {
                    added.push(d.clone());
                }
            }
            let mut o = init_flow(body, &inner, scope, out);
            for d in added {
                scope.remove(&d);
            }
            for d in decls {
                o.remove(d);
            }
            o
        }
        ProgramKind::Seq(a, b) => {
            let mid = init_flow(a, init, scope, out);
            init_flow(b, &mid, scope, out)
        }
        ProgramKind::If { test, then_branch, else_branch } => {
            reads(test, init, scope, out);
            let t = init_flow(then_branch, init, scope, out);
            let e = init_flow(else_branch, init, scope, out);
            t.intersection(&e).cloned().collect()
        }
        ProgramKind::While { test, body } => {
            reads(test, init, scope, out);
            init_flow(body, init, scope, out);
            init.clone()
        }
        ProgramKind::Par(a, b) => {
            let x = init_flow(a, init, scope, out);
            let y = init_flow(b, init, scope, out);
            x.union(&y).cloned().collect()
        }
        ProgramKind::Await { test, body } => {
            reads(test, init, scope, out);
            init_flow(body, init, scope, out)
        }
    }
}

fn check_tests(z: &Program, out: &mut Vec<Violation>, notes: &mut Vec<String>) {
    let hidden = hid_set(z);
    walk(z, &mut |p| {
        if let ProgramKind::Par(a, b) = &p.kind {
            for arm in [a, b] {
                let local = declared(arm);
                walk(arm, &mut |q| match &q.kind {
                    ProgramKind::If { test, .. } | ProgramKind::While { test, .. } => {
                        for v in test.free_vars() {
                            if !local.contains(&v) {
                                out.push(Violation {
                                    constraint: Constraint::BooleanTest,
                                    span: q.span,
                                    message: format!("test reads `{v}`, which is not local to its parallel arm"),
                                });
                            }
                        }
                    }
                    ProgramKind::Await { test, .. } => {
                        for v in test.free_vars() {
                            if hidden.contains(&v) && !local.contains(&v) {
                                notes.push(format!(
                                    "{}: await test reads `{v}`, a local of an enclosing block shared between parallel arms",
                                    q.span
                                ));
                            }
                        }
                    }
                    _ => {}
                });
            }
        }
    });
    out.sort_by_key(|x| (x.span, x.constraint));
    out.dedup();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::*;
    use crate::logic::expr::*;
    use crate::value::SortKind;

    fn st() -> Structure {
        let mut st = Structure::new();
        let d = st.add_sort("D", SortKind::Range { lo: 0, hi: 3 }).unwrap();
        let b = st.add_sort("bool", SortKind::Boolean).unwrap();
        for v in ["x", "y", "v", "w"] {
            st.add_var(v, d).unwrap();
        }
        st.add_var("b", b).unwrap();
        st
    }

    fn constraints(r: Result<Validated, ValidationError>) -> Vec<Constraint> {
        match r {
            Err(ValidationError::Violations(vs)) => vs.into_iter().map(|v| v.constraint).collect(),
            other => panic!("expected violations, got {other:?}"),
        }
    }

    #[test]
    fn read_before_init() {
        let z = block(vec!["y".into()], assign("x", var("y")));
        assert_eq!(constraints(validate_program(&z, &st())), vec![Constraint::InitBeforeRead]);
    }

    #[test]
    fn skip_is_fine() {
        assert_eq!(validate_program(&skip(), &st()), Ok(Validated::default()));
    }

    #[test]
    fn global_test_in_par_arm() {
        let z = par(if_(eq(var("v"), int(0)), skip(), skip()), skip());
        assert_eq!(constraints(validate_program(&z, &st())), vec![Constraint::BooleanTest]);
    }

    #[test]
    fn local_test_in_par_arm() {
        let arm = block(
            vec!["y".into()],
            seq(assign("y", var("v")), if_(eq(var("y"), int(0)), skip(), skip())),
        );
        assert!(validate_program(&par(arm, skip()), &st()).is_ok());
    }

    #[test]
    fn redeclaration_and_escape() {
        let z = seq(
            block(vec!["y".into()], assign("y", int(0))),
            block(vec!["y".into()], assign("y", int(1))),
        );
        assert_eq!(constraints(validate_program(&z, &st())), vec![Constraint::Declaration]);
        let z = seq(block(vec!["y".into()], assign("y", int(0))), assign("x", var("y")));
        assert_eq!(constraints(validate_program(&z, &st())), vec![Constraint::Declaration]);
    }

    #[test]
    fn assignment_sort_mismatch() {
        let z = assign("x", var("b"));
        assert_eq!(constraints(validate_program(&z, &st())), vec![Constraint::AssignmentSort]);
    }

    #[test]
    fn unknown_variable_is_distinct() {
        let z = assign("q", int(0));
        assert!(matches!(validate_program(&z, &st()), Err(ValidationError::Unknown { .. })));
    }

    #[test]
    fn if_branches_must_both_assign() {
        let z = block(
            vec!["y".into()],
            seq(if_(var("b"), assign("y", int(1)), skip()), assign("x", var("y"))),
        );
        assert_eq!(constraints(validate_program(&z, &st())), vec![Constraint::InitBeforeRead]);
    }

    #[test]
    fn await_test_reading_hidden_variable_is_noted() {
        let inner = par(await_(eq(var("x"), int(1)), skip()), skip());
        let z = while_(bin(BinOp::Lt, var("x"), int(3)), inner);
        assert_eq!(validate_program(&z, &st()).unwrap().notes.len(), 1);
        let z = par(await_(eq(var("x"), int(1)), skip()), skip());
        assert!(validate_program(&z, &st()).unwrap().notes.is_empty());
    }
}
