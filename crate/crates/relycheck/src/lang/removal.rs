//! The removal relation `z1 ↪(ϑ,α) z2` between an augmented program and
//! the plain program it was obtained from, and its inverse, erasure.
//!
//! In augmented form every assignment `v:=r` outside await bodies is
//! `await true do a1:=u1; …; an:=un; v:=r od`, and every await
//! `await b do z od` is `await b do z'; a1:=u1; …; an:=un od` with `z'`
//! the augmented form of `z`.

use std::collections::BTreeSet;

use crate::lang::ast::{self, Prog, Program, ProgramKind, Span};
use crate::lang::vars::{free_vars, globals};
use crate::logic::Expr;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Removal {
    pub augmented: Prog,
    pub glo: BTreeSet<String>,
    pub aux: BTreeSet<String>,
    pub plain: Prog,
}

/// Why a removal does not hold, located in the augmented program.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {reason}")]
pub struct RemovalMismatch {
    pub span: Span,
    pub reason: String,
}

fn mismatch(span: Span, reason: impl Into<String>) -> RemovalMismatch {
    RemovalMismatch { span, reason: reason.into() }
}

pub fn check_removal(r: &Removal) -> bool {
    explain_removal(r).is_ok()
}

/// Like [`check_removal`], but reports the first offending statement.
pub fn explain_removal(r: &Removal) -> Result<(), RemovalMismatch> {
    let top = r.augmented.span;
    if let Some(v) = r.glo.intersection(&r.aux).next() {
        return Err(mismatch(top, format!("`{v}` is both global and auxiliary")));
    }
    let plain_vars = free_vars(&r.plain);
    if let Some(v) = plain_vars.intersection(&r.aux).next() {
        return Err(mismatch(top, format!("auxiliary `{v}` occurs in the plain program")));
    }
    let g = globals(&r.plain);
    for v in &plain_vars {
        if g.contains(v) != r.glo.contains(v) {
            return Err(mismatch(top, format!("`{v}` must be in the global set iff it is global")));
        }
    }
    related(&r.augmented, &r.plain, &r.glo, &r.aux)
}

/// Checks a list of auxiliary updates `a:=u`.
fn aux_updates(items: &[Prog], glo: &BTreeSet<String>, aux: &BTreeSet<String>) -> Result<(), RemovalMismatch> {
    let mut seen = BTreeSet::new();
    for it in items {
        let ProgramKind::Assign { var, expr } = &it.kind else {
            return Err(mismatch(it.span, "expected an auxiliary assignment"));
        };
        if !aux.contains(var) {
            return Err(mismatch(it.span, format!("`{var}` is not auxiliary")));
        }
        if !seen.insert(var.clone()) {
            return Err(mismatch(it.span, format!("`{var}` is updated twice in one atomic step")));
        }
        if let Some(bad) = expr.free_vars().into_iter().find(|v| !glo.contains(v) && v != var) {
            return Err(mismatch(
                it.span,
                format!("update of `{var}` reads `{bad}`, outside the global set and `{var}` itself"),
            ));
        }
    }
    Ok(())
}

fn is_aux_assign(p: &Program, aux: &BTreeSet<String>) -> bool {
    matches!(&p.kind, ProgramKind::Assign { var, .. } if aux.contains(var))
}

/// Splits off the longest suffix of auxiliary assignments.
fn split_aux_suffix(items: &[Prog], aux: &BTreeSet<String>) -> usize {
    let mut k = items.len();
    while k > 0 && is_aux_assign(&items[k - 1], aux) {
        k -= 1;
    }
    k
}

fn related(aug: &Prog, plain: &Prog, glo: &BTreeSet<String>, aux: &BTreeSet<String>) -> Result<(), RemovalMismatch> {
    use ProgramKind::*;
    let fail = || mismatch(aug.span, "statement does not correspond to the plain program");
    match (&aug.kind, &plain.kind) {
        (Skip, Skip) => Ok(()),
        (Await { test, body }, Assign { .. }) => {
            if !test.is_true() {
                return Err(mismatch(aug.span, "assignments must be wrapped in `await true`"));
            }
            let items = body.seq_items();
            let (last, prefix) = items.split_last().expect("nonempty");
            if **last != **plain {
                return Err(fail());
            }
            aux_updates(prefix, glo, aux)
        }
        (Await { test: ta, body: ba }, Await { test: tp, body: bp }) => {
            if ta != tp {
                return Err(fail());
            }
            let items = ba.seq_items();
            let k = split_aux_suffix(&items, aux);
            if k == 0 {
                return Err(mismatch(aug.span, "await body consists of auxiliary updates only"));
            }
            aux_updates(&items[k..], glo, aux)?;
            related(&ast::seq_all(items[..k].to_vec()), bp, glo, aux)
        }
        (Block { decls: da, body: ba }, Block { decls: dp, body: bp }) if da == dp => related(ba, bp, glo, aux),
        (Seq(..), Seq(..)) => {
            let xs = aug.seq_items();
            let ys = plain.seq_items();
            if xs.len() != ys.len() {
                return Err(fail());
            }
            xs.iter().zip(&ys).try_for_each(|(x, y)| related(x, y, glo, aux))
        }
        (If { test: ta, then_branch: t1, else_branch: e1 }, If { test: tp, then_branch: t2, else_branch: e2 })
            if ta == tp =>
        {
            related(t1, t2, glo, aux)?;
            related(e1, e2, glo, aux)
        }
        (While { test: ta, body: ba }, While { test: tp, body: bp }) if ta == tp => related(ba, bp, glo, aux),
        (Par(a1, b1), Par(a2, b2)) => {
            related(a1, a2, glo, aux)?;
            related(b1, b2, glo, aux)
        }
        (Assign { .. }, _) => Err(mismatch(aug.span, "bare assignment outside an await body")),
        _ => Err(fail()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: not in augmentation shape: {reason}")]
pub struct EraseError {
    pub span: Span,
    pub reason: String,
}

/// Recovers the plain program from an augmented one. The result `z2`
/// satisfies `check_removal(z1, globals(z2), α, z2)`.
pub fn erase_auxiliary(z1: &Prog, aux: &BTreeSet<String>) -> Result<Prog, EraseError> {
    let plain = erase(z1, aux)?;
    let r = Removal { augmented: z1.clone(), glo: globals(&plain), aux: aux.clone(), plain: plain.clone() };
    explain_removal(&r).map_err(|m| EraseError { span: m.span, reason: m.reason })?;
    Ok(plain)
}

fn erase(z: &Prog, aux: &BTreeSet<String>) -> Result<Prog, EraseError> {
    use ProgramKind::*;
    let err = |p: &Program, reason: &str| EraseError { span: p.span, reason: reason.into() };
    let kind = match &z.kind {
        Skip => Skip,
        Assign { .. } => return Err(err(z, "bare assignment outside an await body")),
        Await { test, body } => {
            let items = body.seq_items();
            let (last, prefix) = items.split_last().expect("nonempty");
            match &last.kind {
                Assign { var, .. } if !aux.contains(var) && test.is_true() => {
                    if let Some(bad) = prefix.iter().find(|p| !is_aux_assign(p, aux)) {
                        return Err(err(bad, "only auxiliary assignments may precede the wrapped assignment"));
                    }
                    return Ok(last.clone());
                }
                _ => {
                    let k = split_aux_suffix(&items, aux);
                    if k == 0 {
                        return Err(err(z, "await body consists of auxiliary updates only"));
                    }
                    let inner = erase(&ast::seq_all(items[..k].to_vec()), aux)?;
                    Await { test: test.clone(), body: inner }
                }
            }
        }
        Block { decls, body } => Block { decls: decls.clone(), body: erase(body, aux)? },
        Seq(a, b) => Seq(erase(a, aux)?, erase(b, aux)?),
        If { test, then_branch, else_branch } => If {
            test: test.clone(),
            then_branch: erase(then_branch, aux)?,
            else_branch: erase(else_branch, aux)?,
        },
        While { test, body } => While { test: test.clone(), body: erase(body, aux)? },
        Par(a, b) => Par(erase(a, aux)?, erase(b, aux)?),
    };
    Ok(Program::with_span(kind, z.span))
}

/// Wraps every assignment of a plain program in `await true`, with no
/// auxiliary updates. The result relates to `z` under any α.
pub fn vacuous_augmentation(z: &Prog) -> Prog {
    augment(z, &mut |_| Vec::new(), &mut |_| Vec::new())
}

/// Builds an augmented program, asking `on_assign` and `on_await` for the
/// auxiliary updates attached to each assignment and await.
pub fn augment(
    z: &Prog,
    on_assign: &mut dyn FnMut(&Program) -> Vec<(String, Expr)>,
    on_await: &mut dyn FnMut(&Program) -> Vec<(String, Expr)>,
) -> Prog {
    use ProgramKind::*;
    let kind = match &z.kind {
        Skip => Skip,
        Assign { .. } => {
            let mut items: Vec<Prog> = on_assign(z).into_iter().map(|(a, u)| ast::assign(&a, u)).collect();
            items.push(z.clone());
            Await { test: crate::logic::expr::tt(), body: ast::seq_all(items) }
        }
        Await { test, body } => {
            let mut items = vec![augment(body, on_assign, on_await)];
            items.extend(on_await(z).into_iter().map(|(a, u)| ast::assign(&a, u)));
            Await { test: test.clone(), body: ast::seq_all(items) }
        }
        Block { decls, body } => Block { decls: decls.clone(), body: augment(body, on_assign, on_await) },
        Seq(a, b) => Seq(augment(a, on_assign, on_await), augment(b, on_assign, on_await)),
        If { test, then_branch, else_branch } => If {
            test: test.clone(),
            then_branch: augment(then_branch, on_assign, on_await),
            else_branch: augment(else_branch, on_assign, on_await),
        },
        While { test, body } => While { test: test.clone(), body: augment(body, on_assign, on_await) },
        Par(a, b) => Par(augment(a, on_assign, on_await), augment(b, on_assign, on_await)),
    };
    Program::with_span(kind, z.span)
}
