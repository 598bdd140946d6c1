//! Sort checking for expressions and assertions.

use std::collections::BTreeSet;

use crate::logic::expr::{BinOp, Expr, Func};
use crate::structure::Structure;
use crate::value::{Ty, Value};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("type mismatch in {context}: expected {expected}, found {found}")]
    Mismatch { context: String, expected: String, found: String },
    #[error("`{0}` takes {1} argument(s)")]
    Arity(String, usize),
    #[error("`{0}` is both bound and free")]
    BoundAndFree(String),
    #[error("program expressions may not contain {0}")]
    NotProgramExpr(&'static str),
    #[error("expected a unary assertion, found one that relates two states")]
    NotUnary,
}

struct Checker<'a> {
    st: &'a Structure,
    bound: Vec<(String, bool, Ty)>,
}

fn mismatch(context: &str, expected: impl ToString, found: &Ty) -> TypeError {
    TypeError::Mismatch {
        context: context.into(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

impl Checker<'_> {
    fn expect(&mut self, e: &Expr, want: &Ty, context: &str) -> Result<Ty, TypeError> {
        let t = self.ty(e)?;
        want.join(&t).ok_or_else(|| mismatch(context, want, &t))
    }

    fn ty(&mut self, e: &Expr) -> Result<Ty, TypeError> {
        match e {
            Expr::Var { name, hooked } => {
                if let Some((_, _, t)) =
                    self.bound.iter().rev().find(|(n, h, _)| n == name && h == hooked)
                {
                    return Ok(t.clone());
                }
                let id = self
                    .st
                    .var_id(name)
                    .ok_or_else(|| TypeError::UnknownName(name.clone()))?;
                Ok(self.st.var_ty(id).clone())
            }
            Expr::Lit(v) => Ok(match v {
                Value::Bool(_) => Ty::Bool,
                Value::Int(_) => Ty::Int,
                Value::Sym(s) => Ty::Enum(
                    self.st
                        .constant(s)
                        .ok_or_else(|| TypeError::UnknownName(s.to_string()))?,
                ),
                Value::Seq(_) => Ty::Seq(Box::new(Ty::Any)),
                Value::Set(_) => Ty::Set(Box::new(Ty::Any)),
            }),
            Expr::Not(a) => self.expect(a, &Ty::Bool, "negation"),
            Expr::Neg(a) => self.expect(a, &Ty::Int, "unary minus"),
            Expr::Bin(op, a, b) => self.bin(*op, a, b),
            Expr::Call(f, args) => {
                if args.len() != f.arity() {
                    return Err(TypeError::Arity(f.name().into(), f.arity()));
                }
                match f {
                    Func::Len => {
                        self.expect(&args[0], &Ty::Seq(Box::new(Ty::Any)), "len")?;
                        Ok(Ty::Int)
                    }
                    Func::Card => {
                        self.expect(&args[0], &Ty::Set(Box::new(Ty::Any)), "card")?;
                        Ok(Ty::Int)
                    }
                    Func::Max | Func::Min => {
                        match self.expect(&args[0], &Ty::Set(Box::new(Ty::Any)), f.name())? {
                            Ty::Set(t) => Ok(*t),
                            _ => unreachable!(),
                        }
                    }
                    Func::AddMod | Func::SubMod => {
                        for a in args {
                            self.expect(a, &Ty::Int, f.name())?;
                        }
                        Ok(Ty::Int)
                    }
                }
            }
            Expr::SetLit(items) | Expr::SeqLit(items) => {
                let mut elem = Ty::Any;
                for it in items {
                    let t = self.ty(it)?;
                    elem = elem.join(&t).ok_or_else(|| mismatch("literal element", &elem, &t))?;
                }
                Ok(match e {
                    Expr::SetLit(_) => Ty::Set(Box::new(elem)),
                    _ => Ty::Seq(Box::new(elem)),
                })
            }
            Expr::Index(s, i) => {
                let t = self.expect(s, &Ty::Seq(Box::new(Ty::Any)), "index")?;
                self.expect(i, &Ty::Int, "index")?;
                match t {
                    Ty::Seq(t) => Ok(*t),
                    _ => unreachable!(),
                }
            }
            Expr::Quant { binder, body, .. } => {
                let t = self.st.sort(binder.sort).ty.clone();
                self.bound.push((binder.name.clone(), binder.hooked, t));
                let r = self.expect(body, &Ty::Bool, "quantifier body");
                self.bound.pop();
                r
            }
            Expr::Identity(beta) => {
                for v in beta {
                    if self.st.var_id(v).is_none() {
                        return Err(TypeError::UnknownName(v.clone()));
                    }
                }
                Ok(Ty::Bool)
            }
            Expr::Hook(a) => self.ty(a),
            Expr::Compose(a, b) | Expr::Preserve(a, b) => {
                self.expect(a, &Ty::Bool, "relational operand")?;
                self.expect(b, &Ty::Bool, "relational operand")
            }
            Expr::Closure { rel, .. } => self.expect(rel, &Ty::Bool, "closure operand"),
        }
    }

    fn bin(&mut self, op: BinOp, a: &Expr, b: &Expr) -> Result<Ty, TypeError> {
        use BinOp::*;
        let name = format!("{op:?}").to_lowercase();
        match op {
            And | Or | Implies | Iff => {
                self.expect(a, &Ty::Bool, &name)?;
                self.expect(b, &Ty::Bool, &name)?;
                Ok(Ty::Bool)
            }
            Eq | Ne => {
                let ta = self.ty(a)?;
                self.expect(b, &ta, &name)?;
                Ok(Ty::Bool)
            }
            Lt | Le | Gt | Ge => {
                self.expect(a, &Ty::Int, &name)?;
                self.expect(b, &Ty::Int, &name)?;
                Ok(Ty::Bool)
            }
            Add | Sub | Mul | Div | Mod => {
                self.expect(a, &Ty::Int, &name)?;
                self.expect(b, &Ty::Int, &name)
            }
            Union | Inter | Diff => {
                let ta = self.expect(a, &Ty::Set(Box::new(Ty::Any)), &name)?;
                self.expect(b, &ta, &name)
            }
            Subset => {
                let ta = self.expect(a, &Ty::Set(Box::new(Ty::Any)), &name)?;
                self.expect(b, &ta, &name)?;
                Ok(Ty::Bool)
            }
            In | NotIn => {
                let ta = self.ty(a)?;
                self.expect(b, &Ty::Set(Box::new(ta)), &name)?;
                Ok(Ty::Bool)
            }
            Concat => {
                let ta = self.expect(a, &Ty::Seq(Box::new(Ty::Any)), &name)?;
                self.expect(b, &ta, &name)
            }
        }
    }
}

/// Type of `e` with no bound variables in scope.
pub fn type_of(e: &Expr, st: &Structure) -> Result<Ty, TypeError> {
    Checker { st, bound: Vec::new() }.ty(e)
}

fn binders(e: &Expr, out: &mut BTreeSet<(String, bool)>) {
    if let Expr::Quant { binder, body, .. } = e {
        out.insert((binder.name.clone(), binder.hooked));
        binders(body, out);
        return;
    }
    match e {
        Expr::Var { .. } | Expr::Lit(_) | Expr::Identity(_) => {}
        Expr::Not(a) | Expr::Neg(a) | Expr::Hook(a) | Expr::Closure { rel: a, .. } => binders(a, out),
        Expr::Bin(_, a, b) | Expr::Index(a, b) | Expr::Compose(a, b) | Expr::Preserve(a, b) => {
            binders(a, out);
            binders(b, out);
        }
        Expr::Call(_, xs) | Expr::SetLit(xs) | Expr::SeqLit(xs) => xs.iter().for_each(|x| binders(x, out)),
        Expr::Quant { .. } => unreachable!(),
    }
}

/// Checks that `e` is a well-sorted formula and that no variable is both
/// bound and free in it.
pub fn check_assertion(e: &Expr, st: &Structure) -> Result<(), TypeError> {
    let t = type_of(e, st)?;
    if Ty::Bool.join(&t).is_none() {
        return Err(mismatch("assertion", Ty::Bool, &t));
    }
    let mut bound = BTreeSet::new();
    binders(e, &mut bound);
    let free = e.free_occurrences();
    if let Some((n, _)) = bound.intersection(&free).next() {
        return Err(TypeError::BoundAndFree(n.clone()));
    }
    Ok(())
}

pub fn check_unary(e: &Expr, st: &Structure) -> Result<(), TypeError> {
    check_assertion(e, st)?;
    if e.is_binary() {
        return Err(TypeError::NotUnary);
    }
    Ok(())
}

/// Checks a right-hand side or test: no hooks, quantifiers or relational operators.
pub fn check_program_expr(e: &Expr, st: &Structure) -> Result<Ty, TypeError> {
    if e.has_hooks() {
        return Err(TypeError::NotProgramExpr("hooked variables"));
    }
    if e.has_quantifier() {
        return Err(TypeError::NotProgramExpr("quantifiers"));
    }
    if e.has_relational() {
        return Err(TypeError::NotProgramExpr("relational operators"));
    }
    type_of(e, st)
}
