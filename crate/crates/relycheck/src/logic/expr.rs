//! Expressions and assertions share one tree.

use std::collections::BTreeSet;

use crate::value::{SortId, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Union,
    Inter,
    Diff,
    In,
    NotIn,
    Subset,
    Concat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Len,
    Card,
    Max,
    Min,
    AddMod,
    SubMod,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Len => "len",
            Func::Card => "card",
            Func::Max => "max",
            Func::Min => "min",
            Func::AddMod => "addmod",
            Func::SubMod => "submod",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::AddMod | Func::SubMod => 3,
            _ => 1,
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "len" => Func::Len,
            "card" => Func::Card,
            "max" => Func::Max,
            "min" => Func::Min,
            "addmod" => Func::AddMod,
            "submod" => Func::SubMod,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    Forall,
    Exists,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binder {
    pub name: String,
    pub hooked: bool,
    pub sort: SortId,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var { name: String, hooked: bool },
    Lit(Value),
    Not(Box<Expr>),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    SetLit(Vec<Expr>),
    SeqLit(Vec<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Quant { kind: Quant, binder: Binder, body: Box<Expr> },
    /// `I_β`: every scope variable outside β is unchanged.
    Identity(Vec<String>),
    /// `↼(A)`
    Hook(Box<Expr>),
    /// `A | B`
    Compose(Box<Expr>, Box<Expr>),
    /// `A†`, or `A*` when reflexive.
    Closure { rel: Box<Expr>, reflexive: bool },
    /// `A^B`
    Preserve(Box<Expr>, Box<Expr>),
}

pub fn var(name: &str) -> Expr {
    Expr::Var { name: name.into(), hooked: false }
}

pub fn old(name: &str) -> Expr {
    Expr::Var { name: name.into(), hooked: true }
}

pub fn int(n: i64) -> Expr {
    Expr::Lit(Value::Int(n))
}

pub fn tt() -> Expr {
    Expr::Lit(Value::Bool(true))
}

pub fn ff() -> Expr {
    Expr::Lit(Value::Bool(false))
}

pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
    Expr::Bin(op, Box::new(a), Box::new(b))
}

pub fn not(a: Expr) -> Expr {
    Expr::Not(Box::new(a))
}

pub fn eq(a: Expr, b: Expr) -> Expr {
    bin(BinOp::Eq, a, b)
}

pub fn and(a: Expr, b: Expr) -> Expr {
    bin(BinOp::And, a, b)
}

pub fn or(a: Expr, b: Expr) -> Expr {
    bin(BinOp::Or, a, b)
}

pub fn implies(a: Expr, b: Expr) -> Expr {
    bin(BinOp::Implies, a, b)
}

/// Right-nested conjunction; `true` when empty.
pub fn conj(items: impl IntoIterator<Item = Expr>) -> Expr {
    let mut items: Vec<Expr> = items.into_iter().collect();
    let Some(mut acc) = items.pop() else { return tt() };
    while let Some(e) = items.pop() {
        acc = and(e, acc);
    }
    acc
}

/// Left-nested composition chain.
pub fn compose(items: impl IntoIterator<Item = Expr>) -> Expr {
    let mut it = items.into_iter();
    let mut acc = it.next().unwrap_or(Expr::Identity(Vec::new()));
    for e in it {
        acc = Expr::Compose(Box::new(acc), Box::new(e));
    }
    acc
}

impl Expr {
    pub fn is_true(&self) -> bool {
        matches!(self, Expr::Lit(Value::Bool(true)))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Expr::Lit(Value::Bool(false)))
    }

    /// Operands of a flattened `∧` chain.
    pub fn conjuncts(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        flatten(self, BinOp::And, &mut out);
        out
    }

    pub fn disjuncts(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        flatten(self, BinOp::Or, &mut out);
        out
    }

    /// Operands of a flattened `|` chain.
    pub fn composition_chain(&self) -> Vec<&Expr> {
        fn go<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
            match e {
                Expr::Compose(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                _ => out.push(e),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Var { .. } | Expr::Lit(_) | Expr::Identity(_) => vec![],
            Expr::Not(a) | Expr::Neg(a) | Expr::Hook(a) => vec![a],
            Expr::Closure { rel, .. } => vec![rel],
            Expr::Bin(_, a, b) | Expr::Index(a, b) | Expr::Compose(a, b) | Expr::Preserve(a, b) => {
                vec![a, b]
            }
            Expr::Call(_, args) | Expr::SetLit(args) | Expr::SeqLit(args) => args.iter().collect(),
            Expr::Quant { body, .. } => vec![body],
        }
    }

    /// Free variable occurrences as `(name, hooked)`.
    ///
    /// `I_β` contributes nothing; its meaning depends on the scope it is read in.
    pub fn free_occurrences(&self) -> BTreeSet<(String, bool)> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    /// `var[t]`: unhooked versions of all free variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        self.free_occurrences().into_iter().map(|(n, _)| n).collect()
    }

    pub fn has_hooks(&self) -> bool {
        self.free_occurrences().iter().any(|(_, h)| *h) || self.any(&|e| matches!(e, Expr::Hook(_)))
    }

    /// True for nodes whose meaning needs the whole scope: `I`, `|`, closures, `^`.
    pub fn has_relational(&self) -> bool {
        self.any(&|e| {
            matches!(
                e,
                Expr::Identity(_) | Expr::Compose(..) | Expr::Closure { .. } | Expr::Preserve(..)
            )
        })
    }

    /// Whether the formula relates two states.
    pub fn is_binary(&self) -> bool {
        match self {
            Expr::Hook(a) if a.free_occurrences().is_empty() && !a.has_relational() => false,
            Expr::Var { hooked, .. } => *hooked,
            Expr::Identity(_) | Expr::Compose(..) | Expr::Closure { .. } | Expr::Hook(_) => true,
            Expr::Preserve(..) => false,
            _ => self.children().into_iter().any(Expr::is_binary),
        }
    }

    pub fn has_quantifier(&self) -> bool {
        self.any(&|e| matches!(e, Expr::Quant { .. }))
    }

    pub fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }
}

fn flatten<'a>(e: &'a Expr, op: BinOp, out: &mut Vec<&'a Expr>) {
    match e {
        Expr::Bin(o, a, b) if *o == op => {
            flatten(a, op, out);
            flatten(b, op, out);
        }
        _ => out.push(e),
    }
}

fn collect_free(e: &Expr, bound: &mut Vec<(String, bool)>, out: &mut BTreeSet<(String, bool)>) {
    match e {
        Expr::Var { name, hooked } => {
            let key = (name.clone(), *hooked);
            if !bound.contains(&key) {
                out.insert(key);
            }
        }
        Expr::Quant { binder, body, .. } => {
            bound.push((binder.name.clone(), binder.hooked));
            collect_free(body, bound, out);
            bound.pop();
        }
        Expr::Hook(a) => {
            let mut inner = BTreeSet::new();
            collect_free(a, bound, &mut inner);
            for (n, _) in inner {
                out.insert((n, true));
            }
        }
        _ => {
            for c in e.children() {
                collect_free(c, bound, out);
            }
        }
    }
}

/// `↼t`: hooks every free unhooked variable. Relational subterms, whose
/// meaning is not syntactic, are wrapped in an explicit hook instead.
pub fn hook_expression(e: &Expr) -> Expr {
    fn go(e: &Expr, bound: &mut Vec<(String, bool)>) -> Expr {
        match e {
            Expr::Var { name, hooked: false } if !bound.contains(&(name.clone(), false)) => {
                Expr::Var { name: name.clone(), hooked: true }
            }
            Expr::Var { .. } | Expr::Lit(_) => e.clone(),
            Expr::Not(a) => Expr::Not(Box::new(go(a, bound))),
            Expr::Neg(a) => Expr::Neg(Box::new(go(a, bound))),
            Expr::Bin(op, a, b) => Expr::Bin(*op, Box::new(go(a, bound)), Box::new(go(b, bound))),
            Expr::Index(a, b) => Expr::Index(Box::new(go(a, bound)), Box::new(go(b, bound))),
            Expr::Call(f, args) => Expr::Call(*f, args.iter().map(|a| go(a, bound)).collect()),
            Expr::SetLit(args) => Expr::SetLit(args.iter().map(|a| go(a, bound)).collect()),
            Expr::SeqLit(args) => Expr::SeqLit(args.iter().map(|a| go(a, bound)).collect()),
            Expr::Quant { kind, binder, body } => {
                bound.push((binder.name.clone(), binder.hooked));
                let body = go(body, bound);
                bound.pop();
                Expr::Quant { kind: *kind, binder: binder.clone(), body: Box::new(body) }
            }
            Expr::Hook(_) => e.clone(),
            Expr::Identity(_) | Expr::Compose(..) | Expr::Closure { .. } | Expr::Preserve(..) => {
                Expr::Hook(Box::new(e.clone()))
            }
        }
    }
    go(e, &mut Vec::new())
}

/// Pushes explicit hooks inward wherever that is syntactic, so that `↼(x+1)`
/// and `↼x+1` compare equal.
pub fn normalize_hooks(e: &Expr) -> Expr {
    match e {
        Expr::Hook(a) => {
            let inner = normalize_hooks(a);
            if inner.has_relational() {
                Expr::Hook(Box::new(inner))
            } else {
                hook_expression(&inner)
            }
        }
        Expr::Var { .. } | Expr::Lit(_) | Expr::Identity(_) => e.clone(),
        Expr::Not(a) => Expr::Not(Box::new(normalize_hooks(a))),
        Expr::Neg(a) => Expr::Neg(Box::new(normalize_hooks(a))),
        Expr::Bin(op, a, b) => Expr::Bin(*op, Box::new(normalize_hooks(a)), Box::new(normalize_hooks(b))),
        Expr::Index(a, b) => Expr::Index(Box::new(normalize_hooks(a)), Box::new(normalize_hooks(b))),
        Expr::Call(f, args) => Expr::Call(*f, args.iter().map(normalize_hooks).collect()),
        Expr::SetLit(args) => Expr::SetLit(args.iter().map(normalize_hooks).collect()),
        Expr::SeqLit(args) => Expr::SeqLit(args.iter().map(normalize_hooks).collect()),
        Expr::Quant { kind, binder, body } => Expr::Quant {
            kind: *kind,
            binder: binder.clone(),
            body: Box::new(normalize_hooks(body)),
        },
        Expr::Compose(a, b) => Expr::Compose(Box::new(normalize_hooks(a)), Box::new(normalize_hooks(b))),
        Expr::Closure { rel, reflexive } => Expr::Closure {
            rel: Box::new(normalize_hooks(rel)),
            reflexive: *reflexive,
        },
        Expr::Preserve(a, b) => Expr::Preserve(Box::new(normalize_hooks(a)), Box::new(normalize_hooks(b))),
    }
}

/// `I_β` spelled out over `scope`: the conjunction of `v=↼v` for `v ∈ scope∖β`.
pub fn identity_frame(beta: &BTreeSet<String>, scope: &[String]) -> Expr {
    conj(
        scope
            .iter()
            .filter(|v| !beta.contains(*v))
            .map(|v| eq(var(v), old(v))),
    )
}

/// Replaces free unhooked occurrences of `name` by `with`.
pub fn substitute(e: &Expr, name: &str, with: &Expr) -> Expr {
    fn go(e: &Expr, name: &str, with: &Expr, bound: bool) -> Expr {
        match e {
            Expr::Var { name: n, hooked: false } if n == name && !bound => with.clone(),
            Expr::Var { .. } | Expr::Lit(_) | Expr::Identity(_) => e.clone(),
            Expr::Quant { kind, binder, body } => {
                let shadow = bound || (binder.name == name && !binder.hooked);
                Expr::Quant { kind: *kind, binder: binder.clone(), body: Box::new(go(body, name, with, shadow)) }
            }
            Expr::Not(a) => Expr::Not(Box::new(go(a, name, with, bound))),
            Expr::Neg(a) => Expr::Neg(Box::new(go(a, name, with, bound))),
            Expr::Hook(a) => Expr::Hook(Box::new(go(a, name, with, bound))),
            Expr::Bin(op, a, b) => {
                Expr::Bin(*op, Box::new(go(a, name, with, bound)), Box::new(go(b, name, with, bound)))
            }
            Expr::Index(a, b) => Expr::Index(Box::new(go(a, name, with, bound)), Box::new(go(b, name, with, bound))),
            Expr::Compose(a, b) => {
                Expr::Compose(Box::new(go(a, name, with, bound)), Box::new(go(b, name, with, bound)))
            }
            Expr::Preserve(a, b) => {
                Expr::Preserve(Box::new(go(a, name, with, bound)), Box::new(go(b, name, with, bound)))
            }
            Expr::Closure { rel, reflexive } => Expr::Closure {
                rel: Box::new(go(rel, name, with, bound)),
                reflexive: *reflexive,
            },
            Expr::Call(f, args) => Expr::Call(*f, args.iter().map(|a| go(a, name, with, bound)).collect()),
            Expr::SetLit(args) => Expr::SetLit(args.iter().map(|a| go(a, name, with, bound)).collect()),
            Expr::SeqLit(args) => Expr::SeqLit(args.iter().map(|a| go(a, name, with, bound)).collect()),
        }
    }
    go(e, name, with, false)
}
