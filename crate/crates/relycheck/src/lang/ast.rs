//! Program syntax.

use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::Serialize;

use crate::logic::Expr;

/// Source position (1-based); `0:0` for synthesised nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

pub type Prog = Arc<Program>;

/// A program node. Equality and hashing ignore spans.
#[derive(Clone, Debug)]
pub struct Program {
    pub kind: ProgramKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProgramKind {
    Skip,
    Assign { var: String, expr: Expr },
    Block { decls: Vec<String>, body: Prog },
    /// Always right-nested: the left operand is never itself a `Seq`.
    Seq(Prog, Prog),
    If { test: Expr, then_branch: Prog, else_branch: Prog },
    While { test: Expr, body: Prog },
    Par(Prog, Prog),
    Await { test: Expr, body: Prog },
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Program {}

impl Hash for Program {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state)
    }
}

fn mk(kind: ProgramKind, span: Span) -> Prog {
    Arc::new(Program { kind, span })
}

pub fn skip() -> Prog {
    mk(ProgramKind::Skip, Span::default())
}

pub fn assign(var: &str, expr: Expr) -> Prog {
    mk(ProgramKind::Assign { var: var.into(), expr }, Span::default())
}

pub fn block(decls: Vec<String>, body: Prog) -> Prog {
    mk(ProgramKind::Block { decls, body }, Span::default())
}

/// `a ; b`, re-associated to the right.
pub fn seq(a: Prog, b: Prog) -> Prog {
    match &a.kind {
        ProgramKind::Seq(x, y) => mk(ProgramKind::Seq(x.clone(), seq(y.clone(), b)), a.span),
        _ => {
            let span = a.span;
            mk(ProgramKind::Seq(a, b), span)
        }
    }
}

/// Sequential composition of a nonempty list.
pub fn seq_all(items: Vec<Prog>) -> Prog {
    let mut it = items.into_iter().rev();
    let mut acc = it.next().expect("nonempty sequence");
    for p in it {
        acc = seq(p, acc);
    }
    acc
}

pub fn if_(test: Expr, then_branch: Prog, else_branch: Prog) -> Prog {
    mk(ProgramKind::If { test, then_branch, else_branch }, Span::default())
}

pub fn while_(test: Expr, body: Prog) -> Prog {
    mk(ProgramKind::While { test, body }, Span::default())
}

pub fn par(a: Prog, b: Prog) -> Prog {
    mk(ProgramKind::Par(a, b), Span::default())
}

pub fn await_(test: Expr, body: Prog) -> Prog {
    mk(ProgramKind::Await { test, body }, Span::default())
}

impl Program {
    pub fn with_span(kind: ProgramKind, span: Span) -> Prog {
        match kind {
            ProgramKind::Seq(a, b) => {
                let p = seq(a, b);
                mk(p.kind.clone(), span)
            }
            k => mk(k, span),
        }
    }

    /// Statements of a flattened `;` chain.
    pub fn seq_items(self: &Arc<Self>) -> Vec<Prog> {
        let mut out = Vec::new();
        let mut cur = self.clone();
        loop {
            match &cur.kind {
                ProgramKind::Seq(a, b) => {
                    out.extend(a.seq_items());
                    let next = b.clone();
                    cur = next;
                }
                _ => {
                    out.push(cur);
                    return out;
                }
            }
        }
    }

    /// Leaves of a tree of nested `Par` nodes.
    pub fn par_items(self: &Arc<Self>) -> Vec<Prog> {
        match &self.kind {
            ProgramKind::Par(a, b) => {
                let mut out = a.par_items();
                out.extend(b.par_items());
                out
            }
            _ => vec![self.clone()],
        }
    }

    pub fn children(&self) -> Vec<&Prog> {
        match &self.kind {
            ProgramKind::Skip | ProgramKind::Assign { .. } => vec![],
            ProgramKind::Block { body, .. }
            | ProgramKind::While { body, .. }
            | ProgramKind::Await { body, .. } => vec![body],
            ProgramKind::Seq(a, b) | ProgramKind::Par(a, b) => vec![a, b],
            ProgramKind::If { then_branch, else_branch, .. } => vec![then_branch, else_branch],
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}
