//! Concrete syntax: lexer, parser and printer.

pub mod lexer;
pub mod parser;
pub mod pretty;

use crate::lang::ast::{Prog, Span};
use crate::logic::Expr;
use crate::proof::tree::Proof;
use crate::sat::spec::{Bracket, Specification};
use crate::structure::Structure;
use crate::value::{SortId, SortKind};

pub use parser::Parser;
pub use pretty::{expr_text, program_inline, program_text};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Sort { name: String, sort: SortId },
    Var { names: Vec<String>, sort: SortId },
    Const { name: String, body: Expr },
    Def { name: String, body: Expr },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecDecl {
    pub bracket: Bracket,
    pub spec: Specification,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObligationKind {
    /// `valid A;`: A holds for every pair of states.
    Valid,
    /// `wf A;`: A is well-founded.
    Wf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObligationDecl {
    pub kind: ObligationKind,
    pub expr: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, Default)]
pub struct SourceFile {
    pub structure: Structure,
    pub decls: Vec<Decl>,
    pub program: Option<Prog>,
    pub witness: Option<Prog>,
    pub spec: Option<SpecDecl>,
    pub invariant: Option<Expr>,
    pub proof: Option<Proof>,
    pub scope: Option<Vec<String>>,
    pub obligations: Vec<ObligationDecl>,
}

pub fn parse_source(src: &str) -> Result<SourceFile, ParseError> {
    Parser::new(src, Structure::new())?.source_file()
}

pub fn parse_program_with(src: &str, st: &Structure) -> Result<Prog, ParseError> {
    let mut p = Parser::new(src, st.clone())?;
    let z = p.program()?;
    p.expect_eof()?;
    Ok(z)
}

pub fn parse_assertion_with(src: &str, st: &Structure) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src, st.clone())?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Canonical source text of an anonymous sort; reparses to the same kind.
pub fn sort_kind_text(st: &Structure, kind: &SortKind) -> String {
    match kind {
        SortKind::Boolean => "bool".into(),
        SortKind::Range { lo, hi } => format!("{lo}..{hi}"),
        SortKind::Enum(names) => format!("enum {{{}}}", names.join(", ")),
        SortKind::Seq { elem, max_len } => format!("seq {} max {max_len}", st.sort(*elem).name),
        SortKind::Set { elem } => format!("set {}", st.sort(*elem).name),
    }
}

/// Sort and variable declarations that rebuild `st` when parsed.
pub fn structure_text(st: &Structure) -> String {
    let mut out = String::new();
    for s in st.sorts() {
        let text = sort_kind_text(st, &s.kind);
        if s.name != text {
            out.push_str(&format!("sort {} = {text};\n", s.name));
        }
    }
    for v in st.vars() {
        out.push_str(&format!("var {} : {};\n", v.name, st.sort(v.sort).name));
    }
    out
}
