//! Printing programs and assertions in the concrete syntax the parser accepts.

use crate::lang::ast::{Program, ProgramKind};
use crate::logic::expr::{BinOp, Expr, Quant};
use crate::structure::Structure;
use crate::value::Value;

const COMPOSE: u8 = 1;
const IFF: u8 = 2;
const IMPLIES: u8 = 3;
const OR: u8 = 4;
const AND: u8 = 5;
const NOT: u8 = 6;
const CMP: u8 = 7;
const ADD: u8 = 8;
const MUL: u8 = 9;
const UNARY: u8 = 10;
const INDEX: u8 = 11;
const ATOM: u8 = 12;

fn bin_info(op: BinOp) -> (u8, &'static str) {
    match op {
        BinOp::Iff => (IFF, "<=>"),
        BinOp::Implies => (IMPLIES, "=>"),
        BinOp::Or => (OR, "or"),
        BinOp::And => (AND, "and"),
        BinOp::Eq => (CMP, "="),
        BinOp::Ne => (CMP, "!="),
        BinOp::Lt => (CMP, "<"),
        BinOp::Le => (CMP, "<="),
        BinOp::Gt => (CMP, ">"),
        BinOp::Ge => (CMP, ">="),
        BinOp::In => (CMP, "in"),
        BinOp::NotIn => (CMP, "notin"),
        BinOp::Subset => (CMP, "subset"),
        BinOp::Add => (ADD, "+"),
        BinOp::Sub => (ADD, "-"),
        BinOp::Union => (ADD, "union"),
        BinOp::Diff => (ADD, "\\"),
        BinOp::Concat => (ADD, "++"),
        BinOp::Mul => (MUL, "*"),
        BinOp::Div => (MUL, "/"),
        BinOp::Mod => (MUL, "%"),
        BinOp::Inter => (MUL, "inter"),
    }
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Compose(..) => COMPOSE,
        Expr::Bin(op, ..) => bin_info(*op).0,
        Expr::Not(_) => NOT,
        Expr::Neg(_) => UNARY,
        Expr::Lit(Value::Int(n)) if *n < 0 => UNARY,
        Expr::Index(..) => INDEX,
        _ => ATOM,
    }
}

pub fn value_text(v: &Value) -> String {
    match v {
        Value::Bool(b) => b.to_string(),
        Value::Int(n) => n.to_string(),
        Value::Sym(s) => s.to_string(),
        Value::Seq(items) => format!("[{}]", items.iter().map(value_text).collect::<Vec<_>>().join(", ")),
        Value::Set(items) => format!("{{{}}}", items.iter().map(value_text).collect::<Vec<_>>().join(", ")),
    }
}

struct Printer<'a> {
    st: Option<&'a Structure>,
    out: String,
}

impl Printer<'_> {
    fn at(&mut self, e: &Expr, min: u8) {
        if prec(e) < min {
            self.out.push('(');
            self.expr(e);
            self.out.push(')');
        } else {
            self.expr(e);
        }
    }

    fn list(&mut self, items: &[Expr]) {
        for (i, x) in items.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.expr(x);
        }
    }

    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Var { name, hooked } => {
                if *hooked {
                    self.out.push('~');
                }
                self.out.push_str(name);
            }
            Expr::Lit(v) => self.out.push_str(&value_text(v)),
            Expr::Not(a) => {
                self.out.push_str("not ");
                self.at(a, NOT);
            }
            Expr::Neg(a) => {
                self.out.push_str("-(");
                self.expr(a);
                self.out.push(')');
            }
            Expr::Bin(op, a, b) => {
                let (p, sym) = bin_info(*op);
                let (l, r) = match p {
                    IMPLIES => (p + 1, p),
                    CMP => (p + 1, p + 1),
                    _ => (p, p + 1),
                };
                self.at(a, l);
                self.out.push(' ');
                self.out.push_str(sym);
                self.out.push(' ');
                self.at(b, r);
            }
            Expr::Compose(a, b) => {
                self.at(a, COMPOSE);
                self.out.push_str(" | ");
                self.at(b, COMPOSE + 1);
            }
            Expr::Call(f, args) => {
                self.out.push_str(f.name());
                self.out.push('(');
                self.list(args);
                self.out.push(')');
            }
            Expr::SetLit(items) => {
                self.out.push('{');
                self.list(items);
                self.out.push('}');
            }
            Expr::SeqLit(items) => {
                self.out.push('[');
                self.list(items);
                self.out.push(']');
            }
            Expr::Index(a, i) => {
                self.at(a, INDEX);
                self.out.push('[');
                self.expr(i);
                self.out.push(']');
            }
            Expr::Quant { kind, binder, body } => {
                self.out.push_str(match kind {
                    Quant::Forall => "(forall ",
                    Quant::Exists => "(exists ",
                });
                if binder.hooked {
                    self.out.push('~');
                }
                self.out.push_str(&binder.name);
                self.out.push_str(" : ");
                match self.st {
                    Some(st) => {
                        let name = st.sort(binder.sort).name.clone();
                        self.out.push_str(&name);
                    }
                    None => self.out.push_str(&format!("sort#{}", binder.sort)),
                }
                self.out.push_str(" . ");
                self.expr(body);
                self.out.push(')');
            }
            Expr::Identity(beta) => {
                self.out.push('I');
                if !beta.is_empty() {
                    self.out.push_str(&format!("[{}]", beta.join(", ")));
                }
            }
            Expr::Hook(a) => {
                self.out.push_str("~(");
                self.expr(a);
                self.out.push(')');
            }
            Expr::Closure { rel, reflexive } => {
                self.out.push_str(if *reflexive { "rclosure(" } else { "closure(" });
                self.expr(rel);
                self.out.push(')');
            }
            Expr::Preserve(a, b) => {
                self.out.push_str("preserve(");
                self.expr(a);
                self.out.push_str(", ");
                self.expr(b);
                self.out.push(')');
            }
        }
    }
}

/// Renders an assertion; sort names in quantifiers need the structure.
pub fn expr_text(e: &Expr, st: Option<&Structure>) -> String {
    let mut p = Printer { st, out: String::new() };
    p.expr(e);
    p.out
}

fn prog(z: &Program, out: &mut String, st: Option<&Structure>) {
    let e = |x: &Expr| expr_text(x, st);
    match &z.kind {
        ProgramKind::Skip => out.push_str("skip"),
        ProgramKind::Assign { var, expr } => {
            out.push_str(&format!("{var} := {}", e(expr)));
        }
        ProgramKind::Block { decls, body } => {
            out.push_str(&format!("begin loc {}; ", decls.join(", ")));
            prog(body, out, st);
            out.push_str(" end");
        }
        ProgramKind::Seq(a, b) => {
            prog(a, out, st);
            out.push_str("; ");
            prog(b, out, st);
        }
        ProgramKind::If { test, then_branch, else_branch } => {
            out.push_str(&format!("if {} then ", e(test)));
            prog(then_branch, out, st);
            out.push_str(" else ");
            prog(else_branch, out, st);
            out.push_str(" fi");
        }
        ProgramKind::While { test, body } => {
            out.push_str(&format!("while {} do ", e(test)));
            prog(body, out, st);
            out.push_str(" od");
        }
        ProgramKind::Await { test, body } => {
            out.push_str(&format!("await {} do ", e(test)));
            prog(body, out, st);
            out.push_str(" od");
        }
        ProgramKind::Par(a, b) => {
            out.push_str("par { ");
            prog(a, out, st);
            let mut rest = b;
            while let ProgramKind::Par(x, y) = &rest.kind {
                out.push_str(" || ");
                prog(x, out, st);
                rest = y;
            }
            out.push_str(" || ");
            prog(rest, out, st);
            out.push_str(" }");
        }
    }
}

/// One-line rendering.
pub fn program_inline(z: &Program) -> String {
    let mut out = String::new();
    prog(z, &mut out, None);
    out
}

fn indent_prog(z: &Program, depth: usize, out: &mut String, st: Option<&Structure>) {
    let pad = "  ".repeat(depth);
    let e = |x: &Expr| expr_text(x, st);
    match &z.kind {
        ProgramKind::Seq(..) => {
            let items = std::sync::Arc::new(z.clone()).seq_items();
            for (i, item) in items.iter().enumerate() {
                indent_prog(item, depth, out, st);
                if i + 1 < items.len() {
                    out.push(';');
                }
                out.push('\n');
            }
            out.pop();
        }
        ProgramKind::Block { decls, body } => {
            out.push_str(&format!("{pad}begin loc {};\n", decls.join(", ")));
            indent_prog(body, depth + 1, out, st);
            out.push_str(&format!("\n{pad}end"));
        }
        ProgramKind::If { test, then_branch, else_branch } => {
            out.push_str(&format!("{pad}if {} then\n", e(test)));
            indent_prog(then_branch, depth + 1, out, st);
            if else_branch.kind != ProgramKind::Skip {
                out.push_str(&format!("\n{pad}else\n"));
                indent_prog(else_branch, depth + 1, out, st);
            }
            out.push_str(&format!("\n{pad}fi"));
        }
        ProgramKind::While { test, body } | ProgramKind::Await { test, body } => {
            let kw = if matches!(z.kind, ProgramKind::While { .. }) { "while" } else { "await" };
            out.push_str(&format!("{pad}{kw} {} do\n", e(test)));
            indent_prog(body, depth + 1, out, st);
            out.push_str(&format!("\n{pad}od"));
        }
        ProgramKind::Par(..) => {
            let mut items: Vec<&Program> = Vec::new();
            let mut rest = z;
            while let ProgramKind::Par(a, b) = &rest.kind {
                items.push(a);
                rest = b;
            }
            items.push(rest);
            out.push_str(&format!("{pad}par {{\n"));
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(&format!("\n{pad}||\n"));
                }
                indent_prog(item, depth + 1, out, st);
            }
            out.push_str(&format!("\n{pad}}}"));
        }
        _ => {
            out.push_str(&pad);
            prog(z, out, st);
        }
    }
}

/// Multi-line rendering with two-space indentation.
pub fn program_text(z: &Program, st: Option<&Structure>) -> String {
    let mut out = String::new();
    indent_prog(z, 0, &mut out, st);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_assertion_with, parse_program_with, parse_source};

    #[test]
    fn implication_is_right_associative() {
        let f = parse_source("var x : bool;").unwrap();
        let e = parse_assertion_with("(x => x) => x", &f.structure).unwrap();
        assert_eq!(expr_text(&e, None), "(x => x) => x");
        let e = parse_assertion_with("x => x => x", &f.structure).unwrap();
        assert_eq!(expr_text(&e, None), "x => x => x");
    }

    #[test]
    fn round_trip_program() {
        let f = parse_source("var x, y : 0..3;").unwrap();
        let src = "begin loc t; t := x; if t < 3 then x := t + 1 fi end; par { y := 1 || await x > 0 do y := 2 od || skip }; par { par { x := 1 || skip } || y := 0 }";
        let z = parse_program_with(src, &f.structure).unwrap();
        for text in [program_inline(&z), program_text(&z, Some(&f.structure))] {
            assert_eq!(parse_program_with(&text, &f.structure).unwrap(), z, "{text}");
        }
    }

    #[test]
    fn negation_and_card() {
        let f = parse_source("var s : set 0..2; var n : -1..1;").unwrap();
        let e = parse_assertion_with("#s - -(n) = -1", &f.structure).unwrap();
        assert_eq!(expr_text(&e, None), "card(s) - -(n) = -1");
    }
}
