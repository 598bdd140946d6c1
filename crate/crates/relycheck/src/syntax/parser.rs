//! Recursive-descent parser for source files, programs and assertions.

use std::collections::{BTreeSet, HashMap};

use crate::lang::ast::{self, Prog, Program, ProgramKind, Span};
use crate::logic::expr::{self as ex, normalize_hooks, BinOp, Binder, Expr, Func, Quant};
use crate::proof::rule::RuleName;
use crate::proof::tree::{Proof, ProofStep};
use crate::sat::spec::{Bracket, Specification, SpecifiedProgram};
use crate::structure::Structure;
use crate::syntax::lexer::{lex, Tok};
use crate::syntax::{sort_kind_text, Decl, ObligationDecl, ObligationKind, ParseError, SourceFile, SpecDecl};
use crate::value::{SortId, SortKind, Value};

const RESERVED: &[&str] = &[
    "skip", "begin", "loc", "end", "if", "then", "else", "fi", "while", "do", "od", "await", "par", "and", "or",
    "not", "true", "false", "forall", "exists", "in", "notin", "subset", "union", "inter", "sat", "sort", "var",
    "const", "def", "program", "witness", "spec", "invariant", "proof", "scope", "valid", "wf", "with", "I",
    "bool", "enum", "seq", "set", "proves",
];

pub struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    pub(crate) st: Structure,
    defs: HashMap<String, Expr>,
    bound: Vec<(String, bool)>,
}

type R<T> = Result<T, ParseError>;

impl Parser {
    pub fn new(src: &str, st: Structure) -> R<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0, st, defs: HashMap::new(), bound: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> R<T> {
        Err(ParseError { span: self.span(), message: message.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> R<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {t}, found {}", self.peek()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> R<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.err(format!("expected `{kw}`, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> R<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            t => self.err(format!("expected an identifier, found {t}")),
        }
    }

    fn idents(&mut self) -> R<Vec<String>> {
        let mut out = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn int(&mut self) -> R<i64> {
        let neg = self.eat(&Tok::Minus);
        match self.bump() {
            Tok::Int(n) => Ok(if neg { -n } else { n }),
            t => {
                self.pos -= 1;
                self.err(format!("expected an integer, found {t}"))
            }
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn expect_eof(&mut self) -> R<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.err(format!("unexpected {}", self.peek()))
        }
    }

    // ---- sorts ----

    fn sort_ref(&mut self) -> R<SortId> {
        let span = self.span();
        match self.sort_spec()? {
            Ok(id) => Ok(id),
            Err(kind) => {
                let name = sort_kind_text(&self.st, &kind);
                self.st.intern_sort(&name, kind).map_err(|e| ParseError { span, message: e.to_string() })
            }
        }
    }

    /// A named sort, or the kind of an anonymous one.
    fn sort_spec(&mut self) -> R<Result<SortId, SortKind>> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Ident(s) if s == "bool" => {
                self.bump();
                SortKind::Boolean
            }
            Tok::Ident(s) if s == "enum" => {
                self.bump();
                self.expect(&Tok::LBrace)?;
                let names = self.idents()?;
                self.expect(&Tok::RBrace)?;
                SortKind::Enum(names)
            }
            Tok::Ident(s) if s == "seq" => {
                self.bump();
                let elem = self.sort_ref()?;
                if !matches!(self.peek(), Tok::Ident(s) if s == "max") {
                    return self.err("expected `max` after a sequence element sort");
                }
                self.bump();
                let n = self.int()?;
                if n < 0 {
                    return self.err("negative sequence bound");
                }
                SortKind::Seq { elem, max_len: n as usize }
            }
            Tok::Ident(s) if s == "set" => {
                self.bump();
                SortKind::Set { elem: self.sort_ref()? }
            }
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.bump();
                return self
                    .st
                    .sort_id(&s)
                    .map(Ok)
                    .ok_or(ParseError { span, message: format!("unknown sort `{s}`") });
            }
            Tok::Int(_) | Tok::Minus => {
                let lo = self.int()?;
                self.expect(&Tok::DotDot)?;
                let hi = self.int()?;
                SortKind::Range { lo, hi }
            }
            t => return self.err(format!("expected a sort, found {t}")),
        };
        Ok(Err(kind))
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> R<Expr> {
        let mut a = self.iff()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let b = self.iff()?;
            a = Expr::Compose(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn iff(&mut self) -> R<Expr> {
        let mut a = self.implies()?;
        while self.eat(&Tok::Iff) {
            let b = self.implies()?;
            a = ex::bin(BinOp::Iff, a, b);
        }
        Ok(a)
    }

    fn implies(&mut self) -> R<Expr> {
        let a = self.or()?;
        if self.eat(&Tok::Implies) {
            let b = self.implies()?;
            return Ok(ex::bin(BinOp::Implies, a, b));
        }
        Ok(a)
    }

    fn or(&mut self) -> R<Expr> {
        let mut a = self.and()?;
        while self.eat(&Tok::Or) || self.eat_kw("or") {
            let b = self.and()?;
            a = ex::bin(BinOp::Or, a, b);
        }
        Ok(a)
    }

    fn and(&mut self) -> R<Expr> {
        let mut a = self.not()?;
        while self.eat(&Tok::And) || self.eat_kw("and") {
            let b = self.not()?;
            a = ex::bin(BinOp::And, a, b);
        }
        Ok(a)
    }

    fn not(&mut self) -> R<Expr> {
        if self.eat(&Tok::Not) || self.eat_kw("not") {
            return Ok(Expr::Not(Box::new(self.not()?)));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> R<Expr> {
        let a = self.add()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::In => BinOp::In,
            Tok::NotIn => BinOp::NotIn,
            Tok::Subset => BinOp::Subset,
            Tok::Ident(s) if s == "in" => BinOp::In,
            Tok::Ident(s) if s == "notin" => BinOp::NotIn,
            Tok::Ident(s) if s == "subset" => BinOp::Subset,
            _ => return Ok(a),
        };
        self.bump();
        let b = self.add()?;
        Ok(ex::bin(op, a, b))
    }

    fn add(&mut self) -> R<Expr> {
        let mut a = self.mul()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                Tok::Union => BinOp::Union,
                Tok::Backslash => BinOp::Diff,
                Tok::Concat => BinOp::Concat,
                Tok::Ident(s) if s == "union" => BinOp::Union,
                _ => return Ok(a),
            };
            self.bump();
            let b = self.mul()?;
            a = ex::bin(op, a, b);
        }
    }

    fn mul(&mut self) -> R<Expr> {
        let mut a = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Percent => BinOp::Mod,
                Tok::Inter => BinOp::Inter,
                Tok::Ident(s) if s == "inter" => BinOp::Inter,
                _ => return Ok(a),
            };
            self.bump();
            let b = self.unary()?;
            a = ex::bin(op, a, b);
        }
    }

    fn unary(&mut self) -> R<Expr> {
        if self.eat(&Tok::Minus) {
            if let Tok::Int(n) = *self.peek() {
                self.bump();
                return Ok(Expr::Lit(Value::Int(-n)));
            }
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(&Tok::Hash) {
            return Ok(Expr::Call(Func::Card, vec![self.unary()?]));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> R<Expr> {
        let mut a = self.atom()?;
        while self.eat(&Tok::LBrack) {
            let i = self.expr()?;
            self.expect(&Tok::RBrack)?;
            a = Expr::Index(Box::new(a), Box::new(i));
        }
        Ok(a)
    }

    fn args(&mut self) -> R<Vec<Expr>> {
        self.expect(&Tok::LParen)?;
        let mut out = Vec::new();
        if !self.eat(&Tok::RParen) {
            out.push(self.expr()?);
            while self.eat(&Tok::Comma) {
                out.push(self.expr()?);
            }
            self.expect(&Tok::RParen)?;
        }
        Ok(out)
    }

    fn list(&mut self, close: &Tok) -> R<Vec<Expr>> {
        let mut out = Vec::new();
        if !self.eat(close) {
            out.push(self.expr()?);
            while self.eat(&Tok::Comma) {
                out.push(self.expr()?);
            }
            self.expect(close)?;
        }
        Ok(out)
    }

    fn resolve_name(&self, name: &str) -> Expr {
        if self.bound.iter().any(|(n, h)| n == name && !h) {
            return ex::var(name);
        }
        if let Some(e) = self.defs.get(name) {
            return e.clone();
        }
        if self.st.constant(name).is_some() && self.st.var_id(name).is_none() {
            return Expr::Lit(Value::Sym(name.into()));
        }
        ex::var(name)
    }

    fn atom(&mut self) -> R<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(ex::int(n))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::LBrace => {
                self.bump();
                Ok(Expr::SetLit(self.list(&Tok::RBrace)?))
            }
            Tok::LBrack => {
                self.bump();
                Ok(Expr::SeqLit(self.list(&Tok::RBrack)?))
            }
            Tok::Hook => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let e = self.expr()?;
                    self.expect(&Tok::RParen)?;
                    return Ok(normalize_hooks(&Expr::Hook(Box::new(e))));
                }
                let name = self.ident()?;
                if self.bound.iter().any(|(n, h)| *n == name && *h) || !self.defs.contains_key(&name) {
                    return Ok(ex::old(&name));
                }
                Ok(normalize_hooks(&Expr::Hook(Box::new(self.defs[&name].clone()))))
            }
            Tok::Ident(s) => match s.as_str() {
                "true" => {
                    self.bump();
                    Ok(ex::tt())
                }
                "false" => {
                    self.bump();
                    Ok(ex::ff())
                }
                "forall" | "exists" => self.quantifier(),
                "I" => {
                    self.bump();
                    let mut beta = Vec::new();
                    if self.eat(&Tok::LBrack)
                        && !self.eat(&Tok::RBrack) {
                            beta = self.idents()?;
                            self.expect(&Tok::RBrack)?;
                        }
                    Ok(Expr::Identity(beta))
                }
                _ if *self.peek_at(1) == Tok::LParen && !RESERVED.contains(&s.as_str()) => {
                    self.bump();
                    let args = self.args()?;
                    let arity = |n: usize, args: &Vec<Expr>| -> R<()> {
                        if args.len() != n {
                            return Err(ParseError { span, message: format!("`{s}` takes {n} argument(s)") });
                        }
                        Ok(())
                    };
                    if let Some(f) = Func::from_name(&s) {
                        arity(f.arity(), &args)?;
                        return Ok(Expr::Call(f, args));
                    }
                    let mut it = args.clone().into_iter();
                    match s.as_str() {
                        "closure" | "rclosure" => {
                            arity(1, &args)?;
                            Ok(Expr::Closure { rel: Box::new(it.next().unwrap()), reflexive: s == "rclosure" })
                        }
                        "preserve" => {
                            arity(2, &args)?;
                            let a = it.next().unwrap();
                            let b = it.next().unwrap();
                            Ok(Expr::Preserve(Box::new(a), Box::new(b)))
                        }
                        _ => Err(ParseError { span, message: format!("unknown function `{s}`") }),
                    }
                }
                _ => {
                    let name = self.ident()?;
                    Ok(self.resolve_name(&name))
                }
            },
            t => self.err(format!("expected an expression, found {t}")),
        }
    }

    fn quantifier(&mut self) -> R<Expr> {
        let kind = if self.eat_kw("forall") {
            Quant::Forall
        } else {
            self.expect_kw("exists")?;
            Quant::Exists
        };
        let mut names = Vec::new();
        loop {
            let hooked = self.eat(&Tok::Hook);
            let span = self.span();
            names.push((self.ident()?, hooked, span));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        let sort = if self.eat(&Tok::Colon) { Some(self.sort_ref()?) } else { None };
        self.expect(&Tok::Dot)?;
        let mut binders = Vec::new();
        for (name, hooked, span) in names {
            let sort = match sort {
                Some(s) => s,
                None => match self.st.var_id(&name) {
                    Some(id) => self.st.var(id).sort,
                    None => {
                        return Err(ParseError {
                            span,
                            message: format!("quantified `{name}` needs a sort: write `{name} : S`"),
                        })
                    }
                },
            };
            binders.push(Binder { name, hooked, sort });
        }
        let depth = self.bound.len();
        self.bound.extend(binders.iter().map(|b| (b.name.clone(), b.hooked)));
        let body = self.expr();
        self.bound.truncate(depth);
        let mut body = body?;
        for binder in binders.into_iter().rev() {
            body = Expr::Quant { kind, binder, body: Box::new(body) };
        }
        Ok(body)
    }

    // ---- programs ----

    pub fn program(&mut self) -> R<Prog> {
        let mut items = vec![self.statement()?];
        while self.eat(&Tok::Semi) {
            if self.at_program_end() {
                break;
            }
            items.push(self.statement()?);
        }
        Ok(ast::seq_all(items))
    }

    fn at_program_end(&self) -> bool {
        match self.peek() {
            Tok::RBrace | Tok::BarBar | Tok::RParen | Tok::Eof => true,
            Tok::Ident(s) => matches!(s.as_str(), "end" | "od" | "fi" | "else"),
            _ => false,
        }
    }

    fn statement(&mut self) -> R<Prog> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Ident(s) if s == "skip" => {
                self.bump();
                ProgramKind::Skip
            }
            Tok::Ident(s) if s == "begin" => {
                self.bump();
                self.expect_kw("loc")?;
                let decls = self.idents()?;
                self.expect(&Tok::Semi)?;
                let body = self.program()?;
                self.expect_kw("end")?;
                ProgramKind::Block { decls, body }
            }
            Tok::Ident(s) if s == "if" => {
                self.bump();
                let test = self.expr()?;
                self.expect_kw("then")?;
                let then_branch = self.program()?;
                let else_branch = if self.eat_kw("else") { self.program()? } else { ast::skip() };
                self.expect_kw("fi")?;
                ProgramKind::If { test, then_branch, else_branch }
            }
            Tok::Ident(s) if s == "while" => {
                self.bump();
                let test = self.expr()?;
                self.expect_kw("do")?;
                let body = self.program()?;
                self.expect_kw("od")?;
                ProgramKind::While { test, body }
            }
            Tok::Ident(s) if s == "await" => {
                self.bump();
                let test = self.expr()?;
                self.expect_kw("do")?;
                let body = self.program()?;
                self.expect_kw("od")?;
                ProgramKind::Await { test, body }
            }
            Tok::Ident(s) if s == "par" => {
                self.bump();
                return self.par_group(span);
            }
            Tok::LBrace => return self.par_group(span),
            Tok::LParen => {
                self.bump();
                let p = self.program()?;
                self.expect(&Tok::RParen)?;
                return Ok(p);
            }
            Tok::Ident(_) => {
                let var = self.ident()?;
                self.expect(&Tok::Assign)?;
                let expr = self.expr()?;
                ProgramKind::Assign { var, expr }
            }
            t => return self.err(format!("expected a statement, found {t}")),
        };
        Ok(Program::with_span(kind, span))
    }

    fn par_group(&mut self, span: Span) -> R<Prog> {
        self.expect(&Tok::LBrace)?;
        let mut arms = vec![self.program()?];
        while self.eat(&Tok::BarBar) {
            arms.push(self.program()?);
        }
        self.expect(&Tok::RBrace)?;
        if arms.len() < 2 {
            return Err(ParseError { span, message: "a parallel composition needs at least two arms".into() });
        }
        let mut acc = arms.pop().unwrap();
        while let Some(a) = arms.pop() {
            acc = Program::with_span(ProgramKind::Par(a, acc), span);
        }
        Ok(acc)
    }

    // ---- specifications and proofs ----

    fn var_set(&mut self) -> R<BTreeSet<String>> {
        self.expect(&Tok::LBrace)?;
        let mut out = BTreeSet::new();
        if !self.eat(&Tok::RBrace) {
            out.extend(self.idents()?);
            self.expect(&Tok::RBrace)?;
        }
        Ok(out)
    }

    pub fn spec_body(&mut self) -> R<(Bracket, Specification)> {
        let (bracket, open, close) = match self.peek() {
            Tok::LParen => (Bracket::Curly, Tok::LParen, Tok::RParen),
            Tok::LBrack => (Bracket::Square, Tok::LBrack, Tok::RBrack),
            t => return self.err(format!("expected `(` or `[` to start a specification, found {t}")),
        };
        self.bump();
        let glo = self.var_set()?;
        self.expect(&Tok::Comma)?;
        let aux = self.var_set()?;
        self.expect(&close)?;
        self.expect(&Tok::ColonColon)?;
        self.expect(&open)?;
        let mut parts = Vec::new();
        for i in 0..5 {
            if i > 0 {
                self.expect(&Tok::Comma)
                    .map_err(|e| ParseError { message: format!("{} (a specification has five parts)", e.message), ..e })?;
            }
            parts.push(self.expr()?);
        }
        self.expect(&close)?;
        let mut it = parts.into_iter();
        let mut next = || it.next().unwrap();
        Ok((
            bracket,
            Specification { glo, aux, pre: next(), rely: next(), wait: next(), guar: next(), eff: next() },
        ))
    }

    fn rule_name(&mut self) -> R<RuleName> {
        let span = self.span();
        let Tok::Ident(mut name) = self.bump() else {
            return Err(ParseError { span, message: "expected a rule name".into() });
        };
        while *self.peek() == Tok::Minus && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            if let Tok::Ident(s) = self.bump() {
                name.push('-');
                name.push_str(&s);
            }
        }
        RuleName::from_name(&name).ok_or(ParseError { span, message: format!("unknown rule `{name}`") })
    }

    fn proof_step(&mut self, main: Option<&Prog>, witness: Option<&Prog>) -> R<ProofStep> {
        let span = self.span();
        let name = self.ident()?;
        self.expect(&Tok::Colon)?;
        let rule = self.rule_name()?;
        let mut premises = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            premises = self.idents()?;
            self.expect(&Tok::RParen)?;
        }
        let mut updates = Vec::new();
        if self.eat_kw("with") {
            loop {
                let a = self.ident()?;
                self.expect(&Tok::Assign)?;
                updates.push((a, self.expr()?));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        if !(self.eat(&Tok::Turnstile) || self.eat_kw("proves")) {
            return self.err(format!("expected `|-` before the conclusion, found {}", self.peek()));
        }
        let pspan = self.span();
        let program = if self.eat_kw("program") {
            main.cloned().ok_or(ParseError { span: pspan, message: "no `program` section precedes the proof".into() })?
        } else if self.eat_kw("witness") {
            witness
                .cloned()
                .ok_or(ParseError { span: pspan, message: "no `witness` section precedes the proof".into() })?
        } else {
            self.expect(&Tok::LBrace)?;
            let p = self.program()?;
            self.expect(&Tok::RBrace)?;
            p
        };
        self.expect_kw("sat")?;
        let (bracket, spec) = self.spec_body()?;
        self.expect(&Tok::Semi)?;
        Ok(ProofStep { name, rule, premises, updates, conclusion: SpecifiedProgram { program, spec, bracket }, span })
    }

    // ---- files ----

    fn define(&mut self, name: &str, span: Span, e: Expr) -> R<()> {
        if self.defs.contains_key(name) || self.st.var_id(name).is_some() || self.st.constant(name).is_some() {
            return Err(ParseError { span, message: format!("`{name}` is already defined") });
        }
        self.defs.insert(name.to_string(), e);
        Ok(())
    }

    pub fn source_file(&mut self) -> R<SourceFile> {
        let mut f = SourceFile::default();
        while !self.at_eof() {
            let span = self.span();
            let decl_err = |e: crate::structure::DeclError| ParseError { span, message: e.to_string() };
            let Tok::Ident(kw) = self.peek().clone() else {
                return self.err(format!("expected a declaration or section, found {}", self.peek()));
            };
            self.bump();
            match kw.as_str() {
                "sort" => {
                    let name = self.ident()?;
                    self.expect(&Tok::Eq)?;
                    let kind = match self.sort_spec()? {
                        Ok(id) => self.st.sort(id).kind.clone(),
                        Err(kind) => kind,
                    };
                    let id = self.st.add_sort(&name, kind).map_err(decl_err)?;
                    self.expect(&Tok::Semi)?;
                    f.decls.push(Decl::Sort { name, sort: id });
                }
                "var" => {
                    let names = self.idents()?;
                    self.expect(&Tok::Colon)?;
                    let sort = self.sort_ref()?;
                    self.expect(&Tok::Semi)?;
                    for n in &names {
                        if self.defs.contains_key(n) {
                            return Err(ParseError { span, message: format!("`{n}` is already defined") });
                        }
                        self.st.add_var(n, sort).map_err(decl_err)?;
                    }
                    f.decls.push(Decl::Var { names, sort });
                }
                "const" | "def" => {
                    let name = self.ident()?;
                    self.expect(&Tok::Eq)?;
                    let body = self.expr()?;
                    self.expect(&Tok::Semi)?;
                    self.define(&name, span, body.clone())?;
                    f.decls.push(if kw == "const" { Decl::Const { name, body } } else { Decl::Def { name, body } });
                }
                "program" | "witness" => {
                    self.expect(&Tok::LBrace)?;
                    let p = self.program()?;
                    self.expect(&Tok::RBrace)?;
                    let slot = if kw == "program" { &mut f.program } else { &mut f.witness };
                    if slot.is_some() {
                        return Err(ParseError { span, message: format!("duplicate `{kw}` section") });
                    }
                    *slot = Some(p);
                }
                "spec" => {
                    let (bracket, spec) = self.spec_body()?;
                    self.expect(&Tok::Semi)?;
                    if f.spec.is_some() {
                        return Err(ParseError { span, message: "duplicate `spec` section".into() });
                    }
                    f.spec = Some(SpecDecl { bracket, spec, span });
                }
                "invariant" => {
                    let e = self.expr()?;
                    self.expect(&Tok::Semi)?;
                    f.invariant = Some(match f.invariant.take() {
                        Some(prev) => ex::and(prev, e),
                        None => e,
                    });
                }
                "proof" => {
                    self.expect(&Tok::LBrace)?;
                    let mut proof = Proof::default();
                    while !self.eat(&Tok::RBrace) {
                        let step = self.proof_step(f.program.as_ref(), f.witness.as_ref())?;
                        if proof.step(&step.name).is_some() {
                            return Err(ParseError {
                                span: step.span,
                                message: format!("proof step `{}` is defined twice", step.name),
                            });
                        }
                        proof.steps.push(step);
                    }
                    f.proof = Some(proof);
                }
                "scope" => {
                    let names = self.var_set()?;
                    self.expect(&Tok::Semi)?;
                    f.scope = Some(names.into_iter().collect());
                }
                "valid" | "wf" => {
                    let expr = self.expr()?;
                    self.expect(&Tok::Semi)?;
                    let kind = if kw == "valid" { ObligationKind::Valid } else { ObligationKind::Wf };
                    f.obligations.push(ObligationDecl { kind, expr, span });
                }
                other => {
                    return Err(ParseError { span, message: format!("unknown section `{other}`") });
                }
            }
        }
        f.structure = self.st.clone();
        Ok(f)
    }
}
