//! Rule schemas: matching a conclusion against its premises and emitting the
//! obligations a schema leaves open.

use std::collections::BTreeSet;

use crate::lang::ast::{Prog, ProgramKind};
use crate::lang::removal::Removal;
use crate::lang::vars::{free_vars, hid_set};
use crate::logic::expr::{self as ex, hook_expression, normalize_hooks, BinOp, Binder, Expr, Quant};
use crate::proof::obligation::Obligation;
use crate::proof::rule::RuleName;
use crate::sat::spec::{Bracket, Specification, SpecifiedProgram};
use crate::structure::Structure;
use crate::syntax::pretty::{expr_text, program_inline};

/// An axiom leaf generated by a rule application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Leaf {
    Formula(Obligation),
    Removal(Removal),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{rule}: {field}: expected {expected}, found {found}")]
pub struct SchemaError {
    pub rule: RuleName,
    pub field: String,
    pub expected: String,
    pub found: String,
}

pub struct RuleInstance<'a> {
    pub rule: RuleName,
    pub premises: Vec<&'a SpecifiedProgram>,
    pub conclusion: &'a SpecifiedProgram,
    /// `a := u_a` for the assignment- and await-rules.
    pub updates: &'a [(String, Expr)],
}

/// Rebuilds `∧`, `∨` and `|` chains right-nested and pushes hooks inward, so
/// that matching is insensitive to associativity.
pub fn canonical(e: &Expr) -> Expr {
    fn chain(e: &Expr, op: Option<BinOp>) -> Expr {
        let items: Vec<&Expr> = match op {
            Some(op) => {
                let mut out = Vec::new();
                flatten(e, op, &mut out);
                out
            }
            None => e.composition_chain(),
        };
        let mut items: Vec<Expr> = items.into_iter().map(go).collect();
        let mut acc = items.pop().expect("nonempty chain");
        while let Some(x) = items.pop() {
            acc = match op {
                Some(op) => ex::bin(op, x, acc),
                None => Expr::Compose(Box::new(x), Box::new(acc)),
            };
        }
        acc
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
    fn go(e: &Expr) -> Expr {
        match e {
            Expr::Bin(op @ (BinOp::And | BinOp::Or), ..) => chain(e, Some(*op)),
            Expr::Compose(..) => chain(e, None),
            Expr::Var { .. } | Expr::Lit(_) | Expr::Identity(_) => e.clone(),
            Expr::Not(a) => Expr::Not(Box::new(go(a))),
            Expr::Neg(a) => Expr::Neg(Box::new(go(a))),
            Expr::Hook(a) => Expr::Hook(Box::new(go(a))),
            Expr::Bin(op, a, b) => ex::bin(*op, go(a), go(b)),
            Expr::Index(a, b) => Expr::Index(Box::new(go(a)), Box::new(go(b))),
            Expr::Call(f, args) => Expr::Call(*f, args.iter().map(go).collect()),
            Expr::SetLit(args) => Expr::SetLit(args.iter().map(go).collect()),
            Expr::SeqLit(args) => Expr::SeqLit(args.iter().map(go).collect()),
            Expr::Quant { kind, binder, body } => {
                Expr::Quant { kind: *kind, binder: binder.clone(), body: Box::new(go(body)) }
            }
            Expr::Closure { rel, reflexive } => Expr::Closure { rel: Box::new(go(rel)), reflexive: *reflexive },
            Expr::Preserve(a, b) => Expr::Preserve(Box::new(go(a)), Box::new(go(b))),
        }
    }
    go(&normalize_hooks(e))
}

pub fn same(a: &Expr, b: &Expr) -> bool {
    a == b || canonical(a) == canonical(b)
}

fn hooked(e: &Expr) -> Expr {
    normalize_hooks(&Expr::Hook(Box::new(e.clone())))
}

fn preserve(p: &Expr, r: &Expr) -> Expr {
    Expr::Preserve(Box::new(p.clone()), Box::new(r.clone()))
}

fn unchanged(v: &str) -> Expr {
    ex::eq(ex::var(v), ex::old(v))
}

struct Ctx<'a> {
    st: &'a Structure,
    rule: RuleName,
    scope: BTreeSet<String>,
    leaves: Vec<Leaf>,
}

type M<T> = Result<T, SchemaError>;

impl<'a> Ctx<'a> {
    fn err<T>(&self, field: impl Into<String>, expected: impl Into<String>, found: impl Into<String>) -> M<T> {
        Err(SchemaError { rule: self.rule, field: field.into(), expected: expected.into(), found: found.into() })
    }

    fn text(&self, e: &Expr) -> String {
        format!("`{}`", expr_text(e, Some(self.st)))
    }

    fn expect_expr(&self, field: &str, found: &Expr, expected: &Expr) -> M<()> {
        if same(found, expected) {
            Ok(())
        } else {
            self.err(field, self.text(expected), self.text(found))
        }
    }

    /// `found ≡ p ∧ x`, or `found ≡ x` when `p` is `true`.
    fn expect_conj(&self, field: &str, found: &Expr, p: &Expr, x: &Expr) -> M<()> {
        if p.is_true() && same(found, x) {
            return Ok(());
        }
        self.expect_expr(field, found, &ex::and(p.clone(), x.clone()))
    }

    fn expect_prog(&self, field: &str, found: &Prog, expected: &Prog) -> M<()> {
        if found == expected {
            Ok(())
        } else {
            self.err(
                field,
                format!("program `{}`", program_inline(expected)),
                format!("`{}`", program_inline(found)),
            )
        }
    }

    fn expect_sets(&self, which: &str, found: &Specification, glo: &BTreeSet<String>, aux: &BTreeSet<String>) -> M<()> {
        let show = |s: &BTreeSet<String>| format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(", "));
        if found.glo != *glo {
            return self.err(format!("{which} global set"), show(glo), show(&found.glo));
        }
        if found.aux != *aux {
            return self.err(format!("{which} auxiliary set"), show(aux), show(&found.aux));
        }
        Ok(())
    }

    /// Compares the named parts of two specifications.
    fn expect_parts(&self, which: &str, found: &Specification, expected: &Specification, parts: &str) -> M<()> {
        for c in parts.chars() {
            let (name, f, e) = match c {
                'P' => ("pre-condition", &found.pre, &expected.pre),
                'R' => ("rely-condition", &found.rely, &expected.rely),
                'W' => ("wait-condition", &found.wait, &expected.wait),
                'G' => ("guar-condition", &found.guar, &expected.guar),
                'E' => ("eff-condition", &found.eff, &expected.eff),
                _ => unreachable!(),
            };
            self.expect_expr(&format!("{which} {name}"), f, e)?;
        }
        Ok(())
    }

    fn valid(&mut self, e: Expr, origin: &str) {
        let ob = Obligation::valid(e, &self.scope, format!("{}: {origin}", self.rule));
        self.leaves.push(Leaf::Formula(ob));
    }

    fn implication(&mut self, a: &Expr, b: &Expr, origin: &str) {
        self.valid(ex::implies(a.clone(), b.clone()), origin);
    }

    /// Splits `R|E|R`, returning `E`.
    fn middle_of_rely_sandwich(&self, e: &Expr, rely: &Expr) -> M<Expr> {
        let chain = canonical(e);
        let items = chain.composition_chain();
        let r = canonical(rely);
        let rn = r.composition_chain().len();
        if items.len() > 2 * rn {
            let head = ex::compose(items[..rn].iter().map(|x| (*x).clone()));
            let tail = ex::compose(items[items.len() - rn..].iter().map(|x| (*x).clone()));
            if head == r && tail == r {
                return Ok(ex::compose(items[rn..items.len() - rn].iter().map(|x| (*x).clone())));
            }
        }
        self.err("conclusion eff-condition", format!("R | E | R with R = {}", self.text(rely)), self.text(e))
    }

    /// Checks `a := u` updates: targets are distinct auxiliaries and
    /// `var[u_a] ⊆ ϑ ∪ {a}`. Returns `⋀_{a∈α} a = ↼u_a`, `u_a` defaulting to `a`.
    fn update_frame(&self, spec: &Specification, updates: &[(String, Expr)]) -> M<Expr> {
        let mut seen = BTreeSet::new();
        for (a, u) in updates {
            if !spec.aux.contains(a) {
                return self.err("update", "an auxiliary variable as target", format!("`{a}`"));
            }
            if !seen.insert(a.clone()) {
                return self.err("update", "each auxiliary updated at most once", format!("`{a}` twice"));
            }
            if let Some(v) = u.free_vars().into_iter().find(|v| !spec.glo.contains(v) && v != a) {
                return self.err(
                    format!("update of `{a}`"),
                    "an expression over global variables and the target",
                    format!("`{v}` in {}", self.text(u)),
                );
            }
            if u.has_hooks() || u.has_relational() {
                return self.err(format!("update of `{a}`"), "a unary expression", self.text(u));
            }
        }
        Ok(ex::conj(spec.aux.iter().map(|a| {
            let u = updates.iter().find(|(b, _)| b == a).map(|(_, u)| u.clone()).unwrap_or_else(|| ex::var(a));
            ex::eq(ex::var(a), hook_expression(&u))
        })))
    }

    fn no_updates(&self, updates: &[(String, Expr)]) -> M<()> {
        match updates.first() {
            None => Ok(()),
            Some((a, _)) => self.err("updates", "no `with` clause for this rule", format!("an update of `{a}`")),
        }
    }
}

fn expected_premises(rule: RuleName) -> Option<usize> {
    use RuleName::*;
    Some(match rule {
        Skip | Assignment => 0,
        Sequential | If | Parallel => 2,
        ParallelGeneral => return None,
        _ => 1,
    })
}

fn kind_name(z: &Prog) -> &'static str {
    match &z.kind {
        ProgramKind::Skip => "skip",
        ProgramKind::Assign { .. } => "an assignment",
        ProgramKind::Block { .. } => "a block",
        ProgramKind::Seq(..) => "a sequential composition",
        ProgramKind::If { .. } => "an if-statement",
        ProgramKind::While { .. } => "a while-statement",
        ProgramKind::Par(..) => "a parallel composition",
        ProgramKind::Await { .. } => "an await-statement",
    }
}

/// Greedily splits a parallel tree into the given components, in order.
fn par_split(z: &Prog, parts: &[&Prog], next: &mut usize) -> bool {
    if *next < parts.len() && z == parts[*next] {
        *next += 1;
        return true;
    }
    match &z.kind {
        ProgramKind::Par(a, b) => par_split(a, parts, next) && par_split(b, parts, next),
        _ => false,
    }
}

/// Checks one rule application and returns the axiom leaves it needs.
pub fn validate_rule_instance(st: &Structure, inst: &RuleInstance) -> Result<Vec<Leaf>, SchemaError> {
    use RuleName::*;
    let c = inst.conclusion;
    let cs = &c.spec;
    let mut cx = Ctx { st, rule: inst.rule, scope: cs.scope_names(), leaves: Vec::new() };
    let rule = inst.rule;
    let prem = &inst.premises;

    if let Some(n) = expected_premises(rule) {
        if prem.len() != n {
            return cx.err("premises", format!("{n} premise(s)"), format!("{}", prem.len()));
        }
    } else if prem.len() < 2 {
        return cx.err("premises", "at least 2 premises", format!("{}", prem.len()));
    }
    if !matches!(rule, Assignment | Await | LspsAwait) {
        cx.no_updates(inst.updates)?;
    }

    match rule {
        LspsWhile | LspsAwait if c.bracket != Bracket::Square => {
            return cx.err("conclusion", "a square-bracket specified program", "curly brackets");
        }
        While | Await if c.bracket == Bracket::Square => {
            let alt = if rule == While { "lsps-while" } else { "lsps-await" };
            return cx.err("rule", format!("`{alt}` for a square-bracket conclusion"), format!("`{rule}`"));
        }
        _ => {}
    }
    for (i, p) in prem.iter().enumerate() {
        let want = if rule == LspsAwait { Bracket::Curly } else { c.bracket };
        if p.bracket != want {
            return cx.err(format!("premise {} brackets", i + 1), format!("{want:?}"), format!("{:?}", p.bracket));
        }
    }

    let z = &c.program;
    let wrong_program = |cx: &Ctx, want: &str| cx.err("conclusion program", want.to_string(), kind_name(z).to_string());

    match rule {
        Consequence => {
            let p = prem[0];
            cx.expect_prog("premise program", &p.program, z)?;
            cx.expect_sets("premise", &p.spec, &cs.glo, &cs.aux)?;
            let ps = &p.spec;
            cx.implication(&cs.pre, &ps.pre, "P2 => P1");
            cx.implication(&cs.rely, &ps.rely, "R2 => R1");
            cx.implication(&ps.wait, &cs.wait, "W1 => W2");
            cx.implication(&ps.guar, &cs.guar, "G1 => G2");
            cx.implication(&ps.eff, &cs.eff, "E1 => E2");
        }
        Pre => {
            let p = prem[0];
            cx.expect_prog("premise program", &p.program, z)?;
            cx.expect_sets("premise", &p.spec, &cs.glo, &cs.aux)?;
            cx.expect_parts("premise", &p.spec, cs, "PRWG")?;
            cx.expect_conj("conclusion eff-condition", &cs.eff, &hooked(&cs.pre), &p.spec.eff)?;
        }
        Access => {
            let p = prem[0];
            cx.expect_prog("premise program", &p.program, z)?;
            cx.expect_sets("premise", &p.spec, &cs.glo, &cs.aux)?;
            cx.expect_parts("premise", &p.spec, cs, "PWGE")?;
            let hid: BTreeSet<String> = hid_set(z).intersection(&cs.glo).cloned().collect();
            let got = canonical(&p.spec.rely);
            let items = got.conjuncts();
            let base = canonical(&cs.rely);
            let n = base.conjuncts().len();
            let ok = items.len() > n
                && canonical(&ex::conj(items[..n].iter().map(|x| (*x).clone()))) == base
                && items[n..].iter().all(|x| hid.iter().any(|v| **x == unchanged(v)));
            if !ok {
                return cx.err(
                    "premise rely-condition",
                    format!(
                        "R and v = ~v with R = {} and v among {{{}}}",
                        cx.text(&cs.rely),
                        hid.iter().cloned().collect::<Vec<_>>().join(", ")
                    ),
                    cx.text(&p.spec.rely),
                );
            }
        }
        Skip => {
            if !matches!(z.kind, ProgramKind::Skip) {
                return wrong_program(&cx, "skip");
            }
            cx.expect_expr("conclusion eff-condition", &cs.eff, &cs.rely)?;
        }
        Assignment => {
            let ProgramKind::Assign { var, expr } = &z.kind else {
                return wrong_program(&cx, "an assignment");
            };
            let e = cx.middle_of_rely_sandwich(&cs.eff, &cs.rely)?;
            let frame = cx.update_frame(cs, inst.updates)?;
            let mut beta: Vec<String> = cs.aux.iter().cloned().collect();
            beta.push(var.clone());
            beta.sort();
            let lhs = ex::conj([
                Expr::Hook(Box::new(preserve(&cs.pre, &cs.rely))),
                ex::eq(ex::var(var), hook_expression(expr)),
                Expr::Identity(beta),
                frame,
            ]);
            cx.implication(&lhs, &ex::and(cs.guar.clone(), e), "~(P^R) and v = ~r and I and updates => G and E");
        }
        Block => {
            let ProgramKind::Block { decls, body } = &z.kind else {
                return wrong_program(&cx, "a block");
            };
            let p = prem[0];
            cx.expect_prog("premise program", &p.program, body)?;
            let mut glo = cs.glo.clone();
            glo.extend(decls.iter().cloned());
            cx.expect_sets("premise", &p.spec, &glo, &cs.aux)?;
            cx.expect_parts("premise", &p.spec, cs, "PWGE")?;
            let rely = ex::conj(std::iter::once(cs.rely.clone()).chain(decls.iter().map(|v| unchanged(v))));
            cx.expect_expr("premise rely-condition", &p.spec.rely, &rely)?;
        }
        Sequential => {
            let (p1, p2) = (prem[0], prem[1]);
            let mut items = p1.program.seq_items();
            items.extend(p2.program.seq_items());
            if !matches!(z.kind, ProgramKind::Seq(..)) || z.seq_items() != items {
                return cx.err(
                    "conclusion program",
                    format!("`{}; {}`", program_inline(&p1.program), program_inline(&p2.program)),
                    format!("`{}`", program_inline(z)),
                );
            }
            for (i, p) in [p1, p2].into_iter().enumerate() {
                let which = format!("premise {}", i + 1);
                cx.expect_sets(&which, &p.spec, &cs.glo, &cs.aux)?;
                cx.expect_parts(&which, &p.spec, cs, "RWG")?;
            }
            cx.expect_parts("premise 1", &p1.spec, cs, "P")?;
            let chain = canonical(&cs.eff);
            let all = chain.composition_chain();
            let e2 = canonical(&p2.spec.eff);
            let n2 = e2.composition_chain().len();
            if all.len() <= n2 || canonical(&ex::compose(all[all.len() - n2..].iter().map(|x| (*x).clone()))) != e2 {
                return cx.err(
                    "conclusion eff-condition",
                    format!("E1 | E2 with E2 = {}", cx.text(&p2.spec.eff)),
                    cx.text(&cs.eff),
                );
            }
            let e1 = ex::compose(all[..all.len() - n2].iter().map(|x| (*x).clone()));
            cx.expect_conj("premise 1 eff-condition", &p1.spec.eff, &p2.spec.pre, &e1)?;
        }
        If => {
            let ProgramKind::If { test, then_branch, else_branch } = &z.kind else {
                return wrong_program(&cx, "an if-statement");
            };
            let (p1, p2) = (prem[0], prem[1]);
            cx.expect_prog("premise 1 program", &p1.program, then_branch)?;
            cx.expect_prog("premise 2 program", &p2.program, else_branch)?;
            for (i, (p, b)) in [(p1, test.clone()), (p2, ex::not(test.clone()))].into_iter().enumerate() {
                let which = format!("premise {}", i + 1);
                cx.expect_sets(&which, &p.spec, &cs.glo, &cs.aux)?;
                cx.expect_parts(&which, &p.spec, cs, "RWGE")?;
                cx.expect_conj(&format!("{which} pre-condition"), &p.spec.pre, &cs.pre, &b)?;
            }
        }
        While | LspsWhile => {
            let ProgramKind::While { test, body } = &z.kind else {
                return wrong_program(&cx, "a while-statement");
            };
            let p = prem[0];
            cx.expect_prog("premise program", &p.program, body)?;
            cx.expect_sets("premise", &p.spec, &cs.glo, &cs.aux)?;
            cx.expect_parts("premise", &p.spec, cs, "RWG")?;
            let canon = canonical(&cs.eff);
            let zrel = canon
                .conjuncts()
                .first()
                .and_then(|c| c.disjuncts().first().copied())
                .and_then(|d| match d {
                    Expr::Closure { rel, reflexive: false } => Some((**rel).clone()),
                    _ => None,
                });
            let Some(zrel) = zrel else {
                return cx.err("conclusion eff-condition", "(closure(Z) or R) and not b", cx.text(&cs.eff));
            };
            let want = ex::and(
                ex::or(Expr::Closure { rel: Box::new(zrel.clone()), reflexive: false }, cs.rely.clone()),
                ex::not(test.clone()),
            );
            cx.expect_expr("conclusion eff-condition", &cs.eff, &want)?;
            cx.expect_conj("premise pre-condition", &p.spec.pre, &cs.pre, test)?;
            cx.expect_conj("premise eff-condition", &p.spec.eff, &cs.pre, &zrel)?;
            if rule == While {
                let ob = Obligation::well_founded(zrel, &cx.scope, "while: wf Z");
                cx.leaves.push(Leaf::Formula(ob));
            }
        }
        Parallel | ParallelGeneral => {
            let comps: Vec<&Prog> = prem.iter().map(|p| &p.program).collect();
            let mut next = 0;
            let shape_ok = if rule == Parallel {
                matches!(&z.kind, ProgramKind::Par(a, b) if a == comps[0] && b == comps[1])
            } else {
                matches!(z.kind, ProgramKind::Par(..)) && par_split(z, &comps, &mut next) && next == comps.len()
            };
            if !shape_ok {
                let want = comps.iter().map(|p| program_inline(p)).collect::<Vec<_>>().join(" || ");
                return cx.err("conclusion program", format!("`par {{ {want} }}`"), format!("`{}`", program_inline(z)));
            }
            let m = prem.len();
            let rel: Vec<Expr> = prem.iter().map(|p| p.spec.rely.clone()).collect();
            let eff: Vec<Expr> = prem.iter().map(|p| p.spec.eff.clone()).collect();
            let mut waits = Vec::with_capacity(m);
            for (j, p) in prem.iter().enumerate() {
                let which = format!("premise {}", j + 1);
                cx.expect_sets(&which, &p.spec, &cs.glo, &cs.aux)?;
                cx.expect_parts(&which, &p.spec, cs, "P")?;
                let others = rel.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, r)| r.clone());
                cx.expect_conj(&format!("{which} guar-condition"), &p.spec.guar, &cs.guar, &ex::conj(others))?;
                waits.push(split_wait(&cx, &which, &p.spec.wait, &cs.wait)?);
            }
            cx.expect_expr("conclusion rely-condition", &cs.rely, &ex::conj(rel.iter().cloned()))?;
            cx.expect_expr("conclusion eff-condition", &cs.eff, &ex::conj(eff.iter().cloned()))?;
            if rule == Parallel {
                let (w1, w2, e1, e2) = (&waits[0], &waits[1], &eff[0], &eff[1]);
                let nand = |a: &Expr, b: &Expr| ex::not(ex::and(a.clone(), b.clone()));
                let ob = ex::conj([nand(w1, e2), nand(w2, e1), nand(w1, w2)]);
                cx.valid(ob, "not (W1 and E2) and not (W2 and E1) and not (W1 and W2)");
            } else {
                for j in 0..m {
                    let rest = (0..m).filter(|&k| k != j).map(|k| ex::or(waits[k].clone(), eff[k].clone()));
                    let ob = ex::not(ex::and(waits[j].clone(), ex::conj(rest)));
                    cx.valid(ob, &format!("not (W{} and others waiting or done)", j + 1));
                }
            }
        }
        Await | LspsAwait => {
            let ProgramKind::Await { test, body } = &z.kind else {
                return wrong_program(&cx, "an await-statement");
            };
            let p = prem[0];
            cx.expect_prog("premise program", &p.program, body)?;
            cx.expect_sets("premise", &p.spec, &cs.glo, &cs.aux)?;
            let ps = &p.spec;
            cx.expect_expr("premise rely-condition", &ps.rely, &Expr::Identity(vec![]))?;
            cx.expect_expr("premise wait-condition", &ps.wait, &ex::ff())?;
            cx.expect_expr("premise guar-condition", &ps.guar, &ex::tt())?;
            let e2 = cx.middle_of_rely_sandwich(&cs.eff, &cs.rely)?;
            let frame = cx.update_frame(cs, inst.updates)?;
            let pr = preserve(&cs.pre, &cs.rely);
            let canon = canonical(&ps.pre);
            let items = canon.conjuncts();
            let k = canonical(test).conjuncts().len();
            if items.len() <= k || canonical(&ex::conj(items[items.len() - k..].iter().map(|x| (*x).clone()))) != canonical(test) {
                return cx.err("premise pre-condition", format!("P^R and {}", cx.text(test)), cx.text(&ps.pre));
            }
            let a = ex::conj(items[..items.len() - k].iter().map(|x| (*x).clone()));
            if canonical(&a) != canonical(&pr) {
                cx.valid(ex::bin(BinOp::Iff, a, pr.clone()), "the premise's P^R is preserve(P, R)");
            }
            cx.implication(&ex::and(pr, ex::not(test.clone())), &cs.wait, "P^R and not b => W");
            let mut beta: Vec<String> = cs.aux.iter().cloned().collect();
            beta.sort();
            let upd = ex::and(frame, Expr::Identity(beta));
            let lhs = Expr::Compose(Box::new(ps.eff.clone()), Box::new(upd));
            cx.implication(&lhs, &ex::and(cs.guar.clone(), e2), "E1 | (updates and I) => G and E2");
        }
        Elimination => {
            let p = prem[0];
            cx.expect_prog("premise program", &p.program, z)?;
            let extra: Vec<&String> = p.spec.aux.difference(&cs.aux).collect();
            let missing = cs.aux.difference(&p.spec.aux).next();
            let [a] = extra.as_slice() else {
                return cx.err("premise auxiliary set", "the conclusion's plus one variable", format!("{} extra", extra.len()));
            };
            if missing.is_some() || p.spec.glo != cs.glo {
                return cx.err("premise variable sets", "(glo, aux + {a})", "different sets");
            }
            let a = (*a).clone();
            let sort = st.var(st.var_id(&a).expect("checked spec")).sort;
            let q = |kind, hooked, body: Expr| Expr::Quant {
                kind,
                binder: Binder { name: a.clone(), hooked, sort },
                body: Box::new(body),
            };
            cx.expect_expr("conclusion pre-condition", &cs.pre, &q(Quant::Exists, false, p.spec.pre.clone()))?;
            let rely = q(Quant::Forall, true, q(Quant::Exists, false, p.spec.rely.clone()));
            cx.expect_expr("conclusion rely-condition", &cs.rely, &rely)?;
            cx.expect_parts("premise", &p.spec, cs, "WGE")?;
            for (name, e) in [("wait", &cs.wait), ("guar", &cs.guar), ("eff", &cs.eff)] {
                if e.free_vars().contains(&a) {
                    return cx.err(format!("conclusion {name}-condition"), format!("no occurrence of `{a}`"), cx.text(e));
                }
            }
        }
        Effect => {
            let p = prem[0];
            cx.expect_prog("premise program", &p.program, z)?;
            cx.expect_sets("premise", &p.spec, &cs.glo, &cs.aux)?;
            cx.expect_parts("premise", &p.spec, cs, "PRWG")?;
            let clo = Expr::Closure { rel: Box::new(ex::or(cs.rely.clone(), cs.guar.clone())), reflexive: false };
            cx.expect_expr("conclusion eff-condition", &cs.eff, &ex::and(p.spec.eff.clone(), clo))?;
        }
        Global | Auxiliary => {
            let p = prem[0];
            cx.expect_prog("premise program", &p.program, z)?;
            let (cset, pset, other_c, other_p) = if rule == Global {
                (&cs.glo, &p.spec.glo, &cs.aux, &p.spec.aux)
            } else {
                (&cs.aux, &p.spec.aux, &cs.glo, &p.spec.glo)
            };
            let extra: Vec<&String> = cset.difference(pset).collect();
            let [v] = extra.as_slice() else {
                return cx.err("conclusion variable set", "the premise's plus one variable", format!("{} new", extra.len()));
            };
            if pset.difference(cset).next().is_some() || other_c != other_p {
                return cx.err("premise variable sets", "the conclusion's minus one variable", "different sets");
            }
            if free_vars(z).contains(*v) {
                return cx.err("program", format!("no occurrence of `{v}`"), format!("`{}`", program_inline(z)));
            }
            cx.expect_parts("premise", &p.spec, cs, "PRWE")?;
            cx.expect_conj("conclusion guar-condition", &cs.guar, &p.spec.guar, &unchanged(v))?;
        }
        Introduction => {
            let p = prem[0];
            let glo: BTreeSet<String> = cs.glo.union(&cs.aux).cloned().collect();
            cx.expect_sets("premise", &p.spec, &glo, &BTreeSet::new())?;
            cx.expect_parts("premise", &p.spec, cs, "PRWGE")?;
            cx.leaves.push(Leaf::Removal(Removal {
                augmented: p.program.clone(),
                glo: cs.glo.clone(),
                aux: cs.aux.clone(),
                plain: z.clone(),
            }));
        }
    }
    Ok(cx.leaves)
}

/// `W ∨ W_j` → `W_j`. When `W` is false the premise may give `W_j` alone.
fn split_wait(cx: &Ctx, which: &str, found: &Expr, w: &Expr) -> M<Expr> {
    let f = canonical(found);
    let items = f.disjuncts();
    let wc = canonical(w);
    let n = wc.disjuncts().len();
    if items.len() > n && canonical(&ex_disj(&items[..n])) == wc {
        return Ok(ex_disj(&items[n..]));
    }
    if f == wc {
        return Ok(ex::ff());
    }
    if w.is_false() {
        return Ok(found.clone());
    }
    cx.err(format!("{which} wait-condition"), format!("{} or W_j", cx.text(w)), cx.text(found))
}

fn ex_disj(items: &[&Expr]) -> Expr {
    let mut it = items.iter().rev();
    let mut acc = (*it.next().expect("nonempty")).clone();
    for x in it {
        acc = ex::or((*x).clone(), acc);
    }
    acc
}
