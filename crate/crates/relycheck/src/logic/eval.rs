//! Evaluation of expressions and assertions over state pairs.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::rc::Rc;

use crate::logic::expr::{BinOp, Expr, Func, Quant};
use crate::logic::relation::{StateRelation, StateSet};
use crate::structure::{Space, State, Structure, VarId};
use crate::value::Value;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("hooked variable read without a previous state")]
    MissingOldState,
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("index {index} out of range for a sequence of length {len}")]
    IndexOutOfRange { index: i64, len: usize },
    #[error("{0} of an empty set")]
    EmptyExtreme(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("value {value} is outside the carrier of `{var}`")]
    NotInCarrier { var: String, value: String },
    #[error("operand has the wrong kind of value for {0}")]
    Kind(&'static str),
    #[error("scope too large to enumerate")]
    SpaceTooLarge,
}

type R<T> = Result<T, EvalError>;

/// Evaluates formulas for one structure and one scope. Relational operators
/// are materialised over the scope and cached by formula.
pub struct Evaluator<'a> {
    st: &'a Structure,
    scope: Vec<VarId>,
    space: Space,
    base: State,
    rels: RefCell<HashMap<Expr, Rc<StateRelation>>>,
    sets: RefCell<HashMap<Expr, Rc<StateSet>>>,
}

struct Env<'s> {
    old: Option<&'s [Value]>,
    new: &'s [Value],
}

impl<'a> Evaluator<'a> {
    pub fn new(st: &'a Structure, scope: &[VarId]) -> R<Self> {
        let mut scope = scope.to_vec();
        scope.sort_unstable();
        scope.dedup();
        let space = Space::new(st, &scope).map_err(|_| EvalError::SpaceTooLarge)?;
        Ok(Evaluator {
            st,
            scope,
            space,
            base: st.default_state(),
            rels: RefCell::default(),
            sets: RefCell::default(),
        })
    }

    pub fn structure(&self) -> &'a Structure {
        self.st
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// State with scope values from `code` and defaults elsewhere.
    pub fn state_of(&self, code: u64) -> State {
        self.space.decode(self.st, code, &self.base)
    }

    pub fn eval(&self, e: &Expr, old: Option<&[Value]>, new: &[Value]) -> R<Value> {
        let mut bound = Vec::new();
        self.ev(e, &Env { old, new }, &mut bound)
    }

    pub fn holds(&self, e: &Expr, old: Option<&[Value]>, new: &[Value]) -> R<bool> {
        let mut bound = Vec::new();
        self.truth(e, &Env { old, new }, &mut bound)
    }

    fn truth(&self, e: &Expr, env: &Env, bound: &mut Vec<(String, bool, Value)>) -> R<bool> {
        self.ev(e, env, bound)?.as_bool().ok_or(EvalError::Kind("a test"))
    }

    fn int(&self, e: &Expr, env: &Env, bound: &mut Vec<(String, bool, Value)>) -> R<i64> {
        self.ev(e, env, bound)?.as_int().ok_or(EvalError::Kind("arithmetic"))
    }

    fn ev(&self, e: &Expr, env: &Env, bound: &mut Vec<(String, bool, Value)>) -> R<Value> {
        match e {
            Expr::Var { name, hooked } => {
                if let Some((_, _, v)) = bound.iter().rev().find(|(n, h, _)| n == name && h == hooked) {
                    return Ok(v.clone());
                }
                let id = self.st.var_id(name).ok_or_else(|| EvalError::UnknownName(name.clone()))?;
                if *hooked {
                    Ok(env.old.ok_or(EvalError::MissingOldState)?[id].clone())
                } else {
                    Ok(env.new[id].clone())
                }
            }
            Expr::Lit(v) => Ok(v.clone()),
            Expr::Not(a) => Ok(Value::Bool(!self.truth(a, env, bound)?)),
            Expr::Neg(a) => Ok(Value::Int(self.int(a, env, bound)?.checked_neg().ok_or(EvalError::Overflow)?)),
            Expr::Bin(op, a, b) => self.bin(*op, a, b, env, bound),
            Expr::Call(f, args) => self.call(*f, args, env, bound),
            Expr::SetLit(items) => {
                let mut out = BTreeSet::new();
                for it in items {
                    out.insert(self.ev(it, env, bound)?);
                }
                Ok(Value::set(out))
            }
            Expr::SeqLit(items) => {
                let mut out = Vec::with_capacity(items.len());
                for it in items {
                    out.push(self.ev(it, env, bound)?);
                }
                Ok(Value::seq(out))
            }
            Expr::Index(s, i) => {
                let s = self.ev(s, env, bound)?;
                let i = self.int(i, env, bound)?;
                let Value::Seq(items) = s else { return Err(EvalError::Kind("indexing")) };
                if i < 1 || i as usize > items.len() {
                    return Err(EvalError::IndexOutOfRange { index: i, len: items.len() });
                }
                Ok(items[i as usize - 1].clone())
            }
            Expr::Quant { kind, binder, body } => {
                let want = *kind == Quant::Forall;
                for v in self.st.sort(binder.sort).carrier() {
                    bound.push((binder.name.clone(), binder.hooked, v.clone()));
                    let r = self.truth(body, env, bound);
                    bound.pop();
                    if r? != want {
                        return Ok(Value::Bool(!want));
                    }
                }
                Ok(Value::Bool(want))
            }
            Expr::Identity(beta) => {
                let old = env.old.ok_or(EvalError::MissingOldState)?;
                Ok(Value::Bool(self.scope.iter().all(|&v| {
                    beta.contains(&self.st.var(v).name) || old[v] == env.new[v]
                })))
            }
            Expr::Hook(a) => {
                let old = env.old.ok_or(EvalError::MissingOldState)?;
                self.ev(a, &Env { old: Some(old), new: old }, bound)
            }
            Expr::Compose(..) | Expr::Closure { .. } => {
                let old = env.old.ok_or(EvalError::MissingOldState)?;
                let rel = self.materialise(e)?;
                Ok(Value::Bool(rel.holds_for(self.st, old, env.new)))
            }
            Expr::Preserve(a, b) => {
                let set = self.preserve(a, b)?;
                Ok(Value::Bool(
                    self.space.encode(self.st, env.new).is_some_and(|x| set.contains(x)),
                ))
            }
        }
    }

    fn bin(&self, op: BinOp, a: &Expr, b: &Expr, env: &Env, bound: &mut Vec<(String, bool, Value)>) -> R<Value> {
        use BinOp::*;
        let v = match op {
            And => self.truth(a, env, bound)? && self.truth(b, env, bound)?,
            Or => self.truth(a, env, bound)? || self.truth(b, env, bound)?,
            Implies => !self.truth(a, env, bound)? || self.truth(b, env, bound)?,
            Iff => self.truth(a, env, bound)? == self.truth(b, env, bound)?,
            Eq => self.ev(a, env, bound)? == self.ev(b, env, bound)?,
            Ne => self.ev(a, env, bound)? != self.ev(b, env, bound)?,
            Lt | Le | Gt | Ge => {
                let (x, y) = (self.int(a, env, bound)?, self.int(b, env, bound)?);
                match op {
                    Lt => x < y,
                    Le => x <= y,
                    Gt => x > y,
                    _ => x >= y,
                }
            }
            Add | Sub | Mul | Div | Mod => {
                let (x, y) = (self.int(a, env, bound)?, self.int(b, env, bound)?);
                let r = match op {
                    Add => x.checked_add(y),
                    Sub => x.checked_sub(y),
                    Mul => x.checked_mul(y),
                    _ if y == 0 => return Err(EvalError::DivisionByZero),
                    Div => x.checked_div_euclid(y),
                    _ => x.checked_rem_euclid(y),
                };
                return Ok(Value::Int(r.ok_or(EvalError::Overflow)?));
            }
            Union | Inter | Diff | Subset => {
                let (Value::Set(x), Value::Set(y)) = (self.ev(a, env, bound)?, self.ev(b, env, bound)?) else {
                    return Err(EvalError::Kind("set operators"));
                };
                let r: BTreeSet<Value> = match op {
                    Union => x.union(&y).cloned().collect(),
                    Inter => x.intersection(&y).cloned().collect(),
                    Diff => x.difference(&y).cloned().collect(),
                    _ => return Ok(Value::Bool(x.is_subset(&y))),
                };
                return Ok(Value::set(r));
            }
            In | NotIn => {
                let x = self.ev(a, env, bound)?;
                let Value::Set(y) = self.ev(b, env, bound)? else { return Err(EvalError::Kind("membership")) };
                y.contains(&x) == (op == In)
            }
            Concat => {
                let (Value::Seq(x), Value::Seq(y)) = (self.ev(a, env, bound)?, self.ev(b, env, bound)?) else {
                    return Err(EvalError::Kind("concatenation"));
                };
                return Ok(Value::seq(x.iter().chain(y.iter()).cloned().collect()));
            }
        };
        Ok(Value::Bool(v))
    }

    fn call(&self, f: Func, args: &[Expr], env: &Env, bound: &mut Vec<(String, bool, Value)>) -> R<Value> {
        match f {
            Func::Len => match self.ev(&args[0], env, bound)? {
                Value::Seq(s) => Ok(Value::Int(s.len() as i64)),
                _ => Err(EvalError::Kind("len")),
            },
            Func::Card => match self.ev(&args[0], env, bound)? {
                Value::Set(s) => Ok(Value::Int(s.len() as i64)),
                _ => Err(EvalError::Kind("card")),
            },
            Func::Max | Func::Min => match self.ev(&args[0], env, bound)? {
                Value::Set(s) => {
                    let pick = if f == Func::Max { s.last() } else { s.first() };
                    pick.cloned().ok_or(EvalError::EmptyExtreme(f.name()))
                }
                _ => Err(EvalError::Kind("max/min")),
            },
            Func::AddMod | Func::SubMod => {
                let x = self.int(&args[0], env, bound)?;
                let y = self.int(&args[1], env, bound)?;
                let k = self.int(&args[2], env, bound)?;
                if k <= 0 {
                    return Err(EvalError::DivisionByZero);
                }
                let r = if f == Func::AddMod { x.checked_add(y) } else { x.checked_sub(y) };
                Ok(Value::Int(r.ok_or(EvalError::Overflow)?.rem_euclid(k)))
            }
        }
    }

    /// Scope variables forced unchanged by top-level conjuncts `v=↼v` or `I_β`.
    pub fn fixed_vars(&self, e: &Expr) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        for c in e.conjuncts() {
            match c {
                Expr::Bin(BinOp::Eq, a, b) => {
                    if let (Expr::Var { name: x, hooked: hx }, Expr::Var { name: y, hooked: hy }) = (&**a, &**b) {
                        if x == y && hx != hy {
                            if let Some(id) = self.st.var_id(x).filter(|id| self.scope.contains(id)) {
                                out.insert(id);
                            }
                        }
                    }
                }
                Expr::Identity(beta) => {
                    for &v in &self.scope {
                        if !beta.contains(&self.st.var(v).name) {
                            out.insert(v);
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }

    /// Calls `f` with every scope state `t` such that `(s,t) ⊨ e` could hold,
    /// i.e. every `t` agreeing with `s` on the variables `e` fixes.
    pub fn for_each_candidate(
        &self,
        e: &Expr,
        s: &[Value],
        mut f: impl FnMut(&State) -> R<()>,
    ) -> R<()> {
        let fixed = self.fixed_vars(e);
        let free: Vec<VarId> = self.scope.iter().copied().filter(|v| !fixed.contains(v)).collect();
        let sub = Space::new(self.st, &free).map_err(|_| EvalError::SpaceTooLarge)?;
        let mut t = s.to_vec();
        for code in 0..sub.size() {
            sub.decode_into(self.st, code, &mut t);
            f(&t)?;
        }
        Ok(())
    }

    /// Extension of a binary formula over the scope.
    pub fn relation(&self, e: &Expr) -> R<Rc<StateRelation>> {
        if let Some(r) = self.rels.borrow().get(e) {
            return Ok(r.clone());
        }
        let rel = match e {
            Expr::Compose(a, b) => self.relation(a)?.compose(&*self.relation(b)?),
            Expr::Closure { rel, reflexive } => {
                let base = self.relation(rel)?;
                let base = if *reflexive {
                    base.union(&StateRelation::identity(self.space.clone()))
                } else {
                    (*base).clone()
                };
                base.transitive_closure()
            }
            _ => {
                let mut pairs = BTreeSet::new();
                for x in 0..self.space.size() {
                    let sx = self.state_of(x);
                    self.for_each_candidate(e, &sx, |sy| {
                        if self.holds(e, Some(&sx), sy)? {
                            pairs.insert((x, self.space.encode(self.st, sy).expect("scope state")));
                        }
                        Ok(())
                    })?;
                }
                StateRelation { space: self.space.clone(), pairs }
            }
        };
        let rel = Rc::new(rel);
        self.rels.borrow_mut().insert(e.clone(), rel.clone());
        Ok(rel)
    }

    fn materialise(&self, e: &Expr) -> R<Rc<StateRelation>> {
        self.relation(e)
    }

    /// Extension of a unary formula over the scope.
    pub fn set(&self, e: &Expr) -> R<Rc<StateSet>> {
        if let Some(s) = self.sets.borrow().get(e) {
            return Ok(s.clone());
        }
        let mut members = BTreeSet::new();
        for x in 0..self.space.size() {
            let sx = self.state_of(x);
            if self.holds(e, Some(&sx), &sx)? {
                members.insert(x);
            }
        }
        let set = Rc::new(StateSet { space: self.space.clone(), members });
        self.sets.borrow_mut().insert(e.clone(), set.clone());
        Ok(set)
    }

    /// `A^B`: least superset of ⟦A⟧ closed under B-successors.
    pub fn preserve(&self, a: &Expr, b: &Expr) -> R<Rc<StateSet>> {
        let key = Expr::Preserve(Box::new(a.clone()), Box::new(b.clone()));
        if let Some(s) = self.sets.borrow().get(&key) {
            return Ok(s.clone());
        }
        let seeds = self.set(a)?;
        let mut members: BTreeSet<u64> = seeds.members.clone();
        let mut queue: VecDeque<u64> = members.iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            let sx = self.state_of(x);
            self.for_each_candidate(b, &sx, |sy| {
                if self.holds(b, Some(&sx), sy)? {
                    let y = self.space.encode(self.st, sy).expect("scope state");
                    if members.insert(y) {
                        queue.push_back(y);
                    }
                }
                Ok(())
            })?;
        }
        let set = Rc::new(StateSet { space: self.space.clone(), members });
        self.sets.borrow_mut().insert(key, set.clone());
        Ok(set)
    }
}

/// `(s_old, s_new) ⊨ A` with the scope taken to be every declared variable.
pub fn eval_assertion(a: &Expr, old: Option<&[Value]>, new: &[Value], st: &Structure) -> R<bool> {
    let all: Vec<VarId> = (0..st.vars().len()).collect();
    Evaluator::new(st, &all)?.holds(a, old, new)
}

/// Reflexivity, transitivity and respect of a set of variables, by enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub reflexive: bool,
    pub transitive: bool,
    pub respects: bool,
}

pub fn classify_relation(ev: &Evaluator, a: &Expr, respect: &[VarId]) -> R<Classification> {
    let rel = ev.relation(a)?;
    Ok(Classification {
        reflexive: rel.is_reflexive(),
        transitive: rel.is_transitive(),
        respects: rel.respects(ev.structure(), respect),
    })
}

pub fn rel_compose(ev: &Evaluator, a: &Expr, b: &Expr) -> R<StateRelation> {
    Ok(ev.relation(a)?.compose(&*ev.relation(b)?))
}

pub fn trans_closure(ev: &Evaluator, a: &Expr, reflexive: bool) -> R<StateRelation> {
    let e = Expr::Closure { rel: Box::new(a.clone()), reflexive };
    Ok((*ev.relation(&e)?).clone())
}

pub fn preserve_under(ev: &Evaluator, a: &Expr, b: &Expr) -> R<StateSet> {
    Ok((*ev.preserve(a, b)?).clone())
}

/// On a finite carrier a relation is well-founded iff its graph has no cycle.
pub fn well_founded(ev: &Evaluator, a: &Expr) -> R<bool> {
    Ok(ev.relation(a)?.is_acyclic())
}
