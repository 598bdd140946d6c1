//! The internal transition relation.

use std::cell::RefCell;
use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use crate::lang::ast::{self, Prog, ProgramKind, Span};
use crate::logic::{EvalError, Evaluator, Expr};
use crate::structure::{State, Structure};

/// A program residue; `None` is the empty program ε.
pub type Residue = Option<Prog>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SemError {
    #[error("{span}: evaluation failed in state [{state}]: {error}")]
    Eval { span: Span, state: String, error: EvalError },
    #[error("{span}: `{var}` := {value} leaves the carrier of `{var}` in state [{state}]")]
    Carrier { span: Span, var: String, value: String, state: String },
    #[error("exploration budget of {budget} configurations exceeded ({nodes} nodes, {edges} edges so far)")]
    Budget { budget: usize, nodes: usize, edges: usize },
}

/// Result of running an await body in isolation from one state.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AwaitOutcome {
    /// Final states of terminating runs.
    pub finals: Vec<State>,
    /// Some run diverges or blocks.
    pub stuck: bool,
}

/// Executes programs over one structure. Await bodies are memoised.
pub struct Machine<'a> {
    st: &'a Structure,
    ev: Evaluator<'a>,
    budget: usize,
    awaits: RefCell<HashMap<(Prog, State), Rc<AwaitOutcome>>>,
}

impl<'a> Machine<'a> {
    pub fn new(st: &'a Structure, budget: usize) -> Self {
        Machine {
            st,
            ev: Evaluator::new(st, &[]).expect("empty scope"),
            budget,
            awaits: RefCell::default(),
        }
    }

    pub fn structure(&self) -> &'a Structure {
        self.st
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    fn render(&self, s: &State) -> String {
        let all: Vec<_> = (0..self.st.vars().len()).collect();
        self.st.render_state(s, &all)
    }

    fn test(&self, b: &Expr, span: Span, s: &State) -> Result<bool, SemError> {
        self.ev
            .holds(b, None, s)
            .map_err(|error| SemError::Eval { span, state: self.render(s), error })
    }

    /// All `c` with `⟨z,s⟩ ⇀i c`.
    pub fn internal(&self, z: &Prog, s: &State) -> Result<Vec<(Residue, State)>, SemError> {
        use ProgramKind::*;
        Ok(match &z.kind {
            Skip => vec![(None, s.clone())],
            Assign { var, expr } => {
                let value = self
                    .ev
                    .eval(expr, None, s)
                    .map_err(|error| SemError::Eval { span: z.span, state: self.render(s), error })?;
                let id = self.st.var_id(var).expect("validated program");
                if !self.st.var_sort(id).contains(&value) {
                    return Err(SemError::Carrier {
                        span: z.span,
                        var: var.clone(),
                        value: value.to_string(),
                        state: self.render(s),
                    });
                }
                let mut t = s.clone();
                t[id] = value;
                vec![(None, t)]
            }
            Block { body, .. } => vec![(Some(body.clone()), s.clone())],
            Seq(a, b) => self
                .internal(a, s)?
                .into_iter()
                .map(|(r, t)| match r {
                    None => (Some(b.clone()), t),
                    Some(c) => (Some(ast::seq(c, b.clone())), t),
                })
                .collect(),
            If { test, then_branch, else_branch } => {
                let next = if self.test(test, z.span, s)? { then_branch } else { else_branch };
                vec![(Some(next.clone()), s.clone())]
            }
            While { test, body } => {
                if self.test(test, z.span, s)? {
                    vec![(Some(ast::seq(body.clone(), z.clone())), s.clone())]
                } else {
                    vec![(None, s.clone())]
                }
            }
            Par(a, b) => {
                let mut out = Vec::new();
                for (r, t) in self.internal(a, s)? {
                    out.push(match r {
                        None => (Some(b.clone()), t),
                        Some(c) => (Some(ast::par(c, b.clone())), t),
                    });
                }
                for (r, t) in self.internal(b, s)? {
                    out.push(match r {
                        None => (Some(a.clone()), t),
                        Some(c) => (Some(ast::par(a.clone(), c)), t),
                    });
                }
                out
            }
            Await { test, body } => {
                if !self.test(test, z.span, s)? {
                    return Ok(vec![]);
                }
                let outcome = self.run_isolated(body, s)?;
                let mut out: Vec<(Residue, State)> = outcome.finals.iter().map(|t| (None, t.clone())).collect();
                if outcome.stuck {
                    out.push((Some(z.clone()), s.clone()));
                }
                out
            }
        })
    }

    /// Runs `body` from `s` with no environment, collecting every final
    /// state and whether some run diverges or blocks.
    pub fn run_isolated(&self, body: &Prog, s: &State) -> Result<Rc<AwaitOutcome>, SemError> {
        let key = (body.clone(), s.clone());
        if let Some(hit) = self.awaits.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let mut index: HashMap<(Residue, State), usize> = HashMap::new();
        let mut nodes: Vec<(Residue, State)> = Vec::new();
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::new();
        let start = (Some(body.clone()), s.clone());
        index.insert(start.clone(), 0);
        nodes.push(start);
        succ.push(Vec::new());
        queue.push_back(0usize);
        let mut outcome = AwaitOutcome::default();
        while let Some(n) = queue.pop_front() {
            let (r, t) = nodes[n].clone();
            let Some(p) = r else {
                outcome.finals.push(t);
                continue;
            };
            let next = self.internal(&p, &t)?;
            if next.is_empty() {
                outcome.stuck = true;
            }
            for c in next {
                let m = match index.get(&c) {
                    Some(&m) => m,
                    None => {
                        if nodes.len() >= self.budget {
                            return Err(SemError::Budget { budget: self.budget, nodes: nodes.len(), edges: 0 });
                        }
                        let m = nodes.len();
                        index.insert(c.clone(), m);
                        nodes.push(c);
                        succ.push(Vec::new());
                        queue.push_back(m);
                        m
                    }
                };
                succ[n].push(m);
            }
        }
        if !outcome.stuck && has_cycle(&succ) {
            outcome.stuck = true;
        }
        outcome.finals.sort();
        outcome.finals.dedup();
        let outcome = Rc::new(outcome);
        self.awaits.borrow_mut().insert(key, outcome.clone());
        Ok(outcome)
    }
}

/// Kahn's algorithm: a cycle exists iff some node is never freed.
pub(crate) fn has_cycle(succ: &[Vec<usize>]) -> bool {
    let mut indeg = vec![0usize; succ.len()];
    for out in succ {
        for &m in out {
            indeg[m] += 1;
        }
    }
    let mut ready: Vec<usize> = (0..succ.len()).filter(|&n| indeg[n] == 0).collect();
    let mut freed = 0;
    while let Some(n) = ready.pop() {
        freed += 1;
        for &m in &succ[n] {
            indeg[m] -= 1;
            if indeg[m] == 0 {
                ready.push(m);
            }
        }
    }
    freed < succ.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::*;
    use crate::logic::expr::*;
    use crate::value::{SortKind, Value};

    fn sample() -> Structure {
        let mut st = Structure::new();
        let d = st.add_sort("D", SortKind::Range { lo: 0, hi: 6 }).unwrap();
        let b = st.add_sort("B", SortKind::Boolean).unwrap();
        st.add_var("v", d).unwrap();
        st.add_var("b", b).unwrap();
        st.add_var("w", b).unwrap();
        st
    }

    #[test]
    fn skip_steps_to_empty() {
        let st = sample();
        let m = Machine::new(&st, 1000);
        let s = st.default_state();
        assert_eq!(m.internal(&skip(), &s).unwrap(), vec![(None, s)]);
    }

    #[test]
    fn false_await_is_blocked() {
        let st = sample();
        let m = Machine::new(&st, 1000);
        let s = st.default_state();
        assert!(m.internal(&await_(var("b"), skip()), &s).unwrap().is_empty());
    }

    #[test]
    fn diverging_await_body_is_a_self_loop() {
        let st = sample();
        let m = Machine::new(&st, 1000);
        let s = st.default_state();
        let body = block(vec!["w".into()], seq(assign("w", tt()), while_(var("w"), skip())));
        let z = await_(tt(), body);
        assert_eq!(m.internal(&z, &s).unwrap(), vec![(Some(z.clone()), s)]);
    }

    #[test]
    fn terminating_await_is_one_step() {
        let st = sample();
        let m = Machine::new(&st, 1000);
        let s = st.default_state();
        let inc = || assign("v", bin(BinOp::Add, var("v"), int(1)));
        let z = await_(tt(), seq(inc(), inc()));
        let out = m.internal(&z, &s).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, None);
        assert_eq!(out[0].1[0], Value::Int(2));
    }

    #[test]
    fn carrier_overflow_is_an_error() {
        let st = sample();
        let m = Machine::new(&st, 1000);
        let mut s = st.default_state();
        s[0] = Value::Int(6);
        let err = m.internal(&assign("v", bin(BinOp::Add, var("v"), int(1))), &s).unwrap_err();
        assert!(matches!(err, SemError::Carrier { .. }));
    }

    #[test]
    fn sequential_constructs_are_deterministic() {
        let st = sample();
        let m = Machine::new(&st, 1000);
        let s = st.default_state();
        let z = seq(if_(var("b"), skip(), assign("v", int(3))), while_(var("b"), skip()));
        let mut cur = Some(z);
        let mut t = s;
        while let Some(p) = cur {
            let next = m.internal(&p, &t).unwrap();
            assert_eq!(next.len(), 1);
            (cur, t) = next.into_iter().next().unwrap();
        }
        assert_eq!(t[0], Value::Int(3));
    }
}
