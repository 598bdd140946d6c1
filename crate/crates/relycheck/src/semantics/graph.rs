//! Reachable configuration graphs under a rely-constrained environment.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::rc::Rc;

use serde::Serialize;

use crate::lang::ast::Prog;
use crate::lang::vars::hid_set;
use crate::logic::{Evaluator, Expr};
use crate::semantics::step::{Machine, Residue, SemError};
use crate::structure::{Space, State, Structure, VarId};
use crate::syntax::pretty::program_inline;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    #[serde(rename = "i")]
    Internal,
    #[serde(rename = "e")]
    External,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Internal => "i",
            Label::External => "e",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub residue: u32,
    pub state: State,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Label,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub residues: usize,
    pub roots: usize,
}

/// The environment: its rely-condition and the variables it may observe.
pub struct Environment<'e> {
    pub rely: &'e Expr,
    /// `ϑ ∪ α`; the scope in which `I` is read.
    pub scope: Vec<VarId>,
}

/// Configurations reachable from a set of initial configurations, with
/// stutter-free environment steps. Residue 0 is ε.
#[derive(Clone, Debug)]
pub struct ConfigGraph {
    pub program: Prog,
    pub residues: Vec<Residue>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub out: Vec<Vec<usize>>,
    pub roots: Vec<usize>,
    /// `hid` of the root program, as ids.
    pub hid: BTreeSet<VarId>,
}

impl ConfigGraph {
    pub fn residue(&self, n: usize) -> &Residue {
        &self.residues[self.nodes[n].residue as usize]
    }

    pub fn is_terminal(&self, n: usize) -> bool {
        self.nodes[n].residue == 0
    }

    pub fn is_enabled(&self, n: usize) -> bool {
        self.out[n].iter().any(|&e| self.edges[e].label == Label::Internal)
    }

    pub fn is_blocked(&self, n: usize) -> bool {
        !self.is_terminal(n) && !self.is_enabled(n)
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            nodes: self.nodes.len(),
            edges: self.edges.len(),
            residues: self.residues.len(),
            roots: self.roots.len(),
        }
    }

    /// Nodes reachable from `root`, with the edge used to first reach each.
    pub fn search(&self, root: usize) -> Vec<Option<Option<usize>>> {
        let mut via = vec![None; self.nodes.len()];
        via[root] = Some(None);
        let mut queue = VecDeque::from([root]);
        while let Some(n) = queue.pop_front() {
            for &e in &self.out[n] {
                let m = self.edges[e].to;
                if via[m].is_none() {
                    via[m] = Some(Some(e));
                    queue.push_back(m);
                }
            }
        }
        via
    }

    /// Shortest edge path from `root` to `target`, given a search from `root`.
    pub fn path(&self, via: &[Option<Option<usize>>], target: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = target;
        while let Some(Some(e)) = via[cur] {
            path.push(e);
            cur = self.edges[e].from;
        }
        path.reverse();
        path
    }

    /// Strongly connected component index of every node (iterative Tarjan).
    pub fn components(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![usize::MAX; n];
        let mut stack = Vec::new();
        let mut next = 0;
        let mut ncomp = 0;
        for start in 0..n {
            if index[start] != usize::MAX {
                continue;
            }
            let mut work: Vec<(usize, usize)> = vec![(start, 0)];
            index[start] = next;
            low[start] = next;
            next += 1;
            stack.push(start);
            on_stack[start] = true;
            while let Some(&mut (v, ref mut i)) = work.last_mut() {
                if *i < self.out[v].len() {
                    let w = self.edges[self.out[v][*i]].to;
                    *i += 1;
                    if index[w] == usize::MAX {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        work.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    work.pop();
                    if let Some(&(u, _)) = work.last() {
                        low[u] = low[u].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp[w] = ncomp;
                            if w == v {
                                break;
                            }
                        }
                        ncomp += 1;
                    }
                }
            }
        }
        comp
    }

    /// Graph-description text: nodes are residue number plus state.
    pub fn to_dot(&self, st: &Structure) -> String {
        let all: Vec<VarId> = (0..st.vars().len()).collect();
        let mut out = String::from("digraph configurations {\n  node [shape=box, fontname=monospace];\n");
        for (r, res) in self.residues.iter().enumerate() {
            let text = match res {
                None => "ε".to_string(),
                Some(p) => program_inline(p),
            };
            let _ = writeln!(out, "  // r{r}: {}", text.replace('\n', " "));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            let shape = if self.roots.contains(&i) { ", peripheries=2" } else { "" };
            let _ = writeln!(
                out,
                "  n{i} [label=\"r{} | {}\"{shape}];",
                n.residue,
                st.render_state(&n.state, &all).replace('"', "\\\"")
            );
        }
        for e in &self.edges {
            let style = if e.label == Label::External { ", style=dashed" } else { "" };
            let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"{style}];", e.from, e.to, e.label);
        }
        out.push_str("}\n");
        out
    }
}

/// Computes stutter-free environment successors, cached per state.
pub struct EnvStepper<'a, 'e> {
    st: &'a Structure,
    ev: Evaluator<'a>,
    rely: &'e Expr,
    free: Vec<VarId>,
    space: Space,
    cache: RefCell<HashMap<State, Rc<Vec<State>>>>,
}

impl<'a, 'e> EnvStepper<'a, 'e> {
    pub fn new(st: &'a Structure, env: &Environment<'e>, hid: &BTreeSet<VarId>) -> Result<Self, SemError> {
        let ev = Evaluator::new(st, &env.scope).map_err(|error| SemError::Eval {
            span: Default::default(),
            state: String::new(),
            error,
        })?;
        let fixed = ev.fixed_vars(env.rely);
        let free: Vec<VarId> = ev
            .scope()
            .iter()
            .copied()
            .filter(|v| !hid.contains(v) && !fixed.contains(v))
            .collect();
        let space = Space::new(st, &free).map_err(|_| SemError::Budget {
            budget: usize::MAX,
            nodes: 0,
            edges: 0,
        })?;
        Ok(EnvStepper { st, ev, rely: env.rely, free, space, cache: RefCell::default() })
    }

    /// Variables the environment may change.
    pub fn free_vars(&self) -> &[VarId] {
        &self.free
    }

    pub fn evaluator(&self) -> &Evaluator<'a> {
        &self.ev
    }

    pub fn successors(&self, s: &State) -> Result<Rc<Vec<State>>, SemError> {
        if let Some(hit) = self.cache.borrow().get(s) {
            return Ok(hit.clone());
        }
        let mut out = Vec::new();
        let mut t = s.clone();
        for code in 0..self.space.size() {
            self.space.decode_into(self.st, code, &mut t);
            if t == *s {
                continue;
            }
            let ok = self.ev.holds(self.rely, Some(s), &t).map_err(|error| SemError::Eval {
                span: Default::default(),
                state: self.st.render_state(&t, &self.free),
                error,
            })?;
            if ok {
                out.push(t.clone());
            }
        }
        let out = Rc::new(out);
        self.cache.borrow_mut().insert(s.clone(), out.clone());
        Ok(out)
    }
}

/// All states over `scope` (other variables at their defaults) satisfying `pre`.
pub fn initial_states(st: &Structure, scope: &[VarId], pre: &Expr) -> Result<Vec<State>, SemError> {
    let ev = Evaluator::new(st, scope).map_err(|error| SemError::Eval {
        span: Default::default(),
        state: String::new(),
        error,
    })?;
    let mut out = Vec::new();
    for code in 0..ev.space().size() {
        let s = ev.state_of(code);
        let ok = ev.holds(pre, Some(&s), &s).map_err(|error| SemError::Eval {
            span: Default::default(),
            state: st.render_state(&s, scope),
            error,
        })?;
        if ok {
            out.push(s);
        }
    }
    Ok(out)
}

/// Explores `⟨z,s₀⟩` for every `s₀` in `initial` under the environment.
pub fn build_config_graph(
    machine: &Machine,
    z: &Prog,
    initial: &[State],
    env: &Environment,
) -> Result<ConfigGraph, SemError> {
    let st = machine.structure();
    let budget = machine.budget();
    let hid: BTreeSet<VarId> = hid_set(z).iter().filter_map(|v| st.var_id(v)).collect();
    let stepper = EnvStepper::new(st, env, &hid)?;

    let mut g = ConfigGraph {
        program: z.clone(),
        residues: vec![None],
        nodes: Vec::new(),
        edges: Vec::new(),
        out: Vec::new(),
        roots: Vec::new(),
        hid,
    };
    let mut residue_ids: HashMap<Prog, u32> = HashMap::new();
    let mut node_ids: HashMap<(u32, State), usize> = HashMap::new();
    let mut queue = VecDeque::new();

    let mut intern = |g: &mut ConfigGraph, r: Residue, s: State, queue: &mut VecDeque<usize>| -> Result<usize, SemError> {
        let rid = match r {
            None => 0,
            Some(p) => match residue_ids.get(&p) {
                Some(&id) => id,
                None => {
                    let id = g.residues.len() as u32;
                    residue_ids.insert(p.clone(), id);
                    g.residues.push(Some(p));
                    id
                }
            },
        };
        let key = (rid, s);
        if let Some(&n) = node_ids.get(&key) {
            return Ok(n);
        }
        if g.nodes.len() >= budget {
            return Err(SemError::Budget { budget, nodes: g.nodes.len(), edges: g.edges.len() });
        }
        let n = g.nodes.len();
        g.nodes.push(Node { residue: rid, state: key.1.clone() });
        g.out.push(Vec::new());
        node_ids.insert(key, n);
        queue.push_back(n);
        Ok(n)
    };

    for s in initial {
        let n = intern(&mut g, Some(z.clone()), s.clone(), &mut queue)?;
        if !g.roots.contains(&n) {
            g.roots.push(n);
        }
    }
    while let Some(n) = queue.pop_front() {
        let state = g.nodes[n].state.clone();
        if let Some(p) = g.residues[g.nodes[n].residue as usize].clone() {
            for (r, t) in machine.internal(&p, &state)? {
                let m = intern(&mut g, r, t, &mut queue)?;
                let e = g.edges.len();
                g.edges.push(Edge { from: n, to: m, label: Label::Internal });
                g.out[n].push(e);
            }
        }
        let rid = g.nodes[n].residue;
        let residue = g.residues[rid as usize].clone();
        for t in stepper.successors(&state)?.iter() {
            let m = intern(&mut g, residue.clone(), t.clone(), &mut queue)?;
            let e = g.edges.len();
            g.edges.push(Edge { from: n, to: m, label: Label::External });
            g.out[n].push(e);
        }
    }
    Ok(g)
}
