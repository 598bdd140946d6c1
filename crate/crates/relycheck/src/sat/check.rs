//! Deciding satisfaction by exhaustive exploration of configuration graphs.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::lang::ast::Prog;
use crate::lang::removal::{explain_removal, Removal};
use crate::logic::{EvalError, Evaluator, Expr, StateRelation, StateSet};
use crate::semantics::computation::{Computation, ComputationError};
use crate::semantics::graph::{build_config_graph, initial_states, ConfigGraph, Environment, GraphStats, Label};
use crate::semantics::step::{Machine, SemError};
use crate::sat::spec::{Bracket, SpecError, Specification, SpecifiedProgram};
use crate::structure::{Space, State, Structure, VarId};
use crate::syntax::pretty::program_inline;

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Valid,
    Invalid,
    ResourceExceeded,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Valid => "valid",
            Verdict::Invalid => "invalid",
            Verdict::ResourceExceeded => "resource-exceeded",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    Convergence,
    Guar,
    Wait,
    Eff,
    AuxRemoval,
    LspsAwaitTermination,
    Invariant,
}

impl std::fmt::Display for Clause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Clause::Convergence => "convergence",
            Clause::Guar => "guar",
            Clause::Wait => "wait",
            Clause::Eff => "eff",
            Clause::AuxRemoval => "aux-removal",
            Clause::LspsAwaitTermination => "lsps-await-termination",
            Clause::Invariant => "invariant",
        })
    }
}

/// One configuration of a rendered trace, with the label of the step into it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub label: Option<Label>,
    pub program: String,
    pub state: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub detail: String,
    pub steps: Vec<TraceStep>,
    /// For a divergence, the index of the configuration the final step returns to.
    pub loop_start: Option<usize>,
    #[serde(skip)]
    pub computation: Computation,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckStats {
    pub initial_states: usize,
    pub nodes: usize,
    pub edges: usize,
    pub residues: usize,
}

impl From<(usize, GraphStats)> for CheckStats {
    fn from((initial_states, g): (usize, GraphStats)) -> Self {
        CheckStats { initial_states, nodes: g.nodes, edges: g.edges, residues: g.residues }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub clause: Option<Clause>,
    pub counterexample: Option<Counterexample>,
    pub stats: CheckStats,
    pub message: Option<String>,
}

impl CheckReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }

    fn valid(stats: CheckStats) -> Self {
        CheckReport { verdict: Verdict::Valid, clause: None, counterexample: None, stats, message: None }
    }

    fn invalid(clause: Clause, cx: Option<Counterexample>, stats: CheckStats, message: String) -> Self {
        CheckReport { verdict: Verdict::Invalid, clause: Some(clause), counterexample: cx, stats, message: Some(message) }
    }

    fn resource(e: &SemError) -> Self {
        let stats = match e {
            SemError::Budget { nodes, edges, .. } => CheckStats { nodes: *nodes, edges: *edges, ..Default::default() },
            _ => CheckStats::default(),
        };
        CheckReport {
            verdict: Verdict::ResourceExceeded,
            clause: None,
            counterexample: None,
            stats,
            message: Some(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("invalid specification: {0}")]
    Spec(#[from] SpecError),
    #[error("expected a {expected:?}-bracket specified program")]
    Bracket { expected: Bracket },
    #[error("the auxiliary set is nonempty, so a witness program is required")]
    MissingWitness,
    #[error("the auxiliary set must be empty here")]
    AuxNotEmpty,
    #[error(transparent)]
    Semantics(SemError),
    #[error("while evaluating the {which}: {error}")]
    Eval { which: &'static str, error: EvalError },
}

fn sem(e: SemError) -> Result<CheckReport, CheckError> {
    match e {
        SemError::Budget { .. } => Ok(CheckReport::resource(&e)),
        other => Err(CheckError::Semantics(other)),
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub budget: usize,
    /// Unary assertion required at every reachable configuration.
    pub invariant: Option<Expr>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { budget: DEFAULT_BUDGET, invariant: None }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Total,
    Partial,
}

/// Explored graph plus what is needed to render and judge it.
struct Exploration<'a> {
    st: &'a Structure,
    ev: Evaluator<'a>,
    graph: ConfigGraph,
    initial: usize,
}

impl<'a> Exploration<'a> {
    fn run(st: &'a Structure, m: &Machine<'a>, z: &Prog, spec: &Specification) -> Result<Self, SemError> {
        let scope = spec.scope(st);
        let initial = initial_states(st, &scope, &spec.pre)?;
        let env = Environment { rely: &spec.rely, scope: scope.clone() };
        let graph = build_config_graph(m, z, &initial, &env)?;
        let ev = Evaluator::new(st, &scope).expect("space checked by initial_states");
        Ok(Exploration { st, ev, graph, initial: initial.len() })
    }

    fn stats(&self) -> CheckStats {
        (self.initial, self.graph.stats()).into()
    }

    fn holds(&self, which: &'static str, e: &Expr, old: &State, new: &State) -> Result<bool, CheckError> {
        self.ev.holds(e, Some(old), new).map_err(|error| CheckError::Eval { which, error })
    }

    fn computation(&self, edges: &[usize], start: usize) -> Computation {
        let g = &self.graph;
        let node = |n: usize| (g.residue(n).clone(), g.nodes[n].state.clone());
        let (p, s) = node(start);
        let mut c = Computation::single(p, s);
        for &e in edges {
            let (p, s) = node(g.edges[e].to);
            c.push(g.edges[e].label, p, s);
        }
        c
    }

    fn counterexample(&self, edges: &[usize], start: usize, loop_start: Option<usize>, detail: String) -> Counterexample {
        let computation = self.computation(edges, start);
        let steps = render_trace(self.st, &computation);
        Counterexample { detail, steps, loop_start, computation }
    }

    fn render(&self, s: &State) -> String {
        self.st.render_state(s, self.ev.scope())
    }
}

pub fn render_trace(st: &Structure, c: &Computation) -> Vec<TraceStep> {
    let all: Vec<VarId> = (0..st.vars().len()).collect();
    c.configs
        .iter()
        .enumerate()
        .map(|(i, cfg)| TraceStep {
            label: if i == 0 { None } else { Some(c.labels[i - 1]) },
            program: cfg.prog.as_ref().map_or("ε".to_string(), |p| program_inline(p)),
            state: st.render_state(&cfg.state, &all),
        })
        .collect()
}

/// Multi-source breadth-first search: the edge first reaching each node.
fn search_all(g: &ConfigGraph) -> (Vec<Option<Option<usize>>>, Vec<usize>) {
    let mut via = vec![None; g.nodes.len()];
    let mut origin = vec![usize::MAX; g.nodes.len()];
    let mut queue = VecDeque::new();
    for &r in &g.roots {
        via[r] = Some(None);
        origin[r] = r;
        queue.push_back(r);
    }
    while let Some(n) = queue.pop_front() {
        for &e in &g.out[n] {
            let m = g.edges[e].to;
            if via[m].is_none() {
                via[m] = Some(Some(e));
                origin[m] = origin[n];
                queue.push_back(m);
            }
        }
    }
    (via, origin)
}

fn judge(ex: &Exploration, spec: &Specification, mode: Mode, opts: &CheckOptions) -> Result<CheckReport, CheckError> {
    let g = &ex.graph;
    let stats = ex.stats();
    let (via, origin) = search_all(g);
    let lead = |n: usize| (g.path(&via, n), origin[n]);

    if mode == Mode::Partial {
        for (i, e) in g.edges.iter().enumerate() {
            if e.label == Label::Internal && g.nodes[e.from].residue == g.nodes[e.to].residue {
                let (mut path, root) = lead(e.from);
                path.push(i);
                let detail = format!("an await body does not terminate from [{}]", ex.render(&g.nodes[e.from].state));
                let cx = ex.counterexample(&path, root, None, detail.clone());
                return Ok(CheckReport::invalid(Clause::LspsAwaitTermination, Some(cx), stats, detail));
            }
        }
    }

    for (i, e) in g.edges.iter().enumerate() {
        if e.label != Label::Internal {
            continue;
        }
        let (s, t) = (&g.nodes[e.from].state, &g.nodes[e.to].state);
        if !ex.holds("guar-condition", &spec.guar, s, t)? {
            let (mut path, root) = lead(e.from);
            path.push(i);
            let detail = format!("internal step [{}] -> [{}] violates the guar-condition", ex.render(s), ex.render(t));
            let cx = ex.counterexample(&path, root, None, detail.clone());
            return Ok(CheckReport::invalid(Clause::Guar, Some(cx), stats, detail));
        }
    }

    for n in 0..g.nodes.len() {
        if g.is_blocked(n) {
            let s = &g.nodes[n].state;
            if !ex.holds("wait-condition", &spec.wait, s, s)? {
                let (path, root) = lead(n);
                let detail = format!("blocked in [{}], where the wait-condition is false", ex.render(s));
                let cx = ex.counterexample(&path, root, None, detail.clone());
                return Ok(CheckReport::invalid(Clause::Wait, Some(cx), stats, detail));
            }
        }
    }

    if let Some(inv) = &opts.invariant {
        for n in 0..g.nodes.len() {
            let s = &g.nodes[n].state;
            if !ex.holds("invariant", inv, s, s)? {
                let (path, root) = lead(n);
                let detail = format!("the invariant fails in [{}]", ex.render(s));
                let cx = ex.counterexample(&path, root, None, detail.clone());
                return Ok(CheckReport::invalid(Clause::Invariant, Some(cx), stats, detail));
            }
        }
    }

    if mode == Mode::Total {
        let comp = g.components();
        for (i, e) in g.edges.iter().enumerate() {
            if e.label != Label::Internal || comp[e.from] != comp[e.to] {
                continue;
            }
            let (mut path, root) = lead(e.from);
            let loop_start = path.len();
            path.push(i);
            path.extend(cycle_back(g, &comp, e.to, e.from));
            let detail = format!(
                "a cycle with an internal step is reachable: [{}] can recur forever",
                ex.render(&g.nodes[e.from].state)
            );
            let cx = ex.counterexample(&path, root, Some(loop_start), detail.clone());
            return Ok(CheckReport::invalid(Clause::Convergence, Some(cx), stats, detail));
        }
    }

    for &root in &g.roots {
        let s0 = &g.nodes[root].state;
        let rvia = g.search(root);
        for n in 0..g.nodes.len() {
            if rvia[n].is_none() || !g.is_terminal(n) {
                continue;
            }
            let s = &g.nodes[n].state;
            if !ex.holds("eff-condition", &spec.eff, s0, s)? {
                let path = g.path(&rvia, n);
                let detail = format!(
                    "terminates in [{}] from [{}], violating the eff-condition",
                    ex.render(s),
                    ex.render(s0)
                );
                let cx = ex.counterexample(&path, root, None, detail.clone());
                return Ok(CheckReport::invalid(Clause::Eff, Some(cx), stats, detail));
            }
        }
    }
    Ok(CheckReport::valid(stats))
}

/// Shortest edge path from `from` to `to` inside their common component.
fn cycle_back(g: &ConfigGraph, comp: &[usize], from: usize, to: usize) -> Vec<usize> {
    let c = comp[from];
    let mut via: Vec<Option<usize>> = vec![None; g.nodes.len()];
    let mut seen = vec![false; g.nodes.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(n) = queue.pop_front() {
        if n == to {
            break;
        }
        for &e in &g.out[n] {
            let m = g.edges[e].to;
            if comp[m] == c && !seen[m] {
                seen[m] = true;
                via[m] = Some(e);
                queue.push_back(m);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        let e = via[cur].expect("same component");
        path.push(e);
        cur = g.edges[e].from;
    }
    path.reverse();
    path
}

fn prepare(st: &Structure, sp: &SpecifiedProgram, expected: Bracket) -> Result<(), CheckError> {
    if sp.bracket != expected {
        return Err(CheckError::Bracket { expected });
    }
    sp.spec.validate(st)?;
    sp.check_program()?;
    Ok(())
}

fn explore_and_judge(
    st: &Structure,
    z: &Prog,
    spec: &Specification,
    mode: Mode,
    opts: &CheckOptions,
) -> Result<CheckReport, CheckError> {
    let m = Machine::new(st, opts.budget);
    match Exploration::run(st, &m, z, spec) {
        Ok(ex) => judge(&ex, spec, mode, opts),
        Err(e) => sem(e),
    }
}

/// Satisfaction of a curly specified program with an empty auxiliary set.
pub fn check_sat_noaux(st: &Structure, sp: &SpecifiedProgram, opts: &CheckOptions) -> Result<CheckReport, CheckError> {
    prepare(st, sp, Bracket::Curly)?;
    if !sp.spec.aux.is_empty() {
        return Err(CheckError::AuxNotEmpty);
    }
    explore_and_judge(st, &sp.program, &sp.spec, Mode::Total, opts)
}

fn with_witness(
    st: &Structure,
    sp: &SpecifiedProgram,
    witness: Option<&Prog>,
    mode: Mode,
    opts: &CheckOptions,
) -> Result<CheckReport, CheckError> {
    let z = match witness {
        Some(w) => w.clone(),
        None if sp.spec.aux.is_empty() => sp.program.clone(),
        None => return Err(CheckError::MissingWitness),
    };
    let removal = Removal {
        augmented: z.clone(),
        glo: sp.spec.glo.clone(),
        aux: sp.spec.aux.clone(),
        plain: sp.program.clone(),
    };
    if witness.is_some() {
        if let Err(e) = explain_removal(&removal) {
            let detail = format!("{}: the witness is not an augmentation of the program: {}", e.span, e.reason);
            return Ok(CheckReport::invalid(Clause::AuxRemoval, None, CheckStats::default(), detail));
        }
    }
    let mut spec = sp.spec.clone();
    spec.glo.extend(std::mem::take(&mut spec.aux));
    explore_and_judge(st, &z, &spec, mode, opts)
}

/// Satisfaction of a curly specified program: the witness must be related to
/// the program by removal and satisfy the specification with α moved into ϑ.
pub fn check_sat_general(
    st: &Structure,
    sp: &SpecifiedProgram,
    witness: Option<&Prog>,
    opts: &CheckOptions,
) -> Result<CheckReport, CheckError> {
    prepare(st, sp, Bracket::Curly)?;
    with_witness(st, sp, witness, Mode::Total, opts)
}

/// Satisfaction of a square specified program: no convergence requirement,
/// but every await body must terminate.
pub fn check_sat_modified(
    st: &Structure,
    sp: &SpecifiedProgram,
    witness: Option<&Prog>,
    opts: &CheckOptions,
) -> Result<CheckReport, CheckError> {
    prepare(st, sp, Bracket::Square)?;
    with_witness(st, sp, witness, Mode::Partial, opts)
}

/// Dispatches on the bracket.
pub fn check_sat(
    st: &Structure,
    sp: &SpecifiedProgram,
    witness: Option<&Prog>,
    opts: &CheckOptions,
) -> Result<CheckReport, CheckError> {
    match sp.bracket {
        Bracket::Curly => check_sat_general(st, sp, witness, opts),
        Bracket::Square => check_sat_modified(st, sp, witness, opts),
    }
}

/// Re-executes a counterexample: it starts in a pre-state of `spec`, every
/// i-step is a transition of the program and every e-step satisfies the rely
/// while changing only visible, unhidden variables.
pub fn replay(st: &Structure, spec: &Specification, c: &Computation) -> Result<(), ComputationError> {
    let scope = spec.scope(st);
    let ev = Evaluator::new(st, &scope).map_err(|e| ComputationError::Malformed(e.to_string()))?;
    let first = c.configs.first().ok_or_else(|| ComputationError::Malformed("empty".into()))?;
    let Some(root) = &first.prog else {
        return Err(ComputationError::Malformed("starts from ε".into()));
    };
    let eval = |e: EvalError| ComputationError::Malformed(e.to_string());
    if !ev.holds(&spec.pre, Some(&first.state), &first.state).map_err(eval)? {
        return Err(ComputationError::Malformed("the first state violates the pre-condition".into()));
    }
    let m = Machine::new(st, DEFAULT_BUDGET);
    let hid: BTreeSet<VarId> = crate::lang::vars::hid_set(root).iter().filter_map(|v| st.var_id(v)).collect();
    c.check_legal(&m, &hid)?;
    for (j, label) in c.labels.iter().enumerate() {
        if *label != Label::External {
            continue;
        }
        let (s, t) = (&c.configs[j].state, &c.configs[j + 1].state);
        let illegal = |reason: &str| ComputationError::Illegal { index: j, label: *label, reason: reason.into() };
        if s == t {
            return Err(illegal("stuttering environment step"));
        }
        if (0..st.vars().len()).any(|v| !scope.contains(&v) && s[v] != t[v]) {
            return Err(illegal("an invisible variable changes"));
        }
        if !ev.holds(&spec.rely, Some(s), t).map_err(eval)? {
            return Err(illegal("the rely-condition is violated"));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Eff,
    Wait,
    Guar,
}

#[derive(Clone, Debug)]
pub enum Strongest {
    Relation(StateRelation),
    Set(StateSet),
}

impl Strongest {
    pub fn render(&self, st: &Structure) -> Vec<String> {
        match self {
            Strongest::Relation(r) => r.render(st),
            Strongest::Set(s) => s.render(st),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Strongest::Relation(r) => r.len(),
            Strongest::Set(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The least eff-, wait- or guar-relation of `z` under `(P,R)`, over `glo`.
/// Pairs and states are identified by their projection onto `glo`; the
/// guar-relation is reflexive on reachable states.
pub fn strongest_relations(
    st: &Structure,
    z: &Prog,
    glo: &BTreeSet<String>,
    pre: &Expr,
    rely: &Expr,
    which: Which,
    budget: usize,
) -> Result<Strongest, CheckError> {
    let spec = Specification {
        glo: glo.clone(),
        aux: BTreeSet::new(),
        pre: pre.clone(),
        rely: rely.clone(),
        wait: crate::logic::expr::ff(),
        guar: crate::logic::expr::tt(),
        eff: crate::logic::expr::tt(),
    };
    spec.check_shape(st)?;
    let m = Machine::new(st, budget);
    let ex = Exploration::run(st, &m, z, &spec).map_err(CheckError::Semantics)?;
    let g = &ex.graph;
    let space: Space = ex.ev.space().clone();
    let code = |s: &State| space.encode(st, s).expect("scope values lie in their carriers");
    Ok(match which {
        Which::Guar => {
            let mut r = StateRelation::empty(space.clone());
            for n in &g.nodes {
                let c = code(&n.state);
                r.pairs.insert((c, c));
            }
            for e in g.edges.iter().filter(|e| e.label == Label::Internal) {
                r.pairs.insert((code(&g.nodes[e.from].state), code(&g.nodes[e.to].state)));
            }
            Strongest::Relation(r)
        }
        Which::Wait => {
            let mut s = StateSet::empty(space.clone());
            for n in (0..g.nodes.len()).filter(|&n| g.is_blocked(n)) {
                s.members.insert(code(&g.nodes[n].state));
            }
            Strongest::Set(s)
        }
        Which::Eff => {
            let mut r = StateRelation::empty(space.clone());
            for &root in &g.roots {
                let c0 = code(&g.nodes[root].state);
                let via = g.search(root);
                for n in (0..g.nodes.len()).filter(|&n| via[n].is_some() && g.is_terminal(n)) {
                    r.pairs.insert((c0, code(&g.nodes[n].state)));
                }
            }
            Strongest::Relation(r)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::*;
    use crate::logic::expr::*;
    use crate::value::SortKind;

    fn structure(hi: i64) -> Structure {
        let mut st = Structure::new();
        let d = st.add_sort("D", SortKind::Range { lo: 0, hi }).unwrap();
        st.add_var("v", d).unwrap();
        st
    }

    fn spec(pre: Expr, rely: Expr, wait: Expr, guar: Expr, eff: Expr) -> Specification {
        Specification { glo: ["v".to_string()].into(), aux: BTreeSet::new(), pre, rely, wait, guar, eff }
    }

    fn unchanged() -> Expr {
        eq(var("v"), old("v"))
    }

    fn plus(k: i64) -> Expr {
        bin(BinOp::Add, old("v"), int(k))
    }

    fn sp(z: Prog, s: Specification, bracket: Bracket) -> SpecifiedProgram {
        SpecifiedProgram { program: z, spec: s, bracket }
    }

    fn adaptation() -> Specification {
        spec(tt(), unchanged(), ff(), bin(BinOp::Ge, var("v"), old("v")), unchanged())
    }

    #[test]
    fn skip_satisfies_the_adaptation_spec() {
        let st = structure(3);
        let r = check_sat_noaux(&st, &sp(skip(), adaptation(), Bracket::Curly), &CheckOptions::default()).unwrap();
        assert!(r.is_valid(), "{r:?}");
    }

    #[test]
    fn increment_violates_eff() {
        let st = structure(3);
        let mut s = adaptation();
        s.pre = bin(BinOp::Lt, var("v"), int(3));
        let z = assign("v", bin(BinOp::Add, var("v"), int(1)));
        let r = check_sat_noaux(&st, &sp(z, s.clone(), Bracket::Curly), &CheckOptions::default()).unwrap();
        assert_eq!(r.clause, Some(Clause::Eff));
        let cx = r.counterexample.unwrap();
        let first = cx.computation.configs[0].state[0].as_int().unwrap();
        let last = cx.computation.last();
        assert!(last.prog.is_none());
        assert_eq!(last.state[0].as_int().unwrap(), first + 1);
        replay(&st, &s, &cx.computation).unwrap();
    }

    #[test]
    fn counter_pair() {
        let st = structure(12);
        let inc = |k| assign("v", bin(BinOp::Add, var("v"), int(k)));
        let z = par(seq(inc(1), inc(2)), seq(inc(2), inc(1)));
        let g = or(unchanged(), or(eq(var("v"), plus(1)), eq(var("v"), plus(2))));
        let s = spec(bin(BinOp::Le, var("v"), int(6)), Expr::Identity(vec![]), ff(), g, eq(var("v"), plus(6)));
        let r = check_sat_noaux(&st, &sp(z, s, Bracket::Curly), &CheckOptions::default()).unwrap();
        assert!(r.is_valid(), "{r:?}");
    }

    #[test]
    fn divergence_is_reported_as_a_lasso() {
        let st = structure(1);
        let z = while_(tt(), skip());
        let s = spec(tt(), unchanged(), ff(), tt(), tt());
        let r = check_sat_noaux(&st, &sp(z.clone(), s.clone(), Bracket::Curly), &CheckOptions::default()).unwrap();
        assert_eq!(r.clause, Some(Clause::Convergence));
        let cx = r.counterexample.unwrap();
        let start = cx.loop_start.unwrap();
        assert_eq!(cx.computation.configs[start], *cx.computation.last());
        replay(&st, &s, &cx.computation).unwrap();
        let r = check_sat_modified(&st, &sp(z, s, Bracket::Square), None, &CheckOptions::default()).unwrap();
        assert!(r.is_valid());
    }

    #[test]
    fn diverging_await_under_lsps() {
        let st = structure(1);
        let z = await_(tt(), while_(tt(), skip()));
        let s = spec(tt(), unchanged(), ff(), tt(), tt());
        let r = check_sat_modified(&st, &sp(z, s, Bracket::Square), None, &CheckOptions::default()).unwrap();
        assert_eq!(r.clause, Some(Clause::LspsAwaitTermination));
    }

    #[test]
    fn blocking_needs_wait() {
        let st = structure(1);
        let z = await_(eq(var("v"), int(1)), skip());
        let s = spec(eq(var("v"), int(0)), unchanged(), ff(), tt(), tt());
        let r = check_sat_noaux(&st, &sp(z.clone(), s.clone(), Bracket::Curly), &CheckOptions::default()).unwrap();
        assert_eq!(r.clause, Some(Clause::Wait));
        let mut s2 = s;
        s2.wait = eq(var("v"), int(0));
        let r = check_sat_noaux(&st, &sp(z, s2, Bracket::Curly), &CheckOptions::default()).unwrap();
        assert!(r.is_valid());
    }

    #[test]
    fn budget_is_a_resource_verdict() {
        let st = structure(12);
        let z = assign("v", int(0));
        let s = spec(tt(), tt(), ff(), tt(), tt());
        let opts = CheckOptions { budget: 5, invariant: None };
        let r = check_sat_noaux(&st, &sp(z, s, Bracket::Curly), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::ResourceExceeded);
    }

    #[test]
    fn strongest_guar_of_two_increments() {
        let st = structure(9);
        let inc = |k| assign("v", bin(BinOp::Add, var("v"), int(k)));
        let z = seq(inc(1), inc(2));
        let pre = bin(BinOp::Le, var("v"), int(6));
        let rely = or(unchanged(), and(bin(BinOp::Gt, var("v"), old("v")), bin(BinOp::Le, var("v"), int(6))));
        let glo = ["v".to_string()].into();
        let Strongest::Relation(r) = strongest_relations(&st, &z, &glo, &pre, &rely, Which::Guar, DEFAULT_BUDGET).unwrap()
        else {
            panic!()
        };
        let want: BTreeSet<(u64, u64)> =
            (0..10).map(|v| (v, v)).chain((0..=6).map(|v| (v, v + 1))).chain((1..=7).map(|v| (v, v + 2))).collect();
        assert_eq!(r.pairs, want);
    }

    #[test]
    fn unsatisfiable_pre_gives_empty_relations() {
        let st = structure(3);
        let z = assign("v", int(1));
        let glo = ["v".to_string()].into();
        for which in [Which::Eff, Which::Wait, Which::Guar] {
            let r = strongest_relations(&st, &z, &glo, &ff(), &unchanged(), which, DEFAULT_BUDGET).unwrap();
            assert!(r.is_empty());
        }
    }
}
