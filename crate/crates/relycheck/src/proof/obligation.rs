//! First-order obligations and their discharge by enumeration.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::logic::expr::BinOp;
use crate::logic::{EvalError, Evaluator, Expr};
use crate::structure::{Space, State, Structure, VarId};
use crate::syntax::pretty::expr_text;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Claim {
    /// Holds for every pair of states over the scope.
    Valid(Expr),
    /// Acyclic as a relation over the scope.
    WellFounded(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub claim: Claim,
    pub scope: BTreeSet<String>,
    /// What produced it, e.g. `consequence: G1 => G2`.
    pub origin: String,
}

impl Obligation {
    pub fn valid(e: Expr, scope: &BTreeSet<String>, origin: impl Into<String>) -> Self {
        Obligation { claim: Claim::Valid(e), scope: scope.clone(), origin: origin.into() }
    }

    pub fn well_founded(e: Expr, scope: &BTreeSet<String>, origin: impl Into<String>) -> Self {
        Obligation { claim: Claim::WellFounded(e), scope: scope.clone(), origin: origin.into() }
    }

    pub fn text(&self, st: Option<&Structure>) -> String {
        match &self.claim {
            Claim::Valid(e) => format!("valid {}", expr_text(e, st)),
            Claim::WellFounded(e) => format!("wf {}", expr_text(e, st)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub holds: bool,
    /// A falsifying valuation, or a state on a cycle.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{error} (at {valuation})")]
pub struct DischargeError {
    pub error: EvalError,
    pub valuation: String,
}

/// Discharges obligations for one structure, caching by claim and scope.
pub struct Discharger<'a> {
    st: &'a Structure,
    cache: RefCell<HashMap<(Claim, BTreeSet<String>), Outcome>>,
}

impl<'a> Discharger<'a> {
    pub fn new(st: &'a Structure) -> Self {
        Discharger { st, cache: RefCell::default() }
    }

    pub fn discharge(&self, ob: &Obligation) -> Result<Outcome, DischargeError> {
        let key = (ob.claim.clone(), ob.scope.clone());
        if let Some(hit) = self.cache.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let out = discharge_obligation(self.st, ob)?;
        self.cache.borrow_mut().insert(key, out.clone());
        Ok(out)
    }
}

fn ids(st: &Structure, names: impl IntoIterator<Item = String>) -> Vec<VarId> {
    let mut v: Vec<VarId> = names.into_iter().filter_map(|n| st.var_id(&n)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn too_large(valuation: &str) -> DischargeError {
    DischargeError { error: EvalError::SpaceTooLarge, valuation: valuation.into() }
}

/// Decides an obligation by enumerating valuations of the variables it reads.
pub fn discharge_obligation(st: &Structure, ob: &Obligation) -> Result<Outcome, DischargeError> {
    let scope = ids(st, ob.scope.iter().cloned());
    let ev = Evaluator::new(st, &scope).map_err(|error| DischargeError { error, valuation: "the scope".into() })?;
    match &ob.claim {
        Claim::WellFounded(e) => {
            let rel = ev.relation(e).map_err(|error| DischargeError { error, valuation: "the relation".into() })?;
            if rel.is_acyclic() {
                return Ok(Outcome { holds: true, witness: None });
            }
            let witness = find_cycle_state(&rel).map(|c| st.render_state(&ev.state_of(c), &scope));
            Ok(Outcome { holds: false, witness })
        }
        Claim::Valid(e) => validity(st, &ev, &scope, e),
    }
}

fn find_cycle_state(rel: &crate::logic::StateRelation) -> Option<u64> {
    let closure = rel.transitive_closure();
    closure.pairs.iter().find(|(a, b)| a == b).map(|p| p.0)
}

fn validity(st: &Structure, ev: &Evaluator, scope: &[VarId], e: &Expr) -> Result<Outcome, DischargeError> {
    let render = |old: Option<&State>, new: &State, vars: &[VarId]| match old {
        Some(o) => format!("old [{}], new [{}]", st.render_state(o, vars), st.render_state(new, vars)),
        None => format!("[{}]", st.render_state(new, vars)),
    };
    let check = |old: &State, new: &State, show_old: bool, vars: &[VarId]| -> Result<Option<String>, DischargeError> {
        match ev.holds(e, Some(old), new) {
            Ok(true) => Ok(None),
            Ok(false) => Ok(Some(render(show_old.then_some(old), new, vars))),
            Err(error) => Err(DischargeError { error, valuation: render(show_old.then_some(old), new, vars) }),
        }
    };
    let base = st.default_state();

    if e.has_relational() {
        let space = ev.space();
        let antecedent = match e {
            Expr::Bin(BinOp::Implies, a, _) => Some(&**a),
            _ => None,
        };
        for x in 0..space.size() {
            let sx = ev.state_of(x);
            let failure = RefCell::new(None);
            let mut visit = |t: &State| -> Result<(), EvalError> {
                let mut f = failure.borrow_mut();
                if f.is_none() {
                    match check(&sx, t, true, scope) {
                        Ok(None) => {}
                        Ok(Some(w)) => *f = Some(Ok(w)),
                        Err(err) => *f = Some(Err(err)),
                    }
                }
                Ok(())
            };
            let r = match antecedent {
                Some(a) => ev.for_each_candidate(a, &sx, &mut visit),
                None => {
                    let mut t = sx.clone();
                    let mut r = Ok(());
                    for y in 0..space.size() {
                        space.decode_into(st, y, &mut t);
                        r = visit(&t);
                        if failure.borrow().is_some() {
                            break;
                        }
                    }
                    r
                }
            };
            r.map_err(|_| too_large("candidate states"))?;
            match failure.into_inner() {
                Some(Ok(w)) => return Ok(Outcome { holds: false, witness: Some(w) }),
                Some(Err(err)) => return Err(err),
                None => {}
            }
        }
        return Ok(Outcome { holds: true, witness: None });
    }

    let occ = e.free_occurrences();
    let hooked = ids(st, occ.iter().filter(|(_, h)| *h).map(|(n, _)| n.clone()));
    let plain = ids(st, occ.iter().filter(|(_, h)| !*h).map(|(n, _)| n.clone()));
    let old_space = Space::new(st, &hooked).map_err(|_| too_large("hooked variables"))?;
    let new_space = Space::new(st, &plain).map_err(|_| too_large("variables"))?;
    let shown: Vec<VarId> = {
        let mut v: Vec<VarId> = hooked.iter().chain(&plain).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let binary = !hooked.is_empty();
    let mut old = base.clone();
    let mut new = base;
    for x in 0..old_space.size() {
        old_space.decode_into(st, x, &mut old);
        for y in 0..new_space.size() {
            new_space.decode_into(st, y, &mut new);
            if let Some(w) = check(&old, &new, binary, &shown)? {
                return Ok(Outcome { holds: false, witness: Some(w) });
            }
        }
    }
    Ok(Outcome { holds: true, witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::expr::*;
    use crate::value::SortKind;

    fn st() -> Structure {
        let mut st = Structure::new();
        let d = st.add_sort("D", SortKind::Range { lo: 0, hi: 3 }).unwrap();
        st.add_var("x", d).unwrap();
        st.add_var("y", d).unwrap();
        st
    }

    fn scope() -> BTreeSet<String> {
        ["x".to_string(), "y".to_string()].into()
    }

    fn run(c: Claim) -> Outcome {
        let st = st();
        discharge_obligation(&st, &Obligation { claim: c, scope: scope(), origin: String::new() }).unwrap()
    }

    #[test]
    fn reflexive_equality_is_valid() {
        assert!(run(Claim::Valid(eq(var("x"), var("x")))).holds);
    }

    #[test]
    fn strict_self_comparison_fails_with_witness() {
        let o = run(Claim::Valid(bin(BinOp::Gt, var("x"), var("x"))));
        assert!(!o.holds);
        assert_eq!(o.witness.as_deref(), Some("[x=0]"));
    }

    #[test]
    fn hooked_implication() {
        let e = implies(eq(var("x"), bin(BinOp::Add, old("x"), int(1))), bin(BinOp::Gt, var("x"), old("x")));
        assert!(run(Claim::Valid(e)).holds);
        let e = implies(bin(BinOp::Ge, var("x"), old("x")), eq(var("x"), old("x")));
        let o = run(Claim::Valid(e));
        assert!(!o.holds);
        assert!(o.witness.unwrap().starts_with("old"));
    }

    #[test]
    fn identity_and_composition() {
        let inc = eq(var("x"), bin(BinOp::Add, old("x"), int(1)));
        let twice = Expr::Compose(Box::new(inc.clone()), Box::new(inc));
        let e = implies(twice, and(eq(var("x"), bin(BinOp::Add, old("x"), int(2))), eq(var("y"), old("y"))));
        assert!(!run(Claim::Valid(e)).holds, "y is unconstrained by the composition");
        let inc_frame = and(eq(var("x"), bin(BinOp::Add, old("x"), int(1))), Expr::Identity(vec!["x".into()]));
        let twice = Expr::Compose(Box::new(inc_frame.clone()), Box::new(inc_frame));
        let e = implies(twice, and(eq(var("x"), bin(BinOp::Add, old("x"), int(2))), eq(var("y"), old("y"))));
        assert!(run(Claim::Valid(e)).holds);
    }

    #[test]
    fn well_foundedness() {
        assert!(run(Claim::WellFounded(bin(BinOp::Lt, var("x"), old("x")))).holds);
        let o = run(Claim::WellFounded(bin(BinOp::Le, var("x"), old("x"))));
        assert!(!o.holds);
        assert!(o.witness.is_some());
    }
}
