//! Specifications and specified programs.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::lang::ast::Prog;
use crate::lang::vars::{declared, globals};
use crate::logic::typeck::{check_assertion, check_unary, TypeError};
use crate::logic::{EvalError, Evaluator, Expr};
use crate::structure::{Structure, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bracket {
    /// `(ϑ,α)::(…)`, total correctness.
    Curly,
    /// `[ϑ,α]::[…]`, possibly nonterminating.
    Square,
}

/// `(ϑ,α)::(P,R,W,G,E)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Specification {
    pub glo: BTreeSet<String>,
    pub aux: BTreeSet<String>,
    pub pre: Expr,
    pub rely: Expr,
    pub wait: Expr,
    pub guar: Expr,
    pub eff: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpecifiedProgram {
    pub program: Prog,
    pub spec: Specification,
    pub bracket: Bracket,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("`{0}` is both global and auxiliary")]
    NotDisjoint(String),
    #[error("`{0}` is not a declared variable")]
    Undeclared(String),
    #[error("{which}: {error}")]
    Type { which: &'static str, error: TypeError },
    #[error("{which} mentions `{var}`, which is neither global nor auxiliary")]
    OutOfScope { which: &'static str, var: String },
    #[error("the rely-condition is not reflexive")]
    RelyNotReflexive,
    #[error("the rely-condition is not transitive")]
    RelyNotTransitive,
    #[error("the guar-condition is not reflexive")]
    GuarNotReflexive,
    #[error("local variable `{0}` occurs in the specification's variable sets")]
    LocalInSpec(String),
    #[error("global variable `{0}` of the program is not in the global set")]
    GlobalNotListed(String),
    #[error("while classifying {which}: {error}")]
    Eval { which: &'static str, error: EvalError },
}

impl Specification {
    /// `ϑ ∪ α`.
    pub fn scope_names(&self) -> BTreeSet<String> {
        self.glo.union(&self.aux).cloned().collect()
    }

    pub fn scope(&self, st: &Structure) -> Vec<VarId> {
        st.resolve(&self.scope_names()).unwrap_or_default()
    }

    pub fn parts(&self) -> [(&'static str, &Expr); 5] {
        [
            ("pre-condition", &self.pre),
            ("rely-condition", &self.rely),
            ("wait-condition", &self.wait),
            ("guar-condition", &self.guar),
            ("eff-condition", &self.eff),
        ]
    }

    /// Syntactic requirements only: disjointness, sorts, free variables.
    pub fn check_shape(&self, st: &Structure) -> Result<(), SpecError> {
        if let Some(v) = self.glo.intersection(&self.aux).next() {
            return Err(SpecError::NotDisjoint(v.clone()));
        }
        for v in self.glo.iter().chain(&self.aux) {
            if st.var_id(v).is_none() {
                return Err(SpecError::Undeclared(v.clone()));
            }
        }
        let scope = self.scope_names();
        for (i, (which, e)) in self.parts().into_iter().enumerate() {
            let r = if i == 0 || i == 2 { check_unary(e, st) } else { check_assertion(e, st) };
            r.map_err(|error| SpecError::Type { which, error })?;
            if let Some(var) = e.free_vars().into_iter().find(|v| !scope.contains(v)) {
                return Err(SpecError::OutOfScope { which, var });
            }
        }
        Ok(())
    }

    /// Full check, including reflexivity and transitivity by enumeration over `ϑ∪α`.
    pub fn validate(&self, st: &Structure) -> Result<(), SpecError> {
        self.check_shape(st)?;
        let ev = Evaluator::new(st, &self.scope(st)).map_err(|error| SpecError::Eval { which: "the scope", error })?;
        let eval = |which| move |error| SpecError::Eval { which, error };
        for code in 0..ev.space().size() {
            let s = ev.state_of(code);
            if !ev.holds(&self.rely, Some(&s), &s).map_err(eval("the rely-condition"))? {
                return Err(SpecError::RelyNotReflexive);
            }
            if !ev.holds(&self.guar, Some(&s), &s).map_err(eval("the guar-condition"))? {
                return Err(SpecError::GuarNotReflexive);
            }
        }
        let rel = ev.relation(&self.rely).map_err(eval("the rely-condition"))?;
        if !rel.is_transitive() {
            return Err(SpecError::RelyNotTransitive);
        }
        Ok(())
    }
}

impl SpecifiedProgram {
    /// The two constraints tying the program to its variable sets.
    pub fn check_program(&self) -> Result<(), SpecError> {
        let scope = self.spec.scope_names();
        if let Some(v) = declared(&self.program).into_iter().find(|v| scope.contains(v)) {
            return Err(SpecError::LocalInSpec(v));
        }
        if let Some(v) = globals(&self.program).into_iter().find(|v| !self.spec.glo.contains(v)) {
            return Err(SpecError::GlobalNotListed(v));
        }
        Ok(())
    }
}
