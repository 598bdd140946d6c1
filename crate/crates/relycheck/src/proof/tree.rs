//! Proof trees as written in source files.

use crate::lang::ast::Span;
use crate::logic::Expr;
use crate::proof::rule::RuleName;
use crate::sat::spec::SpecifiedProgram;

/// One named node: a rule applied to earlier nodes, proving a conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    pub name: String,
    pub rule: RuleName,
    pub premises: Vec<String>,
    /// Auxiliary updates `a := u` for the assignment and await rules.
    pub updates: Vec<(String, Expr)>,
    pub conclusion: SpecifiedProgram,
    pub span: Span,
}

/// Steps in source order; the last one is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Proof {
    pub steps: Vec<ProofStep>,
}

impl Proof {
    pub fn root(&self) -> Option<&ProofStep> {
        self.steps.last()
    }

    pub fn step(&self, name: &str) -> Option<&ProofStep> {
        self.steps.iter().find(|s| s.name == name)
    }
}
