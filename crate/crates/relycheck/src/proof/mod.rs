//! Proof trees and the rule checker.

pub mod check;
pub mod obligation;
pub mod rule;
pub mod rules;
pub mod tree;

pub use check::{check_proof_tree, ProofFailure, ProofReport};
pub use obligation::{discharge_obligation, Claim, Discharger, Obligation, Outcome};
pub use rule::RuleName;
pub use rules::{validate_rule_instance, Leaf, RuleInstance, SchemaError};
pub use tree::{Proof, ProofStep};
