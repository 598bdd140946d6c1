//! Checking whole proof trees.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::lang::removal::explain_removal;
use crate::proof::obligation::{Discharger, Obligation};
use crate::proof::rule::RuleName;
use crate::proof::rules::{validate_rule_instance, Leaf, RuleInstance};
use crate::proof::tree::{Proof, ProofStep};
use crate::sat::spec::{Bracket, Specification};
use crate::structure::Structure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProofVerdict {
    Valid,
    Invalid,
}

impl fmt::Display for ProofVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProofVerdict::Valid => "valid",
            ProofVerdict::Invalid => "invalid",
        })
    }
}

/// Which proof system the tree lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum System {
    #[serde(rename = "LSP_B")]
    LspB,
    #[serde(rename = "LSP")]
    Lsp,
    #[serde(rename = "LSP_S")]
    LspS,
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::LspB => "LSP_B",
            System::Lsp => "LSP",
            System::LspS => "LSP_S",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    /// Missing, duplicate or forward premise reference.
    Structure,
    /// An ill-formed specified program.
    Specification,
    Schema,
    Obligation,
    Removal,
    /// An obligation that could not be evaluated.
    Evaluation,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureKind::Structure => "structure",
            FailureKind::Specification => "specification",
            FailureKind::Schema => "schema",
            FailureKind::Obligation => "obligation",
            FailureKind::Removal => "removal",
            FailureKind::Evaluation => "evaluation",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofFailure {
    pub step: String,
    /// Step names from the root down to the failing step.
    pub path: Vec<String>,
    pub kind: FailureKind,
    pub message: String,
    pub witness: Option<String>,
}

impl fmt::Display for ProofFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}): {} failure: {}", self.step, self.path.join(" > "), self.kind, self.message)?;
        if let Some(w) = &self.witness {
            write!(f, "; witness {w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofReport {
    pub verdict: ProofVerdict,
    pub depth: usize,
    pub system: System,
    /// No introduction step, hence no removal leaf.
    pub lsp_b: bool,
    pub steps: usize,
    pub obligations: usize,
    pub failure: Option<ProofFailure>,
    pub notes: Vec<String>,
}

impl ProofReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == ProofVerdict::Valid
    }
}

struct Checker<'a> {
    st: &'a Structure,
    proof: &'a Proof,
    index: HashMap<&'a str, usize>,
    discharger: Discharger<'a>,
    spec_ok: HashMap<Specification, Result<(), String>>,
    done: Vec<bool>,
    obligations: usize,
}

impl<'a> Checker<'a> {
    fn fail(&self, path: &[String], kind: FailureKind, message: impl Into<String>) -> ProofFailure {
        ProofFailure {
            step: path.last().cloned().unwrap_or_default(),
            path: path.to_vec(),
            kind,
            message: message.into(),
            witness: None,
        }
    }

    fn visit(&mut self, i: usize, path: &mut Vec<String>) -> Result<(), ProofFailure> {
        let step: &'a ProofStep = &self.proof.steps[i];
        path.push(step.name.clone());
        if !self.done[i] {
            self.node(step, path)?;
            self.done[i] = true;
            for p in &step.premises {
                let j = self.index[p.as_str()];
                self.visit(j, path)?;
            }
        }
        path.pop();
        Ok(())
    }

    fn node(&mut self, step: &'a ProofStep, path: &[String]) -> Result<(), ProofFailure> {
        let c = &step.conclusion;
        let st = self.st;
        let ok = self
            .spec_ok
            .entry(c.spec.clone())
            .or_insert_with(|| c.spec.validate(st).map_err(|e| e.to_string()))
            .clone();
        if let Err(m) = ok.and_then(|_| c.check_program().map_err(|e| e.to_string())) {
            return Err(self.fail(path, FailureKind::Specification, m));
        }
        let premises = step.premises.iter().map(|p| &self.proof.steps[self.index[p.as_str()]].conclusion).collect();
        let inst = RuleInstance { rule: step.rule, premises, conclusion: c, updates: &step.updates };
        let leaves = validate_rule_instance(st, &inst).map_err(|e| self.fail(path, FailureKind::Schema, e.to_string()))?;
        for leaf in leaves {
            match leaf {
                Leaf::Formula(ob) => self.obligation(&ob, path)?,
                Leaf::Removal(r) => {
                    if let Err(m) = explain_removal(&r) {
                        return Err(self.fail(path, FailureKind::Removal, m.to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    fn obligation(&mut self, ob: &Obligation, path: &[String]) -> Result<(), ProofFailure> {
        self.obligations += 1;
        match self.discharger.discharge(ob) {
            Ok(out) if out.holds => Ok(()),
            Ok(out) => {
                let mut f = self.fail(path, FailureKind::Obligation, format!("{} ({})", ob.text(Some(self.st)), ob.origin));
                f.witness = out.witness;
                Err(f)
            }
            Err(e) => Err(self.fail(path, FailureKind::Evaluation, format!("{}: {e}", ob.origin))),
        }
    }
}

fn depths(proof: &Proof, index: &HashMap<&str, usize>) -> Vec<usize> {
    let mut d = vec![0; proof.steps.len()];
    for (i, s) in proof.steps.iter().enumerate() {
        d[i] = 1 + s.premises.iter().map(|p| d[index[p.as_str()]]).max().unwrap_or(0);
    }
    d
}

/// Validates every step reachable from the root (the last step), in
/// pre-order, stopping at the first failure.
pub fn check_proof_tree(st: &Structure, proof: &Proof) -> ProofReport {
    let lsp_b = proof.steps.iter().all(|s| s.rule != RuleName::Introduction);
    let system = if proof.steps.iter().any(|s| s.conclusion.bracket == Bracket::Square) {
        System::LspS
    } else if lsp_b {
        System::LspB
    } else {
        System::Lsp
    };
    let mut report = ProofReport {
        verdict: ProofVerdict::Invalid,
        depth: 0,
        system,
        lsp_b,
        steps: proof.steps.len(),
        obligations: 0,
        failure: None,
        notes: Vec::new(),
    };

    let mut index = HashMap::new();
    for (i, s) in proof.steps.iter().enumerate() {
        for p in &s.premises {
            if !index.contains_key(p.as_str()) {
                let kind = FailureKind::Structure;
                let message = if proof.step(p).is_some() {
                    format!("premise `{p}` must be proved before it is used")
                } else {
                    format!("no step named `{p}`")
                };
                report.failure = Some(ProofFailure { step: s.name.clone(), path: vec![s.name.clone()], kind, message, witness: None });
                return report;
            }
        }
        if index.insert(s.name.as_str(), i).is_some() {
            let message = format!("duplicate step name `{}`", s.name);
            let path = vec![s.name.clone()];
            report.failure = Some(ProofFailure { step: s.name.clone(), path, kind: FailureKind::Structure, message, witness: None });
            return report;
        }
    }
    let Some(root) = proof.steps.len().checked_sub(1) else {
        report.failure = Some(ProofFailure {
            step: String::new(),
            path: vec![],
            kind: FailureKind::Structure,
            message: "the proof has no steps".into(),
            witness: None,
        });
        return report;
    };
    report.depth = depths(proof, &index)[root];

    let mut ck = Checker {
        st,
        proof,
        index,
        discharger: Discharger::new(st),
        spec_ok: HashMap::new(),
        done: vec![false; proof.steps.len()],
        obligations: 0,
    };
    let result = ck.visit(root, &mut Vec::new());
    report.obligations = ck.obligations;
    let unused: BTreeSet<&str> =
        proof.steps.iter().zip(&ck.done).filter(|(_, d)| !**d).map(|(s, _)| s.name.as_str()).collect();
    if result.is_ok() && !unused.is_empty() {
        let names: Vec<&str> = unused.into_iter().collect();
        report.notes.push(format!("steps not used by the root: {}", names.join(", ")));
    }
    match result {
        Ok(()) => report.verdict = ProofVerdict::Valid,
        Err(f) => report.failure = Some(f),
    }
    report
}
