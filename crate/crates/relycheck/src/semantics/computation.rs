//! Finite computations and the composition/decomposition constructions.

use std::collections::BTreeSet;

use crate::lang::ast::{self, ProgramKind};
use crate::semantics::graph::Label;
use crate::semantics::step::{Machine, Residue, SemError};
use crate::structure::{State, VarId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub prog: Residue,
    pub state: State,
}

/// `⟨z₁,s₁⟩ →a₁ ⟨z₂,s₂⟩ … ⟨z_n,s_n⟩`, with one label per transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Computation {
    pub configs: Vec<Config>,
    pub labels: Vec<Label>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ending {
    Terminated,
    Deadlocked,
    /// The last configuration is enabled, so this is only a prefix.
    Prefix,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ComputationError {
    #[error("transition {index} is not a legal {label}-step: {reason}")]
    Illegal { index: usize, label: Label, reason: String },
    #[error("not compatible at index {index}: {reason}")]
    Incompatible { index: usize, reason: String },
    #[error("malformed computation: {0}")]
    Malformed(String),
    #[error(transparent)]
    Semantics(#[from] SemError),
}

impl Computation {
    pub fn single(prog: Residue, state: State) -> Self {
        Computation { configs: vec![Config { prog, state }], labels: vec![] }
    }

    /// Number of configurations.
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn push(&mut self, label: Label, prog: Residue, state: State) {
        self.labels.push(label);
        self.configs.push(Config { prog, state });
    }

    pub fn last(&self) -> &Config {
        self.configs.last().expect("nonempty computation")
    }

    fn shape_ok(&self) -> Result<(), ComputationError> {
        if self.configs.is_empty() || self.labels.len() + 1 != self.configs.len() {
            return Err(ComputationError::Malformed(format!(
                "{} configurations with {} labels",
                self.configs.len(),
                self.labels.len()
            )));
        }
        Ok(())
    }

    /// Every i-step is in `⇀i`; every e-step keeps the program and respects `hid`.
    pub fn check_legal(&self, m: &Machine, hid: &BTreeSet<VarId>) -> Result<(), ComputationError> {
        self.shape_ok()?;
        for (j, label) in self.labels.iter().enumerate() {
            let (a, b) = (&self.configs[j], &self.configs[j + 1]);
            let illegal = |reason: &str| ComputationError::Illegal { index: j, label: *label, reason: reason.into() };
            match label {
                Label::External => {
                    if a.prog != b.prog {
                        return Err(illegal("the program component changes"));
                    }
                    if hid.iter().any(|&v| a.state[v] != b.state[v]) {
                        return Err(illegal("a hidden variable changes"));
                    }
                }
                Label::Internal => {
                    let Some(p) = &a.prog else { return Err(illegal("ε has no internal steps")) };
                    let succ = m.internal(p, &a.state)?;
                    if !succ.iter().any(|(r, t)| *r == b.prog && *t == b.state) {
                        return Err(illegal("no such internal transition"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ending(&self, m: &Machine) -> Result<Ending, SemError> {
        let c = self.last();
        Ok(match &c.prog {
            None => Ending::Terminated,
            Some(p) if m.internal(p, &c.state)?.is_empty() => Ending::Deadlocked,
            Some(_) => Ending::Prefix,
        })
    }
}

/// `σ′ • σ″`: same length, same states, never internal at once.
pub fn compatible(a: &Computation, b: &Computation) -> Result<(), ComputationError> {
    a.shape_ok()?;
    b.shape_ok()?;
    if a.len() != b.len() {
        return Err(ComputationError::Incompatible {
            index: a.len().min(b.len()),
            reason: format!("lengths {} and {} differ", a.len(), b.len()),
        });
    }
    for j in 0..a.len() {
        if a.configs[j].state != b.configs[j].state {
            return Err(ComputationError::Incompatible { index: j, reason: "states differ".into() });
        }
        if j < a.labels.len() && a.labels[j] == Label::Internal && b.labels[j] == Label::Internal {
            return Err(ComputationError::Incompatible { index: j, reason: "both components step internally".into() });
        }
    }
    Ok(())
}

fn join(a: &Residue, b: &Residue) -> Residue {
    match (a, b) {
        (None, r) | (r, None) => r.clone(),
        (Some(x), Some(y)) => Some(ast::par(x.clone(), y.clone())),
    }
}

/// The composition construction: programs joined with ε absorbed, a step
/// internal iff either component step is.
pub fn compose_computations(a: &Computation, b: &Computation) -> Result<Computation, ComputationError> {
    compatible(a, b)?;
    let (Some(z1), Some(z2)) = (&a.configs[0].prog, &b.configs[0].prog) else {
        return Err(ComputationError::Malformed("a component starts from ε".into()));
    };
    let mut out = Computation::single(Some(ast::par(z1.clone(), z2.clone())), a.configs[0].state.clone());
    for k in 1..a.len() {
        let label = if a.labels[k - 1] == Label::External && b.labels[k - 1] == Label::External {
            Label::External
        } else {
            Label::Internal
        };
        out.push(label, join(&a.configs[k].prog, &b.configs[k].prog), a.configs[k].state.clone());
    }
    Ok(out)
}

/// The decomposition construction for a computation of `{z₁∥z₂}`.
pub fn decompose_computation(m: &Machine, sigma: &Computation) -> Result<(Computation, Computation), ComputationError> {
    sigma.shape_ok()?;
    let root = sigma.configs[0].prog.clone().ok_or_else(|| ComputationError::Malformed("starts from ε".into()))?;
    let ProgramKind::Par(z1, z2) = &root.kind else {
        return Err(ComputationError::Malformed("root program is not a parallel composition".into()));
    };
    let s1 = sigma.configs[0].state.clone();
    let mut a = Computation::single(Some(z1.clone()), s1.clone());
    let mut b = Computation::single(Some(z2.clone()), s1);
    for k in 1..sigma.len() {
        let cur = &sigma.configs[k];
        let prev_state = &sigma.configs[k - 1].state;
        let pa = a.last().prog.clone();
        let pb = b.last().prog.clone();
        let state = cur.state.clone();
        let ext = Label::External;
        let int = Label::Internal;
        if sigma.labels[k - 1] == Label::External {
            a.push(ext, pa, state.clone());
            b.push(ext, pb, state);
        } else if pa.is_none() {
            a.push(ext, None, state.clone());
            b.push(int, cur.prog.clone(), state);
        } else if pb.is_none() {
            a.push(int, cur.prog.clone(), state.clone());
            b.push(ext, None, state);
        } else if cur.prog == pb {
            a.push(int, None, state.clone());
            b.push(ext, pb, state);
        } else if cur.prog == pa {
            a.push(ext, pa, state.clone());
            b.push(int, None, state);
        } else {
            let Some(ProgramKind::Par(l, r)) = cur.prog.as_ref().map(|p| &p.kind) else {
                return Err(ComputationError::Illegal {
                    index: k - 1,
                    label: int,
                    reason: "internal step of a parallel composition leaves no recognisable residue".into(),
                });
            };
            let left_moved = Some(r.clone()) == pb
                && m.internal(pa.as_ref().unwrap(), prev_state)?
                    .iter()
                    .any(|(res, t)| res.as_ref() == Some(l) && *t == state);
            if left_moved {
                a.push(int, Some(l.clone()), state.clone());
                b.push(ext, pb, state);
                continue;
            }
            let right_moved = Some(l.clone()) == pa
                && m.internal(pb.as_ref().unwrap(), prev_state)?
                    .iter()
                    .any(|(res, t)| res.as_ref() == Some(r) && *t == state);
            if right_moved {
                a.push(ext, pa, state.clone());
                b.push(int, Some(r.clone()), state);
                continue;
            }
            return Err(ComputationError::Illegal {
                index: k - 1,
                label: int,
                reason: "neither component can make this step".into(),
            });
        }
    }
    Ok((a, b))
}
