//! The finite structure: declared sorts, declared variables and states.

use std::collections::{BTreeSet, HashMap};

use crate::value::{Sort, SortError, SortId, SortKind, Ty, Value};

pub type VarId = usize;

/// A state assigns a value to every declared variable, indexed by `VarId`.
pub type State = Vec<Value>;

#[derive(Clone, Debug)]
pub struct VarDecl {
    pub name: String,
    pub sort: SortId,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DeclError {
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
}

/// Sorts and variables of one source file.
#[derive(Clone, Debug, Default)]
pub struct Structure {
    sorts: Vec<Sort>,
    sort_names: HashMap<String, SortId>,
    vars: Vec<VarDecl>,
    var_names: HashMap<String, VarId>,
    constants: HashMap<String, SortId>,
}

impl Structure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sort(&mut self, name: &str, kind: SortKind) -> Result<SortId, DeclError> {
        if self.sort_names.contains_key(name) {
            return Err(DeclError::Duplicate(name.into()));
        }
        let sort = Sort::new(name, kind, &self.sorts)?;
        let id = self.sorts.len();
        if let SortKind::Enum(names) = &sort.kind {
            for n in names {
                if self.constants.insert(n.clone(), id).is_some() || self.var_names.contains_key(n) {
                    return Err(DeclError::Duplicate(n.clone()));
                }
            }
        }
        self.sorts.push(sort);
        self.sort_names.insert(name.into(), id);
        Ok(id)
    }

    /// Returns the sort with this name, creating an anonymous one when `kind` is
    /// given and no sort of that name exists yet.
    pub fn intern_sort(&mut self, name: &str, kind: SortKind) -> Result<SortId, DeclError> {
        match self.sort_names.get(name) {
            Some(&id) => Ok(id),
            None => self.add_sort(name, kind),
        }
    }

    pub fn add_var(&mut self, name: &str, sort: SortId) -> Result<VarId, DeclError> {
        if self.var_names.contains_key(name) || self.constants.contains_key(name) {
            return Err(DeclError::Duplicate(name.into()));
        }
        let id = self.vars.len();
        self.vars.push(VarDecl { name: name.into(), sort });
        self.var_names.insert(name.into(), id);
        Ok(id)
    }

    pub fn sort(&self, id: SortId) -> &Sort {
        &self.sorts[id]
    }

    pub fn sort_id(&self, name: &str) -> Option<SortId> {
        self.sort_names.get(name).copied()
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn var(&self, id: VarId) -> &VarDecl {
        &self.vars[id]
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.var_names.get(name).copied()
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn var_sort(&self, id: VarId) -> &Sort {
        &self.sorts[self.vars[id].sort]
    }

    pub fn var_ty(&self, id: VarId) -> &Ty {
        &self.var_sort(id).ty
    }

    /// Enum sort owning a constant name.
    pub fn constant(&self, name: &str) -> Option<SortId> {
        self.constants.get(name).copied()
    }

    /// Resolves names to ids in declaration order.
    pub fn resolve<'a>(
        &self,
        names: impl IntoIterator<Item = &'a String>,
    ) -> Result<Vec<VarId>, String> {
        let mut ids: BTreeSet<VarId> = BTreeSet::new();
        for n in names {
            ids.insert(self.var_id(n).ok_or_else(|| n.clone())?);
        }
        Ok(ids.into_iter().collect())
    }

    /// The state mapping every variable to the first element of its carrier.
    pub fn default_state(&self) -> State {
        self.vars
            .iter()
            .map(|v| self.sorts[v.sort].carrier()[0].clone())
            .collect()
    }

    pub fn render_state(&self, s: &[Value], vars: &[VarId]) -> String {
        let parts: Vec<String> = vars
            .iter()
            .map(|&v| format!("{}={}", self.vars[v].name, s[v]))
            .collect();
        parts.join(", ")
    }
}

/// Mixed-radix numbering of the states projected onto a variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Space {
    vars: Vec<VarId>,
    radices: Vec<u64>,
    total: u64,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("state space over {0} variables exceeds 2^63 states")]
pub struct SpaceTooLarge(pub usize);

impl Space {
    pub fn new(structure: &Structure, vars: &[VarId]) -> Result<Space, SpaceTooLarge> {
        let mut total: u64 = 1;
        let mut radices = Vec::with_capacity(vars.len());
        for &v in vars {
            let r = structure.var_sort(v).size() as u64;
            total = total
                .checked_mul(r)
                .filter(|t| *t < (1u64 << 63))
                .ok_or(SpaceTooLarge(vars.len()))?;
            radices.push(r);
        }
        Ok(Space { vars: vars.to_vec(), radices, total })
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn size(&self) -> u64 {
        self.total
    }

    /// Index of the projection of `s`. Values outside a carrier are not encodable.
    pub fn encode(&self, structure: &Structure, s: &[Value]) -> Option<u64> {
        let mut code = 0u64;
        for (i, &v) in self.vars.iter().enumerate() {
            let p = structure.var_sort(v).position(&s[v])? as u64;
            code = code * self.radices[i] + p;
        }
        Some(code)
    }

    /// Writes the projected values of `code` into `s`, leaving other variables alone.
    pub fn decode_into(&self, structure: &Structure, mut code: u64, s: &mut [Value]) {
        for (i, &v) in self.vars.iter().enumerate().rev() {
            let r = self.radices[i];
            s[v] = structure.var_sort(v).carrier()[(code % r) as usize].clone();
            code /= r;
        }
    }

    /// Full state for `code`, with unprojected variables taken from `base`.
    pub fn decode(&self, structure: &Structure, code: u64, base: &[Value]) -> State {
        let mut s = base.to_vec();
        self.decode_into(structure, code, &mut s);
        s
    }
}
