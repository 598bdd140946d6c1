//! Explicit extensions of unary and binary assertions over a projected space.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::structure::{Space, Structure, VarId};
use crate::value::Value;

/// A set of states projected onto `space`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSet {
    pub space: Space,
    pub members: BTreeSet<u64>,
}

/// A set of state pairs projected onto `space`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateRelation {
    pub space: Space,
    pub pairs: BTreeSet<(u64, u64)>,
}

impl StateSet {
    pub fn empty(space: Space) -> Self {
        StateSet { space, members: BTreeSet::new() }
    }

    pub fn contains(&self, x: u64) -> bool {
        self.members.contains(&x)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn render(&self, st: &Structure) -> Vec<String> {
        let base = st.default_state();
        self.members
            .iter()
            .map(|&x| st.render_state(&self.space.decode(st, x, &base), self.space.vars()))
            .collect()
    }
}

impl StateRelation {
    pub fn empty(space: Space) -> Self {
        StateRelation { space, pairs: BTreeSet::new() }
    }

    pub fn identity(space: Space) -> Self {
        let pairs = (0..space.size()).map(|x| (x, x)).collect();
        StateRelation { space, pairs }
    }

    pub fn contains(&self, a: u64, b: u64) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn vars(&self) -> &[VarId] {
        self.space.vars()
    }

    pub fn adjacency(&self) -> BTreeMap<u64, Vec<u64>> {
        let mut adj: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &(a, b) in &self.pairs {
            adj.entry(a).or_default().push(b);
        }
        adj
    }

    /// `self | other`
    pub fn compose(&self, other: &StateRelation) -> StateRelation {
        let adj = other.adjacency();
        let mut pairs = BTreeSet::new();
        for &(a, b) in &self.pairs {
            if let Some(cs) = adj.get(&b) {
                for &c in cs {
                    pairs.insert((a, c));
                }
            }
        }
        StateRelation { space: self.space.clone(), pairs }
    }

    pub fn union(&self, other: &StateRelation) -> StateRelation {
        StateRelation {
            space: self.space.clone(),
            pairs: self.pairs.union(&other.pairs).copied().collect(),
        }
    }

    /// Least transitive superset.
    pub fn transitive_closure(&self) -> StateRelation {
        let adj = self.adjacency();
        let mut pairs = BTreeSet::new();
        for &start in adj.keys() {
            let mut seen = BTreeSet::new();
            let mut queue: VecDeque<u64> = adj[&start].iter().copied().collect();
            while let Some(x) = queue.pop_front() {
                if !seen.insert(x) {
                    continue;
                }
                pairs.insert((start, x));
                if let Some(next) = adj.get(&x) {
                    queue.extend(next.iter().copied());
                }
            }
        }
        StateRelation { space: self.space.clone(), pairs }
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.space.size()).all(|x| self.contains(x, x))
    }

    pub fn is_transitive(&self) -> bool {
        let adj = self.adjacency();
        self.pairs.iter().all(|&(a, b)| {
            adj.get(&b)
                .is_none_or(|cs| cs.iter().all(|&c| self.contains(a, c)))
        })
    }

    /// Whether every pair agrees on `vars` (which must be a subset of the space).
    pub fn respects(&self, st: &Structure, vars: &[VarId]) -> bool {
        let base = st.default_state();
        self.pairs.iter().all(|&(a, b)| {
            let sa = self.space.decode(st, a, &base);
            let sb = self.space.decode(st, b, &base);
            vars.iter().all(|&v| sa[v] == sb[v])
        })
    }

    /// Acyclicity of the pair graph, self-loops included.
    pub fn is_acyclic(&self) -> bool {
        let adj = self.adjacency();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut color: BTreeMap<u64, u8> = BTreeMap::new();
        for &root in adj.keys() {
            if color.get(&root).copied().unwrap_or(0) != 0 {
                continue;
            }
            let mut stack: Vec<(u64, usize)> = vec![(root, 0)];
            color.insert(root, 1);
            while let Some(top) = stack.len().checked_sub(1) {
                let (node, i) = stack[top];
                let succ = adj.get(&node).map(Vec::as_slice).unwrap_or(&[]);
                if i < succ.len() {
                    let next = succ[i];
                    stack[top].1 += 1;
                    match color.get(&next).copied().unwrap_or(0) {
                        0 => {
                            color.insert(next, 1);
                            stack.push((next, 0));
                        }
                        1 => return false,
                        _ => {}
                    }
                } else {
                    color.insert(node, 2);
                    stack.pop();
                }
            }
        }
        true
    }

    pub fn domain(&self) -> BTreeSet<u64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn render(&self, st: &Structure) -> Vec<String> {
        let base = st.default_state();
        let show = |x: u64| st.render_state(&self.space.decode(st, x, &base), self.space.vars());
        self.pairs
            .iter()
            .map(|&(a, b)| format!("({}) -> ({})", show(a), show(b)))
            .collect()
    }

    /// Projects full-state pairs onto this relation's space and tests membership.
    pub fn holds_for(&self, st: &Structure, old: &[Value], new: &[Value]) -> bool {
        match (self.space.encode(st, old), self.space.encode(st, new)) {
            (Some(a), Some(b)) => self.contains(a, b),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::SortKind;

    fn space(n: i64) -> (Structure, Space) {
        let mut st = Structure::new();
        let d = st.add_sort("D", SortKind::Range { lo: 0, hi: n - 1 }).unwrap();
        st.add_var("x", d).unwrap();
        let sp = Space::new(&st, &[0]).unwrap();
        (st, sp)
    }

    #[test]
    fn closure_of_successor() {
        let (_, sp) = space(4);
        let r = StateRelation { space: sp, pairs: [(0, 1), (1, 2), (2, 3)].into() };
        let c = r.transitive_closure();
        assert_eq!(c.len(), 6);
        assert!(c.is_transitive());
        assert!(c.is_acyclic());
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let (_, sp) = space(2);
        let r = StateRelation { space: sp, pairs: [(1, 1)].into() };
        assert!(!r.is_acyclic());
    }

    #[test]
    fn identity_properties() {
        let (st, sp) = space(3);
        let id = StateRelation::identity(sp);
        assert!(id.is_reflexive() && id.is_transitive());
        assert!(id.respects(&st, &[0]));
        assert_eq!(id.compose(&id), id);
    }
}
