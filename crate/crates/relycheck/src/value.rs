//! Values, sorts and their finite carriers.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

/// A carrier element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Sym(Arc<str>),
    Seq(Arc<[Value]>),
    Set(Arc<BTreeSet<Value>>),
}

impl Value {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn seq(items: Vec<Value>) -> Value {
        Value::Seq(items.into())
    }

    pub fn set(items: impl IntoIterator<Item = Value>) -> Value {
        Value::Set(Arc::new(items.into_iter().collect()))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Sym(s) => write!(f, "{s}"),
            Value::Seq(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::Set(items) => {
                f.write_str("{")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

pub type SortId = usize;

/// Static type of an expression. Every bounded range shares `Int`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    /// Element type of an empty literal; unifies with anything.
    Any,
    Bool,
    Int,
    Enum(SortId),
    Seq(Box<Ty>),
    Set(Box<Ty>),
}

impl Ty {
    /// Unifies two types, treating `Any` as a wildcard.
    pub fn join(&self, other: &Ty) -> Option<Ty> {
        match (self, other) {
            (Ty::Any, t) | (t, Ty::Any) => Some(t.clone()),
            (Ty::Seq(a), Ty::Seq(b)) => Some(Ty::Seq(Box::new(a.join(b)?))),
            (Ty::Set(a), Ty::Set(b)) => Some(Ty::Set(Box::new(a.join(b)?))),
            (a, b) if a == b => Some(a.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Any => f.write_str("?"),
            Ty::Bool => f.write_str("bool"),
            Ty::Int => f.write_str("int"),
            Ty::Enum(id) => write!(f, "enum#{id}"),
            Ty::Seq(t) => write!(f, "seq {t}"),
            Ty::Set(t) => write!(f, "set {t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SortKind {
    Boolean,
    Range { lo: i64, hi: i64 },
    Enum(Vec<String>),
    Seq { elem: SortId, max_len: usize },
    Set { elem: SortId },
}

/// A declared sort with its enumerated carrier.
#[derive(Clone, Debug)]
pub struct Sort {
    pub name: String,
    pub kind: SortKind,
    pub ty: Ty,
    carrier: Vec<Value>,
    index: HashMap<Value, u32>,
}

/// Largest carrier the toolkit will enumerate for a single sort.
pub const MAX_CARRIER: usize = 1 << 20;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SortError {
    #[error("sort `{0}` has an empty carrier")]
    Empty(String),
    #[error("sort `{0}` has more than {MAX_CARRIER} elements")]
    TooLarge(String),
    #[error("sort `{name}` repeats enum constant `{constant}`")]
    DuplicateConstant { name: String, constant: String },
}

impl Sort {
    /// Builds a sort. `elems` resolves element sorts for sequences and sets.
    pub fn new(name: &str, kind: SortKind, elems: &[Sort]) -> Result<Sort, SortError> {
        let (carrier, ty) = match &kind {
            SortKind::Boolean => (vec![Value::Bool(false), Value::Bool(true)], Ty::Bool),
            SortKind::Range { lo, hi } => {
                if lo > hi {
                    return Err(SortError::Empty(name.into()));
                }
                if (hi - lo) as u128 + 1 > MAX_CARRIER as u128 {
                    return Err(SortError::TooLarge(name.into()));
                }
                ((*lo..=*hi).map(Value::Int).collect(), Ty::Int)
            }
            SortKind::Enum(names) => {
                let mut seen = BTreeSet::new();
                for n in names {
                    if !seen.insert(n.clone()) {
                        return Err(SortError::DuplicateConstant {
                            name: name.into(),
                            constant: n.clone(),
                        });
                    }
                }
                if names.is_empty() {
                    return Err(SortError::Empty(name.into()));
                }
                let id = elems.len();
                (names.iter().map(|n| Value::Sym(n.as_str().into())).collect(), Ty::Enum(id))
            }
            SortKind::Seq { elem, max_len } => {
                let base = &elems[*elem];
                let mut total: u128 = 0;
                for k in 0..=*max_len {
                    total += (base.carrier.len() as u128).pow(k as u32);
                    if total > MAX_CARRIER as u128 {
                        return Err(SortError::TooLarge(name.into()));
                    }
                }
                let mut out = vec![Value::seq(Vec::new())];
                let mut layer: Vec<Vec<Value>> = vec![Vec::new()];
                for _ in 0..*max_len {
                    let mut next = Vec::new();
                    for prefix in &layer {
                        for v in &base.carrier {
                            let mut p = prefix.clone();
                            p.push(v.clone());
                            out.push(Value::seq(p.clone()));
                            next.push(p);
                        }
                    }
                    layer = next;
                }
                (out, Ty::Seq(Box::new(base.ty.clone())))
            }
            SortKind::Set { elem } => {
                let base = &elems[*elem];
                let n = base.carrier.len();
                if n >= 20 || (1usize << n) > MAX_CARRIER {
                    return Err(SortError::TooLarge(name.into()));
                }
                let out = (0..(1u64 << n))
                    .map(|mask| {
                        Value::set(
                            (0..n)
                                .filter(|i| mask & (1 << i) != 0)
                                .map(|i| base.carrier[i].clone()),
                        )
                    })
                    .collect();
                (out, Ty::Set(Box::new(base.ty.clone())))
            }
        };
        let index = carrier
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i as u32))
            .collect();
        Ok(Sort { name: name.into(), kind, ty, carrier, index })
    }

    pub fn carrier(&self) -> &[Value] {
        &self.carrier
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.index.contains_key(v)
    }

    pub fn position(&self, v: &Value) -> Option<u32> {
        self.index.get(v).copied()
    }

    pub fn size(&self) -> usize {
        self.carrier.len()
    }
}
