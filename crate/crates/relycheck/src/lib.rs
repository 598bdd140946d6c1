//! Rely/guarantee checking for a shared-state parallel while-language.
//!
//! Programs are explored exhaustively over declared finite sorts, and proof
//! trees are validated rule by rule with obligations discharged by enumeration.

pub mod lang;
pub mod logic;
pub mod proof;
pub mod sat;
pub mod semantics;
pub mod structure;
pub mod syntax;
pub mod value;

pub use structure::{Space, State, Structure, VarId};
pub use value::{Sort, SortKind, Ty, Value};
