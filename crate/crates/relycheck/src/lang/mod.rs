//! Programs: syntax, variable analyses, well-formedness and auxiliary removal.

pub mod ast;
pub mod removal;
pub mod validate;
pub mod vars;

pub use ast::{Prog, Program, ProgramKind, Span};
pub use removal::{check_removal, erase_auxiliary, explain_removal, EraseError, Removal, RemovalMismatch};
pub use validate::{validate_program, Constraint, ValidationError, Validated, Violation};
