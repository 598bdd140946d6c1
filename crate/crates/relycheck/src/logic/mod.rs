//! Assertions: syntax, sort checking, evaluation and explicit relations.

pub mod eval;
pub mod expr;
pub mod relation;
pub mod typeck;

pub use eval::{
    classify_relation, eval_assertion, preserve_under, rel_compose, trans_closure, well_founded,
    Classification, EvalError, Evaluator,
};
pub use expr::{hook_expression, identity_frame, BinOp, Binder, Expr, Func, Quant};
pub use relation::{StateRelation, StateSet};
