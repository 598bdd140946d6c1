//! Specifications and the satisfaction checker.

pub mod check;
pub mod spec;

pub use spec::{Bracket, SpecError, Specification, SpecifiedProgram};
pub use check::{
    check_sat, check_sat_general, check_sat_modified, check_sat_noaux, render_trace, replay, strongest_relations,
    CheckError, CheckOptions, CheckReport, CheckStats, Clause, Counterexample, Strongest, TraceStep, Verdict, Which,
    DEFAULT_BUDGET,
};
