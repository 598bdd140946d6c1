//! Operational semantics: transitions, computations and configuration graphs.

pub mod computation;
pub mod graph;
pub mod step;

pub use computation::{compose_computations, decompose_computation, Computation, ComputationError, Config, Ending};
pub use graph::{build_config_graph, initial_states, ConfigGraph, Edge, Environment, GraphStats, Label, Node};
pub use step::{AwaitOutcome, Machine, Residue, SemError};
