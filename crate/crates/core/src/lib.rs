//! Executable definitions of domain consistency and the three notions of
//! bounds consistency over finite integer domains, with propagators, a
//! fixpoint engine, a backtracking solver and brute-force oracles.

pub mod checkers;
pub mod cli;
pub mod constraints;
pub mod domains;
pub mod engine;
pub mod error;
pub mod format;
pub mod model;
pub mod oracle;
pub mod propagators;
pub mod rational;
pub mod reductions;
pub mod search;

pub use checkers::{check, CheckReport, Notion, SupportWitness, Witness};
pub use constraints::{Constraint, LinTerm, MonoFunc};
pub use domains::{range_of, Domain, IntSet, Valuation, VarId};
pub use engine::{propagate_all, trace, Event, EventKind, TraceStep};
pub use error::{Error, Result};
pub use format::{format_model, parse_model};
pub use model::{Model, Posted, VarDecl};
pub use propagators::{propagate, Outcome, PropagationResult};
pub use rational::Rat;
pub use reductions::{encode_subset_sum, is_monotonic, Monotonicity, SubsetSumInstance};
pub use search::{solve, BranchStrategy, Limits, SearchStats, SolveResult};
