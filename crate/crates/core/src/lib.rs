//! Generalized RDF graphs, a query algebra over sets of matches, a
//! denotational pattern evaluator and a rewriting engine that agrees with it.

pub mod algebra;
pub mod error;
pub mod expr;
pub mod graph;
pub mod matching;
pub mod narrowing;
pub mod output;
pub mod pattern;
pub mod props;
pub mod query;
pub mod renaming;
pub mod syntax;

pub use algebra::EvalOptions;
pub use error::{Error, Result};
pub use expr::{Expr, EvalError};
pub use graph::{ConstValue, Graph, Label, Triple, Variable};
pub use matching::{Assignment, FreshVarGen, Match, MatchSet};
pub use pattern::{eval_pattern, Pattern};
pub use query::{check, evaluate, Engine, Query, QueryResult, SolutionTable};
