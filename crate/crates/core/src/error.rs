use thiserror::Error;

use crate::expr::EvalError;
use crate::matching::MatchError;
use crate::narrowing::EngineError;
use crate::pattern::ValidationError;
use crate::query::QueryError;
use crate::syntax::SyntaxError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("invalid pattern: {}", join_errors(.0))]
    Invalid(Vec<ValidationError>),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl Error {
    /// Parse and validation failures, as opposed to evaluation failures.
    pub fn is_static(&self) -> bool {
        matches!(self, Error::Syntax(_) | Error::Invalid(_) | Error::Query(_))
    }
}

fn join_errors(errs: &[ValidationError]) -> String {
    errs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
