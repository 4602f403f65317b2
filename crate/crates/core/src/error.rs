use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("unsafe rule `{rule}`: variable {var} does not occur in a positive body atom")]
    UnsafeRule { rule: String, var: String },

    #[error("predicate {pred} used with arity {found}, expected {expected}")]
    ArityClash { pred: String, expected: usize, found: usize },

    #[error("program is not stratifiable: negative dependency inside the cycle {}", cycle.join(" -> "))]
    NotStratifiable { cycle: Vec<String> },

    #[error("invalid stratification: {0}")]
    InvalidStratification(String),

    #[error("nonrecursive counter of {fact} would become negative")]
    NegativeCounter { fact: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
