use thiserror::Error;

use crate::rule::Condition;

/// Errors raised by rules, the algebra layer, the axiom lab and the front ends.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HopfError {
    #[error("malformed object `{object}`: {reason}")]
    MalformedObject { object: String, reason: String },

    #[error("rule `{rule}` does not declare condition {condition}")]
    ConditionNotDeclared { rule: String, condition: Condition },

    #[error("antipode of `{object}` did not terminate within {budget} decomposition tuples")]
    NonTermination { object: String, budget: u64 },

    #[error("recursive antipode of `{object}` exceeded its recursion budget")]
    RecursionBudgetExceeded { object: String },

    #[error("enumeration budget of {budget} exceeded at `{object}`")]
    BudgetExceeded { object: String, budget: u64 },

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown instance `{0}`")]
    UnknownInstance(String),

    #[error("alphabet is empty")]
    EmptyAlphabet,

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("composition is not a monoid law: {0}")]
    NotAMonoid(String),

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("type error: {0}")]
    Type(String),
}

impl HopfError {
    pub(crate) fn malformed(object: impl Into<String>, reason: impl Into<String>) -> Self {
        HopfError::MalformedObject {
            object: object.into(),
            reason: reason.into(),
        }
    }

    /// Parse error at a 1-based line/column computed from a byte offset into `text`.
    pub fn parse_at(text: &str, offset: usize, message: impl Into<String>) -> Self {
        let offset = offset.min(text.len());
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = match before.rfind('\n') {
            Some(nl) => before[nl + 1..].chars().count() + 1,
            None => before.chars().count() + 1,
        };
        HopfError::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T, E = HopfError> = std::result::Result<T, E>;
