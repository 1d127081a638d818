use std::fmt;

use super::lexer::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleErrorKind {
    Syntax,
    Type,
    Arity,
    UnknownField,
    UnknownFunction,
    DuplicateId,
}

impl RuleErrorKind {
    fn label(self) -> &'static str {
        match self {
            RuleErrorKind::Syntax => "syntax error",
            RuleErrorKind::Type => "type error",
            RuleErrorKind::Arity => "arity error",
            RuleErrorKind::UnknownField => "unknown field",
            RuleErrorKind::UnknownFunction => "unknown function",
            RuleErrorKind::DuplicateId => "duplicate rule id",
        }
    }
}

/// A rule that failed to parse or type-check, with its 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleError {
    pub kind: RuleErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl RuleError {
    pub(crate) fn new(kind: RuleErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        Self {
            kind,
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }
}

impl fmt::Display for RuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}: {}",
            self.line,
            self.column,
            self.kind.label(),
            self.message
        )
    }
}

impl std::error::Error for RuleError {}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TriggerError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(
        "rule {rule_id:?} uses utilization_excess but the baseline window {window} holds no claims"
    )]
    EmptyBaseline { rule_id: String, window: String },
    #[error("hit for rule {rule_id:?} references unknown claim {claim_id:?}")]
    UnknownClaim { claim_id: String, rule_id: String },
}
