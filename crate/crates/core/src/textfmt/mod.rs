//! Text formats: the JSON model file, global-property strings, 2-counter
//! machine programs, parameter valuations and a compact constraint syntax.

mod constraint;
mod machine;
mod model_json;
mod property;

use thiserror::Error;

use crate::model::ModelError;

pub use constraint::{parse_constraint, parse_valuation};
pub use machine::{parse_machine, Counter, MachineProgram, Step};
pub use model_json::{parse_model, serialize_model};
pub use property::{parse_property, PropertyAst};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl TextError {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        TextError::Syntax { line, column, message: message.into() }
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\''
}
