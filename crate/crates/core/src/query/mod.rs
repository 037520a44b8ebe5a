//! Parsing and compilation of the supported SPARQL subset.

mod compile;
mod lexer;
mod parser;

pub use compile::compile;
pub use parser::{
    parse_query, AggregateCall, GroupPattern, PatternElement, Query, SelectItem, Selection,
    TriplePattern,
};

use thiserror::Error;

use crate::algebra::Algebra;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        offset: usize,
        message: String,
    },
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error("compile error: {0}")]
    Compile(String),
}

impl QueryError {
    pub(crate) fn syntax(text: &str, offset: usize, message: impl Into<String>) -> Self {
        let offset = offset.min(text.len());
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
        QueryError::Syntax {
            line,
            column,
            offset,
            message: message.into(),
        }
    }
}

/// Parses and compiles query text to the flat algebra.
pub fn prepare(text: &str) -> Result<Algebra, QueryError> {
    compile(&parse_query(text)?)
}
