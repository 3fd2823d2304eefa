//! The Attack-Tree Description Language (ATDL): a line/stanza-oriented text
//! format for assessment bundles, plus the canonical serializer and the
//! machine-readable JSON export.
//!
//! A document holds one bundle: an optional `system` block, preconditions,
//! an attack tree, risk register entries, and scenarios, in that order.
//! Comments start with `#` and run to end of line.

mod canonical;
mod lex;
mod parse;
mod serialize;

use std::fmt;

use crate::model::SourceSpan;

pub use canonical::export_canonical;
pub use lex::is_valid_identifier;
pub use parse::{parse_document, parse_document_named};
pub use serialize::serialize_document;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    DuplicateId,
}

/// A parse failure, located at the offending token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub span: SourceSpan,
    /// Hint naming what the parser would have accepted here.
    pub expected: String,
}

impl ParseError {
    pub(crate) fn lexical(message: String, span: SourceSpan, expected: &str) -> Self {
        ParseError {
            kind: ParseErrorKind::Lexical,
            message,
            span,
            expected: expected.to_string(),
        }
    }

    pub(crate) fn syntax(message: String, span: SourceSpan, expected: &str) -> Self {
        ParseError {
            kind: ParseErrorKind::Syntax,
            message,
            span,
            expected: expected.to_string(),
        }
    }

    pub(crate) fn duplicate(message: String, span: SourceSpan) -> Self {
        ParseError {
            kind: ParseErrorKind::DuplicateId,
            message,
            span,
            expected: "a fresh identifier".to_string(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} (expected {})", self.span, self.message, self.expected)
    }
}

impl std::error::Error for ParseError {}
