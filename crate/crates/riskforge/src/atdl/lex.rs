//! Tokenizer for ATDL documents.
//!
//! Identifiers follow `[A-Za-z][A-Za-z0-9_.-]*`; a `-` is not consumed into
//! an identifier when it starts a `->` arrow, so `a->b` lexes as three
//! tokens. `#` comments run to end of line and are ignored outside strings.

use std::fmt;

use crate::model::SourceSpan;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Str(String),
    Int(u64),
    Eq,
    Arrow,
    LBrace,
    RBrace,
    Comma,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "`{s}`"),
            TokenKind::Str(_) => write!(f, "string"),
            TokenKind::Int(n) => write!(f, "`{n}`"),
            TokenKind::Eq => write!(f, "`=`"),
            TokenKind::Arrow => write!(f, "`->`"),
            TokenKind::LBrace => write!(f, "`{{`"),
            TokenKind::RBrace => write!(f, "`}}`"),
            TokenKind::Comma => write!(f, "`,`"),
            TokenKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

pub fn is_valid_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

pub struct Lexer<'a> {
    file: &'a str,
    chars: Vec<char>,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    pub fn new(file: &'a str, text: &str) -> Self {
        Lexer {
            file,
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn span(&self) -> SourceSpan {
        SourceSpan {
            file: self.file.to_string(),
            line: self.line,
            column: self.column,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    pub fn tokenize(mut self) -> Result<Vec<Token>, ParseError> {
        let mut tokens = Vec::new();
        loop {
            self.skip_trivia();
            let span = self.span();
            let Some(c) = self.peek() else {
                tokens.push(Token { kind: TokenKind::Eof, span });
                return Ok(tokens);
            };
            let kind = match c {
                '{' => {
                    self.bump();
                    TokenKind::LBrace
                }
                '}' => {
                    self.bump();
                    TokenKind::RBrace
                }
                '=' => {
                    self.bump();
                    TokenKind::Eq
                }
                ',' => {
                    self.bump();
                    TokenKind::Comma
                }
                '-' if self.peek_at(1) == Some('>') => {
                    self.bump();
                    self.bump();
                    TokenKind::Arrow
                }
                '"' => self.lex_string(span.clone())?,
                c if c.is_ascii_digit() => self.lex_int(span.clone())?,
                c if c.is_ascii_alphabetic() => self.lex_ident(),
                other => {
                    return Err(ParseError::lexical(
                        format!("unexpected character `{other}`"),
                        span,
                        "identifier, string, number, or punctuation",
                    ))
                }
            };
            tokens.push(Token { kind, span });
        }
    }

    fn lex_ident(&mut self) -> TokenKind {
        let mut text = String::new();
        while let Some(c) = self.peek() {
            let continues = if text.is_empty() {
                c.is_ascii_alphabetic()
            } else {
                c.is_ascii_alphanumeric()
                    || c == '_'
                    || c == '.'
                    // a hyphen opening an arrow belongs to the arrow
                    || (c == '-' && self.peek_at(1) != Some('>'))
            };
            if !continues {
                break;
            }
            text.push(c);
            self.bump();
        }
        TokenKind::Ident(text)
    }

    fn lex_int(&mut self, span: SourceSpan) -> Result<TokenKind, ParseError> {
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            text.push(c);
            self.bump();
        }
        text.parse::<u64>()
            .map(TokenKind::Int)
            .map_err(|_| ParseError::lexical(format!("invalid integer `{text}`"), span, "integer"))
    }

    fn lex_string(&mut self, span: SourceSpan) -> Result<TokenKind, ParseError> {
        self.bump(); // opening quote
        let mut text = String::new();
        loop {
            match self.bump() {
                None => {
                    return Err(ParseError::lexical(
                        "unterminated string".to_string(),
                        span,
                        "closing `\"`",
                    ))
                }
                Some('"') => return Ok(TokenKind::Str(text)),
                Some('\\') => match self.bump() {
                    Some('"') => text.push('"'),
                    Some('\\') => text.push('\\'),
                    Some('n') => text.push('\n'),
                    other => {
                        return Err(ParseError::lexical(
                            match other {
                                Some(c) => format!("invalid escape `\\{c}`"),
                                None => "unterminated escape".to_string(),
                            },
                            span,
                            "one of `\\\"`, `\\\\`, `\\n`",
                        ))
                    }
                },
                Some('\n') => {
                    return Err(ParseError::lexical(
                        "unterminated string".to_string(),
                        span,
                        "closing `\"` before end of line",
                    ))
                }
                Some(c) => text.push(c),
            }
        }
    }
}

/// Escape a string for emission inside double quotes.
pub fn escape_string(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            other => out.push(other),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        Lexer::new("t.atdl", text)
            .tokenize()
            .unwrap()
            .into_iter()
            .map(|t| t.kind)
            .collect()
    }

    #[test]
    fn arrow_splits_identifiers() {
        assert_eq!(
            kinds("web-app->orchestrator"),
            vec![
                TokenKind::Ident("web-app".into()),
                TokenKind::Arrow,
                TokenKind::Ident("orchestrator".into()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn comments_are_ignored() {
        assert_eq!(
            kinds("a # trailing comment with \"quotes\"\nb"),
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Ident("b".into()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn string_escapes_round_trip() {
        assert_eq!(
            kinds(r#""say \"hi\"\n backslash: \\""#),
            vec![TokenKind::Str("say \"hi\"\n backslash: \\".into()), TokenKind::Eof]
        );
    }

    #[test]
    fn unterminated_string_errors_at_opening_quote() {
        let err = Lexer::new("t.atdl", "  \"oops").tokenize().unwrap_err();
        assert_eq!(err.span.line, 1);
        assert_eq!(err.span.column, 3);
    }

    #[test]
    fn hash_inside_string_is_literal() {
        assert_eq!(
            kinds(r##""not # a comment""##),
            vec![TokenKind::Str("not # a comment".into()), TokenKind::Eof]
        );
    }
}
