//! Language-agnostic maximal-munch lexer.
//!
//! Identifiers `[A-Za-z_][A-Za-z0-9_]*`, numeric literals (a digit followed
//! by any run of alphanumerics, `_` or `.`), string and char literals kept
//! verbatim with their quotes, multi-char operators from [`OPERATORS`], and
//! any other non-space character as a single punctuation token. `//` and
//! `/* */` comments and whitespace are dropped.

use crate::corpus::SeedProgram;
use crate::error::Result;

/// Multi-char operators, longest first so the scan is maximal munch.
pub const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "::", "->", "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Str,
    Char,
    Op,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    pub line: usize,
    pub column: usize,
}

pub struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer {
            src,
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn bump_while(&mut self, pred: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = self.rest();
            if rest.starts_with("//") {
                self.bump_while(|c| c != '\n');
            } else if rest.starts_with("/*") {
                self.bump();
                self.bump();
                while !self.rest().is_empty() && !self.rest().starts_with("*/") {
                    self.bump();
                }
                self.bump();
                self.bump();
            } else if self.peek().is_some_and(char::is_whitespace) {
                self.bump_while(char::is_whitespace);
            } else {
                return;
            }
        }
    }

    /// Consumes a quoted literal; unterminated literals run to end of line.
    fn quoted(&mut self, quote: char) {
        self.bump();
        while let Some(c) = self.peek() {
            match c {
                '\\' => {
                    self.bump();
                    if self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                '\n' => return,
                c if c == quote => {
                    self.bump();
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }
}

impl<'a> Iterator for Lexer<'a> {
    type Item = Token<'a>;

    fn next(&mut self) -> Option<Token<'a>> {
        self.skip_trivia();
        let start = self.pos;
        let (line, column) = (self.line, self.column);
        let c = self.peek()?;
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            self.bump_while(|c| c.is_ascii_alphanumeric() || c == '_');
            TokenKind::Ident
        } else if c.is_ascii_digit() {
            self.bump_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.');
            TokenKind::Number
        } else if c == '"' {
            self.quoted('"');
            TokenKind::Str
        } else if c == '\'' {
            self.quoted('\'');
            TokenKind::Char
        } else if let Some(op) = OPERATORS.iter().find(|op| self.rest().starts_with(*op)) {
            for _ in 0..op.len() {
                self.bump();
            }
            TokenKind::Op
        } else {
            self.bump();
            TokenKind::Punct
        };
        Some(Token {
            kind,
            text: &self.src[start..self.pos],
            line,
            column,
        })
    }
}

pub fn tokenize_str(src: &str) -> Vec<String> {
    Lexer::new(src).map(|t| t.text.to_owned()).collect()
}

/// Token sequence of a seed's source text.
pub fn tokenize(seed: &SeedProgram) -> Result<Vec<String>> {
    Ok(tokenize_str(seed.source()?))
}
