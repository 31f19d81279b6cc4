//! The SUT language: a single integer function with `if`/`let`/`return`,
//! C-style operators and double-quoted class literals.
//!
//! ```text
//! program := "fn" ident "(" [ident {"," ident}] ")" block
//! block   := "{" {stmt} "}"
//! stmt    := "if" "(" expr ")" block ["else" block]
//!          | "let" ident "=" expr ";"
//!          | "return" expr ";"
//! expr    := C precedence over || && (== !=) (< <= > >=) (+ -) (* / %), prefix - and !
//! atom    := integer | "class" | ident | "(" expr ")"
//! ```

mod ast;
mod interp;
mod lexer;
mod parser;
mod pretty;

use std::fmt;

pub use ast::{BinOp, Expr, Program, Stmt, UnOp};
pub use interp::{execute, Fault, Value};
pub use parser::{parse, MAX_NESTING};
pub use pretty::{expr_to_string, pretty_print};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UndeclaredVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            kind: ParseErrorKind::Syntax(msg.into()),
        }
    }

    pub(crate) fn undeclared(line: usize, col: usize, name: String) -> Self {
        ParseError {
            line,
            col,
            kind: ParseErrorKind::UndeclaredVariable(name),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "{}:{}: {msg}", self.line, self.col),
            ParseErrorKind::UndeclaredVariable(name) => {
                write!(f, "{}:{}: undeclared variable `{name}`", self.line, self.col)
            }
        }
    }
}
