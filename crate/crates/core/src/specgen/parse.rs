//! `.spec` reader.
//!
//! ```text
//! var x in [1, 200];
//! branch right { x*x + y*y == z*z; x < y; }
//! ```

use std::collections::BTreeMap;

use super::{Atom, Branch, CmpOp, SpecError, SpecSet, Term, VarDecl, MAX_ABS_BOUND, MAX_DOMAIN_SIZE};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Sym(&'static str),
    Eof,
}

struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 15] = [
    "==", "!=", "<=", ">=", "<", ">", ";", "[", "]", ",", "{", "}", "+", "-", "*",
];

fn lex(src: &str) -> Result<Vec<Lexed>, SpecError> {
    let mut out = Vec::new();
    for (line_idx, line) in src.lines().enumerate() {
        let line_no = line_idx + 1;
        let code = match line.find("//") {
            Some(i) => &line[..i],
            None => line,
        };
        let chars: Vec<(usize, char)> = code.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (byte, c) = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = byte;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let end = chars.get(i).map_or(code.len(), |&(b, _)| b);
                out.push(Lexed {
                    tok: Tok::Ident(code[start..end].to_string()),
                    line: line_no,
                    col,
                });
                continue;
            }
            if c.is_ascii_digit() {
                let start = byte;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let end = chars.get(i).map_or(code.len(), |&(b, _)| b);
                let n = code[start..end].parse::<u64>().map_err(|_| SpecError::Parse {
                    line: line_no,
                    col,
                    msg: "integer out of range".into(),
                })?;
                out.push(Lexed {
                    tok: Tok::Int(n),
                    line: line_no,
                    col,
                });
                continue;
            }
            let rest = &code[byte..];
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(sym) => {
                    out.push(Lexed {
                        tok: Tok::Sym(sym),
                        line: line_no,
                        col,
                    });
                    i += sym.len();
                }
                None => {
                    return Err(SpecError::Parse {
                        line: line_no,
                        col,
                        msg: format!("unexpected character {c:?}"),
                    })
                }
            }
        }
    }
    let line = src.lines().count().max(1);
    out.push(Lexed {
        tok: Tok::Eof,
        line,
        col: 1,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    vars: Vec<VarDecl>,
}

pub(super) fn parse_spec(src: &str) -> Result<SpecSet, SpecError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        vars: Vec::new(),
    };
    let mut branches: Vec<Branch> = Vec::new();
    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Ident(kw) if kw == "var" => {
                if !branches.is_empty() {
                    return Err(p.err("variables must be declared before branches"));
                }
                p.advance();
                p.var_decl()?;
            }
            Tok::Ident(kw) if kw == "branch" => {
                p.advance();
                let b = p.branch()?;
                if branches.iter().any(|x| x.name == b.name) {
                    return Err(SpecError::DuplicateBranch(b.name));
                }
                branches.push(b);
            }
            _ => return Err(p.err("expected `var` or `branch`")),
        }
    }
    if p.vars.is_empty() {
        return Err(SpecError::NoVariables);
    }
    Ok(SpecSet { vars: p.vars, branches })
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> SpecError {
        let t = &self.toks[self.pos];
        SpecError::Parse {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        }
    }

    fn sym(&mut self, s: &str) -> Result<(), SpecError> {
        if self.is_sym(s) {
            self.advance();
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn ident(&mut self) -> Result<String, SpecError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.err("expected identifier")),
        }
    }

    fn signed_int(&mut self) -> Result<i64, SpecError> {
        let negative = if self.is_sym("-") {
            self.advance();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Int(n) => {
                self.advance();
                let v = if negative { -(n as i128) } else { n as i128 };
                i64::try_from(v).map_err(|_| self.err("integer out of range"))
            }
            _ => Err(self.err("expected integer")),
        }
    }

    fn var_decl(&mut self) -> Result<(), SpecError> {
        let name = self.ident()?;
        match self.ident()?.as_str() {
            "in" => {}
            _ => return Err(self.err("expected `in`")),
        }
        self.sym("[")?;
        let lo = self.signed_int()?;
        self.sym(",")?;
        let hi = self.signed_int()?;
        self.sym("]")?;
        self.sym(";")?;
        if self.vars.iter().any(|v| v.name == name) {
            return Err(SpecError::DuplicateVariable(name));
        }
        if lo > hi {
            return Err(SpecError::EmptyBounds { name, lo, hi });
        }
        let decl = VarDecl { name, lo, hi };
        if lo < -MAX_ABS_BOUND || hi > MAX_ABS_BOUND || decl.width() > MAX_DOMAIN_SIZE {
            return Err(SpecError::DomainTooLarge(decl.name));
        }
        self.vars.push(decl);
        Ok(())
    }

    fn branch(&mut self) -> Result<Branch, SpecError> {
        let name = self.ident()?;
        self.sym("{")?;
        let mut atoms = Vec::new();
        while !self.is_sym("}") {
            if *self.peek() == Tok::Eof {
                return Err(self.err("unterminated branch"));
            }
            atoms.push(self.atom(&name)?);
            self.sym(";")?;
        }
        self.advance();
        if atoms.is_empty() {
            return Err(SpecError::EmptyBranch(name));
        }
        Ok(Branch { name, atoms })
    }

    fn atom(&mut self, branch: &str) -> Result<Atom, SpecError> {
        let lhs = self.poly(branch)?;
        let op = match self.peek() {
            Tok::Sym("==") => CmpOp::Eq,
            Tok::Sym("!=") => CmpOp::Ne,
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym("<=") => CmpOp::Le,
            Tok::Sym(">") => CmpOp::Gt,
            Tok::Sym(">=") => CmpOp::Ge,
            _ => return Err(self.err("expected comparison operator")),
        };
        self.advance();
        let rhs = self.poly(branch)?;
        let mut merged: BTreeMap<Vec<usize>, i128> = BTreeMap::new();
        for (t, sign) in lhs
            .into_iter()
            .map(|t| (t, 1i128))
            .chain(rhs.into_iter().map(|t| (t, -1)))
        {
            *merged.entry(t.vars).or_insert(0) += sign * t.coeff as i128;
        }
        let mut terms = Vec::new();
        for (vars, coeff) in merged {
            if coeff == 0 {
                continue;
            }
            let coeff = i64::try_from(coeff).map_err(|_| self.err("coefficient out of range"))?;
            terms.push(Term { coeff, vars });
        }
        Ok(Atom { terms, op })
    }

    fn poly(&mut self, branch: &str) -> Result<Vec<Term>, SpecError> {
        let mut terms = Vec::new();
        let mut sign = 1i64;
        if self.is_sym("-") {
            self.advance();
            sign = -1;
        } else if self.is_sym("+") {
            self.advance();
        }
        loop {
            let mut t = self.term(branch)?;
            t.coeff = t
                .coeff
                .checked_mul(sign)
                .ok_or_else(|| self.err("coefficient out of range"))?;
            terms.push(t);
            if self.is_sym("+") {
                sign = 1;
            } else if self.is_sym("-") {
                sign = -1;
            } else {
                break;
            }
            self.advance();
        }
        Ok(terms)
    }

    fn term(&mut self, branch: &str) -> Result<Term, SpecError> {
        let mut coeff: i64 = 1;
        let mut vars = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Int(n) => {
                    self.advance();
                    let n = i64::try_from(n).map_err(|_| self.err("integer out of range"))?;
                    coeff = coeff
                        .checked_mul(n)
                        .ok_or_else(|| self.err("coefficient out of range"))?;
                }
                Tok::Ident(name) => {
                    self.advance();
                    let idx = self
                        .vars
                        .iter()
                        .position(|v| v.name == name)
                        .ok_or(SpecError::UnknownVariable(name))?;
                    vars.push(idx);
                }
                _ => return Err(self.err("expected integer or variable")),
            }
            if self.is_sym("*") {
                self.advance();
            } else {
                break;
            }
        }
        if vars.len() > 2 {
            return Err(SpecError::DegreeTooHigh(branch.to_string()));
        }
        vars.sort_unstable();
        Ok(Term { coeff, vars })
    }
}
