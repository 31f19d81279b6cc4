use super::ast::{BinOp, Expr, Program, Stmt, UnOp};
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Nesting limit for blocks and expressions combined. Keeps recursion bounded on hostile input.
pub const MAX_NESTING: usize = 128;

pub fn parse(source: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        scopes: Vec::new(),
        depth: 0,
    };
    parser.program()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    scopes: Vec<Vec<String>>,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::syntax(t.line, t.col, msg)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.advance())
        } else {
            Err(self.error_here(format!("expected {what}, found {}", describe(&self.peek().tok))))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Ident(name) => {
                let name = name.clone();
                self.advance();
                Ok(name)
            }
            other => Err(self.error_here(format!("expected {what}, found {}", describe(other)))),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.error_here(format!("nesting deeper than {MAX_NESTING}")));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn is_declared(&self, name: &str) -> bool {
        self.scopes.iter().rev().any(|s| s.iter().any(|v| v == name))
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        self.expect(Tok::Fn, "`fn`")?;
        let name = self.ident("function name")?;
        self.expect(Tok::LParen, "`(`")?;
        let mut params = Vec::new();
        if self.peek().tok != Tok::RParen {
            loop {
                let t = self.peek().clone();
                let p = self.ident("parameter name")?;
                if params.contains(&p) {
                    return Err(ParseError::syntax(t.line, t.col, format!("duplicate parameter `{p}`")));
                }
                params.push(p);
                if self.peek().tok == Tok::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        self.scopes.push(params.clone());
        let body = self.block()?;
        self.expect(Tok::Eof, "end of input")?;
        Ok(Program { name, params, body })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.enter()?;
        self.expect(Tok::LBrace, "`{`")?;
        self.scopes.push(Vec::new());
        let mut stmts = Vec::new();
        while self.peek().tok != Tok::RBrace {
            stmts.push(self.stmt()?);
        }
        self.advance();
        self.scopes.pop();
        self.leave();
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        match self.peek().tok {
            Tok::If => {
                self.advance();
                self.expect(Tok::LParen, "`(`")?;
                let cond = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                let then_block = self.block()?;
                let else_block = if self.peek().tok == Tok::Else {
                    self.advance();
                    self.block()?
                } else {
                    Vec::new()
                };
                Ok(Stmt::If {
                    cond,
                    then_block,
                    else_block,
                })
            }
            Tok::Let => {
                self.advance();
                let name = self.ident("variable name")?;
                self.expect(Tok::Assign, "`=`")?;
                let value = self.expr()?;
                self.expect(Tok::Semi, "`;`")?;
                if let Some(scope) = self.scopes.last_mut() {
                    scope.push(name.clone());
                }
                Ok(Stmt::Assign(name, value))
            }
            Tok::Return => {
                self.advance();
                let value = self.expr()?;
                self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt::Return(value))
            }
            ref other => Err(self.error_here(format!("expected statement, found {}", describe(other)))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.unary()?;
        while let Some(op) = binop_of(&self.peek().tok) {
            if op.precedence() < min_prec {
                break;
            }
            self.advance();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        self.leave();
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let result = match self.peek().tok.clone() {
            Tok::Minus => {
                if let Tok::Int(magnitude) = *self.peek_at(1) {
                    let t = self.advance();
                    self.advance();
                    let value = -(magnitude as i128);
                    if value < i64::MIN as i128 {
                        return Err(ParseError::syntax(t.line, t.col, "integer literal out of range"));
                    }
                    Expr::Int(value as i64)
                } else {
                    self.advance();
                    Expr::unary(UnOp::Neg, self.unary()?)
                }
            }
            Tok::Bang => {
                self.advance();
                Expr::unary(UnOp::Not, self.unary()?)
            }
            _ => self.primary()?,
        };
        self.leave();
        Ok(result)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(magnitude) => {
                self.advance();
                let value = i64::try_from(magnitude)
                    .map_err(|_| ParseError::syntax(t.line, t.col, "integer literal out of range"))?;
                Ok(Expr::Int(value))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(Expr::Class(s))
            }
            Tok::Ident(name) => {
                self.advance();
                if !self.is_declared(&name) {
                    return Err(ParseError::undeclared(t.line, t.col, name));
                }
                Ok(Expr::Var(name))
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            ref other => Err(self.error_here(format!("expected expression, found {}", describe(other)))),
        }
    }
}

fn binop_of(tok: &Tok) -> Option<BinOp> {
    Some(match tok {
        Tok::Plus => BinOp::Add,
        Tok::Minus => BinOp::Sub,
        Tok::Star => BinOp::Mul,
        Tok::Slash => BinOp::Div,
        Tok::Percent => BinOp::Rem,
        Tok::EqEq => BinOp::Eq,
        Tok::NotEq => BinOp::Ne,
        Tok::Lt => BinOp::Lt,
        Tok::Le => BinOp::Le,
        Tok::Gt => BinOp::Gt,
        Tok::Ge => BinOp::Ge,
        Tok::AndAnd => BinOp::And,
        Tok::OrOr => BinOp::Or,
        _ => return None,
    })
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Int(n) => format!("integer `{n}`"),
        Tok::Str(s) => format!("class literal \"{s}\""),
        Tok::Eof => "end of input".to_string(),
        other => format!("{other:?}"),
    }
}
