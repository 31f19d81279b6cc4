use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{BinOp, Expr, Program, Stmt, UnOp};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value {
    Int(i64),
    Class(String),
    Bool(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Class(s) => f.write_str(s),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Abnormal termination of a program run. A normal result, not a crash.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Fault {
    DivByZero,
    TypeError(String),
    NoReturn,
    UnboundVariable(String),
    ArityMismatch { expected: usize, got: usize },
}

impl Fault {
    pub fn kind(&self) -> &'static str {
        match self {
            Fault::DivByZero => "div-by-zero",
            Fault::TypeError(_) => "type-error",
            Fault::NoReturn => "no-return",
            Fault::UnboundVariable(_) => "unbound-variable",
            Fault::ArityMismatch { .. } => "arity-mismatch",
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::DivByZero => f.write_str("division by zero"),
            Fault::TypeError(msg) => write!(f, "type error: {msg}"),
            Fault::NoReturn => f.write_str("execution finished without a return"),
            Fault::UnboundVariable(v) => write!(f, "unbound variable `{v}`"),
            Fault::ArityMismatch { expected, got } => {
                write!(f, "expected {expected} inputs, got {got}")
            }
        }
    }
}

impl std::error::Error for Fault {}

/// Runs `program` on `input`. Integer arithmetic wraps on overflow.
pub fn execute(program: &Program, input: &[i64]) -> Result<Value, Fault> {
    if input.len() != program.params.len() {
        return Err(Fault::ArityMismatch {
            expected: program.params.len(),
            got: input.len(),
        });
    }
    let mut env: Vec<(&str, Value)> = program
        .params
        .iter()
        .zip(input)
        .map(|(p, &v)| (p.as_str(), Value::Int(v)))
        .collect();
    exec_block(&program.body, &mut env)?.ok_or(Fault::NoReturn)
}

fn exec_block<'p>(stmts: &'p [Stmt], env: &mut Vec<(&'p str, Value)>) -> Result<Option<Value>, Fault> {
    let mark = env.len();
    let mut result = None;
    for stmt in stmts {
        if let Some(v) = exec_stmt(stmt, env)? {
            result = Some(v);
            break;
        }
    }
    env.truncate(mark);
    Ok(result)
}

fn exec_stmt<'p>(stmt: &'p Stmt, env: &mut Vec<(&'p str, Value)>) -> Result<Option<Value>, Fault> {
    match stmt {
        Stmt::If {
            cond,
            then_block,
            else_block,
        } => match eval(cond, env)? {
            Value::Bool(true) => exec_block(then_block, env),
            Value::Bool(false) => exec_block(else_block, env),
            other => Err(Fault::TypeError(format!("condition evaluated to {other:?}"))),
        },
        Stmt::Assign(name, e) => {
            let v = eval(e, env)?;
            env.push((name.as_str(), v));
            Ok(None)
        }
        Stmt::Return(e) => eval(e, env).map(Some),
    }
}

fn eval(expr: &Expr, env: &[(&str, Value)]) -> Result<Value, Fault> {
    match expr {
        Expr::Int(n) => Ok(Value::Int(*n)),
        Expr::Class(s) => Ok(Value::Class(s.clone())),
        Expr::Var(name) => env
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Fault::UnboundVariable(name.clone())),
        Expr::Unary(op, operand) => match (op, eval(operand, env)?) {
            (UnOp::Neg, Value::Int(n)) => Ok(Value::Int(n.wrapping_neg())),
            (UnOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
            (op, v) => Err(Fault::TypeError(format!("`{op}` applied to {v:?}"))),
        },
        Expr::Binary(BinOp::And, lhs, rhs) => match eval(lhs, env)? {
            Value::Bool(false) => Ok(Value::Bool(false)),
            Value::Bool(true) => expect_bool(eval(rhs, env)?, BinOp::And),
            v => Err(Fault::TypeError(format!("`&&` applied to {v:?}"))),
        },
        Expr::Binary(BinOp::Or, lhs, rhs) => match eval(lhs, env)? {
            Value::Bool(true) => Ok(Value::Bool(true)),
            Value::Bool(false) => expect_bool(eval(rhs, env)?, BinOp::Or),
            v => Err(Fault::TypeError(format!("`||` applied to {v:?}"))),
        },
        Expr::Binary(op, lhs, rhs) => {
            let l = eval(lhs, env)?;
            let r = eval(rhs, env)?;
            apply_binary(*op, l, r)
        }
    }
}

fn expect_bool(v: Value, op: BinOp) -> Result<Value, Fault> {
    match v {
        Value::Bool(_) => Ok(v),
        other => Err(Fault::TypeError(format!("`{op}` applied to {other:?}"))),
    }
}

fn apply_binary(op: BinOp, l: Value, r: Value) -> Result<Value, Fault> {
    use Value::{Bool, Int};
    match (op, l, r) {
        (BinOp::Add, Int(a), Int(b)) => Ok(Int(a.wrapping_add(b))),
        (BinOp::Sub, Int(a), Int(b)) => Ok(Int(a.wrapping_sub(b))),
        (BinOp::Mul, Int(a), Int(b)) => Ok(Int(a.wrapping_mul(b))),
        (BinOp::Div | BinOp::Rem, Int(_), Int(0)) => Err(Fault::DivByZero),
        (BinOp::Div, Int(a), Int(b)) => Ok(Int(a.wrapping_div(b))),
        (BinOp::Rem, Int(a), Int(b)) => Ok(Int(a.wrapping_rem(b))),
        (BinOp::Lt, Int(a), Int(b)) => Ok(Bool(a < b)),
        (BinOp::Le, Int(a), Int(b)) => Ok(Bool(a <= b)),
        (BinOp::Gt, Int(a), Int(b)) => Ok(Bool(a > b)),
        (BinOp::Ge, Int(a), Int(b)) => Ok(Bool(a >= b)),
        (BinOp::Eq | BinOp::Ne, a, b) => {
            if std::mem::discriminant(&a) != std::mem::discriminant(&b) {
                return Err(Fault::TypeError(format!("`{op}` between {a:?} and {b:?}")));
            }
            Ok(Bool((a == b) == (op == BinOp::Eq)))
        }
        (op, a, b) => Err(Fault::TypeError(format!("`{op}` between {a:?} and {b:?}"))),
    }
}
