use std::fmt::Write;

use super::ast::{Expr, Program, Stmt, UnOp};

/// Renders a program in canonical layout. The output reparses to an identical AST.
pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "fn {}({}) {{", program.name, program.params.join(", "));
    for stmt in &program.body {
        write_stmt(&mut out, stmt, 1);
    }
    out.push_str("}\n");
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn write_stmt(out: &mut String, stmt: &Stmt, level: usize) {
    indent(out, level);
    match stmt {
        Stmt::If {
            cond,
            then_block,
            else_block,
        } => {
            let _ = writeln!(out, "if ({}) {{", expr_to_string(cond));
            for s in then_block {
                write_stmt(out, s, level + 1);
            }
            indent(out, level);
            if else_block.is_empty() {
                out.push_str("}\n");
            } else {
                out.push_str("} else {\n");
                for s in else_block {
                    write_stmt(out, s, level + 1);
                }
                indent(out, level);
                out.push_str("}\n");
            }
        }
        Stmt::Assign(name, e) => {
            let _ = writeln!(out, "let {name} = {};", expr_to_string(e));
        }
        Stmt::Return(e) => {
            let _ = writeln!(out, "return {};", expr_to_string(e));
        }
    }
}

pub fn expr_to_string(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr);
    out
}

fn write_expr(out: &mut String, expr: &Expr) {
    match expr {
        Expr::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Expr::Class(s) => {
            let _ = write!(out, "\"{s}\"");
        }
        Expr::Var(name) => out.push_str(name),
        Expr::Binary(op, lhs, rhs) => {
            let prec = op.precedence();
            let lhs_parens = matches!(**lhs, Expr::Binary(l, _, _) if l.precedence() < prec);
            let rhs_parens = matches!(**rhs, Expr::Binary(r, _, _) if r.precedence() <= prec);
            write_grouped(out, lhs, lhs_parens);
            let _ = write!(out, " {op} ");
            write_grouped(out, rhs, rhs_parens);
        }
        Expr::Unary(op, operand) => {
            out.push_str(op.symbol());
            // `-5` would fold back into a literal, so a negated non-negative literal keeps its parens.
            let parens = match &**operand {
                Expr::Binary(..) => true,
                Expr::Int(n) => *op == UnOp::Neg && *n >= 0,
                _ => false,
            };
            write_grouped(out, operand, parens);
        }
    }
}

fn write_grouped(out: &mut String, expr: &Expr, parens: bool) {
    if parens {
        out.push('(');
        write_expr(out, expr);
        out.push(')');
    } else {
        write_expr(out, expr);
    }
}
