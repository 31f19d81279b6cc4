//! First-order mutant enumeration over the AST.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Mutant;
use crate::lang::{expr_to_string, pretty_print, BinOp, Expr, Program, Stmt, UnOp};

/// The operator catalog, in the order mutants are emitted for a single node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    RelationalReplacement,
    ArithmeticReplacement,
    LogicalReplacement,
    OperandSwap,
    NegationInsertion,
    NotInsertion,
    UnaryRemoval,
    LiteralPerturbation,
    VariablePerturbation,
    VariableReplacement,
    ClassReplacement,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 11] = [
        OperatorKind::RelationalReplacement,
        OperatorKind::ArithmeticReplacement,
        OperatorKind::LogicalReplacement,
        OperatorKind::OperandSwap,
        OperatorKind::NegationInsertion,
        OperatorKind::NotInsertion,
        OperatorKind::UnaryRemoval,
        OperatorKind::LiteralPerturbation,
        OperatorKind::VariablePerturbation,
        OperatorKind::VariableReplacement,
        OperatorKind::ClassReplacement,
    ];

    pub fn code(self) -> &'static str {
        match self {
            OperatorKind::RelationalReplacement => "relational-replacement",
            OperatorKind::ArithmeticReplacement => "arithmetic-replacement",
            OperatorKind::LogicalReplacement => "logical-replacement",
            OperatorKind::OperandSwap => "operand-swap",
            OperatorKind::NegationInsertion => "negation-insertion",
            OperatorKind::NotInsertion => "not-insertion",
            OperatorKind::UnaryRemoval => "unary-removal",
            OperatorKind::LiteralPerturbation => "literal-perturbation",
            OperatorKind::VariablePerturbation => "variable-perturbation",
            OperatorKind::VariableReplacement => "variable-replacement",
            OperatorKind::ClassReplacement => "class-replacement",
        }
    }

    pub fn from_code(code: &str) -> Option<OperatorKind> {
        Self::ALL.into_iter().find(|k| k.code() == code)
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Location of an expression node.
///
/// Steps: a statement index into the enclosing block; under `if`, 0 selects
/// the condition, 1 the then-block, 2 the else-block (followed by a statement
/// index); under `let`/`return`, 0 selects the expression; under binary
/// operators 0/1 select lhs/rhs and under unary operators 0 the operand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodePath(pub Vec<u32>);

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl std::str::FromStr for NodePath {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Ok(NodePath::default());
        }
        s.split('.').map(str::parse).collect::<Result<_, _>>().map(NodePath)
    }
}

impl NodePath {
    fn child(&self, step: u32) -> NodePath {
        let mut p = self.0.clone();
        p.push(step);
        NodePath(p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edit {
    pub path: NodePath,
    pub operator: OperatorKind,
    pub original: String,
    pub replacement: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
    Class,
    Unknown,
}

fn type_of(expr: &Expr, scope: &[(String, Ty)]) -> Ty {
    match expr {
        Expr::Int(_) => Ty::Int,
        Expr::Class(_) => Ty::Class,
        Expr::Var(name) => scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map_or(Ty::Unknown, |(_, t)| *t),
        Expr::Unary(UnOp::Neg, _) => Ty::Int,
        Expr::Unary(UnOp::Not, _) => Ty::Bool,
        Expr::Binary(op, _, _) if op.is_arithmetic() => Ty::Int,
        Expr::Binary(..) => Ty::Bool,
    }
}

/// Candidate replacements for a single node, in catalog order.
fn node_mutations(expr: &Expr, scope: &[(String, Ty)], labels: &[String]) -> Vec<(OperatorKind, Expr)> {
    let mut out = Vec::new();
    let ty = type_of(expr, scope);

    if let Expr::Binary(op, l, r) = expr {
        let (family, kind): (&[BinOp], _) = if op.is_relational() {
            (&BinOp::RELATIONAL, OperatorKind::RelationalReplacement)
        } else if op.is_arithmetic() {
            (&BinOp::ARITHMETIC, OperatorKind::ArithmeticReplacement)
        } else {
            (&BinOp::LOGICAL, OperatorKind::LogicalReplacement)
        };
        for &other in family.iter().filter(|o| *o != op) {
            out.push((kind, Expr::Binary(other, l.clone(), r.clone())));
        }
        if !op.is_commutative() && l != r {
            out.push((OperatorKind::OperandSwap, Expr::Binary(*op, r.clone(), l.clone())));
        }
    }

    let is_literal = matches!(expr, Expr::Int(_));
    if ty == Ty::Int && !is_literal && !matches!(expr, Expr::Unary(UnOp::Neg, _)) {
        out.push((OperatorKind::NegationInsertion, Expr::unary(UnOp::Neg, expr.clone())));
    }
    if ty == Ty::Bool && !matches!(expr, Expr::Unary(UnOp::Not, _)) {
        out.push((OperatorKind::NotInsertion, Expr::unary(UnOp::Not, expr.clone())));
    }

    match expr {
        Expr::Unary(_, operand) => out.push((OperatorKind::UnaryRemoval, (**operand).clone())),
        Expr::Int(c) => {
            let c = *c;
            let mut seen = vec![c];
            for v in [c.checked_add(1), c.checked_sub(1), Some(0), c.checked_neg()]
                .into_iter()
                .flatten()
            {
                if !seen.contains(&v) {
                    seen.push(v);
                    out.push((OperatorKind::LiteralPerturbation, Expr::Int(v)));
                }
            }
        }
        Expr::Var(name) => {
            if ty == Ty::Int {
                out.push((
                    OperatorKind::VariablePerturbation,
                    Expr::binary(BinOp::Add, expr.clone(), Expr::Int(1)),
                ));
                out.push((
                    OperatorKind::VariablePerturbation,
                    Expr::binary(BinOp::Sub, expr.clone(), Expr::Int(1)),
                ));
                out.push((OperatorKind::VariablePerturbation, Expr::Int(0)));
            }
            // declaration order; a shadowing `let` updates the type in place
            let mut visible: Vec<(&str, Ty)> = Vec::new();
            for (n, t) in scope {
                match visible.iter_mut().find(|(v, _)| v == n) {
                    Some(slot) => slot.1 = *t,
                    None => visible.push((n, *t)),
                }
            }
            for (n, t) in visible {
                if n != name && t == ty {
                    out.push((OperatorKind::VariableReplacement, Expr::Var(n.to_string())));
                }
            }
        }
        Expr::Class(label) => {
            for other in labels.iter().filter(|l| *l != label) {
                out.push((OperatorKind::ClassReplacement, Expr::Class(other.clone())));
            }
        }
        Expr::Binary(..) => {}
    }
    out
}

struct Walker<'a> {
    labels: &'a [String],
    scope: Vec<(String, Ty)>,
    found: Vec<(NodePath, OperatorKind, String, Expr)>,
}

impl Walker<'_> {
    fn block(&mut self, stmts: &[Stmt], path: &NodePath) {
        let mark = self.scope.len();
        for (i, stmt) in stmts.iter().enumerate() {
            let sp = path.child(i as u32);
            match stmt {
                Stmt::If {
                    cond,
                    then_block,
                    else_block,
                } => {
                    self.expr(cond, sp.child(0));
                    self.block(then_block, &sp.child(1));
                    self.block(else_block, &sp.child(2));
                }
                Stmt::Assign(name, e) => {
                    self.expr(e, sp.child(0));
                    let ty = type_of(e, &self.scope);
                    self.scope.push((name.clone(), ty));
                }
                Stmt::Return(e) => self.expr(e, sp.child(0)),
            }
        }
        self.scope.truncate(mark);
    }

    fn expr(&mut self, expr: &Expr, path: NodePath) {
        let original = expr_to_string(expr);
        for (kind, replacement) in node_mutations(expr, &self.scope, self.labels) {
            self.found.push((path.clone(), kind, original.clone(), replacement));
        }
        match expr {
            Expr::Binary(_, l, r) => {
                self.expr(l, path.child(0));
                self.expr(r, path.child(1));
            }
            Expr::Unary(_, e) => self.expr(e, path.child(0)),
            _ => {}
        }
    }
}

/// All distinct first-order mutants of `program`, in AST pre-order then
/// catalog order. Mutants whose source equals the base or an earlier mutant
/// are dropped; ids are dense from 0.
pub fn generate_mutants(program: &Program) -> Vec<Mutant> {
    let base = Arc::new(program.clone());
    let labels = program.class_labels();
    let mut walker = Walker {
        labels: &labels,
        scope: program.params.iter().map(|p| (p.clone(), Ty::Int)).collect(),
        found: Vec::new(),
    };
    walker.block(&program.body, &NodePath::default());

    let mut seen: HashSet<String> = HashSet::new();
    seen.insert(pretty_print(program));
    let mut mutants = Vec::new();
    for (path, operator, original, replacement) in walker.found {
        let mut mutated = program.clone();
        let slot = expr_at_mut(&mut mutated, &path).expect("walker paths address expressions");
        *slot = replacement.clone();
        let source = pretty_print(&mutated);
        if !seen.insert(source) {
            continue;
        }
        mutants.push(Mutant {
            id: mutants.len(),
            base: Arc::clone(&base),
            edit: Edit {
                path,
                operator,
                original,
                replacement: expr_to_string(&replacement),
            },
            program: mutated,
        });
    }
    mutants
}

pub fn expr_at_mut<'p>(program: &'p mut Program, path: &NodePath) -> Option<&'p mut Expr> {
    let steps = &path.0;
    let (&first, rest) = steps.split_first()?;
    let stmt = program.body.get_mut(first as usize)?;
    stmt_expr_mut(stmt, rest)
}

fn stmt_expr_mut<'p>(stmt: &'p mut Stmt, steps: &[u32]) -> Option<&'p mut Expr> {
    let (&step, rest) = steps.split_first()?;
    match (stmt, step) {
        (Stmt::If { cond, .. }, 0) => descend_expr(cond, rest),
        (Stmt::If { then_block, .. }, 1) => block_expr_mut(then_block, rest),
        (Stmt::If { else_block, .. }, 2) => block_expr_mut(else_block, rest),
        (Stmt::Assign(_, e) | Stmt::Return(e), 0) => descend_expr(e, rest),
        _ => None,
    }
}

fn block_expr_mut<'p>(block: &'p mut [Stmt], steps: &[u32]) -> Option<&'p mut Expr> {
    let (&i, rest) = steps.split_first()?;
    stmt_expr_mut(block.get_mut(i as usize)?, rest)
}

fn descend_expr<'p>(expr: &'p mut Expr, steps: &[u32]) -> Option<&'p mut Expr> {
    match steps.split_first() {
        None => Some(expr),
        Some((&step, rest)) => match (expr, step) {
            (Expr::Binary(_, l, _), 0) => descend_expr(l, rest),
            (Expr::Binary(_, _, r), 1) => descend_expr(r, rest),
            (Expr::Unary(_, e), 0) => descend_expr(e, rest),
            _ => None,
        },
    }
}

/// Paths of the maximal differing nodes between two programs. A node is
/// descended into only when its own shape matches and exactly one child
/// differs; otherwise the node itself is reported.
pub fn diff_paths(a: &Program, b: &Program) -> Vec<NodePath> {
    let mut out = Vec::new();
    if a.name != b.name || a.params != b.params {
        out.push(NodePath::default());
        return out;
    }
    diff_block(&a.body, &b.body, &NodePath::default(), &mut out);
    out
}

fn diff_block(a: &[Stmt], b: &[Stmt], path: &NodePath, out: &mut Vec<NodePath>) {
    if a.len() != b.len() {
        out.push(path.clone());
        return;
    }
    for (i, (sa, sb)) in a.iter().zip(b).enumerate() {
        let sp = path.child(i as u32);
        match (sa, sb) {
            _ if sa == sb => {}
            (
                Stmt::If {
                    cond: ca,
                    then_block: ta,
                    else_block: ea,
                },
                Stmt::If {
                    cond: cb,
                    then_block: tb,
                    else_block: eb,
                },
            ) => {
                diff_expr(ca, cb, sp.child(0), out);
                diff_block(ta, tb, &sp.child(1), out);
                diff_block(ea, eb, &sp.child(2), out);
            }
            (Stmt::Assign(na, ea), Stmt::Assign(nb, eb)) if na == nb => diff_expr(ea, eb, sp.child(0), out),
            (Stmt::Return(ea), Stmt::Return(eb)) => diff_expr(ea, eb, sp.child(0), out),
            _ => out.push(sp),
        }
    }
}

fn diff_expr(a: &Expr, b: &Expr, path: NodePath, out: &mut Vec<NodePath>) {
    if a == b {
        return;
    }
    match (a, b) {
        (Expr::Binary(oa, la, ra), Expr::Binary(ob, lb, rb)) if oa == ob => match (la == lb, ra == rb) {
            (true, false) => diff_expr(ra, rb, path.child(1), out),
            (false, true) => diff_expr(la, lb, path.child(0), out),
            _ => out.push(path),
        },
        (Expr::Unary(oa, ea), Expr::Unary(ob, eb)) if oa == ob => diff_expr(ea, eb, path.child(0), out),
        _ => out.push(path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn sources(p: &str) -> Vec<String> {
        generate_mutants(&parse(p).unwrap())
            .iter()
            .map(|m| {
                expr_to_string(match &m.program.body[0] {
                    Stmt::Return(e) => e,
                    _ => unreachable!(),
                })
            })
            .collect()
    }

    #[test]
    fn identity_function_catalog() {
        // Var x (int): negation insertion, then x+1, x-1, 0. No other variables in scope.
        assert_eq!(sources("fn f(x){ return x; }"), ["-x", "x + 1", "x - 1", "0"]);
    }

    #[test]
    fn literal_only_program() {
        assert_eq!(sources("fn f(){ return 5; }"), ["6", "4", "0", "-5"]);
        // 0 perturbs to 1 and -1 only
        assert_eq!(sources("fn f(){ return 0; }"), ["1", "-1"]);
    }

    #[test]
    fn class_only_program_without_alternatives_is_empty() {
        assert!(generate_mutants(&parse("fn f(x){ return \"only\"; }").unwrap()).is_empty());
    }

    #[test]
    fn binary_catalog() {
        let got = sources("fn f(a, b){ return a < b; }");
        let expected = [
            // relational replacements
            "a == b",
            "a != b",
            "a <= b",
            "a > b",
            "a >= b",
            // operand swap, not insertion
            "b < a",
            "!(a < b)",
            // lhs a
            "-a < b",
            "a + 1 < b",
            "a - 1 < b",
            "0 < b",
            "b < b",
            // rhs b
            "a < -b",
            "a < b + 1",
            "a < b - 1",
            "a < 0",
            "a < a",
        ];
        assert_eq!(got, expected);
    }

    #[test]
    fn unary_removal_and_class_replacement() {
        let p = parse("fn f(x){ if (!(x > 0)) { return \"neg\"; } return \"pos\"; }").unwrap();
        let ms = generate_mutants(&p);
        assert!(ms
            .iter()
            .any(|m| m.edit.operator == OperatorKind::UnaryRemoval && m.edit.replacement == "x > 0"));
        let classes: Vec<_> = ms
            .iter()
            .filter(|m| m.edit.operator == OperatorKind::ClassReplacement)
            .map(|m| (m.edit.original.as_str(), m.edit.replacement.as_str()))
            .collect();
        assert_eq!(classes, [("\"neg\"", "\"pos\""), ("\"pos\"", "\"neg\"")]);
        // `!` is never stacked on an existing negation
        assert!(!ms.iter().any(|m| m.edit.replacement.starts_with("!!")));
    }

    #[test]
    fn variable_replacement_respects_scope_and_type() {
        let p = parse("fn f(a, b){ let c = a > b; if (c) { return a; } return b; }").unwrap();
        let ms = generate_mutants(&p);
        for m in ms
            .iter()
            .filter(|m| m.edit.operator == OperatorKind::VariableReplacement)
        {
            // the bool local never swaps with int params
            assert!(!(m.edit.original == "c" || m.edit.replacement == "c"), "{:?}", m.edit);
        }
    }

    #[test]
    fn paths_address_mutated_node() {
        let p = crate::corpus::triangle();
        for m in generate_mutants(&p) {
            assert_eq!(diff_paths(&p, &m.program), vec![m.edit.path.clone()], "{:?}", m.edit);
            let mut copy = m.program.clone();
            let node = expr_at_mut(&mut copy, &m.edit.path).unwrap();
            assert_eq!(expr_to_string(node), m.edit.replacement);
        }
    }

    #[test]
    fn node_path_text_round_trip() {
        let p: NodePath = "3.0.1.0".parse().unwrap();
        assert_eq!(p, NodePath(vec![3, 0, 1, 0]));
        assert_eq!(p.to_string(), "3.0.1.0");
        assert_eq!("".parse::<NodePath>().unwrap(), NodePath::default());
    }
}
