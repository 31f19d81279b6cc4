//! Specification-driven input generation.
//!
//! A [`SpecSet`] declares bounded integer variables and named branches, each a
//! conjunction of polynomial comparisons of degree at most two. Witnesses for a
//! branch come from a randomized backtracking search with bounds propagation
//! ([`sample_branch`]); [`generate_batch`] interleaves branches round-robin and
//! [`random_batch`] is the constraint-blind uniform baseline.

mod parse;
mod random;
mod solver;

use std::fmt;

pub use random::random_batch;
pub use solver::{generate_batch, sample_branch, BranchSample, BranchSampler};

/// Largest admissible |bound|. Keeps every degree-2 term inside i128 with room to spare.
pub const MAX_ABS_BOUND: i64 = 1 << 31;
/// Largest admissible domain width per variable; the solver materializes domains.
pub const MAX_DOMAIN_SIZE: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("branch `{0}` declared twice")]
    DuplicateBranch(String),
    #[error("variable `{name}` has empty bounds [{lo}, {hi}]")]
    EmptyBounds { name: String, lo: i64, hi: i64 },
    #[error("variable `{0}` bounds exceed the supported range")]
    DomainTooLarge(String),
    #[error("branch `{0}` has no constraints")]
    EmptyBranch(String),
    #[error("term with more than two variables in branch `{0}`")]
    DegreeTooHigh(String),
    #[error("unknown branch `{0}`")]
    UnknownBranch(String),
    #[error("branch `{0}` has no solution within bounds")]
    Unsat(String),
    #[error("no branch of the specification is satisfiable")]
    AllBranchesUnsat,
    #[error("specification declares no variables")]
    NoVariables,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
}

impl VarDecl {
    pub fn width(&self) -> u64 {
        (self.hi as i128 - self.lo as i128 + 1) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn holds(self, lhs: i128, rhs: i128) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// `coeff * Π vars`, at most two factors (a repeated index is a square).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: i64,
    pub vars: Vec<usize>,
}

/// A comparison, stored normalized as `Σ terms ⋈ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub terms: Vec<Term>,
    pub op: CmpOp,
}

impl Atom {
    pub fn eval_diff(&self, assignment: &[i64]) -> i128 {
        self.terms.iter().fold(0i128, |acc, t| {
            let v = t
                .vars
                .iter()
                .fold(t.coeff as i128, |p, &i| p.saturating_mul(assignment[i] as i128));
            acc.saturating_add(v)
        })
    }

    pub fn holds(&self, assignment: &[i64]) -> bool {
        self.op.holds(self.eval_diff(assignment), 0)
    }

    pub fn vars(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.iter().flat_map(|t| t.vars.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub name: String,
    pub atoms: Vec<Atom>,
}

impl Branch {
    pub fn satisfied_by(&self, assignment: &[i64]) -> bool {
        self.atoms.iter().all(|a| a.holds(assignment))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecSet {
    pub vars: Vec<VarDecl>,
    pub branches: Vec<Branch>,
}

impl SpecSet {
    pub fn parse(source: &str) -> Result<SpecSet, SpecError> {
        parse::parse_spec(source)
    }

    pub fn branch(&self, name: &str) -> Result<&Branch, SpecError> {
        self.branches
            .iter()
            .find(|b| b.name == name)
            .ok_or_else(|| SpecError::UnknownBranch(name.to_string()))
    }

    pub fn in_bounds(&self, input: &[i64]) -> bool {
        input.len() == self.vars.len() && self.vars.iter().zip(input).all(|(v, &x)| v.lo <= x && x <= v.hi)
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Provenance {
    Branch(String),
    Random,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Branch(name) => f.write_str(name),
            Provenance::Random => f.write_str("random"),
        }
    }
}

/// Candidate inputs with the branch (or "random") each came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CandidateBatch {
    pub inputs: Vec<Vec<i64>>,
    pub provenance: Vec<Provenance>,
}

impl CandidateBatch {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Provenance)> {
        self.inputs.iter().zip(&self.provenance)
    }
}
