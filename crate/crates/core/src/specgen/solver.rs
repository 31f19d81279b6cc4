use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{Atom, Branch, CandidateBatch, CmpOp, Provenance, SpecError, SpecSet};
use crate::rng::{self, Rng};

/// Draws distinct witnesses for one branch.
///
/// Each call to [`BranchSampler::next_witness`] runs a complete depth-first
/// search with randomized variable and value order, rejecting leaves already
/// returned. `None` therefore means the solution set is exhausted.
pub struct BranchSampler<'s> {
    branch: &'s Branch,
    root: Option<Vec<Vec<i64>>>,
    rng: Rng,
    found: HashSet<Vec<i64>>,
    done: bool,
}

impl<'s> BranchSampler<'s> {
    pub fn new(spec: &'s SpecSet, branch: &'s Branch, seed: u64) -> Self {
        let mut domains: Vec<Vec<i64>> = spec.vars.iter().map(|v| (v.lo..=v.hi).collect()).collect();
        let root = propagate(&branch.atoms, &mut domains).then_some(domains);
        BranchSampler {
            branch,
            root,
            rng: rng::from_seed(seed),
            found: HashSet::new(),
            done: false,
        }
    }

    pub fn branch(&self) -> &Branch {
        self.branch
    }

    pub fn found(&self) -> usize {
        self.found.len()
    }

    pub fn is_exhausted(&self) -> bool {
        self.done
    }

    pub fn next_witness(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let Some(root) = self.root.clone() else {
            self.done = true;
            return None;
        };
        match search(&self.branch.atoms, root, &mut self.rng, &self.found) {
            Some(w) => {
                self.found.insert(w.clone());
                Some(w)
            }
            None => {
                self.done = true;
                None
            }
        }
    }
}

fn search(atoms: &[Atom], domains: Vec<Vec<i64>>, rng: &mut Rng, found: &HashSet<Vec<i64>>) -> Option<Vec<i64>> {
    let open: Vec<usize> = (0..domains.len()).filter(|&i| domains[i].len() > 1).collect();
    if open.is_empty() {
        let leaf: Vec<i64> = domains.iter().map(|d| d[0]).collect();
        let ok = atoms.iter().all(|a| a.holds(&leaf)) && !found.contains(&leaf);
        return ok.then_some(leaf);
    }
    let var = open[rng.gen_range(0..open.len())];
    let mut values = domains[var].clone();
    values.shuffle(rng);
    for value in values {
        let mut child = domains.clone();
        child[var] = vec![value];
        if propagate(atoms, &mut child) {
            if let Some(w) = search(atoms, child, rng, found) {
                return Some(w);
            }
        }
    }
    None
}

/// Prunes every value that cannot satisfy some atom given the bounds of the
/// other variables, to a fixpoint. Returns false when a domain empties.
fn propagate(atoms: &[Atom], domains: &mut [Vec<i64>]) -> bool {
    loop {
        let mut changed = false;
        for atom in atoms {
            for var in atom.vars() {
                let before = domains[var].len();
                let bounds: Vec<(i128, i128)> = domains
                    .iter()
                    .map(|d| (*d.first().unwrap_or(&0) as i128, *d.last().unwrap_or(&0) as i128))
                    .collect();
                let mut scratch = bounds.clone();
                domains[var].retain(|&value| {
                    scratch[var] = (value as i128, value as i128);
                    let (lo, hi) = atom_range(atom, &scratch);
                    may_hold(atom.op, lo, hi)
                });
                if domains[var].is_empty() {
                    return false;
                }
                changed |= domains[var].len() != before;
            }
        }
        if !changed {
            return true;
        }
    }
}

/// Interval of `Σ terms` over the box `bounds` (domains stay sorted, so first/last are bounds).
fn atom_range(atom: &Atom, bounds: &[(i128, i128)]) -> (i128, i128) {
    let mut lo = 0i128;
    let mut hi = 0i128;
    for term in &atom.terms {
        let (tl, th) = match term.vars.as_slice() {
            [] => (1, 1),
            [a] => bounds[*a],
            [a, b] if a == b => {
                let (l, h) = bounds[*a];
                let (sl, sh) = (l.saturating_mul(l), h.saturating_mul(h));
                if l <= 0 && h >= 0 {
                    (0, sl.max(sh))
                } else {
                    (sl.min(sh), sl.max(sh))
                }
            }
            [a, b] => {
                let (al, ah) = bounds[*a];
                let (bl, bh) = bounds[*b];
                let c = [
                    al.saturating_mul(bl),
                    al.saturating_mul(bh),
                    ah.saturating_mul(bl),
                    ah.saturating_mul(bh),
                ];
                (*c.iter().min().unwrap(), *c.iter().max().unwrap())
            }
            _ => unreachable!("terms have at most two factors"),
        };
        let k = term.coeff as i128;
        let (x, y) = (tl.saturating_mul(k), th.saturating_mul(k));
        lo = lo.saturating_add(x.min(y));
        hi = hi.saturating_add(x.max(y));
    }
    (lo, hi)
}

fn may_hold(op: CmpOp, lo: i128, hi: i128) -> bool {
    match op {
        CmpOp::Eq => lo <= 0 && 0 <= hi,
        CmpOp::Ne => !(lo == 0 && hi == 0),
        CmpOp::Lt => lo < 0,
        CmpOp::Le => lo <= 0,
        CmpOp::Gt => hi > 0,
        CmpOp::Ge => hi >= 0,
    }
}

/// Outcome of [`sample_branch`]: the witnesses found and whether the solution
/// set ran out before `k` were collected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchSample {
    pub witnesses: Vec<Vec<i64>>,
    pub exhausted: bool,
}

pub fn sample_branch(spec: &SpecSet, branch: &str, k: usize, seed: u64) -> Result<BranchSample, SpecError> {
    let branch = spec.branch(branch)?;
    let mut sampler = BranchSampler::new(spec, branch, seed);
    let mut witnesses = Vec::with_capacity(k);
    while witnesses.len() < k {
        match sampler.next_witness() {
            Some(w) => witnesses.push(w),
            None => break,
        }
    }
    if witnesses.is_empty() && sampler.is_exhausted() {
        return Err(SpecError::Unsat(branch.name.clone()));
    }
    Ok(BranchSample {
        exhausted: witnesses.len() < k,
        witnesses,
    })
}

/// Round-robin over branches, one witness per branch per round, until
/// `batch_size` distinct inputs are collected or every branch is exhausted.
pub fn generate_batch(spec: &SpecSet, batch_size: usize, seed: u64) -> Result<CandidateBatch, SpecError> {
    let mut samplers: Vec<BranchSampler> = spec
        .branches
        .iter()
        .enumerate()
        .map(|(i, b)| BranchSampler::new(spec, b, rng::derive(seed, "branch", i as u64)))
        .collect();
    let mut batch = CandidateBatch::default();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut any_sat = false;

    while batch.len() < batch_size && samplers.iter().any(|s| !s.is_exhausted()) {
        for sampler in samplers.iter_mut() {
            if batch.len() >= batch_size {
                break;
            }
            if let Some(w) = sampler.next_witness() {
                any_sat = true;
                if seen.insert(w.clone()) {
                    batch.inputs.push(w);
                    batch.provenance.push(Provenance::Branch(sampler.branch().name.clone()));
                }
            }
        }
    }
    if !any_sat && batch_size > 0 {
        return Err(SpecError::AllBranchesUnsat);
    }
    Ok(batch)
}
