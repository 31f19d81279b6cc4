use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{CandidateBatch, Provenance, SpecSet};
use crate::rng;

/// Uniform i.i.d. vectors over the variable bounds, deduplicated. Branch
/// constraints are ignored. When the whole box holds no more than
/// `batch_size` points, every point is returned in random order.
pub fn random_batch(spec: &SpecSet, batch_size: usize, seed: u64) -> CandidateBatch {
    let mut rng = rng::from_seed(seed);
    let space = spec
        .vars
        .iter()
        .fold(1u128, |acc, v| acc.saturating_mul(v.width() as u128));

    let inputs: Vec<Vec<i64>> = if space <= batch_size as u128 {
        let mut all: Vec<Vec<i64>> = vec![Vec::new()];
        for v in &spec.vars {
            all = all
                .into_iter()
                .flat_map(|prefix| {
                    (v.lo..=v.hi).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        all.shuffle(&mut rng);
        all
    } else {
        let mut seen = HashSet::with_capacity(batch_size);
        let mut out = Vec::with_capacity(batch_size);
        while out.len() < batch_size {
            let v: Vec<i64> = spec.vars.iter().map(|d| rng.gen_range(d.lo..=d.hi)).collect();
            if seen.insert(v.clone()) {
                out.push(v);
            }
        }
        out
    };
    CandidateBatch {
        provenance: vec![Provenance::Random; inputs.len()],
        inputs,
    }
}
