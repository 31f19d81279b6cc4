//! Committee disagreement as a selection utility.

use std::collections::HashSet;

use rand::seq::SliceRandom;

use crate::learners::{Ensemble, LearnError};
use crate::rng;
use crate::specgen::Provenance;

#[derive(Debug, Clone, PartialEq)]
pub struct UtilityScore {
    pub input: Vec<i64>,
    /// Diversity of the committee on `input`; in `[0, 1]` for classification.
    pub d: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiversityError {
    #[error("diversity needs at least 2 member predictions, got {0}")]
    TooFewMembers(usize),
    #[error("no candidates left after excluding already selected inputs")]
    EmptyAfterExclusion,
    #[error(transparent)]
    Learn(#[from] LearnError),
}

/// Mean absolute deviation of the member predictions from their unweighted mean.
pub fn mad_diversity(preds: &[f64]) -> Result<f64, DiversityError> {
    if preds.len() < 2 {
        return Err(DiversityError::TooFewMembers(preds.len()));
    }
    let n = preds.len() as f64;
    let mean = preds.iter().sum::<f64>() / n;
    Ok(preds.iter().map(|p| (p - mean).abs()).sum::<f64>() / n)
}

/// Fraction of members whose prediction differs from the combined prediction.
pub fn vote_diversity<T: PartialEq>(preds: &[T], combined: &T) -> Result<f64, DiversityError> {
    if preds.len() < 2 {
        return Err(DiversityError::TooFewMembers(preds.len()));
    }
    let disagree = preds.iter().filter(|p| *p != combined).count();
    Ok(disagree as f64 / preds.len() as f64)
}

/// Utility of `input` under `ensemble`: vote diversity against the combined
/// prediction for classifiers, MAD for regressors. A committee of one has
/// no disagreement and scores 0.
pub fn utility(ensemble: &Ensemble, input: &[i64]) -> Result<f64, DiversityError> {
    let members = ensemble.predict_members(input)?;
    if members.len() < 2 {
        return Ok(0.0);
    }
    if ensemble.is_classification() {
        vote_diversity(&members, &ensemble.predict(input)?)
    } else {
        let reals: Vec<f64> = members.iter().map(|p| p.as_real()).collect();
        mad_diversity(&reals)
    }
}

/// Index of a highest-utility candidate not in `exclude`. Ties, including
/// the all-equal case, are broken uniformly at random from `seed`.
pub fn select_max_utility(
    scores: &[UtilityScore],
    exclude: &HashSet<Vec<i64>>,
    seed: u64,
) -> Result<usize, DiversityError> {
    let eligible: Vec<usize> = (0..scores.len())
        .filter(|&i| !exclude.contains(&scores[i].input))
        .collect();
    let max = eligible
        .iter()
        .map(|&i| scores[i].d)
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))))
        .ok_or(DiversityError::EmptyAfterExclusion)?;
    let best: Vec<usize> = eligible.into_iter().filter(|&i| scores[i].d == max).collect();
    Ok(*best.choose(&mut rng::from_seed(seed)).expect("the maximum is attained"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn mad_examples() {
        assert_eq!(mad_diversity(&[2.0, 2.0, 2.0]).unwrap(), 0.0);
        assert!(close(mad_diversity(&[1.0, 2.0, 3.0]).unwrap(), 2.0 / 3.0));
        assert_eq!(mad_diversity(&[0.0, 10.0]).unwrap(), 5.0);
        assert_eq!(mad_diversity(&[1.0]), Err(DiversityError::TooFewMembers(1)));
    }

    #[test]
    fn vote_examples() {
        assert_eq!(vote_diversity(&["A"; 5], &"A").unwrap(), 0.0);
        assert_eq!(vote_diversity(&["A", "A", "A", "B", "B"], &"A").unwrap(), 0.4);
        assert!(close(vote_diversity(&["A", "B", "C"], &"A").unwrap(), 2.0 / 3.0));
        assert_eq!(vote_diversity(&["A"], &"A"), Err(DiversityError::TooFewMembers(1)));
    }

    fn scores(ds: &[f64]) -> Vec<UtilityScore> {
        ds.iter()
            .enumerate()
            .map(|(i, &d)| UtilityScore {
                input: vec![i as i64],
                d,
                provenance: Provenance::Random,
            })
            .collect()
    }

    #[test]
    fn selection() {
        let none = HashSet::new();
        assert_eq!(select_max_utility(&scores(&[0.1, 0.7, 0.3]), &none, 1).unwrap(), 1);
        let tied = scores(&[0.5, 0.2, 0.5]);
        for seed in 0..50 {
            let i = select_max_utility(&tied, &none, seed).unwrap();
            assert!(i == 0 || i == 2);
        }
        let excl: HashSet<Vec<i64>> = [vec![1]].into_iter().collect();
        assert_eq!(select_max_utility(&scores(&[0.1, 0.7, 0.3]), &excl, 1).unwrap(), 2);
        let all: HashSet<Vec<i64>> = [vec![0]].into_iter().collect();
        assert_eq!(
            select_max_utility(&scores(&[0.1]), &all, 1),
            Err(DiversityError::EmptyAfterExclusion)
        );
    }

    #[test]
    fn all_equal_is_uniform_and_reproducible() {
        let flat = scores(&[0.0; 4]);
        let none = HashSet::new();
        let mut seen = [0usize; 4];
        for seed in 0..400 {
            seen[select_max_utility(&flat, &none, seed).unwrap()] += 1;
        }
        assert!(seen.iter().all(|&c| c > 60), "{seen:?}");
        assert_eq!(
            select_max_utility(&flat, &none, 9).unwrap(),
            select_max_utility(&flat, &none, 9).unwrap()
        );
    }
}
