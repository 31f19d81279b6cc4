use std::collections::HashSet;

use proptest::prelude::*;

use elbt_core::diversity::{mad_diversity, select_max_utility, vote_diversity, UtilityScore};
use elbt_core::specgen::Provenance;

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

proptest! {
    #[test]
    fn vote_zero_iff_unanimous(preds in prop::collection::vec(0u8..3, 2..12), combined in 0u8..3) {
        let d = vote_diversity(&preds, &combined).unwrap();
        prop_assert_eq!(d == 0.0, preds.iter().all(|p| *p == combined));
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn mad_translation_invariant(preds in prop::collection::vec(-1e3f64..1e3, 2..12), k in -1e3f64..1e3) {
        let shifted: Vec<f64> = preds.iter().map(|p| p + k).collect();
        let (a, b) = (mad_diversity(&preds).unwrap(), mad_diversity(&shifted).unwrap());
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn mad_absolutely_homogeneous(preds in prop::collection::vec(-1e3f64..1e3, 2..12), k in -10f64..10.0) {
        let scaled: Vec<f64> = preds.iter().map(|p| p * k).collect();
        let (a, b) = (mad_diversity(&preds).unwrap(), mad_diversity(&scaled).unwrap());
        prop_assert!((a * k.abs() - b).abs() < 1e-9, "{} vs {}", a * k.abs(), b);
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn selection_is_an_argmax(
        ds in prop::collection::vec(prop::sample::select(vec![0.0, 0.1, 0.25, 0.5, 1.0]), 1..25),
        excluded in prop::collection::hash_set(0usize..25, 0..5),
        seed in any::<u64>(),
    ) {
        let s = scores(&ds);
        let exclude: HashSet<Vec<i64>> = excluded.iter().map(|&i| vec![i as i64]).collect();
        let eligible: Vec<usize> = (0..ds.len()).filter(|i| !excluded.contains(i)).collect();
        match select_max_utility(&s, &exclude, seed) {
            Ok(i) => {
                prop_assert!(!excluded.contains(&i));
                let max = eligible.iter().map(|&j| ds[j]).fold(f64::MIN, f64::max);
                prop_assert_eq!(ds[i], max);
            }
            Err(_) => prop_assert!(eligible.is_empty()),
        }
    }
}

#[test]
fn tie_never_picks_a_third_candidate() {
    let s = scores(&[0.3, 0.9, 0.1, 0.9]);
    let mut picked = HashSet::new();
    for seed in 0..100 {
        picked.insert(select_max_utility(&s, &HashSet::new(), seed).unwrap());
    }
    assert_eq!(picked, [1, 3].into_iter().collect());
}
