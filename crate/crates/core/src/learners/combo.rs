//! Named ensemble combinations, e.g. `bc-dtc` (bagging over decision trees)
//! or `abr-rfr` (AdaBoost.R2 over random forests).

use std::fmt;

use super::{BaseLearnerKind, EnsembleSpec, LogisticParams, Method, NESTED_FOREST_SIZE};

pub const CLASSIFICATION_COMBOS: [&str; 9] = [
    "bc-dtc", "bc-lor", "bc-rfc", "rfc", "etc", "abc-dtc", "abc-lor", "abc-rfc", "gbc",
];
pub const REGRESSION_COMBOS: [&str; 9] = [
    "br-dtr", "br-lir", "br-rfr", "rfr", "etr", "abr-dtr", "abr-lir", "abr-rfr", "gbr",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Bagging,
    Boosting,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Bagging => "bagging",
            Family::Boosting => "boosting",
        })
    }
}

/// Explicitly chosen base estimator of a bagging or AdaBoost combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseEstimator {
    DecisionTree,
    /// Logistic regression for classification, least squares for regression.
    Linear,
    RandomForest,
}

impl BaseEstimator {
    pub fn name(self, classification: bool) -> &'static str {
        match (self, classification) {
            (BaseEstimator::DecisionTree, true) => "dtc",
            (BaseEstimator::DecisionTree, false) => "dtr",
            (BaseEstimator::Linear, true) => "lor",
            (BaseEstimator::Linear, false) => "lir",
            (BaseEstimator::RandomForest, true) => "rfc",
            (BaseEstimator::RandomForest, false) => "rfr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Combo {
    pub code: &'static str,
    pub classification: bool,
    pub method: Method,
    pub family: Family,
    /// `None` for forests and gradient boosting, whose base is fixed.
    pub base: Option<BaseEstimator>,
}

impl Combo {
    pub fn spec(&self) -> EnsembleSpec {
        let base = match self.base {
            None | Some(BaseEstimator::DecisionTree) => BaseLearnerKind::tree(),
            Some(BaseEstimator::Linear) if self.classification => {
                BaseLearnerKind::LogisticRegression(LogisticParams::default())
            }
            Some(BaseEstimator::Linear) => BaseLearnerKind::LinearRegression,
            Some(BaseEstimator::RandomForest) => BaseLearnerKind::Ensemble(Box::new(
                EnsembleSpec::new(Method::RandomForest, BaseLearnerKind::tree()).with_members(NESTED_FOREST_SIZE),
            )),
        };
        EnsembleSpec::new(self.method, base)
    }
}

impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code)
    }
}

pub fn parse_combo(code: &str) -> Option<Combo> {
    let classification = CLASSIFICATION_COMBOS.contains(&code);
    let code: &'static str = CLASSIFICATION_COMBOS
        .iter()
        .chain(REGRESSION_COMBOS.iter())
        .find(|c| **c == code)?;
    let (method, base) = match code.split_once('-') {
        Some((m, b)) => {
            let method = if m.starts_with("ab") {
                Method::AdaBoost
            } else {
                Method::Bagging
            };
            let base = match &b[..2] {
                "dt" => BaseEstimator::DecisionTree,
                "rf" => BaseEstimator::RandomForest,
                _ => BaseEstimator::Linear,
            };
            (method, Some(base))
        }
        None => {
            let method = match &code[..2] {
                "rf" => Method::RandomForest,
                "et" => Method::ExtraTrees,
                _ => Method::GradientBoosting,
            };
            (method, None)
        }
    };
    let family = match method {
        Method::AdaBoost | Method::GradientBoosting => Family::Boosting,
        _ => Family::Bagging,
    };
    Some(Combo {
        code,
        classification,
        method,
        family,
        base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_split_five_four() {
        for set in [CLASSIFICATION_COMBOS, REGRESSION_COMBOS] {
            let combos: Vec<Combo> = set.iter().map(|c| parse_combo(c).unwrap()).collect();
            assert_eq!(combos.iter().filter(|c| c.family == Family::Bagging).count(), 5);
            assert_eq!(combos.iter().filter(|c| c.family == Family::Boosting).count(), 4);
        }
    }

    #[test]
    fn parses_codes() {
        let c = parse_combo("abr-lir").unwrap();
        assert_eq!(
            (c.method, c.base, c.classification),
            (Method::AdaBoost, Some(BaseEstimator::Linear), false)
        );
        assert_eq!(c.spec().base, BaseLearnerKind::LinearRegression);
        let c = parse_combo("bc-rfc").unwrap();
        assert!(c.classification);
        match c.spec().base {
            BaseLearnerKind::Ensemble(inner) => {
                assert_eq!(
                    (inner.method, inner.n_members),
                    (Method::RandomForest, NESTED_FOREST_SIZE)
                )
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_combo("etr").unwrap().method, Method::ExtraTrees);
        assert_eq!(parse_combo("gbc").unwrap().family, Family::Boosting);
        assert!(parse_combo("xyz").is_none());
        assert_eq!(BaseEstimator::Linear.name(true), "lor");
    }
}
