use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CovariateKind {
    Continuous,
    Binary,
}

/// One column of the covariate vector.
///
/// `range`, `integer` and `prevalence` only matter to the synthetic generator; loading and
/// training ignore them.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Covariate {
    pub name: String,
    pub kind: CovariateKind,
    pub range: Option<(f64, f64)>,
    pub integer: bool,
    pub prevalence: Option<f64>,
}

impl Covariate {
    pub fn continuous(name: &str, lo: f64, hi: f64) -> Self {
        Self {
            name: name.to_string(),
            kind: CovariateKind::Continuous,
            range: Some((lo, hi)),
            integer: false,
            prevalence: None,
        }
    }

    /// Integer-valued ordinal drawn uniformly from `lo..=hi`, treated as continuous.
    pub fn ordinal(name: &str, lo: f64, hi: f64) -> Self {
        Self {
            integer: true,
            ..Self::continuous(name, lo, hi)
        }
    }

    pub fn binary(name: &str, prevalence: f64) -> Self {
        Self {
            name: name.to_string(),
            kind: CovariateKind::Binary,
            range: None,
            integer: false,
            prevalence: Some(prevalence),
        }
    }

    /// Sampling range used by the generator; `(0, 1)` for indicators.
    pub fn generator_range(&self) -> (f64, f64) {
        match self.kind {
            CovariateKind::Binary => (0.0, 1.0),
            CovariateKind::Continuous => self.range.unwrap_or((0.0, 1.0)),
        }
    }
}

/// A set of mutually exclusive indicator columns (a pre-expanded one-hot encoding).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OneHotGroup {
    pub name: String,
    /// Column indices into the schema.
    pub members: Vec<usize>,
    /// Probability of each member being the active one. May sum to less than 1, in which
    /// case the remaining mass is the all-zero row.
    pub prevalences: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CovariateSchema {
    covariates: Vec<Covariate>,
    groups: Vec<OneHotGroup>,
}

impl CovariateSchema {
    pub fn new(covariates: Vec<Covariate>, groups: Vec<OneHotGroup>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for c in &covariates {
            if c.name.trim().is_empty() {
                return Err(Error::Schema("covariate names must be non-empty".into()));
            }
            if matches!(c.name.as_str(), "id" | "time" | "event") {
                return Err(Error::Schema(format!("`{}` is a reserved column name", c.name)));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Schema(format!("duplicate covariate `{}`", c.name)));
            }
            if let Some((lo, hi)) = c.range {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(Error::Schema(format!("bad range for `{}`", c.name)));
                }
            }
            if let Some(p) = c.prevalence {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Schema(format!("prevalence of `{}` outside [0, 1]", c.name)));
                }
            }
        }
        let mut grouped = BTreeSet::new();
        for g in &groups {
            if g.members.len() < 2 {
                return Err(Error::Schema(format!("group `{}` needs at least two members", g.name)));
            }
            for &m in &g.members {
                let cov = covariates.get(m).ok_or_else(|| {
                    Error::Schema(format!("group `{}` references column {m}", g.name))
                })?;
                if cov.kind != CovariateKind::Binary {
                    return Err(Error::Schema(format!(
                        "group `{}` member `{}` is not a binary indicator",
                        g.name, cov.name
                    )));
                }
                if !grouped.insert(m) {
                    return Err(Error::Schema(format!("`{}` belongs to two groups", cov.name)));
                }
            }
            if let Some(p) = &g.prevalences {
                let total: f64 = p.iter().sum();
                if p.len() != g.members.len() || p.iter().any(|v| *v < 0.0) || total > 1.0 + 1e-9 {
                    return Err(Error::Schema(format!("bad prevalences for group `{}`", g.name)));
                }
            }
        }
        Ok(Self { covariates, groups })
    }

    pub fn len(&self) -> usize {
        self.covariates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.covariates.is_empty()
    }

    pub fn covariates(&self) -> &[Covariate] {
        &self.covariates
    }

    pub fn groups(&self) -> &[OneHotGroup] {
        &self.groups
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.covariates.iter().map(|c| c.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.covariates.iter().position(|c| c.name == name)
    }

    /// Index of the group containing column `k`, if any.
    pub fn group_of(&self, k: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.members.contains(&k))
    }

    /// Checks one covariate row. `row` is 1-based and only used in messages.
    pub fn validate_values(&self, row: usize, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::Record {
                row,
                message: format!("expected {} covariates, found {}", self.len(), values.len()),
            });
        }
        for (c, &v) in self.covariates.iter().zip(values) {
            if !v.is_finite() {
                return Err(Error::Record { row, message: format!("non-finite `{}`", c.name) });
            }
            if c.kind == CovariateKind::Binary && v != 0.0 && v != 1.0 {
                return Err(Error::Record {
                    row,
                    message: format!("indicator `{}` must be 0 or 1, found {v}", c.name),
                });
            }
        }
        for g in &self.groups {
            let active = g.members.iter().filter(|&&m| values[m] == 1.0).count();
            if active > 1 {
                return Err(Error::Record {
                    row,
                    message: format!("one-hot group `{}` has {active} active indicators", g.name),
                });
            }
        }
        Ok(())
    }

    /// A 23-column layout shaped like a clinicopathological breast cancer panel: 16 clinical
    /// covariates and a 7-level histological type expanded into indicators.
    pub fn clinicopathological() -> Self {
        let mut covariates: Vec<Covariate> = alloc::vec![
            Covariate::binary("multifocality", 0.2),
            Covariate::continuous("size", 0.1, 5.0),
            Covariate::ordinal("grade", 1.0, 3.0),
            Covariate::ordinal("T", 1.0, 3.0),
            Covariate::ordinal("P", 1.0, 3.0),
            Covariate::ordinal("M", 1.0, 3.0),
            Covariate::binary("LVI", 0.25),
            Covariate::binary("DCIS", 0.4),
            Covariate::binary("LCIS", 0.1),
            Covariate::ordinal("positive_nodes", 0.0, 0.0),
            Covariate::continuous("NPI", 2.0, 4.4),
            Covariate::binary("ER", 0.95),
            Covariate::binary("PgR", 0.8),
            Covariate::binary("HER2", 0.0),
            Covariate::binary("menopausal", 0.7),
            Covariate::continuous("age", 30.0, 90.0),
        ];
        let htt = [
            ("HTT1_NST", 0.573),
            ("HTT2_ILC", 0.077),
            ("HTT3_TUB", 0.171),
            ("HTT4_MIXED", 0.102),
            ("HTT5_OTHER", 0.020),
            ("HTT6_MLC", 0.045),
            ("HTT7_META", 0.011),
        ];
        let start = covariates.len();
        let mut prevalences = Vec::new();
        for (name, p) in htt {
            let mut c = Covariate::binary(name, p);
            c.prevalence = None;
            covariates.push(c);
            prevalences.push(p);
        }
        let group = OneHotGroup {
            name: "HTT".to_string(),
            members: (start..start + htt.len()).collect(),
            prevalences: Some(prevalences),
        };
        Self::new(covariates, alloc::vec![group]).expect("built-in schema is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CovariateSchema {
        CovariateSchema::new(
            alloc::vec![
                Covariate::ordinal("M", 1.0, 3.0),
                Covariate::binary("LVI", 0.3),
                Covariate::binary("A", 0.3),
                Covariate::binary("B", 0.3),
            ],
            alloc::vec![OneHotGroup { name: "g".into(), members: alloc::vec![2, 3], prevalences: None }],
        )
        .unwrap()
    }

    #[test]
    fn builtin_schema_has_23_columns() {
        let s = CovariateSchema::clinicopathological();
        assert_eq!(s.len(), 23);
        assert_eq!(s.groups()[0].members.len(), 7);
        assert!(s.index_of("M").is_some());
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = CovariateSchema::new(
            alloc::vec![Covariate::binary("a", 0.5), Covariate::binary("a", 0.5)],
            alloc::vec![],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn group_members_must_be_binary() {
        let err = CovariateSchema::new(
            alloc::vec![Covariate::continuous("a", 0.0, 1.0), Covariate::binary("b", 0.5)],
            alloc::vec![OneHotGroup { name: "g".into(), members: alloc::vec![0, 1], prevalences: None }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn indicator_and_one_hot_validation() {
        let s = small();
        assert!(s.validate_values(1, &[2.0, 1.0, 0.0, 1.0]).is_ok());
        assert!(s.validate_values(1, &[2.0, 0.0, 0.0, 0.0]).is_ok());
        assert_eq!(
            s.validate_values(4, &[2.0, 0.5, 0.0, 0.0]).unwrap_err(),
            Error::Record { row: 4, message: "indicator `LVI` must be 0 or 1, found 0.5".into() }
        );
        assert!(matches!(
            s.validate_values(2, &[2.0, 0.0, 1.0, 1.0]),
            Err(Error::Record { row: 2, .. })
        ));
        assert!(matches!(s.validate_values(2, &[2.0]), Err(Error::Record { .. })));
    }
}
