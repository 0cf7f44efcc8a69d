use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::schema::CovariateSchema;
use crate::math::Matrix;
use crate::{Error, Result};

/// One subject: raw covariates, observed time in months and the event flag.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubjectRecord {
    pub id: String,
    pub x_raw: Vec<f64>,
    pub time: f64,
    pub event: bool,
}

/// An ordered, validated collection of records sharing one schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    schema: CovariateSchema,
    records: Vec<SubjectRecord>,
}

impl Cohort {
    /// Validates every record against `schema`. Row numbers in errors are 1-based.
    pub fn new(schema: CovariateSchema, records: Vec<SubjectRecord>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            let row = i + 1;
            if !(r.time.is_finite() && r.time >= 0.0) {
                return Err(Error::Record {
                    row,
                    message: format!("time must be finite and non-negative, found {}", r.time),
                });
            }
            schema.validate_values(row, &r.x_raw)?;
        }
        Ok(Self { schema, records })
    }

    pub fn schema(&self) -> &CovariateSchema {
        &self.schema
    }

    pub fn records(&self) -> &[SubjectRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.schema.len()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.time).collect()
    }

    pub fn events(&self) -> Vec<bool> {
        self.records.iter().map(|r| r.event).collect()
    }

    pub fn event_count(&self) -> usize {
        self.records.iter().filter(|r| r.event).count()
    }

    pub fn raw_matrix(&self) -> Matrix {
        let d = self.arity();
        let mut data = Vec::with_capacity(self.len() * d);
        for r in &self.records {
            data.extend_from_slice(&r.x_raw);
        }
        Matrix::from_rows(self.len(), d, data)
    }

    /// Records at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            schema: self.schema.clone(),
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
        }
    }

    /// Copy with follow-up truncated at `horizon`: times above it become `horizon` and censored.
    pub fn censored_at(&self, horizon: f64) -> Self {
        let records = self
            .records
            .iter()
            .map(|r| {
                let mut r = r.clone();
                if r.time > horizon {
                    r.time = horizon;
                    r.event = false;
                }
                r
            })
            .collect();
        Self { schema: self.schema.clone(), records }
    }

    /// Copy with (time, event) reassigned from `outcome_source[i]` for record `i`.
    pub fn with_outcomes_from(&self, outcome_source: &[usize]) -> Self {
        assert_eq!(outcome_source.len(), self.len());
        let records = self
            .records
            .iter()
            .zip(outcome_source)
            .map(|(r, &src)| SubjectRecord {
                time: self.records[src].time,
                event: self.records[src].event,
                ..r.clone()
            })
            .collect();
        Self { schema: self.schema.clone(), records }
    }

    pub(crate) fn require_events(&self, needed: usize) -> Result<()> {
        let found = self.event_count();
        if found < needed {
            Err(Error::InsufficientEvents { needed, found })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::schema::Covariate;

    fn schema() -> CovariateSchema {
        CovariateSchema::new(
            alloc::vec![Covariate::ordinal("M", 1.0, 3.0), Covariate::binary("LVI", 0.3)],
            alloc::vec![],
        )
        .unwrap()
    }

    fn rec(id: &str, m: f64, lvi: f64, time: f64, event: bool) -> SubjectRecord {
        SubjectRecord { id: id.into(), x_raw: alloc::vec![m, lvi], time, event }
    }

    #[test]
    fn rejects_negative_time_with_row() {
        let err = Cohort::new(
            schema(),
            alloc::vec![rec("a", 1.0, 0.0, 3.0, true), rec("b", 1.0, 0.0, -1.0, true)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Record { row: 2, .. }));
    }

    #[test]
    fn censoring_truncates_follow_up() {
        let c = Cohort::new(
            schema(),
            alloc::vec![rec("a", 1.0, 0.0, 30.0, true), rec("b", 2.0, 1.0, 90.0, true)],
        )
        .unwrap();
        let t = c.censored_at(60.0);
        assert_eq!(t.times(), alloc::vec![30.0, 60.0]);
        assert_eq!(t.events(), alloc::vec![true, false]);
    }
}
