//! Sampled scalar observables with provenance notes.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A rectangular table: one time column plus named observables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub time_label: String,
    columns: Vec<String>,
    times: Vec<f64>,
    rows: Vec<Vec<f64>>,
    /// Free-form provenance: parameters, conventions, approximations used.
    pub metadata: BTreeMap<String, String>,
}

impl TimeSeries {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            time_label: "t".into(),
            columns: columns.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn with_time_label(mut self, label: &str) -> Self {
        self.time_label = label.into();
        self
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.into(), value.to_string());
    }

    pub fn push(&mut self, t: f64, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Dimension { expected: self.columns.len(), got: row.len() });
        }
        self.times.push(t);
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}
