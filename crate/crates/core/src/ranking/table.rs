//! Class × attribute-value count tables.

use crate::error::{Error, Result};

/// `counts[i][j]` = instances of class `i` taking attribute value `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self> {
        let Some(first) = counts.first() else {
            return Err(Error::Domain("contingency table has no classes".into()));
        };
        let v = first.len();
        if v == 0 || counts.iter().any(|r| r.len() != v) {
            return Err(Error::Domain("contingency table rows must be non-empty and equally long".into()));
        }
        Ok(Self { counts })
    }

    /// Tabulate paired (class, value) indices.
    pub fn from_pairs(classes: &[usize], values: &[usize], n_classes: usize, n_values: usize) -> Result<Self> {
        if classes.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} class labels for {} attribute values",
                classes.len(),
                values.len()
            )));
        }
        let mut counts = vec![vec![0u64; n_values.max(1)]; n_classes.max(1)];
        for (&c, &v) in classes.iter().zip(values) {
            if c >= n_classes || v >= n_values {
                return Err(Error::InvalidInput(format!("pair ({c}, {v}) outside {n_classes}×{n_values}")));
            }
            counts[c][v] += 1;
        }
        Self::new(counts)
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn n_values(&self) -> usize {
        self.counts[0].len()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i][j]
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    /// n_i.
    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    /// n_.j
    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.n_values()).map(|j| self.counts.iter().map(|r| r[j]).sum()).collect()
    }

    /// n_..
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        self.counts.iter().map(|r| r[j]).collect()
    }
}
