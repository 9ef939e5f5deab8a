//! Train/test index partitions and their CSV interchange format.

use std::path::Path;

use crate::error::{Error, Result};

/// A disjoint, exhaustive train/test partition of row indices `0..n`.
///
/// Both index lists are kept sorted; `fraction` is `|train| / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitIndices {
    train: Vec<usize>,
    test: Vec<usize>,
    fraction: f64,
}

impl SplitIndices {
    /// Validates and normalizes a partition. Index lists may arrive in any
    /// order; together they must cover `0..n` exactly once, both non-empty.
    pub fn new(mut train: Vec<usize>, mut test: Vec<usize>) -> Result<Self> {
        if train.is_empty() || test.is_empty() {
            return Err(Error::InvalidSplit("both partitions must be non-empty".into()));
        }
        train.sort_unstable();
        test.sort_unstable();
        let n = train.len() + test.len();
        let mut seen = vec![false; n];
        for &i in train.iter().chain(test.iter()) {
            if i >= n {
                return Err(Error::InvalidSplit(format!(
                    "index {i} out of range for {n} rows"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidSplit(format!("index {i} appears twice")));
            }
            seen[i] = true;
        }
        let fraction = train.len() as f64 / n as f64;
        Ok(SplitIndices {
            train,
            test,
            fraction,
        })
    }

    pub fn train(&self) -> &[usize] {
        &self.train
    }

    pub fn test(&self) -> &[usize] {
        &self.test
    }

    pub fn n_rows(&self) -> usize {
        self.train.len() + self.test.len()
    }

    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    /// Writes the two-column interchange CSV (`row_index,partition`).
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path.as_ref())?;
        w.write_record(["row_index", "partition"])?;
        let mut ti = 0usize;
        for i in 0..self.n_rows() {
            let part = if ti < self.train.len() && self.train[ti] == i {
                ti += 1;
                "train"
            } else {
                "test"
            };
            w.write_record([i.to_string().as_str(), part])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the interchange CSV and validates it against a row count.
    pub fn read_csv(path: impl AsRef<Path>, n_rows: usize) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path.as_ref())?;
        let mut train = Vec::new();
        let mut test = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::InvalidSplit(format!(
                    "expected 2 fields per row, got {}",
                    rec.len()
                )));
            }
            let idx: usize = rec[0].trim().parse().map_err(|_| {
                Error::InvalidSplit(format!("bad row index `{}`", rec[0].trim()))
            })?;
            match rec[1].trim() {
                "train" => train.push(idx),
                "test" => test.push(idx),
                other => {
                    return Err(Error::InvalidSplit(format!(
                        "partition must be `train` or `test`, got `{other}`"
                    )))
                }
            }
        }
        let split = SplitIndices::new(train, test)?;
        if split.n_rows() != n_rows {
            return Err(Error::InvalidSplit(format!(
                "split covers {} rows but the dataset has {n_rows}",
                split.n_rows()
            )));
        }
        Ok(split)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_validation() {
        assert!(SplitIndices::new(vec![0, 2], vec![1]).is_ok());
        assert!(SplitIndices::new(vec![], vec![0, 1]).is_err());
        assert!(SplitIndices::new(vec![0, 0], vec![1]).is_err());
        assert!(SplitIndices::new(vec![0, 3], vec![1]).is_err()); // gap at 2
        assert!(SplitIndices::new(vec![0, 1], vec![1]).is_err()); // overlap
    }

    #[test]
    fn fraction_is_train_share() {
        let s = SplitIndices::new(vec![0, 1, 2], vec![3, 4]).unwrap();
        assert_eq!(s.fraction(), 0.6);
    }

    #[test]
    fn csv_round_trip() {
        let s = SplitIndices::new(vec![1, 3, 4], vec![0, 2]).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        s.write_csv(f.path()).unwrap();
        let back = SplitIndices::read_csv(f.path(), 5).unwrap();
        assert_eq!(back, s);
        assert!(SplitIndices::read_csv(f.path(), 6).is_err());
    }
}
