//! Tabular dataset container and CSV ingestion.
//!
//! A [`Dataset`] is an immutable, fully materialized table with a mandatory
//! header. Columns are either numeric (`f64`, all finite) or categorical
//! (level codes). Rows with a missing cell in a numeric column are dropped at
//! load time and counted, so every numeric value downstream is complete.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Kind of a dataset column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnKind::Numeric => write!(f, "numeric"),
            ColumnKind::Categorical => write!(f, "categorical"),
        }
    }
}

/// Storage for one column.
#[derive(Debug, Clone)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Categorical {
        /// Distinct level strings in order of first appearance.
        levels: Vec<String>,
        /// Per-row index into `levels`.
        codes: Vec<u32>,
    },
}

/// A named column plus its values.
#[derive(Debug, Clone)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

impl Column {
    pub fn kind(&self) -> ColumnKind {
        match self.data {
            ColumnData::Numeric(_) => ColumnKind::Numeric,
            ColumnData::Categorical { .. } => ColumnKind::Categorical,
        }
    }

    /// Level string of row `i` for a categorical column.
    pub fn level_of(&self, i: usize) -> Option<&str> {
        match &self.data {
            ColumnData::Categorical { levels, codes } => {
                codes.get(i).map(|&c| levels[c as usize].as_str())
            }
            ColumnData::Numeric(_) => None,
        }
    }
}

/// CSV ingestion options.
#[derive(Debug, Clone)]
pub struct CsvOptions {
    /// Field delimiter; defaults to `,`.
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions { delimiter: b',' }
    }
}

/// Immutable table of named columns over a fixed row count.
///
/// Safe to share across threads; all accessors are read-only.
#[derive(Debug, Clone)]
pub struct Dataset {
    name: String,
    columns: Vec<Column>,
    n_rows: usize,
    /// Rows dropped at load because a numeric cell was missing.
    dropped_rows: usize,
}

impl Dataset {
    /// Builds a dataset from prepared columns. All columns must share one
    /// length of at least 2 and carry unique names.
    pub fn from_columns(name: impl Into<String>, columns: Vec<Column>) -> Result<Self> {
        let n_rows = match columns.first() {
            Some(c) => match &c.data {
                ColumnData::Numeric(v) => v.len(),
                ColumnData::Categorical { codes, .. } => codes.len(),
            },
            None => 0,
        };
        if n_rows < 2 {
            return Err(Error::TooFewRows {
                needed: 2,
                got: n_rows,
            });
        }
        for c in &columns {
            let len = match &c.data {
                ColumnData::Numeric(v) => {
                    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                        return Err(Error::InvalidConfig(format!(
                            "column `{}` contains non-finite value {bad}",
                            c.name
                        )));
                    }
                    v.len()
                }
                ColumnData::Categorical { codes, .. } => codes.len(),
            };
            if len != n_rows {
                return Err(Error::DimensionMismatch {
                    expected: n_rows,
                    got: len,
                });
            }
        }
        let mut seen = std::collections::HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.clone()) {
                return Err(Error::DuplicateHeader(c.name.clone()));
            }
        }
        Ok(Dataset {
            name: name.into(),
            columns,
            n_rows,
            dropped_rows: 0,
        })
    }

    /// Convenience constructor for an all-numeric dataset given columns.
    pub fn from_numeric(
        name: impl Into<String>,
        names: &[&str],
        cols: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let columns = names
            .iter()
            .zip(cols)
            .map(|(n, v)| Column {
                name: (*n).to_string(),
                data: ColumnData::Numeric(v),
            })
            .collect();
        Self::from_columns(name, columns)
    }

    /// Loads a delimited text file with a mandatory header row.
    ///
    /// A column is numeric iff every non-empty cell parses as a finite real
    /// number; otherwise it is categorical. Rows missing a value in a numeric
    /// column are dropped and tallied in [`Dataset::dropped_rows`].
    pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(options.delimiter)
            .has_headers(true)
            .from_path(path)?;

        let headers: Vec<String> = reader
            .headers()?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let mut seen = std::collections::HashSet::new();
        for h in &headers {
            if !seen.insert(h.clone()) {
                return Err(Error::DuplicateHeader(h.clone()));
            }
        }
        let n_cols = headers.len();

        let mut records: Vec<csv::StringRecord> = Vec::new();
        for rec in reader.records() {
            records.push(rec?);
        }

        // A column is numeric iff every non-empty cell parses as a finite real.
        let mut numeric = vec![true; n_cols];
        for rec in &records {
            for (j, cell) in rec.iter().enumerate() {
                let cell = cell.trim();
                if !cell.is_empty() && numeric[j] {
                    match cell.parse::<f64>() {
                        Ok(v) if v.is_finite() => {}
                        _ => numeric[j] = false,
                    }
                }
            }
        }

        // Drop rows with a missing cell in any numeric column.
        let mut kept: Vec<&csv::StringRecord> = Vec::with_capacity(records.len());
        let mut dropped = 0usize;
        for rec in &records {
            let missing = rec
                .iter()
                .enumerate()
                .any(|(j, cell)| numeric[j] && cell.trim().is_empty());
            if missing || rec.len() != n_cols {
                dropped += 1;
            } else {
                kept.push(rec);
            }
        }
        if dropped > 0 {
            log::warn!(
                "{}: dropped {dropped} row(s) with missing numeric cells",
                path.display()
            );
        }
        if kept.len() < 2 {
            return Err(if kept.is_empty() {
                Error::NoUsableRows(dropped)
            } else {
                Error::TooFewRows {
                    needed: 2,
                    got: kept.len(),
                }
            });
        }

        let mut columns = Vec::with_capacity(n_cols);
        for (j, header) in headers.iter().enumerate() {
            let data = if numeric[j] {
                let vals = kept
                    .iter()
                    .map(|rec| rec[j].trim().parse::<f64>().expect("validated numeric cell"))
                    .collect();
                ColumnData::Numeric(vals)
            } else {
                let mut levels: Vec<String> = Vec::new();
                let mut index = std::collections::HashMap::new();
                let mut codes = Vec::with_capacity(kept.len());
                for rec in &kept {
                    let cell = rec[j].trim();
                    let code = *index.entry(cell.to_string()).or_insert_with(|| {
                        levels.push(cell.to_string());
                        (levels.len() - 1) as u32
                    });
                    codes.push(code);
                }
                ColumnData::Categorical { levels, codes }
            };
            columns.push(Column {
                name: header.clone(),
                data,
            });
        }

        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string());
        let mut ds = Dataset::from_columns(name, columns)?;
        ds.dropped_rows = dropped;
        Ok(ds)
    }

    /// Writes the dataset back out as CSV. Numeric values use the shortest
    /// representation that round-trips exactly.
    pub fn write_csv(&self, path: impl AsRef<Path>, options: &CsvOptions) -> Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .delimiter(options.delimiter)
            .from_path(path.as_ref())?;
        writer.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        let mut row = Vec::with_capacity(self.columns.len());
        for i in 0..self.n_rows {
            row.clear();
            for c in &self.columns {
                match &c.data {
                    ColumnData::Numeric(v) => row.push(format!("{}", v[i])),
                    ColumnData::Categorical { levels, codes } => {
                        row.push(levels[codes[i] as usize].clone())
                    }
                }
            }
            writer.write_record(&row)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn dropped_rows(&self) -> usize {
        self.dropped_rows
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// Values of a numeric column.
    pub fn numeric_column(&self, name: &str) -> Result<&[f64]> {
        match &self.column(name)?.data {
            ColumnData::Numeric(v) => Ok(v),
            ColumnData::Categorical { .. } => Err(Error::ColumnNotNumeric(name.to_string())),
        }
    }

    /// Names of all numeric columns, in dataset order.
    pub fn numeric_column_names(&self) -> Vec<&str> {
        self.columns
            .iter()
            .filter(|c| c.kind() == ColumnKind::Numeric)
            .map(|c| c.name.as_str())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn numeric_vs_categorical_inference() {
        // "x" fails the numeric parse, so column b becomes categorical and
        // both rows survive.
        let f = write_tmp("a,b\n1,2\n3,x\n");
        let ds = Dataset::load_csv(f.path(), &CsvOptions::default()).unwrap();
        assert_eq!(ds.n_rows(), 2);
        assert_eq!(ds.column("a").unwrap().kind(), ColumnKind::Numeric);
        assert_eq!(ds.column("b").unwrap().kind(), ColumnKind::Categorical);
        assert_eq!(ds.numeric_column("a").unwrap(), &[1.0, 3.0]);
        assert_eq!(ds.column("b").unwrap().level_of(1), Some("x"));
    }

    #[test]
    fn missing_numeric_cells_drop_rows() {
        let f = write_tmp("a,b\n1,2\n,3\n4,5\n");
        let ds = Dataset::load_csv(f.path(), &CsvOptions::default()).unwrap();
        assert_eq!(ds.n_rows(), 2);
        assert_eq!(ds.dropped_rows(), 1);
        assert_eq!(ds.numeric_column("a").unwrap(), &[1.0, 4.0]);
    }

    #[test]
    fn duplicate_headers_rejected() {
        let f = write_tmp("a,a\n1,2\n3,4\n");
        assert!(matches!(
            Dataset::load_csv(f.path(), &CsvOptions::default()),
            Err(Error::DuplicateHeader(_))
        ));
    }

    #[test]
    fn too_few_rows_rejected() {
        let f = write_tmp("a,b\n1,2\n");
        assert!(matches!(
            Dataset::load_csv(f.path(), &CsvOptions::default()),
            Err(Error::TooFewRows { .. })
        ));
        let f = write_tmp("a,b\n");
        assert!(matches!(
            Dataset::load_csv(f.path(), &CsvOptions::default()),
            Err(Error::NoUsableRows(0))
        ));
    }

    #[test]
    fn non_finite_cells_make_column_categorical() {
        let f = write_tmp("a,b\n1,1e999\n2,NaN\n");
        let ds = Dataset::load_csv(f.path(), &CsvOptions::default()).unwrap();
        assert_eq!(ds.column("b").unwrap().kind(), ColumnKind::Categorical);
    }

    #[test]
    fn alternate_delimiter() {
        let f = write_tmp("a;b\n1;2\n3;4\n");
        let ds = Dataset::load_csv(f.path(), &CsvOptions { delimiter: b';' }).unwrap();
        assert_eq!(ds.numeric_column("b").unwrap(), &[2.0, 4.0]);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let a: Vec<f64> = (0..40).map(|_| rng.random::<f64>() * 2e3 - 1e3).collect();
        let b: Vec<f64> = (0..40).map(|_| rng.random::<f64>() * 1e-6).collect();
        let c: Vec<f64> = vec![0.1, -0.0, 1e-17, 12345.6789, f64::MIN_POSITIVE]
            .into_iter()
            .cycle()
            .take(40)
            .collect();
        let ds =
            Dataset::from_numeric("rt", &["a", "b", "c"], vec![a.clone(), b.clone(), c.clone()])
                .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        ds.write_csv(f.path(), &CsvOptions::default()).unwrap();
        let ds2 = Dataset::load_csv(f.path(), &CsvOptions::default()).unwrap();
        assert_eq!(ds2.numeric_column("a").unwrap(), &a[..]);
        assert_eq!(ds2.numeric_column("b").unwrap(), &b[..]);
        assert_eq!(ds2.numeric_column("c").unwrap(), &c[..]);
    }
}
