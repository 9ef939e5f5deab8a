//! Column selection, including derived product/power columns.
//!
//! A selection entry is a product of numeric base columns with integer
//! powers. The text syntax accepted by [`ColumnSelection::parse_entry`] is
//! `a` for a plain column, `a:b` (or `a:b:c`, ...) for a row-wise product and
//! `a^k` for the k-th power; the forms combine, e.g. `a:b^2`.

use nalgebra::DMatrix;

use crate::dataset::{ColumnKind, Dataset};
use crate::error::{Error, Result};

/// One factor of a selected column: a base column raised to a power >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub column: String,
    pub power: u32,
}

/// A selected column: either a base column or a derived product column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectedColumn {
    /// Display label; the expression the entry was parsed from.
    pub label: String,
    pub factors: Vec<Factor>,
}

impl SelectedColumn {
    pub fn base(name: &str) -> Self {
        SelectedColumn {
            label: name.to_string(),
            factors: vec![Factor {
                column: name.to_string(),
                power: 1,
            }],
        }
    }

    /// Evaluates the entry for one row given the dataset.
    fn eval(&self, ds: &Dataset, columns: &[&[f64]], row: usize) -> f64 {
        let _ = ds;
        let mut v = 1.0;
        for (f, col) in self.factors.iter().zip(columns) {
            v *= col[row].powi(f.power as i32);
        }
        v
    }
}

/// Ordered set of (possibly derived) numeric columns entering the distance
/// metric or a design matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSelection {
    entries: Vec<SelectedColumn>,
}

impl ColumnSelection {
    /// Parses one selection entry (`a`, `a:b`, `a^2`, `a:b^2`, ...).
    pub fn parse_entry(expr: &str) -> Result<SelectedColumn> {
        let expr = expr.trim();
        if expr.is_empty() {
            return Err(Error::InvalidFormula("empty column expression".into()));
        }
        let mut factors = Vec::new();
        for part in expr.split(':') {
            let part = part.trim();
            let (name, power) = match part.split_once('^') {
                Some((n, k)) => {
                    let power: u32 = k.trim().parse().map_err(|_| {
                        Error::InvalidFormula(format!("bad power `{k}` in `{expr}`"))
                    })?;
                    if power == 0 {
                        return Err(Error::InvalidFormula(format!(
                            "power must be >= 1 in `{expr}`"
                        )));
                    }
                    (n.trim(), power)
                }
                None => (part, 1),
            };
            if name.is_empty() {
                return Err(Error::InvalidFormula(format!(
                    "empty column name in `{expr}`"
                )));
            }
            factors.push(Factor {
                column: name.to_string(),
                power,
            });
        }
        Ok(SelectedColumn {
            label: expr.to_string(),
            factors,
        })
    }

    /// Builds a selection from parsed entries, validating every base column
    /// against the dataset (must exist and be numeric).
    pub fn new(ds: &Dataset, entries: Vec<SelectedColumn>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidConfig("column selection is empty".into()));
        }
        for e in &entries {
            for f in &e.factors {
                let col = ds.column(&f.column)?;
                if col.kind() != ColumnKind::Numeric {
                    return Err(Error::ColumnNotNumeric(f.column.clone()));
                }
            }
        }
        Ok(ColumnSelection { entries })
    }

    pub fn entries(&self) -> &[SelectedColumn] {
        &self.entries
    }

    pub fn labels(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.label.as_str()).collect()
    }

    /// Number of selected columns (the metric dimension d).
    pub fn dim(&self) -> usize {
        self.entries.len()
    }
}

/// Selects columns for the distance metric.
///
/// With `names` omitted, all numeric columns in dataset order; categorical
/// columns are excluded with a logged warning. With `names` given, the named
/// (possibly derived) columns in the given order.
pub fn select_columns(ds: &Dataset, names: Option<&[String]>) -> Result<ColumnSelection> {
    match names {
        None => {
            let excluded: Vec<&str> = ds
                .columns()
                .iter()
                .filter(|c| c.kind() == ColumnKind::Categorical)
                .map(|c| c.name.as_str())
                .collect();
            if !excluded.is_empty() {
                log::warn!(
                    "excluding categorical column(s) from the distance metric: {}",
                    excluded.join(", ")
                );
            }
            let entries: Vec<SelectedColumn> = ds
                .numeric_column_names()
                .iter()
                .map(|n| SelectedColumn::base(n))
                .collect();
            ColumnSelection::new(ds, entries)
        }
        Some(names) => {
            let entries = names
                .iter()
                .map(|n| ColumnSelection::parse_entry(n))
                .collect::<Result<Vec<_>>>()?;
            ColumnSelection::new(ds, entries)
        }
    }
}

/// Materializes the `|rows| x d` matrix of the selected columns over the
/// given rows, in selection order. The dataset is not modified.
pub fn view(ds: &Dataset, sel: &ColumnSelection, rows: &[usize]) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(Error::EmptyRowSelection);
    }
    let n = ds.n_rows();
    if let Some(&bad) = rows.iter().find(|&&r| r >= n) {
        return Err(Error::RowIndexOutOfRange {
            index: bad,
            rows: n,
        });
    }
    let mut out = DMatrix::<f64>::zeros(rows.len(), sel.dim());
    for (j, entry) in sel.entries().iter().enumerate() {
        let cols: Vec<&[f64]> = entry
            .factors
            .iter()
            .map(|f| ds.numeric_column(&f.column))
            .collect::<Result<_>>()?;
        for (i, &r) in rows.iter().enumerate() {
            out[(i, j)] = entry.eval(ds, &cols, r);
        }
    }
    Ok(out)
}
