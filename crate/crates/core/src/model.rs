//! Ordinary least squares fitting and normalized-AIC model evaluation.
//!
//! A model is described by a formula such as `Rings ~ LongestShell +
//! Diameter + Height` or `price ~ x:y:z + depth`; terms are products of
//! numeric columns with optional integer powers and an intercept is always
//! included. The performance score is the normalized AIC
//! `log(RSS/n) + 2K/n` with K = number of regression coefficients
//! (including the intercept).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::mc::derive_seed;
use crate::metric::lambda_metric;
use crate::selection::{view, ColumnSelection, SelectedColumn};
use crate::split::SplitIndices;
use crate::splitters::random_split;

/// Relative singular-value cutoff below which the design is rank deficient.
const RANK_TOL: f64 = 1e-10;

/// Per-observation RSS below this is treated as an exact fit.
const EXACT_FIT_EPS: f64 = 1e-12;

/// A parsed regression formula: response and product terms.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFormula {
    response: String,
    terms: Vec<SelectedColumn>,
}

impl ModelFormula {
    /// Parses `response ~ term + term + ...`.
    pub fn parse(text: &str) -> Result<Self> {
        let (lhs, rhs) = text
            .split_once('~')
            .ok_or_else(|| Error::InvalidFormula(format!("missing `~` in `{text}`")))?;
        let response = lhs.trim();
        if response.is_empty() {
            return Err(Error::InvalidFormula(format!("empty response in `{text}`")));
        }
        let terms = rhs
            .split('+')
            .map(|t| crate::selection::ColumnSelection::parse_entry(t))
            .collect::<Result<Vec<_>>>()?;
        if terms.is_empty() {
            return Err(Error::InvalidFormula(format!("no terms in `{text}`")));
        }
        for t in &terms {
            if t.factors.len() == 1 && t.factors[0].power == 1 && t.factors[0].column == response {
                return Err(Error::InvalidFormula(format!(
                    "response `{response}` also appears as a term"
                )));
            }
        }
        Ok(ModelFormula {
            response: response.to_string(),
            terms,
        })
    }

    pub fn response(&self) -> &str {
        &self.response
    }

    pub fn terms(&self) -> &[SelectedColumn] {
        &self.terms
    }

    /// Distance-metric columns implied by the formula: the response followed
    /// by each term as a single (possibly derived) column.
    pub fn metric_selection(&self, ds: &Dataset) -> Result<ColumnSelection> {
        let mut entries = vec![SelectedColumn::base(&self.response)];
        entries.extend(self.terms.iter().cloned());
        ColumnSelection::new(ds, entries)
    }
}

impl std::fmt::Display for ModelFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<&str> = self.terms.iter().map(|t| t.label.as_str()).collect();
        write!(f, "{} ~ {}", self.response, terms.join(" + "))
    }
}

/// Design matrix over the given rows: a column of ones, then one column per
/// term evaluated row-wise.
pub fn design_matrix(ds: &Dataset, formula: &ModelFormula, rows: &[usize]) -> Result<DMatrix<f64>> {
    let sel = ColumnSelection::new(ds, formula.terms.to_vec())?;
    let terms = view(ds, &sel, rows)?;
    let mut out = DMatrix::<f64>::from_element(rows.len(), terms.ncols() + 1, 1.0);
    out.view_mut((0, 1), terms.shape()).copy_from(&terms);
    Ok(out)
}

/// An OLS fit evaluated on both sides of a split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    /// Intercept first, then one coefficient per term.
    pub coefficients: Vec<f64>,
    /// Parameter count K used in the AIC (p + 1).
    pub k_params: usize,
    pub rss_train: f64,
    pub rss_test: f64,
    /// Normalized AIC on each side; −∞ marks an exact fit.
    pub aicn_train: f64,
    pub aicn_test: f64,
    pub r2_train: f64,
    /// Out-of-sample R², centered on the test partition's own response
    /// mean; may be negative.
    pub r2_test: f64,
}

/// Normalized AIC: `log(RSS/n) + 2K/n`, with a −∞ sentinel for exact fits.
pub fn normalized_aic(rss: f64, n: usize, k: usize) -> f64 {
    if rss <= EXACT_FIT_EPS * n as f64 {
        f64::NEG_INFINITY
    } else {
        (rss / n as f64).ln() + 2.0 * k as f64 / n as f64
    }
}

fn rss_of(design: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    let resid = y - design * beta;
    resid.norm_squared()
}

fn r_squared(rss: f64, y: &DVector<f64>) -> f64 {
    let mean = y.sum() / y.len() as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if tss <= 0.0 {
        if rss <= EXACT_FIT_EPS {
            return 1.0;
        }
        return f64::NEG_INFINITY;
    }
    1.0 - rss / tss
}

/// Fits the formula on the train rows by SVD least squares and evaluates
/// RSS, R² and normalized AIC on both partitions.
pub fn fit_ols(ds: &Dataset, formula: &ModelFormula, split: &SplitIndices) -> Result<ModelFit> {
    if split.n_rows() != ds.n_rows() {
        return Err(Error::InvalidSplit(format!(
            "split covers {} rows but the dataset has {}",
            split.n_rows(),
            ds.n_rows()
        )));
    }
    let y_all = ds.numeric_column(formula.response())?;

    let x_train = design_matrix(ds, formula, split.train())?;
    let y_train = DVector::from_iterator(
        split.train().len(),
        split.train().iter().map(|&i| y_all[i]),
    );
    let k = x_train.ncols();
    if x_train.nrows() < k {
        return Err(Error::TooFewRows {
            needed: k,
            got: x_train.nrows(),
        });
    }

    let svd = x_train.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax <= 0.0 || smin <= RANK_TOL * smax {
        return Err(Error::RankDeficient);
    }
    let beta = svd
        .solve(&y_train, 0.0)
        .map_err(|_| Error::RankDeficient)?
        .column(0)
        .into_owned();

    let x_test = design_matrix(ds, formula, split.test())?;
    let y_test = DVector::from_iterator(split.test().len(), split.test().iter().map(|&i| y_all[i]));

    let rss_train = rss_of(&x_train, &y_train, &beta);
    let rss_test = rss_of(&x_test, &y_test, &beta);
    let n_train = y_train.len();
    let n_test = y_test.len();

    let aicn_train = normalized_aic(rss_train, n_train, k);
    if aicn_train == f64::NEG_INFINITY {
        log::warn!("train RSS below exact-fit threshold; normalized AIC reported as -inf");
    }

    Ok(ModelFit {
        coefficients: beta.iter().copied().collect(),
        k_params: k,
        rss_train,
        rss_test,
        aicn_train,
        aicn_test: normalized_aic(rss_test, n_test, k),
        r2_train: r_squared(rss_train, &y_train).clamp(0.0, 1.0),
        r2_test: 1.0 - rss_test / {
            let mean = y_test.sum() / n_test as f64;
            let tss: f64 = y_test.iter().map(|v| (v - mean).powi(2)).sum();
            if tss <= 0.0 {
                f64::INFINITY
            } else {
                tss
            }
        },
    })
}

/// Outcome flag for one sweep simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFlag {
    Ok,
    MetricError,
    FitError,
}

impl std::fmt::Display for SweepFlag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepFlag::Ok => write!(f, "ok"),
            SweepFlag::MetricError => write!(f, "metric_error"),
            SweepFlag::FitError => write!(f, "fit_error"),
        }
    }
}

/// One row of the (Λ, AIC_N) association sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// 1-based simulation index; also the seed-derivation index.
    pub sim_index: usize,
    pub lambda: Option<f64>,
    pub aicn_train: Option<f64>,
    pub aicn_test: Option<f64>,
    pub flag: SweepFlag,
}

/// Repeatedly re-splits the dataset, computing Λ and the train/test
/// normalized AIC per simulation. Per-simulation failures are emitted as
/// flagged rows rather than aborting the sweep. Deterministic given
/// `master_seed`; simulations may run on parallel workers.
pub fn association_sweep(
    ds: &Dataset,
    sel: &ColumnSelection,
    formula: &ModelFormula,
    fraction: f64,
    n_sims: usize,
    master_seed: u64,
) -> Result<Vec<SweepRow>> {
    let all: Vec<usize> = (0..ds.n_rows()).collect();
    let matrix = view(ds, sel, &all)?;

    let run = |j: usize| -> SweepRow {
        let sim_index = j + 1;
        let seed = derive_seed(master_seed, sim_index as u64);
        let split = match random_split(ds.n_rows(), fraction, seed) {
            Ok(s) => s,
            Err(_) => {
                return SweepRow {
                    sim_index,
                    lambda: None,
                    aicn_train: None,
                    aicn_test: None,
                    flag: SweepFlag::MetricError,
                }
            }
        };
        let gather = |rows: &[usize]| {
            DMatrix::from_fn(rows.len(), matrix.ncols(), |i, c| matrix[(rows[i], c)])
        };
        let lambda = lambda_metric(&gather(split.train()), &gather(split.test()))
            .ok()
            .map(|s| s.lambda);
        let fit = fit_ols(ds, formula, &split).ok();
        let flag = match (&lambda, &fit) {
            (Some(_), Some(_)) => SweepFlag::Ok,
            (None, _) => SweepFlag::MetricError,
            (_, None) => SweepFlag::FitError,
        };
        SweepRow {
            sim_index,
            lambda,
            aicn_train: fit.as_ref().map(|f| f.aicn_train),
            aicn_test: fit.as_ref().map(|f| f.aicn_test),
            flag,
        }
    };

    #[cfg(feature = "parallel")]
    let rows: Vec<SweepRow> = {
        use rayon::prelude::*;
        (0..n_sims).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<SweepRow> = (0..n_sims).map(run).collect();

    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linear_ds(n: usize, seed: u64, noise: f64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 10.0).collect();
        let z: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 3.0).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 2.0 * x[i] - 1.5 * z[i] + 0.5 + noise * (rng.random::<f64>() - 0.5))
            .collect();
        Dataset::from_numeric("lin", &["y", "x", "z"], vec![y, x, z]).unwrap()
    }

    #[test]
    fn formula_parsing() {
        let f = ModelFormula::parse("y ~ a + b:c + d^2").unwrap();
        assert_eq!(f.response(), "y");
        let labels: Vec<&str> = f.terms().iter().map(|t| t.label.as_str()).collect();
        assert_eq!(labels, vec!["a", "b:c", "d^2"]);
        assert!(ModelFormula::parse("y ~ ").is_err());
        assert!(ModelFormula::parse("y + a").is_err());
        assert!(ModelFormula::parse("y ~ y + a").is_err());
        assert!(ModelFormula::parse("y ~ a^0").is_err());
    }

    #[test]
    fn design_matrix_examples() {
        let ds = Dataset::from_numeric(
            "d",
            &["y", "a", "x", "z", "w"],
            vec![
                vec![0.0, 0.0],
                vec![1.0, 2.0],
                vec![2.0, 2.0],
                vec![3.0, 3.0],
                vec![4.0, 4.0],
            ],
        )
        .unwrap();
        let f = ModelFormula::parse("y ~ a").unwrap();
        let m = design_matrix(&ds, &f, &[0, 1]).unwrap();
        assert_eq!(m, nalgebra::dmatrix![1.0, 1.0; 1.0, 2.0]);

        let f = ModelFormula::parse("y ~ x:z:w").unwrap();
        let m = design_matrix(&ds, &f, &[0]).unwrap();
        assert_eq!(m[(0, 1)], 2.0 * 3.0 * 4.0);

        let f = ModelFormula::parse("y ~ z^2").unwrap();
        let m = design_matrix(&ds, &f, &[1]).unwrap();
        assert_eq!(m[(0, 1)], 9.0);
    }

    #[test]
    fn exact_fit_recovers_coefficients() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let ds = Dataset::from_numeric("e", &["y", "x"], vec![y, x]).unwrap();
        let f = ModelFormula::parse("y ~ x").unwrap();
        let split = SplitIndices::new((0..15).collect(), (15..20).collect()).unwrap();
        let fit = fit_ols(&ds, &f, &split).unwrap();
        assert!(fit.coefficients[0].abs() < 1e-9);
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-9);
        assert!(fit.rss_train < 1e-12);
        assert_eq!(fit.r2_train, 1.0);
        assert_eq!(fit.aicn_train, f64::NEG_INFINITY);
    }

    #[test]
    fn normalized_aic_formula() {
        // RSS = n gives log(1) = 0, leaving exactly 2K/n
        let n = 50;
        assert!((normalized_aic(n as f64, n, 2) - 4.0 / 50.0).abs() < 1e-15);
        assert_eq!(normalized_aic(0.0, 10, 2), f64::NEG_INFINITY);
    }

    #[test]
    fn coefficients_match_normal_equations_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let n = rng.random_range(10..50);
            let ds = linear_ds(n, rng.random(), 1.0);
            let f = ModelFormula::parse("y ~ x + z").unwrap();
            let k = (n as f64 * 0.7) as usize;
            let split = SplitIndices::new((0..k).collect(), (k..n).collect()).unwrap();
            let fit = fit_ols(&ds, &f, &split).unwrap();

            // normal equations: (X'X) beta = X'y via Gaussian elimination
            let x = design_matrix(&ds, &f, split.train()).unwrap();
            let y = DVector::from_iterator(
                k,
                split.train().iter().map(|&i| ds.numeric_column("y").unwrap()[i]),
            );
            let xtx = x.transpose() * &x;
            let xty = x.transpose() * &y;
            let beta = xtx.lu().solve(&xty).unwrap();
            for j in 0..3 {
                assert!(
                    (fit.coefficients[j] - beta[j]).abs() < 1e-8,
                    "coef {j}: {} vs {}",
                    fit.coefficients[j],
                    beta[j]
                );
            }
        }
    }

    #[test]
    fn residuals_orthogonal_to_design() {
        let ds = linear_ds(60, 3, 2.0);
        let f = ModelFormula::parse("y ~ x + z").unwrap();
        let split = SplitIndices::new((0..45).collect(), (45..60).collect()).unwrap();
        let fit = fit_ols(&ds, &f, &split).unwrap();
        let x = design_matrix(&ds, &f, split.train()).unwrap();
        let y = DVector::from_iterator(
            45,
            split.train().iter().map(|&i| ds.numeric_column("y").unwrap()[i]),
        );
        let beta = DVector::from_vec(fit.coefficients.clone());
        let resid = &y - &x * &beta;
        let scale = y.norm();
        for j in 0..x.ncols() {
            let dot: f64 = x.column(j).dot(&resid);
            assert!(dot.abs() / scale < 1e-8, "column {j} dot {dot}");
        }
    }

    #[test]
    fn irrelevant_term_never_increases_train_rss() {
        let ds = linear_ds(80, 4, 3.0);
        let split = SplitIndices::new((0..60).collect(), (60..80).collect()).unwrap();
        let base = fit_ols(&ds, &ModelFormula::parse("y ~ x").unwrap(), &split).unwrap();
        let extended = fit_ols(&ds, &ModelFormula::parse("y ~ x + z").unwrap(), &split).unwrap();
        assert!(extended.rss_train <= base.rss_train + 1e-9);
        // the AIC difference decomposes into the log term plus 2/n for the
        // extra coefficient
        let n = 60.0;
        let want = (extended.rss_train / base.rss_train).ln() + 2.0 / n;
        assert!((extended.aicn_train - base.aicn_train - want).abs() < 1e-12);
    }

    #[test]
    fn collinear_design_is_rejected() {
        let x: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let y: Vec<f64> = x.iter().map(|v| v + 1.0).collect();
        let ds = Dataset::from_numeric("c", &["y", "a", "b"], vec![y, x, x2]).unwrap();
        let f = ModelFormula::parse("y ~ a + b").unwrap();
        let split = SplitIndices::new((0..20).collect(), (20..30).collect()).unwrap();
        assert!(matches!(fit_ols(&ds, &f, &split), Err(Error::RankDeficient)));
    }

    #[test]
    fn aicn_invariant_to_row_order() {
        let ds = linear_ds(40, 6, 2.0);
        let f = ModelFormula::parse("y ~ x + z").unwrap();
        let a = SplitIndices::new((0..30).collect(), (30..40).collect()).unwrap();
        let mut train_rev: Vec<usize> = (0..30).rev().collect();
        train_rev.sort_unstable(); // SplitIndices sorts anyway; same split
        let b = SplitIndices::new(train_rev, (30..40).collect()).unwrap();
        assert_eq!(
            fit_ols(&ds, &f, &a).unwrap().aicn_train,
            fit_ols(&ds, &f, &b).unwrap().aicn_train
        );
    }

    #[test]
    fn sweep_basics() {
        let ds = linear_ds(60, 7, 2.0);
        let f = ModelFormula::parse("y ~ x + z").unwrap();
        let sel = f.metric_selection(&ds).unwrap();
        assert_eq!(sel.labels(), vec!["y", "x", "z"]);
        let empty = association_sweep(&ds, &sel, &f, 0.7, 0, 1).unwrap();
        assert!(empty.is_empty());
        let rows = association_sweep(&ds, &sel, &f, 0.7, 25, 1).unwrap();
        assert_eq!(rows.len(), 25);
        assert!(rows.iter().all(|r| r.flag == SweepFlag::Ok));
        assert_eq!(rows[0].sim_index, 1);
        let again = association_sweep(&ds, &sel, &f, 0.7, 25, 1).unwrap();
        assert_eq!(rows, again);
    }

    #[test]
    fn sweep_flags_failures_instead_of_aborting() {
        // constant regressor makes every fit rank deficient
        let n = 40;
        let y: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let x: Vec<f64> = (0..n).map(|i| i as f64 * 0.5).collect();
        let c: Vec<f64> = vec![3.0; n];
        let ds = Dataset::from_numeric("k", &["y", "x", "c"], vec![y, x, c]).unwrap();
        let f = ModelFormula::parse("y ~ x + c").unwrap();
        let sel = ColumnSelection::new(
            &ds,
            vec![SelectedColumn::base("y"), SelectedColumn::base("x")],
        )
        .unwrap();
        let rows = association_sweep(&ds, &sel, &f, 0.5, 10, 2).unwrap();
        assert_eq!(rows.len(), 10);
        assert!(rows.iter().all(|r| r.flag == SweepFlag::FitError));
        assert!(rows.iter().all(|r| r.lambda.is_some()));
    }
}
