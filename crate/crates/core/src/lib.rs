//! Diagnostics for train/test data splits.
//!
//! Given a tabular dataset and a train/test partition, this crate computes a
//! Mahalanobis-based distance Λ between the two sides, simulates the null
//! distribution of Λ over random re-splits, and runs a one-sided Monte Carlo
//! hypothesis test that classifies the partition as an ordinary random split
//! (accept) or a distributional outlier (reject). When a regression formula
//! is supplied it also associates each simulated split's Λ with the fitted
//! model's normalized AIC on both sides.
//!
//! Modules:
//! - [`dataset`]: CSV ingestion and the immutable [`Dataset`] table.
//! - [`selection`]: column selection, including derived product columns.
//! - [`split`]: train/test index partitions and their CSV format.
//! - [`metric`]: the Λ statistic and its moment/covariance building blocks.
//! - [`splitters`]: random, stratified, adversarial, cluster, CADEX
//!   (Kennard-Stone) and DUPLEX splitting strategies.
//! - [`mc`]: the Monte Carlo hypothesis test.
//! - [`model`]: OLS fitting, normalized AIC, and the Λ/AIC sweep.
//!
//! Simulations are embarrassingly parallel; with the default `parallel`
//! feature they run on rayon workers. Each simulation derives its RNG stream
//! from the master seed and its own index, so results are identical for any
//! worker count, including the sequential fallback built with
//! `--no-default-features`.

pub mod dataset;
pub mod error;
pub mod mc;
pub mod metric;
pub mod model;
pub mod selection;
pub mod split;
pub mod splitters;

pub use dataset::{Column, ColumnData, ColumnKind, CsvOptions, Dataset};
pub use error::{Error, Result};
pub use mc::{decide, run_test, simulate_null, simulate_null_seq, Decision, SimulationResult, TestConfig};
pub use metric::{lambda_metric, moments, pooled_covariance, LambdaStatistic, MomentSummary, SpdFactor};
pub use model::{association_sweep, design_matrix, fit_ols, ModelFit, ModelFormula, SweepFlag, SweepRow};
pub use selection::{select_columns, view, ColumnSelection, SelectedColumn};
pub use split::SplitIndices;
pub use splitters::{
    adversarial_split, cadex_split, cluster_split, duplex_split, random_split, stratified_split,
    SplitSpec, SplitStrategy,
};
