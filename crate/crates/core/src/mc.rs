//! Monte Carlo hypothesis test for split quality.
//!
//! The null hypothesis is that the observed train/test partition behaves
//! like a uniformly random split of the same fraction. The null distribution
//! of Λ is simulated by N seeded random re-splits; the observed split is
//! rejected when its Λ exceeds the empirical threshold.
//!
//! Simulation j draws its RNG seed from `(master_seed, j)` only, so results
//! are bit-identical regardless of worker count or scheduling. With the
//! `parallel` feature the simulations fan out over rayon workers; the
//! sequential path is always available as [`simulate_null_seq`].

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metric::{lambda_metric, LambdaStatistic};
use crate::selection::{view, ColumnSelection};
use crate::split::SplitIndices;
use crate::splitters::random_split;

/// Observed splits with a null-sample p-value above this are flagged as
/// suspiciously over-representative (unusually small Λ). Never rejects.
const OVER_REPRESENTATIVE_P: f64 = 0.99;

/// Test configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    /// Significance level in (0, 1).
    pub alpha: f64,
    /// Number of simulated splits, at least 100.
    pub n_sims: usize,
    /// Master seed; per-simulation seeds derive from it.
    pub master_seed: u64,
    /// Pool the observed Λ into the stored null sample (default false).
    pub include_observed: bool,
}

impl TestConfig {
    pub fn new(alpha: f64, n_sims: usize, master_seed: u64) -> Result<Self> {
        let cfg = TestConfig {
            alpha,
            n_sims,
            master_seed,
            include_observed: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be in (0,1), got {}",
                self.alpha
            )));
        }
        if self.n_sims < 100 {
            return Err(Error::InvalidConfig(format!(
                "need at least 100 simulations, got {}",
                self.n_sims
            )));
        }
        if self.alpha * (self.n_sims as f64 + 1.0) < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "{} simulations cannot resolve alpha = {}; need alpha*(N+1) >= 1",
                self.n_sims, self.alpha
            )));
        }
        Ok(())
    }
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            alpha: 0.05,
            n_sims: 1000,
            master_seed: 0,
            include_observed: false,
        }
    }
}

/// Accept/reject verdict. "Accept" is the conventional label for
/// "fail to reject" here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decision::Accept => write!(f, "Accepted"),
            Decision::Reject => write!(f, "Rejected"),
        }
    }
}

/// Full outcome of one hypothesis test run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    /// Λ of the observed split.
    pub lambda_obs: f64,
    /// Simulated null Λ values in simulation order (plus the observed value
    /// at the end when `include_observed` was set).
    pub null_sample: Vec<f64>,
    /// Empirical rejection threshold c.
    pub threshold_c: f64,
    /// Add-one Monte Carlo p-value in [1/(N+1), 1].
    pub p_value: f64,
    pub decision: Decision,
    /// Train fraction recovered from the observed split.
    pub fraction: f64,
    /// Configuration echo.
    pub config: TestConfig,
    /// Number of simulations whose pooled covariance needed a ridge.
    pub ridge_sim_count: usize,
    /// Observed Λ is unusually small (p > 0.99): the test set may be
    /// over-representative and model performance over-estimated.
    pub over_representative: bool,
}

impl SimulationResult {
    /// JSON document; `include_null_sample = false` elides the (possibly
    /// large) null sample array.
    pub fn to_json(&self, include_null_sample: bool) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("serializable");
        if !include_null_sample {
            v.as_object_mut().unwrap().remove("null_sample");
        }
        v
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(v.clone())
            .map_err(|e| Error::InvalidConfig(format!("bad report JSON: {e}")))
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-simulation seed from the master seed and the
/// 1-based simulation index.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed.wrapping_add(mix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15))))
}

/// Threshold rank ⌈(1 − α)(N + 1)⌉ as a 0-based index into the sorted
/// sample, clamped to the sample.
fn threshold_index(n: usize, alpha: f64) -> usize {
    let target = (1.0 - alpha) * (n as f64 + 1.0);
    // guard against FP noise pushing an exact integer over its ceiling
    let rank = (target - 1e-9).ceil().max(1.0) as usize;
    rank.min(n) - 1
}

/// Steps (4)-(6) of the test as a pure function: threshold c, add-one
/// p-value, and the verdict.
pub fn decide(null_sample: &[f64], lambda_obs: f64, alpha: f64) -> (f64, f64, Decision) {
    assert!(!null_sample.is_empty(), "null sample must be non-empty");
    let n = null_sample.len();
    let exceed = null_sample.iter().filter(|&&l| l >= lambda_obs).count();
    let p = (1 + exceed) as f64 / (n + 1) as f64;
    let mut sorted = null_sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let c = sorted[threshold_index(n, alpha)];
    let decision = if p <= alpha { Decision::Reject } else { Decision::Accept };
    (c, p, decision)
}

/// Λ for one simulated split of the selected-column matrix.
fn simulate_one(
    matrix: &nalgebra::DMatrix<f64>,
    fraction: f64,
    master_seed: u64,
    index: usize,
) -> Result<LambdaStatistic> {
    let n = matrix.nrows();
    let seed = derive_seed(master_seed, index as u64);
    let split = random_split(n, fraction, seed)?;
    let gather = |rows: &[usize]| {
        nalgebra::DMatrix::from_fn(rows.len(), matrix.ncols(), |i, j| matrix[(rows[i], j)])
    };
    let train = gather(split.train());
    let test = gather(split.test());
    lambda_metric(&train, &test)
}

fn collect_null(
    matrix: &nalgebra::DMatrix<f64>,
    fraction: f64,
    cfg: &TestConfig,
    parallel: bool,
) -> Result<Vec<LambdaStatistic>> {
    let run = |j: usize| simulate_one(matrix, fraction, cfg.master_seed, j + 1);

    #[cfg(feature = "parallel")]
    let results: Vec<Result<LambdaStatistic>> = if parallel {
        use rayon::prelude::*;
        (0..cfg.n_sims).into_par_iter().map(run).collect()
    } else {
        (0..cfg.n_sims).map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<LambdaStatistic>> = {
        let _ = parallel;
        (0..cfg.n_sims).map(run).collect()
    };

    results
        .into_iter()
        .enumerate()
        .map(|(j, r)| {
            r.map_err(|e| Error::Simulation {
                index: j + 1,
                source: Box::new(e),
            })
        })
        .collect()
}

/// The simulation loop of [`run_test`] exposed standalone: N null Λ values
/// for random splits of `ds[sel]` at `fraction`. Deterministic given `cfg`.
pub fn simulate_null(
    ds: &Dataset,
    sel: &ColumnSelection,
    fraction: f64,
    cfg: &TestConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let all: Vec<usize> = (0..ds.n_rows()).collect();
    let matrix = view(ds, sel, &all)?;
    Ok(collect_null(&matrix, fraction, cfg, true)?
        .into_iter()
        .map(|s| s.lambda)
        .collect())
}

/// Sequential variant of [`simulate_null`]; same outputs bit for bit.
pub fn simulate_null_seq(
    ds: &Dataset,
    sel: &ColumnSelection,
    fraction: f64,
    cfg: &TestConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let all: Vec<usize> = (0..ds.n_rows()).collect();
    let matrix = view(ds, sel, &all)?;
    Ok(collect_null(&matrix, fraction, cfg, false)?
        .into_iter()
        .map(|s| s.lambda)
        .collect())
}

/// Runs the full hypothesis test for an observed split.
///
/// The split fraction is recovered from the observed partition, N random
/// splits of the same fraction are simulated, and the observed Λ is judged
/// against the empirical null. Bit-reproducible given identical inputs.
pub fn run_test(
    ds: &Dataset,
    sel: &ColumnSelection,
    split: &SplitIndices,
    cfg: &TestConfig,
) -> Result<SimulationResult> {
    cfg.validate()?;
    if split.n_rows() != ds.n_rows() {
        return Err(Error::InvalidSplit(format!(
            "split covers {} rows but the dataset has {}",
            split.n_rows(),
            ds.n_rows()
        )));
    }
    let train = view(ds, sel, split.train())?;
    let test = view(ds, sel, split.test())?;
    let obs = lambda_metric(&train, &test)?;
    if obs.regularization_used > 0.0 {
        log::warn!(
            "observed split needed ridge {:.3e} on the pooled covariance",
            obs.regularization_used
        );
    }

    let fraction = split.fraction();
    let all: Vec<usize> = (0..ds.n_rows()).collect();
    let matrix = view(ds, sel, &all)?;
    let stats = collect_null(&matrix, fraction, cfg, true)?;
    let ridge_sim_count = stats.iter().filter(|s| s.regularization_used > 0.0).count();
    let mut null_sample: Vec<f64> = stats.iter().map(|s| s.lambda).collect();

    let (_, p_value, decision) = decide(&null_sample, obs.lambda, cfg.alpha);
    if cfg.include_observed {
        null_sample.push(obs.lambda);
    }
    // threshold from the stored sample (pooled when include_observed)
    let (threshold_c, _, _) = decide(&null_sample, obs.lambda, cfg.alpha);

    Ok(SimulationResult {
        lambda_obs: obs.lambda,
        over_representative: p_value > OVER_REPRESENTATIVE_P,
        null_sample,
        threshold_c,
        p_value,
        decision,
        fraction,
        config: cfg.clone(),
        ridge_sim_count,
    })
}
