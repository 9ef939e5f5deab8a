//! The Mahalanobis-based split distance Λ and its building blocks.
//!
//! Λ between a train matrix X (`n_x × d`) and test matrix Y (`n_y × d`) is
//! the average of two directed mean distances computed under the pooled
//! sample covariance Σ_p:
//!
//! ```text
//! Σ_p    = ((n_x − 1) Σ_x + (n_y − 1) Σ_y) / (n_x + n_y − 2)
//! Δ²_XY  = mean_i (x_i − μ_y)ᵀ Σ_p⁻¹ (x_i − μ_y)
//! Δ²_YX  = mean_j (y_j − μ_x)ᵀ Σ_p⁻¹ (y_j − μ_x)
//! Λ      = (Δ²_XY + Δ²_YX) / 2
//! ```
//!
//! Σ_p is factorized once (Cholesky) and reused for every row solve, so one
//! evaluation costs O((n_x + n_y) d² + d³). Near-singular Σ_p is rescued by
//! an escalating ridge on the diagonal; the magnitude actually applied is
//! reported in the statistic.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Ridge escalation ladder: multiples of trace(Σ_p)/d tried in order.
const RIDGE_LADDER: [f64; 3] = [1e-10, 1e-8, 1e-6];

/// Sample mean, covariance and row count of one data matrix.
#[derive(Debug, Clone)]
pub struct MomentSummary {
    /// Column means (length d).
    pub mean: DVector<f64>,
    /// Unbiased sample covariance (d × d, divisor count − 1).
    pub cov: DMatrix<f64>,
    /// Number of rows summarized.
    pub count: usize,
}

/// Column means and unbiased sample covariance of a matrix with >= 2 rows.
pub fn moments(m: &DMatrix<f64>) -> Result<MomentSummary> {
    let (n, d) = m.shape();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let mut mean = DVector::<f64>::zeros(d);
    for j in 0..d {
        mean[j] = m.column(j).sum() / n as f64;
    }
    let mut cov = DMatrix::<f64>::zeros(d, d);
    let mut dev = vec![0.0f64; d];
    for i in 0..n {
        for (j, dj) in dev.iter_mut().enumerate() {
            *dj = m[(i, j)] - mean[j];
        }
        for j in 0..d {
            for k in j..d {
                cov[(j, k)] += dev[j] * dev[k];
            }
        }
    }
    let denom = (n - 1) as f64;
    for j in 0..d {
        for k in j..d {
            cov[(j, k)] /= denom;
            cov[(k, j)] = cov[(j, k)];
        }
    }
    Ok(MomentSummary { mean, cov, count: n })
}

/// Pooled covariance of two summaries, weighted by degrees of freedom:
/// `((n_x − 1) Σ_x + (n_y − 1) Σ_y) / (n_x + n_y − 2)`.
pub fn pooled_covariance(a: &MomentSummary, b: &MomentSummary) -> Result<DMatrix<f64>> {
    if a.cov.nrows() != b.cov.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.cov.nrows(),
            got: b.cov.nrows(),
        });
    }
    let wa = (a.count - 1) as f64;
    let wb = (b.count - 1) as f64;
    Ok((&a.cov * wa + &b.cov * wb) / (wa + wb))
}

/// Cholesky with a conditioning guard. nalgebra accepts pivots down to 0,
/// which would let an exactly singular matrix "factorize". A pivot ratio of
/// 1e-6 on the factor diagonal corresponds to a condition number near 1e12
/// on the matrix itself; anything beyond is treated as failed so the ridge
/// escalation can kick in.
fn well_conditioned_cholesky(sigma: DMatrix<f64>) -> Option<DMatrix<f64>> {
    let l = Cholesky::<f64, Dyn>::new(sigma)?.unpack();
    let mut dmin = f64::INFINITY;
    let mut dmax = 0.0f64;
    for j in 0..l.nrows() {
        let v = l[(j, j)];
        dmin = dmin.min(v);
        dmax = dmax.max(v);
    }
    if !dmin.is_finite() || dmin <= 1e-6 * dmax {
        return None;
    }
    Some(l)
}

/// Cholesky factor of a (possibly ridge-regularized) SPD matrix.
///
/// Mahalanobis terms are evaluated through triangular solves against the
/// factor; the matrix inverse is never formed.
pub struct SpdFactor {
    l: DMatrix<f64>,
    /// Ridge magnitude added to the diagonal before factorization succeeded
    /// (0 when the matrix factorized as-is).
    ridge: f64,
}

impl SpdFactor {
    /// Factorizes `sigma`, escalating through the ridge ladder on failure.
    pub fn new(sigma: &DMatrix<f64>) -> Result<SpdFactor> {
        let d = sigma.nrows();
        if let Some(l) = well_conditioned_cholesky(sigma.clone()) {
            return Ok(SpdFactor { l, ridge: 0.0 });
        }
        let trace = sigma.trace();
        for lam in RIDGE_LADDER {
            let ridge = lam * trace / d as f64;
            if ridge <= 0.0 || !ridge.is_finite() {
                break;
            }
            let mut s = sigma.clone();
            for j in 0..d {
                s[(j, j)] += ridge;
            }
            if let Some(l) = well_conditioned_cholesky(s) {
                return Ok(SpdFactor { l, ridge });
            }
        }
        Err(Error::SingularCovariance)
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    /// Squared Mahalanobis distance `(x − μ)ᵀ Σ⁻¹ (x − μ)` via one forward
    /// substitution against the factor.
    pub fn mahalanobis_sq(&self, x: &DVector<f64>, mu: &DVector<f64>) -> Result<f64> {
        if x.len() != self.dim() || mu.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len().max(mu.len()),
            });
        }
        let mut diff = x - mu;
        self.solve_in_place(&mut diff);
        Ok(diff.norm_squared())
    }

    /// Forward substitution `L z = b`, overwriting `b` with `z`.
    fn solve_in_place(&self, b: &mut DVector<f64>) {
        let ok = self.l.solve_lower_triangular_mut(b);
        debug_assert!(ok, "factor diagonal is positive by construction");
    }

    /// Mean squared Mahalanobis distance of the rows of `m` from `mu`.
    fn mean_mahalanobis_sq(&self, m: &DMatrix<f64>, mu: &DVector<f64>) -> f64 {
        let (n, d) = m.shape();
        let mut buf = DVector::<f64>::zeros(d);
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..d {
                buf[j] = m[(i, j)] - mu[j];
            }
            self.solve_in_place(&mut buf);
            total += buf.norm_squared();
        }
        total / n as f64
    }
}

/// The split distance Λ with its directional components.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LambdaStatistic {
    /// Mean distance of train rows from the test distribution (Δ²_XY).
    pub d_xy: f64,
    /// Mean distance of test rows from the train distribution (Δ²_YX).
    pub d_yx: f64,
    /// Λ = (Δ²_XY + Δ²_YX) / 2.
    pub lambda: f64,
    /// Number of columns entering the metric.
    pub dim: usize,
    /// Ridge magnitude applied to Σ_p (0 when none was needed).
    pub regularization_used: f64,
}

/// Computes Λ between a train and a test matrix of equal width.
///
/// Both matrices need at least d + 2 rows so the pooled covariance is
/// generically invertible.
pub fn lambda_metric(train: &DMatrix<f64>, test: &DMatrix<f64>) -> Result<LambdaStatistic> {
    let d = train.ncols();
    if test.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: test.ncols(),
        });
    }
    let needed = d + 2;
    for m in [train, test] {
        if m.nrows() < needed {
            return Err(Error::TooFewRows {
                needed,
                got: m.nrows(),
            });
        }
    }
    let mx = moments(train)?;
    let my = moments(test)?;
    let pooled = pooled_covariance(&mx, &my)?;
    let factor = SpdFactor::new(&pooled)?;
    let d_xy = factor.mean_mahalanobis_sq(train, &my.mean);
    let d_yx = factor.mean_mahalanobis_sq(test, &mx.mean);
    Ok(LambdaStatistic {
        d_xy,
        d_yx,
        lambda: (d_xy + d_yx) / 2.0,
        dim: d,
        regularization_used: factor.ridge(),
    })
}
