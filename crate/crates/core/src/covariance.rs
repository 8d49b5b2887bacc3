//! Error-covariance structures and the penalty ingredients they feed:
//! the projected trace `tr(P_m Sigma)`, the spectral radius, and
//! partial-sum variances.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::piecewise::{CellProjector, PartitionModel};
use crate::scalar::Scalar;

/// How an autocovariance sequence was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum AcvSource {
    Fgn { hurst: f64, sigma2: f64 },
    Arma,
    Empirical,
}

/// Autocovariances `gamma(0), gamma(1), ..., gamma(k_max)` of a stationary
/// process, viewed as an implicit Toeplitz covariance matrix.
#[derive(Debug, Clone)]
pub struct AutocovarianceSequence<T: Scalar> {
    gamma: Vec<T>,
    pub source: AcvSource,
}

// Leading-block size for the PSD spot-check at construction.
const PSD_SPOT_BLOCK: usize = 16;

impl<T: Scalar> AutocovarianceSequence<T> {
    /// Validate `gamma(0) > 0`, `|gamma(k)| <= gamma(0)`, and spot-check
    /// positive semidefiniteness of the implied Toeplitz matrix on a small
    /// leading block (eigenvalue floor `-1e-8 * gamma(0)`).
    pub fn new(gamma: Vec<T>, source: AcvSource) -> Result<Self> {
        let g0 = *gamma.first().ok_or(Error::InsufficientData(
            "autocovariance sequence is empty".into(),
        ))?;
        if !(g0 > T::zero()) {
            return Err(Error::Domain(format!("gamma(0) = {g0} must be positive")));
        }
        if let Some((k, &g)) = gamma
            .iter()
            .enumerate()
            .find(|(_, g)| g.abs() > g0 * (T::one() + T::of(1e-12)))
        {
            return Err(Error::Domain(format!(
                "|gamma({k})| = {} exceeds gamma(0) = {g0}",
                g.abs()
            )));
        }
        psd_floor_check(&gamma, PSD_SPOT_BLOCK.min(gamma.len()))?;
        Ok(Self { gamma, source })
    }

    /// Autocovariances of fractional Gaussian noise up to lag `k_max`.
    pub fn fgn(hurst: T, sigma2: T, k_max: usize) -> Result<Self> {
        let gamma = (0..=k_max)
            .map(|k| fgn_autocovariance(hurst, sigma2, k))
            .collect::<Result<Vec<T>>>()?;
        Self::new(
            gamma,
            AcvSource::Fgn { hurst: hurst.to_f64_lossy(), sigma2: sigma2.to_f64_lossy() },
        )
    }

    /// White noise of variance `sigma2` (all lags beyond 0 vanish).
    pub fn white(sigma2: T, k_max: usize) -> Result<Self> {
        let mut gamma = vec![T::zero(); k_max + 1];
        gamma[0] = sigma2;
        Self::new(gamma, AcvSource::Empirical)
    }

    pub fn max_lag(&self) -> usize {
        self.gamma.len() - 1
    }

    pub fn value(&self, lag: usize) -> T {
        self.gamma[lag]
    }

    pub fn values(&self) -> &[T] {
        &self.gamma
    }
}

/// Autocovariance of fractional Gaussian noise:
/// `(sigma2/2) * (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})`.
pub fn fgn_autocovariance<T: Scalar>(hurst: T, sigma2: T, k: usize) -> Result<T> {
    if !(hurst > T::zero() && hurst < T::one()) {
        return Err(Error::Domain(format!(
            "Hurst exponent {hurst} outside (0, 1)"
        )));
    }
    if !(sigma2 > T::zero()) {
        return Err(Error::Domain(format!("sigma2 = {sigma2} must be positive")));
    }
    if k == 0 {
        return Ok(sigma2);
    }
    let two_h = T::of(2.0) * hurst;
    let k = T::of_usize(k);
    let half = T::of(0.5);
    Ok(sigma2
        * half
        * ((k + T::one()).powf(two_h) - T::of(2.0) * k.powf(two_h)
            + (k - T::one()).powf(two_h)))
}

/// Error covariance: dense symmetric matrix, or a stationary autocovariance
/// sequence viewed as an `n x n` Toeplitz matrix without materialization.
#[derive(Debug, Clone)]
pub enum CovarianceModel<T: Scalar> {
    Dense { matrix: Vec<Vec<T>> },
    Toeplitz { acv: AutocovarianceSequence<T>, n: usize },
}

impl<T: Scalar> CovarianceModel<T> {
    /// Dense symmetric matrix (symmetry validated).
    pub fn dense(matrix: Vec<Vec<T>>) -> Result<Self> {
        let n = matrix.len();
        for row in &matrix {
            if row.len() != n {
                return Err(Error::DimensionMismatch("covariance matrix not square".into()));
            }
        }
        for i in 0..n {
            for j in 0..i {
                let scale = T::one().max(matrix[i][i].abs().max(matrix[j][j].abs()));
                if (matrix[i][j] - matrix[j][i]).abs() > T::of(1e-10) * scale {
                    return Err(Error::Domain(format!(
                        "covariance matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(CovarianceModel::Dense { matrix })
    }

    /// Stationary covariance of size `n` from an autocovariance sequence with
    /// lags at least up to `n - 1`.
    pub fn toeplitz(acv: AutocovarianceSequence<T>, n: usize) -> Result<Self> {
        if acv.max_lag() + 1 < n {
            return Err(Error::InsufficientData(format!(
                "need lags up to {}, have {}",
                n - 1,
                acv.max_lag()
            )));
        }
        Ok(CovarianceModel::Toeplitz { acv, n })
    }

    /// Scaled identity.
    pub fn scaled_identity(sigma2: T, n: usize) -> Result<Self> {
        Self::toeplitz(AutocovarianceSequence::white(sigma2, n.saturating_sub(1))?, n)
    }

    pub fn size(&self) -> usize {
        match self {
            CovarianceModel::Dense { matrix } => matrix.len(),
            CovarianceModel::Toeplitz { n, .. } => *n,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        match self {
            CovarianceModel::Dense { matrix } => matrix[i][j],
            CovarianceModel::Toeplitz { acv, .. } => acv.value(i.abs_diff(j)),
        }
    }

    /// Matrix-vector product.
    fn apply(&self, v: &[T], out: &mut [T]) {
        match self {
            CovarianceModel::Dense { matrix } => {
                for (o, row) in out.iter_mut().zip(matrix) {
                    *o = dot(row, v);
                }
            }
            CovarianceModel::Toeplitz { acv, n } => {
                for i in 0..*n {
                    let mut s = T::zero();
                    for (j, &vj) in v.iter().enumerate() {
                        s += acv.value(i.abs_diff(j)) * vj;
                    }
                    out[i] = s;
                }
            }
        }
    }
}

// Sum of all entries of the leading len x len Toeplitz block, which equals
// Var(eps_1 + ... + eps_len) for the underlying process.
fn toeplitz_block_sum<T: Scalar>(acv: &AutocovarianceSequence<T>, len: usize) -> T {
    let mut s = T::of_usize(len) * acv.value(0);
    for k in 1..len {
        s += T::of(2.0) * T::of_usize(len - k) * acv.value(k);
    }
    s
}

// tr(P B) for the within-cell polynomial projector P of the given degree and
// the len x len block B, via the orthonormal basis Q: tr(P B) = sum_a q_a' B q_a.
fn block_trace<T: Scalar>(block: &[Vec<T>], degree: usize, cell: usize) -> Result<T> {
    let len = block.len();
    let proj = CellProjector::new(len, degree, cell)?;
    let mut total = T::zero();
    let mut bq = vec![T::zero(); len];
    for q in &proj.q {
        for i in 0..len {
            bq[i] = dot(&block[i], q);
        }
        total += dot(q, &bq);
    }
    Ok(total)
}

fn toeplitz_block<T: Scalar>(acv: &AutocovarianceSequence<T>, len: usize) -> Vec<Vec<T>> {
    (0..len)
        .map(|i| (0..len).map(|j| acv.value(i.abs_diff(j))).collect())
        .collect()
}

/// Exact `tr(P_m Sigma)` computed blockwise over the cells of `model`.
///
/// Cells have disjoint support, so `tr(P Sigma) = sum_j tr(P_j Sigma_j)` with
/// `Sigma_j` the diagonal block of the cell. For degree 0 the per-cell trace
/// reduces to the block entry sum divided by the cell length; for stationary
/// covariances blocks depend only on the cell length, so at most two distinct
/// blocks are ever formed.
pub fn trace_projection<T: Scalar>(
    cov: &CovarianceModel<T>,
    model: &PartitionModel,
) -> Result<T> {
    if cov.size() != model.n() {
        return Err(Error::DimensionMismatch(format!(
            "covariance size {} != model n {}",
            cov.size(),
            model.n()
        )));
    }
    let bounds = model.bounds();
    match cov {
        CovarianceModel::Toeplitz { acv, .. } => {
            // Per distinct cell length.
            let mut per_len: Vec<(usize, usize)> = Vec::with_capacity(2); // (len, count)
            for &(s, e) in &bounds {
                let len = e - s + 1;
                match per_len.iter_mut().find(|(l, _)| *l == len) {
                    Some((_, c)) => *c += 1,
                    None => per_len.push((len, 1)),
                }
            }
            let mut total = T::zero();
            for (len, count) in per_len {
                let t = if model.degree() == 0 {
                    toeplitz_block_sum(acv, len) / T::of_usize(len)
                } else {
                    block_trace(&toeplitz_block(acv, len), model.degree(), 0)?
                };
                total += T::of_usize(count) * t;
            }
            Ok(total)
        }
        CovarianceModel::Dense { matrix } => {
            let mut total = T::zero();
            for (cell, &(s, e)) in bounds.iter().enumerate() {
                let len = e - s + 1;
                if model.degree() == 0 {
                    let mut bs = T::zero();
                    for i in s - 1..e {
                        for j in s - 1..e {
                            bs += matrix[i][j];
                        }
                    }
                    total += bs / T::of_usize(len);
                } else {
                    let block: Vec<Vec<T>> = (s - 1..e)
                        .map(|i| matrix[i][s - 1..e].to_vec())
                        .collect();
                    total += block_trace(&block, model.degree(), cell)?;
                }
            }
            Ok(total)
        }
    }
}

const POWER_ITERATION_CAP: usize = 100_000;

/// Largest eigenvalue of a symmetric PSD covariance, by power iteration with
/// a deterministic all-ones start (re-seeded deterministically if the iterate
/// degenerates). Converges when the Rayleigh quotient moves by less than
/// `tol` relative between iterations.
pub fn spectral_radius<T: Scalar>(cov: &CovarianceModel<T>, tol: T) -> Result<T> {
    let n = cov.size();
    if n == 0 {
        return Err(Error::InsufficientData("empty covariance".into()));
    }
    let mut v = vec![T::of_usize(n).sqrt().recip(); n];
    let mut w = vec![T::zero(); n];
    let mut last = T::nan();
    let mut reseeds = 0u32;
    for it in 0..POWER_ITERATION_CAP {
        cov.apply(&v, &mut w);
        let rayleigh = dot(&v, &w);
        let wn = dot(&w, &w).sqrt();
        if wn <= T::zero() {
            // Start vector happened to be in the null space; restart from a
            // deterministic pseudo-random direction.
            if reseeds >= 3 {
                return Ok(T::zero());
            }
            reseeds += 1;
            let mut state: u64 = 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(reseeds as u64 + 1);
            for x in v.iter_mut() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                *x = T::of(((state >> 11) as f64) / (1u64 << 53) as f64 - 0.5);
            }
            let nv = dot(&v, &v).sqrt();
            for x in v.iter_mut() {
                *x /= nv;
            }
            continue;
        }
        for (vi, &wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
        if it > 0 && (rayleigh - last).abs() <= tol * rayleigh.abs().max(T::min_positive_value()) {
            return Ok(rayleigh);
        }
        last = rayleigh;
    }
    Err(Error::PowerIterationDiverged {
        iterations: POWER_ITERATION_CAP,
        last_estimate: last.to_f64_lossy(),
    })
}

/// `Var(eps_1 + ... + eps_n) = n*gamma(0) + 2*sum_{k=1}^{n-1} (n-k)*gamma(k)`.
pub fn partial_sum_variance<T: Scalar>(acv: &AutocovarianceSequence<T>, n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InsufficientData("n must be positive".into()));
    }
    if acv.max_lag() + 1 < n {
        return Err(Error::InsufficientData(format!(
            "need lags up to {}, have {}",
            n - 1,
            acv.max_lag()
        )));
    }
    Ok(toeplitz_block_sum(acv, n))
}

// PSD floor on the leading `block`-sized Toeplitz block: Cholesky of
// B + delta*I with delta = 1e-8 * gamma(0) succeeds iff the smallest
// eigenvalue of B exceeds -delta.
fn psd_floor_check<T: Scalar>(gamma: &[T], block: usize) -> Result<()> {
    let delta = T::of(1e-8) * gamma[0];
    let mut l = vec![vec![T::zero(); block]; block];
    for i in 0..block {
        for j in 0..=i {
            let mut s = gamma[i - j];
            if i == j {
                s += delta;
            }
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > T::zero()) {
                    return Err(Error::Domain(format!(
                        "autocovariance sequence not PSD on leading block of size {block}"
                    )));
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(())
}

/// Spot-check positive semidefiniteness of the implied covariance on the
/// leading block of size up to `max_block` (eigenvalue floor
/// `-1e-8 * gamma(0)`). Construction already runs this on a small block;
/// call it directly to widen the checked range.
pub fn check_psd_floor<T: Scalar>(acv: &AutocovarianceSequence<T>, max_block: usize) -> Result<()> {
    psd_floor_check(&acv.gamma, max_block.min(acv.max_lag() + 1))
}

/// Trace of `P_m Sigma` for several partition sizes at once (parallel).
pub fn trace_curve<T: Scalar>(
    cov: &CovarianceModel<T>,
    sizes: &[usize],
    degree: usize,
) -> Result<Vec<T>> {
    sizes
        .par_iter()
        .map(|&m| {
            let model = PartitionModel::new(cov.size(), m, degree)?;
            trace_projection(cov, &model)
        })
        .collect()
}
