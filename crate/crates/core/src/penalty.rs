//! Penalty functions: parametric shapes used by the slope-heuristic
//! calibration, and the fully theoretical penalties built from the error
//! covariance.

use std::sync::Arc;

use crate::covariance::{spectral_radius, trace_projection, CovarianceModel};
use crate::error::{Error, Result};
use crate::piecewise::PartitionModel;
use crate::scalar::Scalar;

/// Probability weights over the model collection `m = 1..=m_max`.
#[derive(Debug, Clone)]
pub struct ModelWeights<T: Scalar> {
    pi: Vec<T>,
}

impl<T: Scalar> ModelWeights<T> {
    pub fn new(pi: Vec<T>) -> Result<Self> {
        if pi.is_empty() {
            return Err(Error::EmptyCollection);
        }
        if pi.iter().any(|&p| !(p > T::zero())) {
            return Err(Error::Domain("weights must be strictly positive".into()));
        }
        let total: T = pi.iter().copied().sum();
        if (total - T::one()).abs() > T::of(1e-10) {
            return Err(Error::Domain(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { pi })
    }

    pub fn get(&self, m: usize) -> T {
        self.pi[m - 1]
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.pi
    }
}

/// Weights proportional to `m^{-2}`, normalized over `1..=m_max`.
pub fn default_weights<T: Scalar>(m_max: usize) -> Result<ModelWeights<T>> {
    if m_max < 1 {
        return Err(Error::EmptyCollection);
    }
    let raw: Vec<T> = (1..=m_max)
        .map(|m| (T::of_usize(m) * T::of_usize(m)).recip())
        .collect();
    let total: T = raw.iter().copied().sum();
    ModelWeights::new(raw.into_iter().map(|w| w / total).collect())
}

/// The penalty shapes under study. Every shape is a function of the
/// partition size `m` at sample size `n`; a shape may carry a polynomial
/// degree, in which case it acts on the model dimension `(r+1)*m` instead of
/// the raw partition size.
#[derive(Clone)]
pub enum PenaltyShape<T: Scalar> {
    /// `d_m / n`: the classical dimension-proportional shape.
    Dimension { degree: Option<usize> },
    /// `(d_m / n)^gamma` with `gamma` in (0, 2): concave for long memory
    /// (`gamma < 1`), convex for anti-persistence (`gamma > 1`).
    PowerGamma { gamma: T, degree: Option<usize> },
    /// `(m/n)^gamma + log(max(m, 2))/n` with `gamma` in (1, 2): the
    /// anti-persistent regressogram shape with its log correction.
    PowerGammaPlusLog { gamma: T },
    /// The exact covariance-based penalty; see [`theoretical_penalty`].
    TraceExact {
        cov: Arc<CovarianceModel<T>>,
        k: T,
        weights: Arc<ModelWeights<T>>,
        degree: usize,
    },
}

impl<T: Scalar> std::fmt::Debug for PenaltyShape<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PenaltyShape::Dimension { degree } => write!(f, "Dimension(degree={degree:?})"),
            PenaltyShape::PowerGamma { gamma, degree } => {
                write!(f, "PowerGamma(gamma={gamma}, degree={degree:?})")
            }
            PenaltyShape::PowerGammaPlusLog { gamma } => {
                write!(f, "PowerGammaPlusLog(gamma={gamma})")
            }
            PenaltyShape::TraceExact { k, degree, .. } => {
                write!(f, "TraceExact(K={k}, degree={degree})")
            }
        }
    }
}

impl<T: Scalar> PenaltyShape<T> {
    pub fn dimension(degree: Option<usize>) -> Self {
        PenaltyShape::Dimension { degree }
    }

    pub fn power_gamma(gamma: T, degree: Option<usize>) -> Result<Self> {
        if !(gamma > T::zero() && gamma < T::of(2.0)) {
            return Err(Error::Domain(format!("gamma = {gamma} outside (0, 2)")));
        }
        Ok(PenaltyShape::PowerGamma { gamma, degree })
    }

    pub fn power_gamma_plus_log(gamma: T) -> Result<Self> {
        if !(gamma > T::one() && gamma < T::of(2.0)) {
            return Err(Error::Domain(format!("gamma = {gamma} outside (1, 2)")));
        }
        Ok(PenaltyShape::PowerGammaPlusLog { gamma })
    }

    pub fn trace_exact(
        cov: Arc<CovarianceModel<T>>,
        k: T,
        weights: Arc<ModelWeights<T>>,
        degree: usize,
    ) -> Result<Self> {
        if !(k > T::one()) {
            return Err(Error::Domain(format!("K = {k} must exceed 1")));
        }
        Ok(PenaltyShape::TraceExact { cov, k, weights, degree })
    }

    fn effective_dim(&self, m: usize) -> usize {
        let degree = match self {
            PenaltyShape::Dimension { degree } | PenaltyShape::PowerGamma { degree, .. } => *degree,
            _ => None,
        };
        match degree {
            Some(r) => (r + 1) * m,
            None => m,
        }
    }

    /// Value of the shape at partition size `m`, sample size `n`.
    pub fn value(&self, m: usize, n: usize) -> Result<T> {
        let fn_ = T::of_usize(n);
        match self {
            PenaltyShape::Dimension { .. } => {
                Ok(T::of_usize(self.effective_dim(m)) / fn_)
            }
            PenaltyShape::PowerGamma { gamma, .. } => {
                Ok((T::of_usize(self.effective_dim(m)) / fn_).powf(*gamma))
            }
            PenaltyShape::PowerGammaPlusLog { gamma } => {
                let main = (T::of_usize(m) / fn_).powf(*gamma);
                Ok(main + T::of_usize(m.max(2)).ln() / fn_)
            }
            PenaltyShape::TraceExact { cov, k, weights, degree } => {
                let model = PartitionModel::new(n, m, *degree)?;
                theoretical_penalty(m, &model, *k, cov, weights)
            }
        }
    }

    /// Shape values over the whole collection `m = 1..=m_max`.
    pub fn values(&self, m_max: usize, n: usize) -> Result<Vec<T>> {
        (1..=m_max).map(|m| self.value(m, n)).collect()
    }
}

/// The exact oracle-inequality penalty
/// `(K/n) * ( sqrt(tr(P_m Sigma) + rho(Sigma)) + sqrt(rho(Sigma)) * sqrt(2 log(1/pi_m)) )^2`.
pub fn theoretical_penalty<T: Scalar>(
    m: usize,
    model: &PartitionModel,
    k: T,
    cov: &CovarianceModel<T>,
    weights: &ModelWeights<T>,
) -> Result<T> {
    if !(k > T::one()) {
        return Err(Error::Domain(format!("K = {k} must exceed 1")));
    }
    if m != model.cells() {
        return Err(Error::DimensionMismatch(format!(
            "m = {m} does not match the model's {} cells",
            model.cells()
        )));
    }
    let trace = trace_projection(cov, model)?;
    let rho = spectral_radius(cov, T::of(1e-8))?;
    let log_term = (T::of(2.0) * weights.get(m).recip().ln()).max(T::zero());
    let base = (trace + rho).sqrt() + rho.sqrt() * log_term.sqrt();
    Ok(k / T::of_usize(model.n()) * base * base)
}

/// The simplified spectral-radius penalty
/// `K * rho/n * ( sqrt(d_m) + sqrt(2 log(1/pi_m)) )^2`.
pub fn rho_penalty<T: Scalar>(
    m: usize,
    model: &PartitionModel,
    k: T,
    rho: T,
    weights: &ModelWeights<T>,
) -> Result<T> {
    if !(k > T::one()) {
        return Err(Error::Domain(format!("K = {k} must exceed 1")));
    }
    if !(rho > T::zero()) {
        return Err(Error::Domain(format!("rho = {rho} must be positive")));
    }
    let d = T::of_usize(model.dim());
    let log_term = (T::of(2.0) * weights.get(m).recip().ln()).max(T::zero());
    let base = d.sqrt() + log_term.sqrt();
    Ok(k * rho / T::of_usize(model.n()) * base * base)
}
