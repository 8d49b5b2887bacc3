//! The five end-to-end selection strategies compared in the experiments:
//! dimension-jump calibration over different penalty shapes, with the shape
//! exponent optionally driven by a Whittle Hurst estimate computed on the
//! observations or on pre-model residuals.

use crate::error::{Error, Result};
use crate::hurst::whittle_estimate;
use crate::penalty::PenaltyShape;
use crate::piecewise::{contrast_curve, fit_piecewise, ContrastCurve, PartitionModel, PiecewiseFit};
use crate::scalar::Scalar;
use crate::selection::{dimension_jump, regularization_path, DimensionJumpResult};

/// Strategy family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodKind {
    /// Classical dimension jump: shape proportional to the dimension.
    Cdj,
    /// Dimension jump with shape `(d_m/n)^{2-2H}` for a given Hurst exponent.
    HGiven(f64),
    /// Hurst exponent estimated from the observations by Whittle.
    WhY,
    /// Pre-model by CDJ, Hurst from its residuals, final dimension jump.
    CdjWhRes,
    /// Pre-model by WhY, Hurst from its residuals, final dimension jump.
    WhYWhRes,
}

impl MethodKind {
    /// Canonical name used in CSV output and config files.
    pub fn name(&self) -> String {
        match self {
            MethodKind::Cdj => "cdj".into(),
            MethodKind::HGiven(h) => format!("hgiven({h})"),
            MethodKind::WhY => "why".into(),
            MethodKind::CdjWhRes => "cdjwhres".into(),
            MethodKind::WhYWhRes => "whywhres".into(),
        }
    }

    /// Parse a method name, e.g. `cdj` or `hgiven(0.2)`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "cdj" => return Ok(MethodKind::Cdj),
            "why" | "wh(y)" => return Ok(MethodKind::WhY),
            "cdjwhres" | "cdj+wh(res)" => return Ok(MethodKind::CdjWhRes),
            "whywhres" | "wh(y)+wh(res)" => return Ok(MethodKind::WhYWhRes),
            _ => {}
        }
        if let Some(rest) = t.strip_prefix("hgiven") {
            let inner = rest.trim_matches(|c| c == '(' || c == ')' || c == ':');
            let h: f64 = inner
                .parse()
                .map_err(|_| Error::Config(format!("bad hgiven parameter in {s:?}")))?;
            if !(h > 0.0 && h < 1.0) {
                return Err(Error::Config(format!("hgiven Hurst {h} outside (0, 1)")));
            }
            return Ok(MethodKind::HGiven(h));
        }
        Err(Error::Config(format!("unknown method {s:?}")))
    }
}

/// A fully specified method: strategy, polynomial degree and collection size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSpec {
    pub kind: MethodKind,
    pub degree: usize,
    pub m_max: usize,
}

impl MethodSpec {
    pub fn new(kind: MethodKind, degree: usize, m_max: usize) -> Result<Self> {
        if let MethodKind::HGiven(h) = kind {
            if !(h > 0.0 && h < 1.0) {
                return Err(Error::Domain(format!("Hurst exponent {h} outside (0, 1)")));
            }
        }
        if m_max < 1 {
            return Err(Error::EmptyCollection);
        }
        Ok(Self { kind, degree, m_max })
    }
}

/// Outcome of one method run.
#[derive(Debug, Clone)]
pub struct MethodResult<T: Scalar> {
    pub spec: MethodSpec,
    pub m_selected: usize,
    pub kappa_dj: T,
    /// Hurst estimates produced along the pipeline, in order.
    pub h_estimates: Vec<T>,
    pub fit: PiecewiseFit<T>,
    pub residuals: Vec<T>,
}

// Whittle estimates are clamped before shaping so gamma = 2 - 2H stays
// inside (0.1, 1.9).
const H_CLAMP: (f64, f64) = (0.05, 0.95);

fn shape_from_hurst<T: Scalar>(h: T, degree: usize) -> Result<PenaltyShape<T>> {
    let clamped = h.max(T::of(H_CLAMP.0)).min(T::of(H_CLAMP.1));
    PenaltyShape::power_gamma(T::of(2.0) - T::of(2.0) * clamped, Some(degree))
}

fn jump_with_shape<T: Scalar>(
    curve: &ContrastCurve<T>,
    shape: &PenaltyShape<T>,
    stage: &'static str,
) -> Result<DimensionJumpResult<T>> {
    let shapes = shape
        .values(curve.m_max(), curve.n)
        .map_err(|e| e.in_stage(stage))?;
    let path = regularization_path(&curve.contrasts, &shapes).map_err(|e| e.in_stage(stage))?;
    dimension_jump(path, &curve.dims()).map_err(|e| e.in_stage(stage))
}

fn residuals_at<T: Scalar>(y: &[T], n: usize, m: usize, degree: usize) -> Result<Vec<T>> {
    let model = PartitionModel::new(n, m, degree)?;
    let fit = fit_piecewise(y, &model)?;
    Ok(fit.residuals(y))
}

/// Run a method on a precomputed contrast curve for `y`.
pub fn run_method_on_curve<T: Scalar>(
    y: &[T],
    spec: &MethodSpec,
    curve: &ContrastCurve<T>,
) -> Result<MethodResult<T>> {
    if curve.n != y.len() || curve.degree != spec.degree || curve.m_max() != spec.m_max {
        return Err(Error::DimensionMismatch(
            "contrast curve does not match the method spec".into(),
        ));
    }
    let n = y.len();
    let degree = spec.degree;
    let mut h_estimates: Vec<T> = Vec::new();

    let final_jump = match spec.kind {
        MethodKind::Cdj => {
            jump_with_shape(curve, &PenaltyShape::dimension(Some(degree)), "cdj jump")?
        }
        MethodKind::HGiven(h) => {
            let shape = shape_from_hurst(T::of(h), degree)?;
            jump_with_shape(curve, &shape, "hgiven jump")?
        }
        MethodKind::WhY => {
            let h1 = whittle_estimate(y).map_err(|e| e.in_stage("whittle on y"))?.h_hat;
            h_estimates.push(h1);
            jump_with_shape(curve, &shape_from_hurst(h1, degree)?, "why jump")?
        }
        MethodKind::CdjWhRes => {
            let pre =
                jump_with_shape(curve, &PenaltyShape::dimension(Some(degree)), "cdj pre-model")?;
            let res = residuals_at(y, n, pre.m_selected, degree)
                .map_err(|e| e.in_stage("pre-model residuals"))?;
            let h = whittle_estimate(&res)
                .map_err(|e| e.in_stage("whittle on residuals"))?
                .h_hat;
            h_estimates.push(h);
            jump_with_shape(curve, &shape_from_hurst(h, degree)?, "final jump")?
        }
        MethodKind::WhYWhRes => {
            let h1 = whittle_estimate(y).map_err(|e| e.in_stage("whittle on y"))?.h_hat;
            h_estimates.push(h1);
            let pre = jump_with_shape(curve, &shape_from_hurst(h1, degree)?, "why pre-model")?;
            let res = residuals_at(y, n, pre.m_selected, degree)
                .map_err(|e| e.in_stage("pre-model residuals"))?;
            let h2 = whittle_estimate(&res)
                .map_err(|e| e.in_stage("whittle on residuals"))?
                .h_hat;
            h_estimates.push(h2);
            jump_with_shape(curve, &shape_from_hurst(h2, degree)?, "final jump")?
        }
    };

    let model = PartitionModel::new(n, final_jump.m_selected, degree)?;
    let fit = fit_piecewise(y, &model)?;
    let residuals = fit.residuals(y);
    Ok(MethodResult {
        spec: *spec,
        m_selected: final_jump.m_selected,
        kappa_dj: final_jump.kappa_dj,
        h_estimates,
        fit,
        residuals,
    })
}

/// Run a selection method end to end on the series `y`.
pub fn run_method<T: Scalar>(y: &[T], spec: &MethodSpec) -> Result<MethodResult<T>> {
    let curve = contrast_curve(y, spec.degree, spec.m_max)?;
    run_method_on_curve(y, spec, &curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise::empirical_contrast;
    use crate::processes::{generate_observations, target_grid, ProcessSpec, Seed};

    #[test]
    fn method_names_round_trip() {
        for kind in [
            MethodKind::Cdj,
            MethodKind::HGiven(0.2),
            MethodKind::WhY,
            MethodKind::CdjWhRes,
            MethodKind::WhYWhRes,
        ] {
            assert_eq!(MethodKind::parse(&kind.name()).unwrap(), kind);
        }
        assert!(MethodKind::parse("nope").is_err());
        assert!(MethodKind::parse("hgiven(1.5)").is_err());
    }

    #[test]
    fn hgiven_half_equals_cdj_at_degree_zero() {
        for trial in 0..5u64 {
            let y: Vec<f64> =
                generate_observations(400, ProcessSpec::Arma21, Seed(900 + trial)).unwrap();
            let cdj = run_method(&y, &MethodSpec::new(MethodKind::Cdj, 0, 60).unwrap()).unwrap();
            let hg =
                run_method(&y, &MethodSpec::new(MethodKind::HGiven(0.5), 0, 60).unwrap()).unwrap();
            assert_eq!(cdj.m_selected, hg.m_selected);
        }
    }

    #[test]
    fn noiseless_pipeline_improves_on_single_cell() {
        let y = target_grid::<f64>(500);
        for kind in [MethodKind::Cdj, MethodKind::HGiven(0.7)] {
            let result = run_method(&y, &MethodSpec::new(kind, 0, 80).unwrap()).unwrap();
            let c_sel = empirical_contrast(&y, &result.fit).unwrap();
            let one = fit_piecewise(&y, &PartitionModel::new(500, 1, 0).unwrap()).unwrap();
            let c_one = empirical_contrast(&y, &one).unwrap();
            assert!(c_sel <= c_one);
        }
    }

    #[test]
    fn residuals_reconstruct_observations() {
        let y: Vec<f64> = generate_observations(
            600,
            ProcessSpec::Fgn { hurst: 0.7, sigma2: 1.0 },
            Seed(31),
        )
        .unwrap();
        let result =
            run_method(&y, &MethodSpec::new(MethodKind::WhY, 0, 100).unwrap()).unwrap();
        for ((&yi, &fi), &ri) in y.iter().zip(&result.fit.fitted).zip(&result.residuals) {
            // Exact up to the single rounding of fi + (yi - fi).
            assert!((yi - (fi + ri)).abs() <= 4.0 * f64::EPSILON * yi.abs().max(1.0));
        }
        assert_eq!(result.h_estimates.len(), 1);
    }

    #[test]
    fn two_step_records_both_estimates_deterministically() {
        let y: Vec<f64> = generate_observations(
            512,
            ProcessSpec::Fgn { hurst: 0.7, sigma2: 1.0 },
            Seed(77),
        )
        .unwrap();
        let spec = MethodSpec::new(MethodKind::WhYWhRes, 0, 80).unwrap();
        let a = run_method(&y, &spec).unwrap();
        let b = run_method(&y, &spec).unwrap();
        assert_eq!(a.m_selected, b.m_selected);
        assert_eq!(a.h_estimates, b.h_estimates);
        assert_eq!(a.h_estimates.len(), 2);
    }

    #[test]
    fn cdj_pre_model_feeds_residual_whittle() {
        let y: Vec<f64> = generate_observations(
            512,
            ProcessSpec::Fgn { hurst: 0.2, sigma2: 1.0 },
            Seed(4045),
        )
        .unwrap();
        let result =
            run_method(&y, &MethodSpec::new(MethodKind::CdjWhRes, 0, 100).unwrap()).unwrap();
        assert_eq!(result.h_estimates.len(), 1);
        let h = result.h_estimates[0];
        assert!(h > 0.0 && h < 1.0);
        assert!((1..=100).contains(&result.m_selected));
    }

    #[test]
    fn recovers_long_memory_exponent_on_synthetic_data() {
        let y: Vec<f64> = generate_observations(
            663,
            ProcessSpec::Fgn { hurst: 0.7, sigma2: 1.0 },
            Seed(2024),
        )
        .unwrap();
        let spec = MethodSpec::new(MethodKind::WhYWhRes, 0, 132).unwrap();
        let result = run_method(&y, &spec).unwrap();
        let h2 = result.h_estimates[1];
        assert!((h2 - 0.7).abs() < 0.1, "h2 = {h2}");
    }
}
