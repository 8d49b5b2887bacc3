//! Cross-checks of the fast paths against independent dense-matrix and
//! Monte Carlo oracles.

use depreg_core::covariance::{
    fgn_autocovariance, spectral_radius, trace_projection, AutocovarianceSequence,
    CovarianceModel,
};
use depreg_core::hurst::{periodogram, sample_acf, whittle_estimate};
use depreg_core::penalty::{default_weights, theoretical_penalty};
use depreg_core::piecewise::{cell_bounds, PartitionModel};
use depreg_core::processes::{simulate_fgn, Seed};

use nalgebra::DMatrix;

fn assert_rel(a: f64, b: f64, tol: f64) {
    let scale = b.abs().max(1e-300);
    assert!((a - b).abs() / scale <= tol, "{a} vs {b} (rel)");
}

/// Dense block-diagonal design of the piecewise-polynomial space: local
/// monomials 1, t, ..., t^r on each cell.
fn design_matrix(n: usize, m: usize, r: usize) -> DMatrix<f64> {
    let bounds = cell_bounds(n, m).unwrap();
    let mut x = DMatrix::zeros(n, (r + 1) * m);
    for (j, &(s, e)) in bounds.iter().enumerate() {
        for (t, i) in (s..=e).enumerate() {
            for k in 0..=r {
                x[(i - 1, j * (r + 1) + k)] = ((t + 1) as f64).powi(k as i32);
            }
        }
    }
    x
}

fn projection_matrix(n: usize, m: usize, r: usize) -> DMatrix<f64> {
    let x = design_matrix(n, m, r);
    let xtx = x.transpose() * &x;
    let inv = xtx.try_inverse().expect("full-rank design");
    &x * inv * x.transpose()
}

fn fgn_toeplitz(n: usize, h: f64, sigma2: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        fgn_autocovariance(h, sigma2, i.abs_diff(j)).unwrap()
    })
}

#[test]
fn design_rank_equals_model_dimension() {
    for (n, m, r) in [(12usize, 3usize, 1usize), (20, 4, 2), (17, 5, 0), (24, 2, 3)] {
        let x = design_matrix(n, m, r);
        assert_eq!(x.rank(1e-8), (r + 1) * m, "n={n} m={m} r={r}");
    }
}

#[test]
fn blockwise_trace_matches_dense_projection_oracle() {
    let n = 100;
    let sigma = fgn_toeplitz(n, 0.7, 1.0);
    let acv = AutocovarianceSequence::fgn(0.7f64, 1.0, n - 1).unwrap();
    let cov = CovarianceModel::toeplitz(acv, n).unwrap();
    for (m, r) in [(5usize, 0usize), (5, 1), (10, 2), (1, 0), (50, 0)] {
        let model = PartitionModel::new(n, m, r).unwrap();
        let fast = trace_projection(&cov, &model).unwrap();
        let oracle = (projection_matrix(n, m, r) * &sigma).trace();
        assert_rel(fast, oracle, 1e-10);
    }
}

#[test]
fn trace_matches_monte_carlo_projection_energy() {
    // tr(P Sigma) = E ||P eps||^2; 1e5 simulated FGN paths.
    let n = 100;
    let (m, r) = (5usize, 0usize);
    let p = projection_matrix(n, m, r);
    let acv = AutocovarianceSequence::fgn(0.7f64, 1.0, n - 1).unwrap();
    let cov = CovarianceModel::toeplitz(acv, n).unwrap();
    let model = PartitionModel::new(n, m, r).unwrap();
    let expected = trace_projection(&cov, &model).unwrap();

    let reps = 100_000;
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for k in 0..reps {
        let eps: Vec<f64> = simulate_fgn(n, 0.7, 1.0, Seed(606).derive(k as u64)).unwrap();
        let v = nalgebra::DVector::from_vec(eps);
        let energy = (&p * v).norm_squared();
        sum += energy;
        sum_sq += energy * energy;
    }
    let mean = sum / reps as f64;
    let var = sum_sq / reps as f64 - mean * mean;
    let se = (var / reps as f64).sqrt();
    assert!(
        (mean - expected).abs() < 3.0 * se,
        "MC {mean} vs trace {expected} (se {se})"
    );
}

#[test]
fn power_iteration_matches_dense_eigendecomposition() {
    let n = 200;
    let sigma = fgn_toeplitz(n, 0.7, 1.0);
    let top = sigma
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let acv = AutocovarianceSequence::fgn(0.7f64, 1.0, n - 1).unwrap();
    let cov = CovarianceModel::toeplitz(acv, n).unwrap();
    let tol = 1e-8;
    let fast = spectral_radius(&cov, tol).unwrap();
    assert_rel(fast, top, 1e-6);
}

#[test]
fn theoretical_penalty_matches_independent_reevaluation() {
    let n = 500;
    let (m, r, k) = (10usize, 0usize, 1.1f64);
    let m_max = 50;
    let weights = default_weights::<f64>(m_max).unwrap();
    let acv = AutocovarianceSequence::fgn(0.7f64, 1.0, n - 1).unwrap();
    let cov = CovarianceModel::toeplitz(acv, n).unwrap();
    let model = PartitionModel::new(n, m, r).unwrap();
    let fast = theoretical_penalty(m, &model, k, &cov, &weights).unwrap();

    // Everything dense and from first principles.
    let sigma = fgn_toeplitz(n, 0.7, 1.0);
    let trace = (projection_matrix(n, m, r) * &sigma).trace();
    let rho = sigma
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let pi_m = (1.0 / (m * m) as f64)
        / (1..=m_max).map(|j| 1.0 / (j * j) as f64).sum::<f64>();
    let oracle =
        k / n as f64 * ((trace + rho).sqrt() + rho.sqrt() * (2.0 * (1.0 / pi_m).ln()).sqrt()).powi(2);
    assert_rel(fast, oracle, 1e-8);
}

#[test]
fn periodogram_matches_naive_dft() {
    let n = 240;
    let x: Vec<f64> = (0..n)
        .map(|i| ((i * 48271) % 233) as f64 / 61.0 - 1.9 + (0.05 * i as f64).sin())
        .collect();
    let p = periodogram(&x).unwrap();
    let mean = x.iter().sum::<f64>() / n as f64;
    for (j, (&lam, &ord)) in p.frequencies.iter().zip(&p.ordinates).enumerate() {
        assert_rel(lam, 2.0 * std::f64::consts::PI * (j + 1) as f64 / n as f64, 1e-14);
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for (t, &v) in x.iter().enumerate() {
            let phase = lam * (t + 1) as f64;
            re += (v - mean) * phase.cos();
            im -= (v - mean) * phase.sin();
        }
        let oracle = (re * re + im * im) / (2.0 * std::f64::consts::PI * n as f64);
        assert!((ord - oracle).abs() <= 1e-9 * oracle.max(1e-12), "j = {j}");
    }
}

#[test]
fn whittle_recovers_hurst_on_moderate_samples() {
    // Light calibration check; the acceptance suite runs the full one.
    for &h in &[0.3f64, 0.7] {
        let mut errs: Vec<f64> = (0..8)
            .map(|k| {
                let x: Vec<f64> =
                    simulate_fgn(4096, h, 1.0, Seed(808).derive(k as u64)).unwrap();
                whittle_estimate(&x).unwrap().h_hat - h
            })
            .collect();
        errs.sort_by(f64::total_cmp);
        let median = 0.5 * (errs[3] + errs[4]);
        assert!(median.abs() < 0.05, "H = {h}: median error {median}");
    }
}

#[test]
fn whittle_stable_under_longer_aliasing_sums() {
    use depreg_core::hurst::whittle_estimate_with_terms;
    for &h in &[0.2f64, 0.7] {
        let x: Vec<f64> = simulate_fgn(2048, h, 1.0, Seed(31007)).unwrap();
        let base = whittle_estimate_with_terms(&x, 100).unwrap().h_hat;
        let long = whittle_estimate_with_terms(&x, 400).unwrap().h_hat;
        assert!((base - long).abs() < 1e-3, "H = {h}: {base} vs {long}");
    }
}

#[test]
fn whittle_invariant_under_affine_maps() {
    let x: Vec<f64> = simulate_fgn(2048, 0.7, 1.0, Seed(5150)).unwrap();
    let base = whittle_estimate(&x).unwrap();
    let mapped: Vec<f64> = x.iter().map(|&v| -3.5 * v + 11.0).collect();
    let shifted = whittle_estimate(&mapped).unwrap();
    assert!((base.h_hat - shifted.h_hat).abs() < 1e-6);
    assert!(!base.at_boundary);
}

#[test]
fn fgn_sample_covariance_matches_toeplitz_target() {
    // Entrywise check of the simulator's covariance on n = 64 over 1e4
    // replicates, against the closed form, within 4 standard errors.
    let n = 64;
    let h = 0.7f64;
    let reps = 10_000usize;
    let mut acc = vec![vec![0.0f64; n]; n];
    for k in 0..reps {
        let x: Vec<f64> = simulate_fgn(n, h, 1.0, Seed(4321).derive(k as u64)).unwrap();
        for i in 0..n {
            for j in i..n {
                acc[i][j] += x[i] * x[j];
            }
        }
    }
    let gamma: Vec<f64> = (0..n).map(|k| fgn_autocovariance(h, 1.0, k).unwrap()).collect();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let mean = acc[i][j] / reps as f64;
            let target = gamma[j - i];
            // Var(x_i x_j) = g_ii g_jj + g_ij^2 for Gaussians.
            let se = ((gamma[0] * gamma[0] + target * target) / reps as f64).sqrt();
            let z = (mean - target).abs() / se;
            worst = worst.max(z);
            assert!(z < 4.0, "entry ({i}, {j}): z = {z}");
        }
    }
    // With ~2e3 effective comparisons a worst z above 4 would signal bias.
    assert!(worst > 0.5, "implausibly tight agreement: {worst}");
}

#[test]
fn acf_of_fgn_matches_theoretical_correlation() {
    let n = 5000;
    let reps = 40;
    let h = 0.7f64;
    let target = fgn_autocovariance(h, 1.0, 1).unwrap() / 1.0;
    let vals: Vec<f64> = (0..reps)
        .map(|k| {
            let x: Vec<f64> = simulate_fgn(n, h, 1.0, Seed(2468).derive(k as u64)).unwrap();
            // Uncentered: the process is zero-mean; centering would inject
            // the O(n^{2H-2}) bias.
            let num: f64 = x.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n - 1) as f64;
            let den: f64 = x.iter().map(|v| v * v).sum::<f64>() / n as f64;
            num / den
        })
        .collect();
    let mean = vals.iter().sum::<f64>() / reps as f64;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / reps as f64;
    let se = (var / reps as f64).sqrt();
    assert!((mean - target).abs() < 3.0 * se.max(2e-3), "{mean} vs {target}");
}

#[test]
fn acf_of_iid_noise_stays_in_band() {
    let n = 5000;
    let x: Vec<f64> = simulate_fgn(n, 0.5, 1.0, Seed(13579)).unwrap();
    let r = sample_acf(&x, 1).unwrap();
    assert!(r[1].abs() < 2.0 / (n as f64).sqrt());
}
