//! Whittle estimation of the fractional-Gaussian-noise Hurst exponent, plus
//! periodogram and sample-autocorrelation diagnostics.
//!
//! The spectral model is the FGN family itself; the Whittle objective
//! profiles the variance scale out, so the spectral density is only needed
//! up to a multiplicative constant.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Periodogram ordinates at the positive Fourier frequencies
/// `lambda_j = 2 pi j / n`, `j = 1..floor((n-1)/2)`, mean removed.
#[derive(Debug, Clone)]
pub struct Periodogram<T: Scalar> {
    pub frequencies: Vec<T>,
    pub ordinates: Vec<T>,
}

/// Compute the periodogram `I(lambda_j) = |sum_t (x_t - mean) e^{-i t lambda_j}|^2 / (2 pi n)`
/// by FFT. The zero frequency is excluded (the mean is subtracted first); for
/// even `n` the Nyquist ordinate is likewise not part of the returned grid.
pub fn periodogram<T: Scalar>(x: &[T]) -> Result<Periodogram<T>> {
    let n = x.len();
    if n < 8 {
        return Err(Error::InsufficientData(format!(
            "periodogram needs n >= 8, got {n}"
        )));
    }
    let mean = x.iter().copied().sum::<T>() / T::of_usize(n);
    let mut buf: Vec<Complex<T>> = x
        .iter()
        .map(|&v| Complex::new(v - mean, T::zero()))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let m = (n - 1) / 2;
    let two_pi = T::of(2.0) * T::PI();
    let norm = (two_pi * T::of_usize(n)).recip();
    let frequencies = (1..=m).map(|j| two_pi * T::of_usize(j) / T::of_usize(n)).collect();
    let ordinates = (1..=m).map(|j| buf[j].norm_sqr() * norm).collect();
    Ok(Periodogram { frequencies, ordinates })
}

/// Unit-scale FGN spectral density with the default aliasing truncation.
pub fn fgn_spectral_density<T: Scalar>(hurst: T, lambda: T) -> Result<T> {
    fgn_spectral_density_with_terms(hurst, lambda, 100)
}

/// Unit-scale FGN spectral density
/// `g_H(lambda) = 2 (1 - cos lambda) * sum_{j in Z} |lambda + 2 pi j|^{-2H-1}`,
/// with the sum truncated at `|j| <= terms` and the remainder handled by an
/// Euler-Maclaurin integral correction (relative error far below 1e-6 for
/// `terms >= 50` over the whole parameter range).
pub fn fgn_spectral_density_with_terms<T: Scalar>(
    hurst: T,
    lambda: T,
    terms: usize,
) -> Result<T> {
    if !(hurst > T::zero() && hurst < T::one()) {
        return Err(Error::Domain(format!("Hurst exponent {hurst} outside (0, 1)")));
    }
    if !(lambda > T::zero() && lambda <= T::PI()) {
        return Err(Error::Domain(format!("frequency {lambda} outside (0, pi]")));
    }
    let two_pi = T::of(2.0) * T::PI();
    let expo = -(T::of(2.0) * hurst + T::one());
    let mut s = lambda.powf(expo);
    for j in 1..=terms {
        let tj = two_pi * T::of_usize(j);
        s = s + (tj + lambda).powf(expo) + (tj - lambda).powf(expo);
    }
    // Euler-Maclaurin tail beyond |j| = terms, one side at a time:
    // sum_{j>J} f(j) ~ int_{J+1} f + f(J+1)/2 - f'(J+1)/12.
    let two_h = T::of(2.0) * hurst;
    let mut tail = T::zero();
    for sign in [T::one(), -T::one()] {
        let a = two_pi * T::of_usize(terms + 1) + sign * lambda;
        let integral = a.powf(-two_h) / (two_pi * two_h);
        let half_point = a.powf(expo) * T::of(0.5);
        let derivative = two_pi * (two_h + T::one()) * a.powf(expo - T::one()) / T::of(12.0);
        tail = tail + integral + half_point + derivative;
    }
    Ok(T::of(2.0) * (T::one() - lambda.cos()) * (s + tail))
}

/// Result of the Whittle fit.
#[derive(Debug, Clone)]
pub struct WhittleFit<T: Scalar> {
    /// Estimated Hurst exponent.
    pub h_hat: T,
    /// Profiled Whittle objective at the optimum.
    pub objective_value: T,
    /// Profiled variance scale: the mean ratio periodogram / density.
    pub scale_hat: T,
    /// Bracket the golden-section search ran on.
    pub bracket: (T, T),
    /// Set when the optimum sits against the admissible boundary.
    pub at_boundary: bool,
}

const H_MIN: f64 = 0.01;
const H_MAX: f64 = 0.99;
const H_TOL: f64 = 1e-4;

fn whittle_objective<T: Scalar>(h: T, pgram: &Periodogram<T>, terms: usize) -> T {
    let m = T::of_usize(pgram.ordinates.len());
    let mut ratio_sum = T::zero();
    let mut log_sum = T::zero();
    for (&lam, &ord) in pgram.frequencies.iter().zip(&pgram.ordinates) {
        let g = fgn_spectral_density_with_terms(h, lam, terms)
            .expect("H and lambda validated by caller");
        ratio_sum += ord / g;
        log_sum += g.ln();
    }
    (ratio_sum / m).ln() + log_sum / m
}

/// Whittle estimate of the Hurst exponent of `x` under the FGN spectral
/// model: minimize the profiled objective
/// `log(mean I/g_H) + mean log g_H` over `H in [0.01, 0.99]`, by a five-point
/// coarse scan followed by golden-section search to 1e-4 in `H`.
pub fn whittle_estimate<T: Scalar>(x: &[T]) -> Result<WhittleFit<T>> {
    whittle_estimate_with_terms(x, 100)
}

/// [`whittle_estimate`] with an explicit aliasing-sum truncation.
pub fn whittle_estimate_with_terms<T: Scalar>(x: &[T], terms: usize) -> Result<WhittleFit<T>> {
    let n = x.len();
    if n < 64 {
        return Err(Error::InsufficientData(format!(
            "whittle estimation needs n >= 64, got {n}"
        )));
    }
    let pgram = periodogram(x)?;
    let mean = x.iter().copied().sum::<T>() / T::of_usize(n);
    let mean_sq = x.iter().map(|&v| v * v).sum::<T>() / T::of_usize(n);
    let var = x.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / T::of_usize(n);
    if var <= T::epsilon() * T::epsilon() * T::of_usize(n) * mean_sq.max(T::min_positive_value())
    {
        return Err(Error::Whittle("input series is constant".into()));
    }

    let w = |h: T| whittle_objective(h, &pgram, terms);

    // Coarse scan seeds the golden-section bracket.
    let scan: Vec<T> = (0..5)
        .map(|i| T::of(H_MIN) + T::of_usize(i) * T::of((H_MAX - H_MIN) / 4.0))
        .collect();
    let mut best = 0usize;
    let mut best_val = w(scan[0]);
    for (i, &h) in scan.iter().enumerate().skip(1) {
        let v = w(h);
        if v < best_val {
            best = i;
            best_val = v;
        }
    }
    let bracket = (scan[best.saturating_sub(1)], scan[(best + 1).min(4)]);

    let (mut a, mut b) = bracket;
    let gr = T::of((5f64.sqrt() - 1.0) / 2.0);
    let tol = T::of(H_TOL);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = w(c);
    let mut fd = w(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = w(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = w(d);
        }
    }
    let h_hat = (a + b) * T::of(0.5);
    let objective_value = w(h_hat);
    let scale_hat = {
        let m = T::of_usize(pgram.ordinates.len());
        let mut s = T::zero();
        for (&lam, &ord) in pgram.frequencies.iter().zip(&pgram.ordinates) {
            s += ord / fgn_spectral_density_with_terms(h_hat, lam, terms)?;
        }
        s / m
    };
    // Against either bracket edge means the coarse scan mis-bracketed (the
    // optimum sits at or beyond the edge); at the domain edges this is the
    // ordinary boundary case.
    let margin = T::of(2.0 * H_TOL);
    let at_boundary = h_hat - bracket.0 <= margin || bracket.1 - h_hat <= margin;
    Ok(WhittleFit { h_hat, objective_value, scale_hat, bracket, at_boundary })
}

/// Sample autocorrelations up to `max_lag`:
/// `r_k = sum_t (x_t - mean)(x_{t+k} - mean) / sum_t (x_t - mean)^2`.
pub fn sample_acf<T: Scalar>(x: &[T], max_lag: usize) -> Result<Vec<T>> {
    let n = x.len();
    if max_lag >= n {
        return Err(Error::InsufficientData(format!(
            "max_lag {max_lag} must be below n = {n}"
        )));
    }
    let mean = x.iter().copied().sum::<T>() / T::of_usize(n);
    let centered: Vec<T> = x.iter().map(|&v| v - mean).collect();
    let denom: T = centered.iter().map(|&v| v * v).sum();
    if !(denom > T::zero()) {
        return Err(Error::Domain("zero-variance input".into()));
    }
    Ok((0..=max_lag)
        .map(|k| {
            let num: T = (0..n - k).map(|t| centered[t] * centered[t + k]).sum();
            num / denom
        })
        .collect())
}

/// Sample autocovariance at the given lags (biased, divisor `n`).
pub fn sample_autocovariance<T: Scalar>(x: &[T], max_lag: usize) -> Result<Vec<T>> {
    let n = x.len();
    if max_lag >= n {
        return Err(Error::InsufficientData(format!(
            "max_lag {max_lag} must be below n = {n}"
        )));
    }
    let mean = x.iter().copied().sum::<T>() / T::of_usize(n);
    let centered: Vec<T> = x.iter().map(|&v| v - mean).collect();
    Ok((0..=max_lag)
        .map(|k| {
            let num: T = (0..n - k).map(|t| centered[t] * centered[t + k]).sum();
            num / T::of_usize(n)
        })
        .collect())
}
