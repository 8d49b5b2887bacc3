//! Deterministic seeded simulators for the error processes used in the
//! experiments, and the target signal.
//!
//! Reproducibility contract: every simulator is a pure function of its
//! parameters and a [`Seed`]. The generator is ChaCha12 seeded with the
//! 64-bit seed; uniforms consume one 64-bit word each, and standard normals
//! are produced by the inverse normal CDF (one word per draw), so the draw
//! count never depends on the values drawn. Replicate streams come from
//! [`Seed::derive`], a SplitMix64-style mix of the base seed and the
//! replicate index.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::covariance::fgn_autocovariance;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Seed for a simulated sample path. The same seed yields a bit-identical
/// path for the same parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    /// Derive an independent stream for a replicate index, via the SplitMix64
    /// finalizer applied to `base + (index + 1) * 0x9E3779B97F4A7C15`.
    pub fn derive(self, stream: u64) -> Seed {
        let mut z = self
            .0
            .wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }
}

/// Error-process family for simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessSpec {
    /// The short-memory ARMA(2,1) benchmark process.
    Arma21,
    /// Fractional Gaussian noise with the given Hurst exponent and variance.
    Fgn { hurst: f64, sigma2: f64 },
    /// The sticky non-Gaussian Markov chain with parameter `a > 0`.
    DmrChain { a: f64 },
    /// Independent centered Gaussians with the given variance.
    WhiteNoise { sigma2: f64 },
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ProcessSpec::Arma21 => Ok(()),
            ProcessSpec::Fgn { hurst, sigma2 } => {
                if !(hurst > 0.0 && hurst < 1.0) {
                    return Err(Error::Domain(format!("Hurst exponent {hurst} outside (0, 1)")));
                }
                if !(sigma2 > 0.0) {
                    return Err(Error::Domain(format!("sigma2 = {sigma2} must be positive")));
                }
                Ok(())
            }
            ProcessSpec::DmrChain { a } => {
                if !(a > 0.0) {
                    return Err(Error::Domain(format!("a = {a} must be positive")));
                }
                Ok(())
            }
            ProcessSpec::WhiteNoise { sigma2 } => {
                if sigma2 < 0.0 {
                    return Err(Error::Domain(format!("sigma2 = {sigma2} must be nonnegative")));
                }
                Ok(())
            }
        }
    }
}

pub(crate) struct StreamRng {
    rng: ChaCha12Rng,
}

impl StreamRng {
    pub(crate) fn new(seed: Seed) -> Self {
        Self { rng: ChaCha12Rng::seed_from_u64(seed.0) }
    }

    /// Uniform in the open interval (0, 1); one 64-bit word per draw.
    pub(crate) fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    /// Standard normal by the inverse CDF; one 64-bit word per draw.
    pub(crate) fn standard_normal(&mut self) -> f64 {
        inv_normal_cdf(self.uniform())
    }
}

/// Inverse of the standard normal CDF (Wichura's AS 241, double precision).
// Coefficients kept with their published digits.
#[allow(clippy::excessive_precision)]
pub fn inv_normal_cdf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = horner(
            r,
            &[
                3.387_132_872_796_366_608e0,
                1.331_416_678_917_843_774_5e2,
                1.971_590_950_306_551_442_7e3,
                1.373_169_376_550_946_112_5e4,
                4.592_195_393_154_987_145_7e4,
                6.726_577_092_700_870_085_3e4,
                3.343_057_558_358_812_810_5e4,
                2.509_080_928_730_122_672_7e3,
            ],
        );
        let den = horner(
            r,
            &[
                1.0,
                4.231_333_070_160_091_125_2e1,
                6.871_870_074_920_579_083e2,
                5.394_196_021_424_751_107_7e3,
                2.121_379_430_158_659_586_7e4,
                3.930_789_580_009_271_061e4,
                2.872_908_573_572_194_267_4e4,
                5.226_495_278_852_854_561e3,
            ],
        );
        return q * num / den;
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        horner(
            r,
            &[
                1.423_437_110_749_683_577_34e0,
                4.630_337_846_156_545_295_9e0,
                5.769_497_221_460_691_405_5e0,
                3.647_848_324_763_204_605_04e0,
                1.270_458_252_452_368_382_58e0,
                2.417_807_251_774_506_117_7e-1,
                2.272_384_498_926_918_458_33e-2,
                7.745_450_142_783_414_076_4e-4,
            ],
        ) / horner(
            r,
            &[
                1.0,
                2.053_191_626_637_758_821_87e0,
                1.676_384_830_183_803_849_4e0,
                6.897_673_349_851_000_045_5e-1,
                1.481_039_764_274_800_745_9e-1,
                1.519_866_656_361_645_719_66e-2,
                5.475_938_084_995_344_946e-4,
                1.050_750_071_644_416_843_24e-9,
            ],
        )
    } else {
        let r = r - 5.0;
        horner(
            r,
            &[
                6.657_904_643_501_103_777_2e0,
                5.463_784_911_164_114_369_9e0,
                1.784_826_539_917_291_335_8e0,
                2.965_605_718_285_048_912_3e-1,
                2.653_218_952_657_612_309_3e-2,
                1.242_660_947_388_078_438_6e-3,
                2.711_555_568_743_487_578_15e-5,
                2.010_334_399_292_288_132_65e-7,
            ],
        ) / horner(
            r,
            &[
                1.0,
                5.998_322_065_558_879_376_9e-1,
                1.369_298_809_227_358_053_1e-1,
                1.487_536_129_085_061_485_25e-2,
                7.868_691_311_456_132_591e-4,
                1.846_318_317_510_054_681_8e-5,
                1.421_511_758_316_445_888_7e-7,
                2.044_263_103_389_939_785_64e-15,
            ],
        )
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

fn horner(x: f64, coeffs: &[f64]) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

const ARMA_BURN_IN: usize = 1000;

/// Simulate the causal ARMA(2,1) process
/// `eps_i = 0.3 eps_{i-1} + 0.1 eps_{i-2} + W_i + 0.2 W_{i-1}` with standard
/// normal innovations, discarding a burn-in of 1000 steps from a zero start.
pub fn simulate_arma21<T: Scalar>(n: usize, seed: Seed) -> Vec<T> {
    let mut rng = StreamRng::new(seed);
    let mut out = Vec::with_capacity(n);
    let (mut e1, mut e2) = (0.0f64, 0.0f64);
    let mut w_prev = rng.standard_normal();
    for i in 0..ARMA_BURN_IN + n {
        let w = rng.standard_normal();
        let e = 0.3 * e1 + 0.1 * e2 + w + 0.2 * w_prev;
        e2 = e1;
        e1 = e;
        w_prev = w;
        if i >= ARMA_BURN_IN {
            out.push(T::of(e));
        }
    }
    out
}

/// Default size cap for the dense Cholesky fallback of the FGN sampler.
pub const FGN_DENSE_CAP: usize = 1 << 16;

/// Exact fractional-Gaussian-noise sample of length `n` by circulant
/// embedding of the Toeplitz covariance; falls back to a dense Cholesky
/// factorization when the embedding has an eigenvalue below
/// `-1e-10 * sigma2` (does not happen for FGN in practice).
pub fn simulate_fgn<T: Scalar>(n: usize, hurst: T, sigma2: T, seed: Seed) -> Result<Vec<T>> {
    simulate_fgn_capped(n, hurst, sigma2, seed, FGN_DENSE_CAP)
}

/// [`simulate_fgn`] with an explicit cap on the dense-fallback size.
pub fn simulate_fgn_capped<T: Scalar>(
    n: usize,
    hurst: T,
    sigma2: T,
    seed: Seed,
    dense_cap: usize,
) -> Result<Vec<T>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let gamma: Vec<T> = (0..=n)
        .map(|k| fgn_autocovariance(hurst, sigma2, k))
        .collect::<Result<_>>()?;
    let m = 2 * n;
    // Circulant first row: gamma(0..n) then the reversed interior.
    let mut row: Vec<Complex<T>> = Vec::with_capacity(m);
    for k in 0..=n {
        row.push(Complex::new(gamma[k], T::zero()));
    }
    for k in (1..n).rev() {
        row.push(Complex::new(gamma[k], T::zero()));
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);
    let eigen: Vec<T> = row.iter().map(|c| c.re).collect();
    let floor = -T::of(1e-10) * sigma2;
    if eigen.iter().any(|&l| l < floor) {
        if n > dense_cap {
            return Err(Error::SimulationTooLarge { n, cap: dense_cap });
        }
        return simulate_fgn_cholesky(n, &gamma, seed);
    }

    let mut rng = StreamRng::new(seed);
    let half = n; // m / 2
    let inv_sqrt2 = T::of(std::f64::consts::FRAC_1_SQRT_2);
    let mut spectrum = vec![Complex::new(T::zero(), T::zero()); m];
    let sqrt_eig = |l: T| l.max(T::zero()).sqrt();
    spectrum[0] = Complex::new(sqrt_eig(eigen[0]) * T::of(rng.standard_normal()), T::zero());
    for k in 1..half {
        let a = T::of(rng.standard_normal());
        let b = T::of(rng.standard_normal());
        let s = sqrt_eig(eigen[k]) * inv_sqrt2;
        spectrum[k] = Complex::new(s * a, s * b);
        spectrum[m - k] = spectrum[k].conj();
    }
    spectrum[half] =
        Complex::new(sqrt_eig(eigen[half]) * T::of(rng.standard_normal()), T::zero());

    fft.process(&mut spectrum);
    let scale = T::of_usize(m).sqrt().recip();
    Ok(spectrum[..n].iter().map(|c| c.re * scale).collect())
}

fn simulate_fgn_cholesky<T: Scalar>(n: usize, gamma: &[T], seed: Seed) -> Result<Vec<T>> {
    let mut l = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = gamma[i - j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= T::zero() {
                    return Err(Error::Domain(
                        "covariance not positive definite in Cholesky fallback".into(),
                    ));
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut rng = StreamRng::new(seed);
    let z: Vec<T> = (0..n).map(|_| T::of(rng.standard_normal())).collect();
    Ok((0..n)
        .map(|i| (0..=i).map(|j| l[i][j] * z[j]).sum())
        .collect())
}

/// Simulate the sticky Markov chain: `Z_0` from the invariant law (density
/// `a x^{a-1}` on [0, 1]), transitions hold with probability `1 - Z` and
/// otherwise redraw from the density `(1+a) x^a`; output `eps = Z^a - 0.5`,
/// which is uniform on [-0.5, 0.5].
pub fn simulate_dmr_chain<T: Scalar>(n: usize, a: f64, seed: Seed) -> Result<Vec<T>> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("a = {a} must be positive")));
    }
    let mut rng = StreamRng::new(seed);
    let mut z = rng.uniform().powf(1.0 / a);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        if rng.uniform() < z {
            z = rng.uniform().powf(1.0 / (1.0 + a));
        }
        out.push(T::of(z.powf(a) - 0.5));
    }
    Ok(out)
}

/// The simulation target `f*(t) = 3 - 0.1 t + 0.5 t^2 - t^3 + sin(8 t)`.
pub fn target_signal<T: Scalar>(t: T) -> T {
    T::of(3.0) - T::of(0.1) * t + T::of(0.5) * t * t - t * t * t
        + (T::of(8.0) * t).sin()
}

/// Sample the target on the design grid `i/n`, `i = 1..=n`.
pub fn target_grid<T: Scalar>(n: usize) -> Vec<T> {
    (1..=n)
        .map(|i| target_signal(T::of_usize(i) / T::of_usize(n)))
        .collect()
}

/// Simulate the error process alone.
pub fn simulate_noise<T: Scalar>(n: usize, spec: ProcessSpec, seed: Seed) -> Result<Vec<T>> {
    spec.validate()?;
    match spec {
        ProcessSpec::Arma21 => Ok(simulate_arma21(n, seed)),
        ProcessSpec::Fgn { hurst, sigma2 } => {
            simulate_fgn(n, T::of(hurst), T::of(sigma2), seed)
        }
        ProcessSpec::DmrChain { a } => simulate_dmr_chain(n, a, seed),
        ProcessSpec::WhiteNoise { sigma2 } => {
            let sd = T::of(sigma2).sqrt();
            let mut rng = StreamRng::new(seed);
            Ok((0..n).map(|_| sd * T::of(rng.standard_normal())).collect())
        }
    }
}

/// Observations `Y_i = f*(i/n) + eps_i` with the chosen error process.
pub fn generate_observations<T: Scalar>(
    n: usize,
    spec: ProcessSpec,
    seed: Seed,
) -> Result<Vec<T>> {
    let noise = simulate_noise::<T>(n, spec, seed)?;
    Ok(target_grid::<T>(n)
        .into_iter()
        .zip(noise)
        .map(|(f, e)| f + e)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_rel(a: f64, b: f64, tol: f64) {
        let scale = b.abs().max(1e-300);
        assert!((a - b).abs() / scale <= tol, "{a} vs {b} (rel)");
    }

    fn mean(x: &[f64]) -> f64 {
        x.iter().sum::<f64>() / x.len() as f64
    }

    fn variance(x: &[f64]) -> f64 {
        let m = mean(x);
        x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
    }

    #[test]
    fn inverse_normal_cdf_round_trips_against_quadrature() {
        // Independent check: integrate the normal density by Simpson's rule
        // from 0 to x and compare Phi(x) with the requested p.
        let phi = |x: f64| {
            let steps = 20_000;
            let (lo, hi) = if x >= 0.0 { (0.0, x) } else { (x, 0.0) };
            let h = (hi - lo) / steps as f64;
            let dens =
                |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let mut s = dens(lo) + dens(hi);
            for i in 1..steps {
                let t = lo + i as f64 * h;
                s += dens(t) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let integral = s * h / 3.0;
            if x >= 0.0 {
                0.5 + integral
            } else {
                0.5 - integral
            }
        };
        for &p in &[1e-9, 1e-4, 0.01, 0.2, 0.5, 0.7, 0.975, 0.9999, 1.0 - 1e-9] {
            let x = inv_normal_cdf(p);
            assert!((phi(x) - p).abs() < 1e-12, "p = {p}: phi({x}) = {}", phi(x));
        }
        assert_eq!(inv_normal_cdf(0.5), 0.0);
    }

    #[test]
    fn seeds_are_reproducible_and_streams_differ() {
        let a: Vec<f64> = simulate_arma21(200, Seed(42));
        let b: Vec<f64> = simulate_arma21(200, Seed(42));
        assert_eq!(a, b);
        let c: Vec<f64> = simulate_arma21(200, Seed(43));
        assert_ne!(a, c);
        assert_ne!(Seed(42).derive(0), Seed(42).derive(1));
    }

    #[test]
    fn arma_moments_match_ma_infinity_oracle() {
        // Oracle: psi-weight expansion of the ARMA(2,1). The recursion
        // psi_0 = 1, psi_1 = phi1 + theta1, psi_j = phi1 psi_{j-1} + phi2 psi_{j-2}
        // gives gamma(k) = sum_j psi_j psi_{j+k}.
        let mut psi = vec![1.0f64, 0.5];
        for j in 2..400 {
            psi.push(0.3 * psi[j - 1] + 0.1 * psi[j - 2]);
        }
        let gamma0: f64 = psi.iter().map(|p| p * p).sum();
        let gamma1: f64 = psi.windows(2).map(|w| w[0] * w[1]).sum();

        let n = 100_000;
        let x: Vec<f64> = simulate_arma21(n, Seed(7));
        assert!(mean(&x).abs() < 0.02);
        assert_rel(variance(&x), gamma0, 0.03);
        let r = crate::hurst::sample_acf(&x, 1).unwrap();
        // Bartlett-order standard error ~ c/sqrt(n); 3 SEs with c = 2.
        assert!((r[1] - gamma1 / gamma0).abs() < 6.0 / (n as f64).sqrt());
    }

    #[test]
    fn fgn_half_is_white_noise() {
        let n = 20_000;
        let x: Vec<f64> = simulate_fgn(n, 0.5, 1.0, Seed(11)).unwrap();
        assert_rel(variance(&x), 1.0, 0.05);
        let acv = crate::hurst::sample_autocovariance(&x, 5).unwrap();
        for &g in &acv[1..] {
            assert!(g.abs() < 3.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn fgn_lag_one_matches_closed_form() {
        // Uncentered autocovariance (the process is zero-mean by
        // construction) is exactly unbiased; the centered version would
        // carry the O(n^{2H-2}) mean-subtraction bias, which is about 4
        // standard errors here.
        let reps = 200;
        let n = 2000;
        let mut lag1 = Vec::with_capacity(reps);
        for k in 0..reps {
            let x: Vec<f64> = simulate_fgn(n, 0.7, 1.0, Seed(100).derive(k as u64)).unwrap();
            let g1 = x.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n - 1) as f64;
            lag1.push(g1);
        }
        let m = mean(&lag1);
        let se = (variance(&lag1) / reps as f64).sqrt();
        assert!(
            (m - 0.319_507_910_772_894_2).abs() < 3.0 * se,
            "mean {m}, se {se}"
        );
    }

    #[test]
    fn fgn_partial_sum_scaling() {
        // log Var(S_n) against log n has slope 2H.
        for &h in &[0.2f64, 0.7] {
            let sizes = [64usize, 256, 1024];
            let reps = 300;
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (si, &n) in sizes.iter().enumerate() {
                let mut sums = Vec::with_capacity(reps);
                for k in 0..reps {
                    let seed = Seed(1234).derive((si * reps + k) as u64);
                    let x: Vec<f64> = simulate_fgn(n, h, 1.0, seed).unwrap();
                    sums.push(x.iter().sum::<f64>());
                }
                xs.push((n as f64).ln());
                ys.push(variance(&sums).ln());
            }
            let slope = crate::linalg::ls_slope(&xs, &ys);
            assert!((slope - 2.0 * h).abs() < 0.1, "H = {h}: slope {slope}");
        }
    }

    #[test]
    fn dmr_marginal_is_centered_uniform() {
        let n = 100_000;
        let x: Vec<f64> = simulate_dmr_chain(n, 8.0, Seed(3)).unwrap();
        assert!(mean(&x).abs() < 0.005, "mean {}", mean(&x));
        assert!((variance(&x) - 1.0 / 12.0).abs() < 0.005);
        for &v in &x {
            assert!((-0.5..=0.5).contains(&v));
        }
    }

    #[test]
    fn dmr_lag_one_matches_long_run_oracle() {
        // Long-run Monte Carlo oracle for the lag-1 autocovariance at a = 8.
        let oracle_run: Vec<f64> = simulate_dmr_chain(1_000_000, 8.0, Seed(99)).unwrap();
        let oracle = crate::hurst::sample_autocovariance(&oracle_run, 1).unwrap()[1];

        let n = 200_000;
        let x: Vec<f64> = simulate_dmr_chain(n, 8.0, Seed(17)).unwrap();
        let got = crate::hurst::sample_autocovariance(&x, 1).unwrap()[1];
        // 3 SEs with a factor-2 inflation for serial dependence.
        let se = (variance(&x) / n as f64).sqrt() * 2.0;
        assert!((got - oracle).abs() < 3.0 * se, "{got} vs {oracle}");
    }

    #[test]
    fn dmr_long_memory_partial_sums_grow_superlinearly() {
        let reps = 200;
        let sizes = [256usize, 1024, 4096, 8192];
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (si, &n) in sizes.iter().enumerate() {
            let mut sums = Vec::with_capacity(reps);
            for k in 0..reps {
                let seed = Seed(555).derive((si * reps + k) as u64);
                let x: Vec<f64> = simulate_dmr_chain(n, 0.5, seed).unwrap();
                sums.push(x.iter().sum::<f64>());
            }
            xs.push((n as f64).ln());
            ys.push(variance(&sums).ln());
        }
        let slope = crate::linalg::ls_slope(&xs, &ys);
        assert!(slope > 1.0, "slope {slope}");
    }

    #[test]
    fn dmr_holds_with_probability_one_minus_state() {
        let n = 200_000;
        let a = 1.5;
        let x: Vec<f64> = simulate_dmr_chain(n, a, Seed(21)).unwrap();
        // Recover Z from eps and bin the hold frequency by state.
        let z: Vec<f64> = x.iter().map(|&e| (e + 0.5).powf(1.0 / a)).collect();
        let mut holds = [0usize; 5];
        let mut totals = [0usize; 5];
        let mut zsum = [0.0f64; 5];
        for w in z.windows(2) {
            let bin = ((w[0] * 5.0) as usize).min(4);
            totals[bin] += 1;
            zsum[bin] += w[0];
            if w[1] == w[0] {
                holds[bin] += 1;
            }
        }
        for b in 0..5 {
            if totals[b] < 500 {
                continue;
            }
            let expect = 1.0 - zsum[b] / totals[b] as f64;
            let got = holds[b] as f64 / totals[b] as f64;
            let se = (expect * (1.0 - expect) / totals[b] as f64).sqrt();
            assert!((got - expect).abs() < 5.0 * se.max(1e-3), "bin {b}: {got} vs {expect}");
        }
    }

    #[test]
    fn target_signal_values() {
        assert_rel(target_signal(0.0f64), 3.0, 0.0);
        assert_rel(target_signal(1.0f64), 3.389_358_246_623_382, 1e-15);
        assert_rel(target_signal(0.5f64), 2.1931975046920717, 1e-15);
    }

    #[test]
    fn observations_compose_signal_and_noise() {
        let y: Vec<f64> =
            generate_observations(50, ProcessSpec::WhiteNoise { sigma2: 0.0 }, Seed(1)).unwrap();
        let f = target_grid::<f64>(50);
        assert_eq!(y, f);

        let a: Vec<f64> = generate_observations(300, ProcessSpec::Arma21, Seed(5)).unwrap();
        let b: Vec<f64> = generate_observations(300, ProcessSpec::Arma21, Seed(5)).unwrap();
        assert_eq!(a, b);

        let n = 100_000;
        let y: Vec<f64> = generate_observations(n, ProcessSpec::Arma21, Seed(8)).unwrap();
        let f = target_grid::<f64>(n);
        let noise: Vec<f64> = y.iter().zip(&f).map(|(a, b)| a - b).collect();
        assert!(mean(&noise).abs() < 0.02);
    }
}
