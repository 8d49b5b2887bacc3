//! Monte Carlo harness for risk curves and method comparisons, with CSV
//! persistence and a flat key-value configuration format.
//!
//! Trials run in parallel on independent derived seeds; aggregation is a
//! sequential reduction in trial order, so results are bit-identical
//! regardless of thread count.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::ls_slope;
use crate::methods::{run_method_on_curve, MethodKind, MethodSpec};
use crate::piecewise::{contrast_curve, fit_piecewise, PartitionModel};
use crate::processes::{generate_observations, target_grid, ProcessSpec, Seed};
use crate::scalar::Scalar;

/// Full experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub process: ProcessSpec,
    pub n: usize,
    pub degree: usize,
    pub m_max: usize,
    pub methods: Vec<MethodSpec>,
    pub trials: usize,
    pub base_seed: Seed,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.process.validate()?;
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.m_max < 1 || self.m_max * (self.degree + 1) > self.n {
            return Err(Error::Config(format!(
                "m_max = {} invalid for n = {}, degree {}",
                self.m_max, self.n, self.degree
            )));
        }
        for spec in &self.methods {
            if spec.degree != self.degree || spec.m_max != self.m_max {
                return Err(Error::Config(
                    "all methods must share the experiment's degree and m_max".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One successful method run within one trial.
#[derive(Debug, Clone)]
pub struct MethodTrialRecord<T: Scalar> {
    pub trial: usize,
    pub m_selected: usize,
    /// True risk `||f* - f_hat||_n^2` of the selected model.
    pub risk: T,
    pub h1: Option<T>,
    pub h2: Option<T>,
}

/// Per-method results across trials.
#[derive(Debug, Clone)]
pub struct MethodReport<T: Scalar> {
    pub spec: MethodSpec,
    pub records: Vec<MethodTrialRecord<T>>,
    /// Failures as `(trial, message)`; a failed trial has no record.
    pub failures: Vec<(usize, String)>,
}

/// Aggregated experiment results.
#[derive(Debug, Clone)]
pub struct RiskReport<T: Scalar> {
    pub config_trials: usize,
    /// Mean over trials of the true risk of every fixed `m = 1..=m_max`.
    pub per_m_risk: Vec<T>,
    /// Partition size minimizing `per_m_risk` (1-based).
    pub oracle_m: usize,
    /// Trial-wise minimum over `m` of the true risk.
    pub per_trial_oracle_risk: Vec<T>,
    pub per_method: Vec<MethodReport<T>>,
}

struct TrialOutcome<T: Scalar> {
    risks: Vec<T>,
    oracle_risk: T,
    methods: Vec<std::result::Result<MethodTrialRecord<T>, String>>,
}

fn run_trial<T: Scalar>(config: &ExperimentConfig, trial: usize) -> Result<TrialOutcome<T>> {
    let seed = config.base_seed.derive(trial as u64);
    let y: Vec<T> = generate_observations(config.n, config.process, seed)?;
    let signal = target_grid::<T>(config.n);

    let curve = contrast_curve(&y, config.degree, config.m_max)?;
    let mut risks = Vec::with_capacity(config.m_max);
    for m in 1..=config.m_max {
        let model = PartitionModel::new(config.n, m, config.degree)?;
        let fit = fit_piecewise(&y, &model)?;
        let risk: T = signal
            .iter()
            .zip(&fit.fitted)
            .map(|(&f, &g)| (f - g) * (f - g))
            .sum::<T>()
            / T::of_usize(config.n);
        risks.push(risk);
    }
    let oracle_risk = risks.iter().copied().fold(T::infinity(), T::min);

    let methods = config
        .methods
        .iter()
        .map(|spec| {
            run_method_on_curve(&y, spec, &curve)
                .map(|r| MethodTrialRecord {
                    trial,
                    m_selected: r.m_selected,
                    risk: risks[r.m_selected - 1],
                    h1: r.h_estimates.first().copied(),
                    h2: r.h_estimates.get(1).copied(),
                })
                .map_err(|e| e.to_string())
        })
        .collect();

    Ok(TrialOutcome { risks, oracle_risk, methods })
}

/// Run the experiment: per trial, simulate observations, fit every partition
/// size, evaluate the true risk against the known signal, and apply each
/// method. Per-trial method failures are recorded, not fatal, unless a
/// method fails in every trial.
pub fn run_experiment<T: Scalar>(config: &ExperimentConfig) -> Result<RiskReport<T>> {
    config.validate()?;
    let outcomes: Vec<TrialOutcome<T>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, trial))
        .collect::<Result<_>>()?;

    // Sequential reduction in trial order keeps results thread-count
    // independent.
    let mut per_m_risk = vec![T::zero(); config.m_max];
    let mut per_trial_oracle_risk = Vec::with_capacity(config.trials);
    let mut per_method: Vec<MethodReport<T>> = config
        .methods
        .iter()
        .map(|spec| MethodReport { spec: *spec, records: Vec::new(), failures: Vec::new() })
        .collect();
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        for (acc, r) in per_m_risk.iter_mut().zip(&outcome.risks) {
            *acc += *r;
        }
        per_trial_oracle_risk.push(outcome.oracle_risk);
        for (report, res) in per_method.iter_mut().zip(outcome.methods) {
            match res {
                Ok(rec) => report.records.push(rec),
                Err(msg) => report.failures.push((trial, msg)),
            }
        }
    }
    let t = T::of_usize(config.trials);
    for r in per_m_risk.iter_mut() {
        *r /= t;
    }
    for report in &per_method {
        if report.records.is_empty() && !report.failures.is_empty() {
            return Err(Error::Config(format!(
                "method {} failed in every trial; first failure: {}",
                report.spec.kind.name(),
                report.failures[0].1
            )));
        }
    }
    let oracle_m = per_m_risk
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("risks are finite"))
        .map(|(i, _)| i + 1)
        .expect("m_max >= 1");
    Ok(RiskReport {
        config_trials: config.trials,
        per_m_risk,
        oracle_m,
        per_trial_oracle_risk,
        per_method,
    })
}

/// Least-squares slope of `log(per_m_risk)` against `log(m)` over the window
/// `m_lo..=m_hi`: the empirical variance exponent when the bias is
/// negligible there.
pub fn variance_exponent<T: Scalar>(report: &RiskReport<T>, m_lo: usize, m_hi: usize) -> Result<T> {
    if m_lo < 1 || m_hi <= m_lo || m_hi > report.per_m_risk.len() {
        return Err(Error::Domain(format!(
            "window [{m_lo}, {m_hi}] invalid for m_max = {}",
            report.per_m_risk.len()
        )));
    }
    let mut xs = Vec::with_capacity(m_hi - m_lo + 1);
    let mut ys = Vec::with_capacity(m_hi - m_lo + 1);
    for m in m_lo..=m_hi {
        let r = report.per_m_risk[m - 1];
        if !(r > T::zero()) {
            return Err(Error::Domain(format!("nonpositive risk at m = {m}")));
        }
        xs.push(T::of_usize(m).ln());
        ys.push(r.ln());
    }
    Ok(ls_slope(&xs, &ys))
}

fn fmt_value<T: Scalar>(v: T) -> String {
    // 12 significant digits.
    format!("{:.11e}", v)
}

/// Write `<path>.risk.csv` (header `m,mean_risk`) and `<path>.methods.csv`
/// (header `method,trial,m_selected,risk,H1,H2`), decimal values with 12
/// significant digits. Failed trials carry no row.
pub fn write_report_csv<T: Scalar>(report: &RiskReport<T>, path: &str) -> Result<()> {
    let mut risk = String::from("m,mean_risk\n");
    for (i, r) in report.per_m_risk.iter().enumerate() {
        let _ = writeln!(risk, "{},{}", i + 1, fmt_value(*r));
    }
    let risk_path = format!("{path}.risk.csv");
    write_file(&risk_path, &risk)?;

    let mut methods = String::from("method,trial,m_selected,risk,H1,H2\n");
    for report in &report.per_method {
        let name = report.spec.kind.name();
        for rec in &report.records {
            let h1 = rec.h1.map(fmt_value).unwrap_or_default();
            let h2 = rec.h2.map(fmt_value).unwrap_or_default();
            let _ = writeln!(
                methods,
                "{name},{},{},{},{h1},{h2}",
                rec.trial,
                rec.m_selected,
                fmt_value(rec.risk)
            );
        }
    }
    let methods_path = format!("{path}.methods.csv");
    write_file(&methods_path, &methods)
}

fn write_file(path: &str, contents: &str) -> Result<()> {
    if let Some(parent) = Path::new(path).parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| Error::Io { path: path.into(), source: e })?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::Io { path: path.into(), source: e })
}

/// Parse the flat `key = value` experiment configuration format. Lines
/// starting with `#` are comments. Keys: `process` (fgn|arma21|dmr|whitenoise),
/// `hurst`, `sigma2`, `a`, `n`, `r`, `m_max`, `methods` (comma-separated
/// names, e.g. `cdj,why,hgiven(0.2)`), `trials`, `base_seed`.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut process_name: Option<String> = None;
    let mut hurst = 0.7f64;
    let mut sigma2 = 1.0f64;
    let mut a = 8.0f64;
    let mut n: Option<usize> = None;
    let mut degree = 0usize;
    let mut m_max: Option<usize> = None;
    let mut methods: Vec<MethodKind> = Vec::new();
    let mut trials = 100usize;
    let mut base_seed = 0u64;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected key = value", lineno + 1))
        })?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        let bad = |what: &str| Error::Config(format!("line {}: bad {what}: {value}", lineno + 1));
        match key.as_str() {
            "process" => process_name = Some(value.to_ascii_lowercase()),
            "hurst" => hurst = value.parse().map_err(|_| bad("hurst"))?,
            "sigma2" => sigma2 = value.parse().map_err(|_| bad("sigma2"))?,
            "a" => a = value.parse().map_err(|_| bad("a"))?,
            "n" => n = Some(value.parse().map_err(|_| bad("n"))?),
            "r" | "degree" => degree = value.parse().map_err(|_| bad("degree"))?,
            "m_max" | "mmax" => m_max = Some(value.parse().map_err(|_| bad("m_max"))?),
            "methods" => {
                methods = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(MethodKind::parse)
                    .collect::<Result<_>>()?;
            }
            "trials" => trials = value.parse().map_err(|_| bad("trials"))?,
            "base_seed" | "seed" => base_seed = value.parse().map_err(|_| bad("base_seed"))?,
            other => {
                return Err(Error::Config(format!("line {}: unknown key {other:?}", lineno + 1)))
            }
        }
    }

    let n = n.ok_or_else(|| Error::Config("missing key: n".into()))?;
    let process = match process_name.as_deref() {
        Some("fgn") => ProcessSpec::Fgn { hurst, sigma2 },
        Some("arma21") | Some("arma") => ProcessSpec::Arma21,
        Some("dmr") | Some("chain") => ProcessSpec::DmrChain { a },
        Some("whitenoise") | Some("white") => ProcessSpec::WhiteNoise { sigma2 },
        Some(other) => return Err(Error::Config(format!("unknown process {other:?}"))),
        None => return Err(Error::Config("missing key: process".into())),
    };
    let m_max = m_max.unwrap_or_else(|| (n / ((degree + 1) * 5)).clamp(1, 200));
    let methods = methods
        .into_iter()
        .map(|kind| MethodSpec::new(kind, degree, m_max))
        .collect::<Result<Vec<_>>>()?;
    let config = ExperimentConfig {
        process,
        n,
        degree,
        m_max,
        methods,
        trials,
        base_seed: Seed(base_seed),
    };
    config.validate()?;
    Ok(config)
}
