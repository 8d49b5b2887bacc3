//! `depreg` command-line driver.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use depreg::{load_series, nile_analysis, NileMethodReport, SeriesFile};
use depreg_core::experiment::{parse_config, run_experiment, write_report_csv};
use depreg_core::methods::{run_method, MethodKind, MethodSpec};
use depreg_core::piecewise::{fit_piecewise, PartitionModel};
use depreg_core::processes::{generate_observations, simulate_noise, ProcessSpec, Seed};
use depreg_core::{Error, MethodResultF64};

#[derive(Parser)]
#[command(
    name = "depreg",
    about = "Piecewise-polynomial regression under dependent errors",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProcessName {
    Fgn,
    Arma21,
    Dmr,
    Whitenoise,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate observations (signal plus noise) or a raw noise path.
    Simulate(SimulateArgs),
    /// Fit a fixed partition size and write fitted values and residuals.
    Fit(FitArgs),
    /// Run one selection method on a series.
    Select(SelectArgs),
    /// Run a Monte Carlo experiment from a config file.
    Experiment(ExperimentArgs),
    /// Run the annual-minima analysis (classical jump vs two-step Whittle).
    Nile(NileArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    process: ProcessName,
    /// Hurst exponent (fgn only).
    #[arg(long, default_value_t = 0.7)]
    hurst: f64,
    /// Noise variance (fgn and whitenoise).
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    /// Markov-chain parameter (dmr only).
    #[arg(long, default_value_t = 8.0)]
    a: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Write the raw error process instead of signal plus noise.
    #[arg(long, default_value_t = false)]
    noise_only: bool,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Partition size.
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    degree: usize,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// cdj | hgiven | why | cdjwhres | whywhres
    #[arg(long)]
    method: String,
    /// Hurst exponent for the hgiven method.
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long, default_value_t = 0)]
    degree: usize,
    #[arg(long)]
    mmax: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Config file; every key can also be set (or overridden) by a flag.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for `experiment.risk.csv` and `experiment.methods.csv`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    process: Option<ProcessName>,
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    mmax: Option<usize>,
    /// Comma-separated method names, e.g. `cdj,why,hgiven(0.2)`.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct NileArgs {
    /// Series file (year,value or one value per line).
    #[arg(long)]
    data: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

enum AppError {
    /// Bad input: missing/invalid files, options, or configuration. Exit 2.
    Input(String),
    /// Numerical or pipeline failure during computation. Exit 3.
    Pipeline(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Input(_) => 2,
            AppError::Pipeline(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Input(m) | AppError::Pipeline(m) => m,
        }
    }
}

fn input_err(e: Error) -> AppError {
    AppError::Input(e.to_string())
}

fn pipeline_err(e: Error) -> AppError {
    AppError::Pipeline(e.to_string())
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<(), AppError> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)
                        .map_err(|e| AppError::Input(format!("{}: {e}", p.display())))?;
                }
            }
            fs::write(p, contents).map_err(|e| AppError::Input(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run_simulate(args: SimulateArgs) -> Result<(), AppError> {
    let spec = match args.process {
        ProcessName::Fgn => ProcessSpec::Fgn { hurst: args.hurst, sigma2: args.sigma2 },
        ProcessName::Arma21 => ProcessSpec::Arma21,
        ProcessName::Dmr => ProcessSpec::DmrChain { a: args.a },
        ProcessName::Whitenoise => ProcessSpec::WhiteNoise { sigma2: args.sigma2 },
    };
    spec.validate().map_err(input_err)?;
    let series: Vec<f64> = if args.noise_only {
        simulate_noise(args.n, spec, Seed(args.seed)).map_err(pipeline_err)?
    } else {
        generate_observations(args.n, spec, Seed(args.seed)).map_err(pipeline_err)?
    };
    let mut out = String::with_capacity(series.len() * 20);
    for v in &series {
        let _ = writeln!(out, "{v:.12e}");
    }
    write_output(Some(&args.out), &out)
}

fn fit_table(y: &[f64], fitted: &[f64]) -> String {
    let mut out = String::from("index,y,fitted,residual\n");
    for (i, (&yi, &fi)) in y.iter().zip(fitted).enumerate() {
        let _ = writeln!(out, "{},{:.12e},{:.12e},{:.12e}", i + 1, yi, fi, yi - fi);
    }
    out
}

fn run_fit(args: FitArgs) -> Result<(), AppError> {
    let series = load_series(&args.input).map_err(input_err)?;
    let model =
        PartitionModel::new(series.len(), args.m, args.degree).map_err(input_err)?;
    let fit = fit_piecewise(&series.values, &model).map_err(pipeline_err)?;
    write_output(args.out.as_deref(), &fit_table(&series.values, &fit.fitted))
}

fn select_json(result: &MethodResultF64, y: &[f64]) -> String {
    let value = serde_json::json!({
        "method": result.spec.kind.name(),
        "n": y.len(),
        "degree": result.spec.degree,
        "m_max": result.spec.m_max,
        "m_selected": result.m_selected,
        "kappa_dj": result.kappa_dj,
        "h_estimates": result.h_estimates,
        "fitted": result.fit.fitted,
        "residuals": result.residuals,
    });
    format!("{}\n", serde_json::to_string_pretty(&value).expect("serializable"))
}

fn run_select(args: SelectArgs) -> Result<(), AppError> {
    let series = load_series(&args.input).map_err(input_err)?;
    let n = series.len();
    let kind = match (MethodKind::parse(&args.method), args.hurst) {
        (Ok(MethodKind::HGiven(h)), _) => MethodKind::HGiven(h),
        (Ok(kind), _) => kind,
        (Err(_), Some(h)) if args.method.eq_ignore_ascii_case("hgiven") => MethodKind::HGiven(h),
        (Err(e), _) => {
            if args.method.eq_ignore_ascii_case("hgiven") {
                return Err(AppError::Input(
                    "method hgiven needs --hurst or an inline value like hgiven(0.2)".into(),
                ));
            }
            return Err(input_err(e));
        }
    };
    let m_max = args
        .mmax
        .unwrap_or_else(|| (n / ((args.degree + 1) * 5)).clamp(1, 200));
    if m_max * (args.degree + 1) > n {
        return Err(AppError::Input(format!(
            "mmax = {m_max} too large for n = {n} at degree {}",
            args.degree
        )));
    }
    let spec = MethodSpec::new(kind, args.degree, m_max).map_err(input_err)?;
    let result = run_method(&series.values, &spec).map_err(pipeline_err)?;
    let rendered = match args.format {
        OutputFormat::Json => select_json(&result, &series.values),
        OutputFormat::Csv => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "# method={} m_selected={} kappa_dj={:.12e} h_estimates={}",
                result.spec.kind.name(),
                result.m_selected,
                result.kappa_dj,
                result
                    .h_estimates
                    .iter()
                    .map(|h| format!("{h:.6}"))
                    .collect::<Vec<_>>()
                    .join(";")
            );
            out.push_str(&fit_table(&series.values, &result.fit.fitted));
            out
        }
    };
    write_output(args.out.as_deref(), &rendered)
}

fn run_experiment_cmd(args: ExperimentArgs) -> Result<(), AppError> {
    // Flags append after the file, so they win (last assignment per key).
    let mut text = match &args.config {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| AppError::Input(format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    text.push('\n');
    if let Some(p) = args.process {
        let name = match p {
            ProcessName::Fgn => "fgn",
            ProcessName::Arma21 => "arma21",
            ProcessName::Dmr => "dmr",
            ProcessName::Whitenoise => "whitenoise",
        };
        let _ = writeln!(text, "process = {name}");
    }
    for (key, value) in [
        ("hurst", args.hurst),
        ("sigma2", args.sigma2),
        ("a", args.a),
    ] {
        if let Some(v) = value {
            let _ = writeln!(text, "{key} = {v}");
        }
    }
    if let Some(n) = args.n {
        let _ = writeln!(text, "n = {n}");
    }
    if let Some(r) = args.degree {
        let _ = writeln!(text, "r = {r}");
    }
    if let Some(m) = args.mmax {
        let _ = writeln!(text, "m_max = {m}");
    }
    if let Some(methods) = &args.methods {
        let _ = writeln!(text, "methods = {methods}");
    }
    if let Some(trials) = args.trials {
        let _ = writeln!(text, "trials = {trials}");
    }
    if let Some(seed) = args.seed {
        let _ = writeln!(text, "base_seed = {seed}");
    }
    let config = parse_config(&text).map_err(input_err)?;
    let report = run_experiment::<f64>(&config).map_err(pipeline_err)?;
    fs::create_dir_all(&args.out)
        .map_err(|e| AppError::Input(format!("{}: {e}", args.out.display())))?;
    let base = args.out.join("experiment");
    write_report_csv(&report, &base.to_string_lossy()).map_err(pipeline_err)?;
    eprintln!(
        "wrote {}.risk.csv and {}.methods.csv (oracle m = {})",
        base.display(),
        base.display(),
        report.oracle_m
    );
    Ok(())
}

fn nile_method_json(r: &NileMethodReport) -> serde_json::Value {
    serde_json::json!({
        "method": r.method.name(),
        "m_selected": r.m_selected,
        "kappa_dj": r.kappa_dj,
        "h_estimates": r.h_estimates,
        "h_residual": r.h_residual,
    })
}

fn write_nile_method(dir: &Path, name: &str, series: &SeriesFile, r: &NileMethodReport) -> Result<(), AppError> {
    write_output(
        Some(&dir.join(format!("{name}.fit.csv"))),
        &fit_table(&series.values, &r.fitted),
    )?;
    let mut acf = String::from("lag,acf\n");
    for (lag, v) in r.residual_acf.iter().enumerate() {
        let _ = writeln!(acf, "{lag},{v:.12e}");
    }
    write_output(Some(&dir.join(format!("{name}.acf.csv"))), &acf)
}

fn run_nile(args: NileArgs) -> Result<(), AppError> {
    let series = load_series(&args.data).map_err(input_err)?;
    let report = nile_analysis(&series).map_err(pipeline_err)?;
    fs::create_dir_all(&args.out)
        .map_err(|e| AppError::Input(format!("{}: {e}", args.out.display())))?;
    write_nile_method(&args.out, "cdj", &series, &report.cdj)?;
    write_nile_method(&args.out, "whywhres", &series, &report.whywhres)?;
    let summary = serde_json::json!({
        "n": report.n,
        "m_max": report.m_max,
        "cdj": nile_method_json(&report.cdj),
        "whywhres": nile_method_json(&report.whywhres),
    });
    write_output(
        Some(&args.out.join("summary.json")),
        &format!("{}\n", serde_json::to_string_pretty(&summary).expect("serializable")),
    )?;
    eprintln!(
        "cdj: m = {} (residual H = {:.3}); whywhres: m = {} (H2 = {:.3})",
        report.cdj.m_selected,
        report.cdj.h_residual,
        report.whywhres.m_selected,
        report.whywhres.h_estimates.get(1).copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Fit(args) => run_fit(args),
        Command::Select(args) => run_select(args),
        Command::Experiment(args) => run_experiment_cmd(args),
        Command::Nile(args) => run_nile(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
