//! Command-line front end: analyze | sweep-alpha | sweep-n | digit-table
//! | validate, reading a JSON config and writing CSV/JSON artifacts.
//!
//! Exit codes: 0 success, 2 config error, 3 certificate failure,
//! 4 validation failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{AnalysisConfig, Mode};
use crate::copulas::CopulaSpec;
use crate::error::{Error, Result};
use crate::marginals::LogMarginal;
use crate::metrics::{self, BenfordReport};
use crate::sampler;
use crate::wrapped::{self, WrappedPdfEstimate};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "benford-copula", version, about = "Benford behavior of dependent products")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON analysis config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the truncation tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the s-grid size.
    #[arg(long)]
    grid: Option<usize>,
    /// Worker thread count (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Single analysis: wrapped PDF grid plus the full metric report.
    Analyze(CommonArgs),
    /// One row per dependence parameter per marginal pairing.
    SweepAlpha(CommonArgs),
    /// One row per copula dimension.
    SweepN(CommonArgs),
    /// Leading-digit table: Benford vs model vs sampled.
    DigitTable(CommonArgs),
    /// Run the cross-module invariant suite.
    Validate {
        /// Optional config whose case is added to the suite.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

/// Fixed 12-significant-digit formatting for deterministic CSV output.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return "nan".into();
    }
    format!("{x:.11e}")
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), content)?;
    Ok(())
}

fn load_config(args: &CommonArgs, mode: Mode) -> Result<AnalysisConfig> {
    let mut cfg = AnalysisConfig::from_file(&args.config)?;
    cfg.mode = mode;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.tol {
        cfg.tol = t;
    }
    if let Some(g) = args.grid {
        cfg.grid = g;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn init_threads(threads: Option<usize>) {
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

#[derive(Serialize)]
struct ReportFile<'a> {
    schema_version: u32,
    config: &'a AnalysisConfig,
    marginal_labels: Vec<String>,
    estimate: &'a WrappedPdfEstimate,
    report: &'a BenfordReport,
}

fn run_analysis(cfg: &AnalysisConfig) -> Result<(Vec<LogMarginal>, WrappedPdfEstimate, BenfordReport)> {
    let n = cfg.copula.dimension();
    let margs = cfg.resolved_marginals(n)?;
    let est = wrapped::wrapped_pdf_grid(&cfg.copula, &margs, cfg.grid, cfg.tol, &cfg.engine_settings())?;
    let report = BenfordReport::from_estimate(
        &cfg.copula,
        &margs,
        &est,
        cfg.base,
        cfg.seed,
        cfg.tol,
        &cfg.engine_settings(),
    )?;
    Ok((margs, est, report))
}

pub fn cmd_analyze(cfg: &AnalysisConfig, out: &Path) -> Result<()> {
    let (margs, est, report) = run_analysis(cfg)?;
    let mut csv = String::from("s,pdf,quad_err\n");
    for i in 0..est.s_grid.len() {
        let _ = writeln!(
            csv,
            "{},{},{}",
            fmt12(est.s_grid[i]),
            fmt12(est.values[i]),
            fmt12(est.quad_err[i])
        );
    }
    write_file(out, "pdf_grid.csv", &csv)?;
    let file = ReportFile {
        schema_version: SCHEMA_VERSION,
        config: cfg,
        marginal_labels: margs.iter().map(|m| m.label()).collect(),
        estimate: &est,
        report: &report,
    };
    write_file(out, "report.json", &serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

fn sweep_pairings(cfg: &AnalysisConfig) -> Result<Vec<(String, Vec<LogMarginal>)>> {
    if let Some(p) = &cfg.pairing {
        return Ok(vec![(
            p.clone(),
            AnalysisConfig::pairing_marginals(p, cfg.base)?,
        )]);
    }
    if !cfg.marginals.is_empty() {
        return Ok(vec![(
            "custom".into(),
            cfg.resolved_marginals(cfg.copula.dimension())?,
        )]);
    }
    ["A", "B", "C"]
        .iter()
        .map(|&p| Ok((p.to_string(), AnalysisConfig::pairing_marginals(p, cfg.base)?)))
        .collect()
}

pub fn cmd_sweep_alpha(cfg: &AnalysisConfig, out: &Path) -> Result<()> {
    let pairings = sweep_pairings(cfg)?;
    let mut csv = String::from("family,alpha,pairing,chi2_grid,chi2_digit,l1_distance,l1_copula_norm\n");
    for &alpha in &cfg.alpha_list {
        let copula = match CopulaSpec::new(cfg.copula.family_name(), alpha, cfg.copula.dimension())
        {
            Ok(c) => c,
            Err(e) => {
                eprintln!("skipping alpha={alpha}: {e}");
                continue;
            }
        };
        for (label, margs) in &pairings {
            let est = wrapped::wrapped_pdf_grid(
                &copula,
                margs,
                cfg.grid,
                cfg.tol,
                &cfg.engine_settings(),
            )?;
            let report = BenfordReport::from_estimate(
                &copula,
                margs,
                &est,
                cfg.base,
                cfg.seed,
                cfg.tol,
                &cfg.engine_settings(),
            )?;
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                copula.family_name(),
                fmt12(alpha),
                label,
                fmt12(report.chi2_grid.statistic),
                fmt12(report.chi2_digit.statistic),
                fmt12(report.l1_distance),
                fmt12(report.l1_copula_norm)
            );
        }
    }
    write_file(out, "sweep.csv", &csv)?;
    Ok(())
}

pub fn cmd_sweep_n(cfg: &AnalysisConfig, out: &Path) -> Result<()> {
    let mut csv = String::from("family,alpha,n,mode,chi2_digit,chi2_grid,runtime_ms\n");
    for &n in &cfg.n_list {
        let copula = CopulaSpec::new(cfg.copula.family_name(), cfg.copula.alpha(), n)?;
        let margs = cfg.resolved_marginals(n)?;
        let start = Instant::now();
        let est = wrapped::wrapped_pdf_grid(&copula, &margs, cfg.grid, cfg.tol, &cfg.engine_settings())?;
        est.check_normalization()?;
        let probs = metrics::digit_probs_from_pdf(&est, cfg.base)?;
        let chi_d = metrics::chi_square_digits(&probs, cfg.base)?;
        let chi_g = metrics::chi_square_grid(&est)?;
        let mode = if n - 1 <= 2 { "quadrature" } else { "qmc" };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            copula.family_name(),
            fmt12(copula.alpha()),
            n,
            mode,
            fmt12(chi_d.statistic),
            fmt12(chi_g.statistic),
            start.elapsed().as_millis()
        );
    }
    write_file(out, "sweep_n.csv", &csv)?;
    Ok(())
}

pub fn cmd_digit_table(cfg: &AnalysisConfig, out: &Path) -> Result<()> {
    let (margs, est, report) = run_analysis(cfg)?;
    let mc_count = if cfg.mc_count > 0 { cfg.mc_count } else { 200_000 };
    let empirical: Option<Vec<f64>> = sampler::sample_products(&cfg.copula, &margs, mc_count, cfg.seed)
        .ok()
        .map(|p| {
            let counts = sampler::digit_counts(&p.values, cfg.base);
            let total: u64 = counts.iter().sum();
            counts
                .iter()
                .map(|&c| c as f64 / total.max(1) as f64)
                .collect()
        });
    let mut csv = String::from("d,benford_prob,model_prob,empirical_prob,abs_diff\n");
    for d in 1..cfg.base {
        let benford = metrics::benford_digit_prob(d, cfg.base)?;
        let model = report.digit_probs[(d - 1) as usize];
        let emp = empirical
            .as_ref()
            .map(|e| fmt12(e[(d - 1) as usize]))
            .unwrap_or_else(|| "nan".into());
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            d,
            fmt12(benford),
            fmt12(model),
            emp,
            fmt12((model - benford).abs())
        );
    }
    write_file(out, "digits.csv", &csv)?;
    let _ = est;
    Ok(())
}

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub slack: f64,
    pub detail: String,
}

#[derive(Serialize)]
struct ValidationFile {
    schema_version: u32,
    all_pass: bool,
    checks: Vec<Check>,
}

fn check(name: &str, pass: bool, slack: f64, detail: String) -> Check {
    Check {
        name: name.into(),
        pass,
        slack,
        detail,
    }
}

fn margin_axiom_dev(cdf: &dyn Fn(f64, f64) -> f64) -> f64 {
    let mut dev = 0.0f64;
    for i in 1..10 {
        let u = i as f64 / 10.0;
        dev = dev.max((cdf(u, 1.0) - u).abs());
        dev = dev.max((cdf(1.0, u) - u).abs());
        dev = dev.max(cdf(u, 0.0).abs());
    }
    dev
}

/// Cross-module invariant suite; returns the list of checks.
pub fn validation_checks(extra: Option<&AnalysisConfig>) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    // 1. margin axioms across families
    let mut dev = 0.0f64;
    for (fam, alpha) in [
        ("independence", 0.0),
        ("clayton", 2.0),
        ("clayton", -0.5),
        ("amh", 0.5),
        ("amh", -0.9),
        ("gumbel_barnett", 0.3),
    ] {
        let cop = CopulaSpec::new(fam, alpha, 2)?;
        dev = dev.max(margin_axiom_dev(&|u, v| cop.cdf(&[u, v]).unwrap()));
    }
    checks.push(check(
        "copula_margin_axioms",
        dev < 1e-12,
        1e-12 - dev,
        format!("max margin deviation {dev:.3e} across families"),
    ));

    // 2. the miscopied Clayton formula (no outer power, +(n-1)) must fail
    // the margin axiom, demonstrating why the standard form is used
    let alpha = 2.0;
    let printed = |u: f64, v: f64| -> f64 {
        (u.powf(-alpha) + v.powf(-alpha) + 1.0).max(0.0)
    };
    let bad_dev = margin_axiom_dev(&printed);
    checks.push(check(
        "corrupted_clayton_form_rejected",
        bad_dev > 0.1,
        bad_dev - 0.1,
        format!("printed-form margin deviation {bad_dev:.3e} (expected failure)"),
    ));

    // 3. exact-Benford absorption
    {
        let cfg = AnalysisConfig::from_json(
            r#"{"copula":{"family":"independence","n":2},
                "marginals":[{"kind":"uniform01"},{"kind":"uniform01"}]}"#,
        )?;
        let (_, est, report) = run_analysis(&cfg)?;
        est.check_normalization()?;
        let pass = report.eps_max <= 1e-6 && report.l1_distance <= 1e-6;
        checks.push(check(
            "exact_benford_absorption",
            pass,
            1e-6 - report.eps_max,
            format!("eps_max {:.3e}, l1 {:.3e}", report.eps_max, report.l1_distance),
        ));
    }

    // 4-6. normalization, L1 bound and Markov bound across base cases
    let mut cases = vec![
        ("clayton", 2.0, "A"),
        ("clayton", 2.0, "C"),
        ("amh", 0.5, "A"),
        ("gumbel_barnett", 0.3, "A"),
    ];
    if extra.is_some() {
        cases.truncate(3);
    }
    let mut norm_dev = 0.0f64;
    let mut l1_slack = f64::INFINITY;
    let mut markov_slack = f64::INFINITY;
    for (fam, alpha, pairing) in cases {
        let cop = CopulaSpec::new(fam, alpha, 2)?;
        let margs = AnalysisConfig::pairing_marginals(pairing, 10)?;
        let est = wrapped::wrapped_pdf_grid(&cop, &margs, 12, 1e-6, &Default::default())?;
        est.check_normalization()?;
        norm_dev = norm_dev.max((est.grid_integral() - 1.0).abs() / est.tol_total());
        let report =
            BenfordReport::from_estimate(&cop, &margs, &est, 10, 7, 1e-6, &Default::default())?;
        l1_slack = l1_slack.min(report.l1_bound_slack);
        for row in &report.markov {
            markov_slack = markov_slack.min(row.bound - row.measured);
        }
    }
    checks.push(check(
        "wrapped_pdf_normalization",
        norm_dev <= 1.0,
        1.0 - norm_dev,
        format!("worst normalization defect {norm_dev:.3} of tol_total"),
    ));
    checks.push(check(
        "l1_bound_inequality",
        l1_slack >= 0.0,
        l1_slack,
        format!("min slack {l1_slack:.4} of the copula-norm bound"),
    ));
    checks.push(check(
        "markov_measure_bound",
        markov_slack >= 0.0,
        markov_slack,
        format!("min (bound - measured) {markov_slack:.4}"),
    ));

    // 7. quadrature engine vs Monte Carlo oracle
    {
        let cop = CopulaSpec::new("clayton", 2.0, 2)?;
        let margs = vec![
            LogMarginal::exponential(1.0, 10)?,
            LogMarginal::exponential(1.0, 10)?,
        ];
        let bins = 20;
        let est = wrapped::wrapped_pdf_grid(&cop, &margs, bins, 1e-6, &Default::default())?;
        let mc = sampler::sample_products(&cop, &margs, 200_000, 77)?;
        let hist = sampler::empirical_wrapped_pdf(&mc.values, bins)?;
        let n = mc.values.len() as f64;
        let mut agree = 0;
        for b in 0..bins {
            // trapezoid bin mass from the grid values at the bin edges
            let p_model = 0.5 * (est.values[b] + est.values[(b + 1) % bins]) / bins as f64;
            let p_hat = hist[b] / bins as f64;
            let se = (p_model * (1.0 - p_model) / n).sqrt().max(1e-9);
            if (p_hat - p_model).abs() <= 3.0 * se + 1e-4 {
                agree += 1;
            }
        }
        checks.push(check(
            "engine_vs_oracle_histogram",
            agree * 20 >= bins * 19,
            agree as f64 - 0.95 * bins as f64,
            format!("{agree}/{bins} bins within tolerance"),
        ));
    }

    // 8. optional user-supplied case
    if let Some(cfg) = extra {
        let (_, est, report) = run_analysis(cfg)?;
        est.check_normalization()?;
        checks.push(check(
            "user_config_case",
            report.l1_bound_slack >= 0.0,
            report.l1_bound_slack,
            format!(
                "{} alpha={} l1 {:.4} norm {:.4}",
                cfg.copula.family_name(),
                cfg.copula.alpha(),
                report.l1_distance,
                report.l1_copula_norm
            ),
        ));
    }
    Ok(checks)
}

pub fn cmd_validate(extra: Option<&AnalysisConfig>, out: &Path) -> Result<bool> {
    let checks = validation_checks(extra)?;
    let all_pass = checks.iter().all(|c| c.pass);
    let file = ValidationFile {
        schema_version: SCHEMA_VERSION,
        all_pass,
        checks,
    };
    write_file(out, "validation.json", &serde_json::to_string_pretty(&file)?)?;
    Ok(all_pass)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        Error::NoCertificate(_) => 3,
        _ => 1,
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result: Result<i32> = match cli.command {
        Command::Analyze(args) => {
            init_threads(args.threads);
            load_config(&args, Mode::Analyze).and_then(|cfg| {
                cmd_analyze(&cfg, &args.out)?;
                Ok(0)
            })
        }
        Command::SweepAlpha(args) => {
            init_threads(args.threads);
            load_config(&args, Mode::SweepAlpha).and_then(|cfg| {
                cmd_sweep_alpha(&cfg, &args.out)?;
                Ok(0)
            })
        }
        Command::SweepN(args) => {
            init_threads(args.threads);
            load_config(&args, Mode::SweepN).and_then(|cfg| {
                cmd_sweep_n(&cfg, &args.out)?;
                Ok(0)
            })
        }
        Command::DigitTable(args) => {
            init_threads(args.threads);
            load_config(&args, Mode::DigitTable).and_then(|cfg| {
                cmd_digit_table(&cfg, &args.out)?;
                Ok(0)
            })
        }
        Command::Validate {
            config,
            out,
            threads,
        } => {
            init_threads(threads);
            let cfg = match config
                .map(|p| AnalysisConfig::from_file(&p))
                .transpose()
            {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit_code(&e);
                }
            };
            cmd_validate(cfg.as_ref(), &out).map(|ok| if ok { 0 } else { 4 })
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
