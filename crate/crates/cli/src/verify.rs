//! `nevlab verify`.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use nevlab::corpus::Corpus;
use nevlab::verifier::{run_all, summarize, CheckReport, RunConfig, Verdict};

use crate::{Failure, Outcome};

/// Report path when neither the flag nor the config names one.
pub const DEFAULT_REPORT: &str = "nevlab-report.json";
/// Environment override for the worker count.
pub const THREADS_ENV: &str = "NEVLAB_THREADS";

#[derive(Args)]
pub struct VerifyArgs {
    /// Corpus file; the built-in reference corpus when omitted.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Seed for the per-check random streams.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Restrict to a check id; repeatable.
    #[arg(long = "check")]
    pub checks: Vec<String>,
    /// JSON file with run settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Report path; `nevlab-report.json` when neither this nor the config names one.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Absolute quadrature tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

fn load_config(args: &VerifyArgs) -> Result<RunConfig, Failure> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(tol) = args.tol {
        config.tol = tol;
    }
    if !args.checks.is_empty() {
        config.check_filter = args.checks.clone();
    }
    if let Some(out) = &args.output {
        config.output_path = Some(out.display().to_string());
    }
    if let Ok(text) = std::env::var(THREADS_ENV) {
        let n: usize = text
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got '{text}'")))?;
        config.threads = Some(n);
    }
    config.validate()?;
    Ok(config)
}

/// Summary table: one row per check with function count and verdict counts,
/// then one line per failing report.
pub fn summary_table(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    let width = reports.iter().map(|r| r.check_id.len()).max().unwrap_or(5).max(5);
    let _ = writeln!(out, "{:<width$}  {:>9}  {:>4}  {:>4}  {:>4}", "check", "functions", "pass", "fail", "skip");
    for (id, c) in summarize(reports) {
        let functions = c.pass + c.fail + c.skipped;
        let _ = writeln!(out, "{id:<width$}  {functions:>9}  {:>4}  {:>4}  {:>4}", c.pass, c.fail, c.skipped);
    }
    for r in reports.iter().filter(|r| r.verdict == Verdict::Fail) {
        let _ = writeln!(out, "FAIL {} {} ({} violations)", r.check_id, r.function_id, r.violations());
    }
    out
}

pub fn run(args: VerifyArgs) -> Outcome {
    let config = load_config(&args)?;
    let corpus = match &args.corpus {
        Some(path) => Corpus::from_path(path)?,
        None => Corpus::reference(),
    };
    let reports = run_all(&corpus, &config)?;
    let path = PathBuf::from(config.output_path.as_deref().unwrap_or(DEFAULT_REPORT));
    let mut text = serde_json::to_string_pretty(&reports).expect("reports serialize");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Failure::Usage(format!("cannot write report {}: {e}", path.display())))?;
    print!("{}", summary_table(&reports));
    println!("report written to {}", path.display());
    if reports.iter().any(|r| r.verdict == Verdict::Fail) {
        Err(Failure::ChecksFailed)
    } else {
        Ok(())
    }
}
