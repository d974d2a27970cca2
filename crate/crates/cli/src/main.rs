//! `qdw`: simulate dimension-witness experiments, analyze counts, search
//! classical maxima and run the self-checks.
//!
//! Seeds resolve as: `seed` in a config file, then `--seed`, then the
//! `QDW_SEED` environment variable, then 0.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use qdw_core::harness::{
    analyze_exact, analyze_jobs, drift_scan_series, ingest_counts, render_drift_csv, render_report,
    simulate_experiment, simulate_probabilities, write_counts, AggregateReport, ExperimentConfig, ReportFormat,
    DEFAULT_WINDOW,
};
use qdw_core::maxima::{find_maximum_with, DEFAULT_MAX_ITERS, DEFAULT_TOP_K};
use qdw_core::statistics::{error_report, monte_carlo, third_cumulant_term};
use qdw_core::validate::{default_cases, run_suite, Suite};
use qdw_core::WitnessKind;

#[derive(Parser)]
#[command(name = "qdw", version, about = "Dimension witnesses from repeated-operation probability sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate jobs and write pooled counts
    Simulate {
        /// Experiment config (JSON)
        #[arg(long)]
        config: PathBuf,
        /// Counts CSV to write; required unless the config sets "exact"
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "QDW_SEED")]
        seed: Option<u64>,
        /// Also print the witness report
        #[arg(long)]
        report: Option<ReportFormat>,
        #[arg(long, default_value = "w3,w4,f1,f2")]
        kinds: String,
    },
    /// Witnesses with error columns from a counts CSV
    Witness {
        #[arg(long)]
        counts: PathBuf,
        #[arg(long, default_value = "w3,w4,f1,f2")]
        kinds: String,
        /// Preparation gates before the repeated operation (n = k - offset)
        #[arg(long, default_value_t = 2)]
        offset: usize,
        #[arg(long, default_value = "table")]
        report: ReportFormat,
        /// Override the device label read from the file
        #[arg(long)]
        device: Option<String>,
        /// Witness to scan for drift across jobs
        #[arg(long)]
        drift: Option<WitnessKind>,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        /// Write the plot-ready drift series here instead of stdout
        #[arg(long)]
        drift_out: Option<PathBuf>,
    },
    /// Classical maximum of |W_N| over [0,1]^{2N}
    Maxima {
        #[arg(long)]
        n: usize,
        /// Random restarts in addition to the best binary vertices
        #[arg(long, default_value_t = 16)]
        starts: usize,
        #[arg(long, env = "QDW_SEED")]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_TOP_K)]
        top_k: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
        /// Print the full result as JSON
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo shot noise against the delta method
    Mc {
        #[arg(long)]
        kind: WitnessKind,
        /// Probabilities p_0, p_1, .. separated by commas, spaces or newlines
        #[arg(long)]
        probs: PathBuf,
        #[arg(long, default_value_t = 20000)]
        shots: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, env = "QDW_SEED")]
        seed: Option<u64>,
    },
    /// Built-in property checks; exits with 2 on failure
    Validate {
        #[arg(long)]
        suite: Suite,
        /// Random instances per check (default: 100, or 1000 for closed-forms)
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long, env = "QDW_SEED")]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on usage errors; keep 2 for failed validation suites
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Simulate { config, out, seed, report, kinds } => simulate(&config, out.as_deref(), seed, report, &kinds),
        Command::Witness { counts, kinds, offset, report, device, drift, window, drift_out } => {
            let mut jobs = ingest_counts(&counts).with_context(|| format!("reading {}", counts.display()))?;
            if let Some(d) = device {
                jobs.iter_mut().for_each(|j| j.device = d.clone());
            }
            let kinds = parse_kinds(&kinds, drift)?;
            let rep = analyze_jobs(&jobs, &kinds, offset)?;
            print!("{}", render_report(&rep, report)?);
            if let Some(kind) = drift {
                print_drift(&rep, kind, window, drift_out.as_deref())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Maxima { n, starts, seed, top_k, max_iters, json } => {
            let seed = seed.unwrap_or(0);
            let r = find_maximum_with(n, starts, seed, top_k, max_iters)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                let p: Vec<String> = r.best_p.iter().map(|x| format!("{x:.10}")).collect();
                println!("N = {n}");
                println!("W_N = {:.12}", r.value);
                println!("|W_N| = {:.12}", r.abs_value);
                println!("p = {}", p.join(", "));
                println!("method = {:?}, starts = {}, seed = {seed}, converged = {}", r.method, r.n_starts, r.converged);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Mc { kind, probs, shots, trials, seed } => {
            let p = read_probs(&probs)?;
            mc(kind, &p, shots, trials, seed.unwrap_or(0))
        }
        Command::Validate { suite, cases, seed } => {
            let report = run_suite(suite, cases.unwrap_or_else(|| default_cases(suite)), seed.unwrap_or(0))?;
            print!("{report}");
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}

/// Requested kinds, plus the drift kind when it is not already listed.
fn parse_kinds(list: &str, drift: Option<WitnessKind>) -> anyhow::Result<Vec<WitnessKind>> {
    let mut kinds = WitnessKind::parse_list(list)?;
    if kinds.is_empty() {
        bail!("no witness kinds given");
    }
    if let Some(d) = drift.filter(|d| !kinds.contains(d)) {
        kinds.push(d);
    }
    Ok(kinds)
}

fn simulate(
    config: &Path,
    out: Option<&Path>,
    seed: Option<u64>,
    report: Option<ReportFormat>,
    kinds: &str,
) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let mut cfg = ExperimentConfig::from_json(&text).with_context(|| format!("parsing {}", config.display()))?;
    cfg.seed = cfg.seed.or(seed).or(Some(0));
    let kinds = parse_kinds(kinds, None)?;
    if cfg.exact {
        let rep = analyze_exact(&simulate_probabilities(&cfg)?, &kinds, cfg.offset, &cfg.device)?;
        print!("{}", render_report(&rep, report.unwrap_or(ReportFormat::Table))?);
        return Ok(ExitCode::SUCCESS);
    }
    let Some(out) = out else { bail!("--out is required unless the config sets \"exact\": true") };
    let jobs = simulate_experiment(&cfg)?;
    let file = fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
    write_counts(std::io::BufWriter::new(file), &jobs)?;
    log::info!("wrote {} jobs to {}", jobs.len(), out.display());
    if let Some(format) = report {
        print!("{}", render_report(&analyze_jobs(&jobs, &kinds, cfg.offset)?, format)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn print_drift(rep: &AggregateReport, kind: WitnessKind, window: usize, out: Option<&Path>) -> anyhow::Result<()> {
    let per_job = &rep.witnesses.iter().find(|w| w.kind == kind).context("drift witness missing")?.per_job;
    let scan = drift_scan_series(kind, per_job, window)?;
    let csv = render_drift_csv(&scan)?;
    match out {
        Some(path) => fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("\n{csv}"),
    }
    let mut stdout = std::io::stdout();
    writeln!(
        stdout,
        "drift {kind}: slope {:.3e} per job, sigma {:.3e}, significance {:.2}{}",
        scan.slope,
        scan.slope_sigma,
        scan.significance,
        if scan.flagged() { " (flagged)" } else { "" }
    )?;
    Ok(())
}

/// Reads numbers separated by commas or whitespace; `#` starts a comment
/// and a non-numeric first line is taken as a header.
fn read_probs(path: &Path) -> anyhow::Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut values = Vec::new();
    let mut first = true;
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> =
            line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(str::parse).collect();
        match parsed {
            Ok(v) => values.extend(v),
            Err(_) if first => {}
            Err(e) => bail!("{}:{}: {e}", path.display(), i + 1),
        }
        first = false;
    }
    Ok(values)
}

fn mc(kind: WitnessKind, p: &[f64], shots: u64, trials: usize, seed: u64) -> anyhow::Result<ExitCode> {
    let len = kind.required_length();
    if p.len() < len {
        bail!("{kind} needs {len} probabilities, got {}", p.len());
    }
    let p = &p[..len];
    let shots = vec![shots; len];
    let delta = error_report(kind, p, &shots)?;
    let cross = third_cumulant_term(kind, p, &shots)?;
    let mc = monte_carlo(kind, p, &shots, trials, seed)?;
    let predicted = delta.variance_first + delta.variance_second;
    println!("{kind} at exact p: {:.6e}", mc.exact);
    println!("shift     delta method {:.6e}   monte carlo {:.6e} +- {:.2e}", delta.shift, mc.mean_shift, mc.shift_stderr);
    println!(
        "variance  first {:.6e}  second {:.6e}  total {:.6e}   monte carlo {:.6e}  (ratio {:.4})",
        delta.variance_first,
        delta.variance_second,
        predicted,
        mc.variance,
        mc.variance / predicted
    );
    println!("third-cumulant cross term {:.3e} (bound {:.3e})", cross.value, cross.bound);
    println!("trials {trials}, shots {}, seed {seed}", shots[0]);
    Ok(ExitCode::SUCCESS)
}
