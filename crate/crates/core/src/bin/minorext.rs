//! `minorext` command-line driver.
//!
//! Exit codes: 0 success, 2 input error, 3 subset-budget error, 4 internal
//! invariant violation.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use minorext::harness::csv::{fmt_f64, write_records};
use minorext::harness::{format_summary, run_experiment, Ensemble, ExperimentConfig};
use minorext::matgen::io::read_matrix_file;
use minorext::matgen::{gen_wigner, gram, DataMatrix, SymMatrix, SymTag};
use minorext::minor_scan::{scan_exact_m, scan_le_m, ScanMode, ScanOptions, ScanResult};
use minorext::statistics::src_certificate_with_n;
use minorext::theory_checks::{build_eps_net, moddev_check, net_check, NetCheckReport};
use minorext::{Error, SeedSpec};

const THREADS_ENV: &str = "MINOREXT_THREADS";
const SYMMETRY_TOLERANCE: f64 = 1e-12;
const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Parser)]
#[command(name = "minorext", version, about = "Extreme eigenvalues of principal minors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan all principal minors of a matrix file.
    Scan(ScanArgs),
    /// Run a Monte Carlo experiment from a config file.
    Mc(McArgs),
    /// Monte Carlo over Wigner matrices.
    Wigner(WignerArgs),
    /// Sparse Riesz certificate of a design matrix.
    Src(SrcArgs),
    /// Check the ε-net spectral-norm bound on random symmetric matrices.
    Netcheck(NetcheckArgs),
    /// Estimate the moderate-deviation rate of centered chi-square sums.
    Moddev(ModdevArgs),
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    m: usize,
    /// Scan all |S| <= m instead of |S| = m.
    #[arg(long)]
    le_m: bool,
    #[arg(long, default_value = "exact", value_parser = parse_mode)]
    mode: ScanMode,
    #[arg(long)]
    workers: Option<usize>,
    /// Treat the input as a data matrix X and scan XᵀX.
    #[arg(long, conflicts_with = "no_gram")]
    gram: bool,
    /// Treat the input as the symmetric matrix to scan.
    #[arg(long)]
    no_gram: bool,
    /// Maximum number of subsets to visit.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    /// Fill the wall_time_s column (output is then no longer byte-reproducible).
    #[arg(long)]
    record_timing: bool,
}

#[derive(Args)]
struct WignerArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    reps: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = minorext::harness::DEFAULT_SLACK)]
    slack: f64,
    #[arg(long)]
    le_m: bool,
    #[arg(long, default_value = "exact", value_parser = parse_mode)]
    mode: ScanMode,
    #[arg(long)]
    workers: Option<usize>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    record_timing: bool,
}

#[derive(Args)]
struct SrcArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    m: usize,
    /// Divide XᵀX by this instead of the row count.
    #[arg(long)]
    n_override: Option<usize>,
    #[arg(long, default_value = "exact", value_parser = parse_mode)]
    mode: ScanMode,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct NetcheckArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct ModdevArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    exp: f64,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    reps: u64,
    #[arg(long)]
    seed: u64,
}

fn parse_mode(s: &str) -> Result<ScanMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Input(String),
    Budget(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Budget(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e.root() {
            Error::Budget { .. } | Error::CombinatorialExplosion { .. } => Failure::Budget(msg),
            Error::NonConvergence { .. } | Error::NetConstruction(_) => Failure::Internal(msg),
            _ => Failure::Input(msg),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn default_workers() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&w: &usize| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn resolve_workers(flag: Option<usize>) -> Result<usize, Failure> {
    match flag {
        Some(0) => Err(Failure::Input("--workers must be at least 1".into())),
        Some(w) => Ok(w),
        None => Ok(default_workers()),
    }
}

fn print_resolved(pairs: &[(&str, String)]) {
    eprintln!("# resolved configuration");
    for (k, v) in pairs {
        eprintln!("{k} = {v}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Scan(a) => cmd_scan(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Wigner(a) => cmd_wigner(a),
        Command::Src(a) => cmd_src(a),
        Command::Netcheck(a) => cmd_netcheck(a),
        Command::Moddev(a) => cmd_moddev(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

/// Picks the matrix to scan: symmetric square input is scanned directly,
/// anything else is a data matrix whose Gram matrix is scanned.
fn interpret(input: DataMatrix, force_gram: bool, force_sym: bool) -> Result<(SymMatrix, &'static str), Failure> {
    let symmetric = input.asymmetry().is_some_and(|a| a <= SYMMETRY_TOLERANCE);
    if force_sym || (symmetric && !force_gram) {
        let w = SymMatrix::from_upper(&input, SYMMETRY_TOLERANCE, SymTag::General)?;
        Ok((w, "symmetric"))
    } else {
        Ok((gram(&input), "data (Gram formed)"))
    }
}

fn scan_line(r: &ScanResult) -> String {
    format!(
        "{},{},{},{},{},{}",
        fmt_f64(r.t),
        fmt_f64(r.v),
        r.argmax_set.join(";"),
        r.argmin_set.join(";"),
        r.subsets_visited,
        r.subsets_pruned
    )
}

fn cmd_scan(a: ScanArgs) -> Result<(), Failure> {
    let workers = resolve_workers(a.workers)?;
    let input = read_matrix_file(&a.input)?;
    let (rows, cols) = (input.n(), input.p());
    let (w, kind) = interpret(input, a.gram, a.no_gram)?;
    print_resolved(&[
        ("input", a.input.display().to_string()),
        ("shape", format!("{rows}x{cols}")),
        ("interpretation", kind.to_string()),
        ("m", a.m.to_string()),
        ("le_m", a.le_m.to_string()),
        ("mode", a.mode.to_string()),
        ("workers", workers.to_string()),
        ("budget", a.budget.to_string()),
    ]);
    let opts = ScanOptions::new(a.mode, workers).with_budget(Some(a.budget));
    let r = if a.le_m {
        scan_le_m(&w, a.m, &opts)?
    } else {
        scan_exact_m(&w, a.m, &opts)?
    };
    println!("{}", scan_line(&r));
    eprintln!(
        "T = {} at {}, V = {} at {} ({} subsets visited, {} pruned)",
        r.t, r.argmax_set, r.v, r.argmin_set, r.subsets_visited, r.subsets_pruned
    );
    Ok(())
}

fn run_and_write(cfg: &ExperimentConfig, out: Option<&PathBuf>, timing: bool) -> Result<(), Failure> {
    print_resolved(&[("config", format!("\n{cfg}"))]);
    let write = |records: &[minorext::ReplicationRecord]| -> Result<(), Failure> {
        match out {
            Some(path) => write_records(BufWriter::new(File::create(path)?), cfg, records, timing)?,
            None => write_records(io::stdout().lock(), cfg, records, timing)?,
        }
        Ok(())
    };
    match run_experiment(cfg) {
        Ok(outcome) => {
            write(&outcome.records)?;
            if outcome.outside_regime {
                eprintln!("warning: m log p / n > 0.5, outside the asymptotic regime");
            }
            eprintln!("{}", format_summary(&outcome.summary));
            Ok(())
        }
        Err(failure) => {
            write(&failure.partial)?;
            eprintln!("{} replications completed before the failure", failure.partial.len());
            Err(failure.error.into())
        }
    }
}

fn cmd_mc(a: McArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&a.config)?;
    let defaults = ExperimentConfig {
        workers: default_workers(),
        ..Default::default()
    };
    let mut cfg = ExperimentConfig::parse_with_defaults(&text, defaults)?;
    if let Some(w) = a.workers {
        cfg.workers = resolve_workers(Some(w))?;
    }
    run_and_write(&cfg, Some(&a.out), a.record_timing)
}

fn cmd_wigner(a: WignerArgs) -> Result<(), Failure> {
    let cfg = ExperimentConfig {
        ensemble: Ensemble::Wigner,
        eta: a.eta,
        p: a.p,
        m: a.m,
        le_m: a.le_m,
        reps: a.reps,
        master_seed: a.seed,
        workers: resolve_workers(a.workers)?,
        scan_mode: a.mode,
        slack: a.slack,
        ..Default::default()
    };
    cfg.validate()?;
    run_and_write(&cfg, a.out.as_ref(), a.record_timing)
}

fn cmd_src(a: SrcArgs) -> Result<(), Failure> {
    let workers = resolve_workers(a.workers)?;
    let x = read_matrix_file(&a.input)?;
    let n = a.n_override.unwrap_or(x.n());
    print_resolved(&[
        ("input", a.input.display().to_string()),
        ("shape", format!("{}x{}", x.n(), x.p())),
        ("m", a.m.to_string()),
        ("n", n.to_string()),
        ("mode", a.mode.to_string()),
        ("workers", workers.to_string()),
        ("budget", a.budget.to_string()),
    ]);
    let opts = ScanOptions::new(a.mode, workers).with_budget(Some(a.budget));
    let cert = src_certificate_with_n(&x, a.m, n, &opts)?;
    println!("{},{},{},{},{}", fmt_f64(cert.c1), fmt_f64(cert.c2), cert.m, n, x.p());
    Ok(())
}

fn print_net_report(r: &NetCheckReport) {
    println!("m={}", r.m);
    println!("epsilon={}", fmt_f64(r.epsilon));
    println!("net_size={}", r.net_size);
    println!("size_bound={}", fmt_f64(r.size_bound));
    println!("within_size_bound={}", r.within_size_bound());
    println!("factor={}", fmt_f64(r.factor));
    println!("sup_quadform={}", fmt_f64(r.sup_quadform));
    println!("bound={}", fmt_f64(r.bound));
    println!("true_norm={}", fmt_f64(r.true_norm));
    println!("holds={}", r.holds);
}

fn cmd_netcheck(a: NetcheckArgs) -> Result<(), Failure> {
    print_resolved(&[
        ("m", a.m.to_string()),
        ("eps", a.eps.to_string()),
        ("trials", a.trials.to_string()),
        ("seed", a.seed.to_string()),
    ]);
    let net = build_eps_net(a.m, a.eps, SeedSpec::new(a.seed, 0))?;
    let mut worst: Option<NetCheckReport> = None;
    let mut holds = 0u64;
    for t in 0..a.trials {
        let w = gen_wigner(a.m, 2.0, SeedSpec::new(a.seed, t + 1))?;
        let r = net_check(w.values(), a.m, &net)?;
        holds += r.holds as u64;
        let ratio = |r: &NetCheckReport| r.true_norm / r.bound;
        if worst.as_ref().is_none_or(|w| ratio(&r) > ratio(w)) {
            worst = Some(r);
        }
    }
    println!("trials={}", a.trials);
    println!("holds_count={holds}");
    match &worst {
        Some(r) => print_net_report(r),
        None => {
            // No trials: report the identity matrix.
            let mut id = vec![0.0; a.m * a.m];
            (0..a.m).for_each(|i| id[i * a.m + i] = 1.0);
            print_net_report(&net_check(&id, a.m, &net)?);
        }
    }
    io::stdout().flush()?;
    if holds < a.trials {
        return Err(Failure::Internal(format!(
            "net bound failed on {} of {} matrices",
            a.trials - holds,
            a.trials
        )));
    }
    Ok(())
}

fn cmd_moddev(a: ModdevArgs) -> Result<(), Failure> {
    print_resolved(&[
        ("n", a.n.to_string()),
        ("exp", a.exp.to_string()),
        ("mu", a.mu.to_string()),
        ("reps", a.reps.to_string()),
        ("seed", a.seed.to_string()),
    ]);
    let r = moddev_check(a.n, a.exp, a.mu, a.reps, a.seed)?;
    println!("n={}", r.n);
    println!("a_n={}", fmt_f64(r.a_n));
    println!("mu={}", fmt_f64(r.mu));
    println!("reps={}", r.reps);
    println!("tail_hits={}", r.tail_hits);
    println!("rate_hat={}", fmt_f64(r.rate_hat));
    println!("rate_target={}", fmt_f64(r.rate_target));
    Ok(())
}
