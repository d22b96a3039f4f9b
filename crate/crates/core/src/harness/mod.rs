//! Monte Carlo runner for the envelope experiments.
//!
//! Replication `k` draws its matrix from the stream `(master_seed, k)`, scans
//! it, and compares the statistics against the envelope for the ensemble.
//! Records are returned in replication order however the replications were
//! scheduled.

mod config;
pub mod csv;

use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error as ThisError;

pub use config::{Ensemble, ExperimentConfig, CONFIG_KEYS, DEFAULT_SLACK};

use crate::distributions::{EntryDistribution, SeedSpec};
use crate::error::{Error, Result};
use crate::matgen::{gen_data, gen_wigner, gram, SymMatrix};
use crate::minor_scan::{scan_exact_m, scan_le_m, ScanOptions, ScanResult};
use crate::statistics::{
    absolute_deviations, envelope_gaussian, envelope_general, envelope_wigner, normalized_deviations, EnvelopeSpec,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub rep: u64,
    /// Digest of `(master_seed, rep)`; see [`SeedSpec::derived`].
    pub seed: u64,
    pub t: f64,
    pub v: f64,
    pub zt: f64,
    pub zv: f64,
    /// NaN when no envelope exists (`p < 2`).
    pub envelope: f64,
    pub covered_t: bool,
    pub covered_v: bool,
    pub wall_time: f64,
}

/// Coverage flags for deviations `zT`, `zV` at tolerance `slack`.
pub fn covered(zt: f64, zv: f64, slack: f64) -> (bool, bool) {
    (zt <= 1.0 + slack, zv >= -1.0 - slack)
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub records: Vec<ReplicationRecord>,
    pub summary: Aggregate,
    pub outside_regime: bool,
}

/// A failed run with every replication that did complete.
#[derive(Debug, ThisError)]
#[error("{error}")]
pub struct ExperimentFailure {
    pub partial: Vec<ReplicationRecord>,
    #[source]
    pub error: Error,
}

/// The envelope used for a configuration, `None` if `p < 2`.
pub fn envelope_for(cfg: &ExperimentConfig) -> Result<Option<EnvelopeSpec>> {
    if cfg.p < 2 {
        return Ok(None);
    }
    let env = match cfg.ensemble {
        Ensemble::Gram if cfg.dist == EntryDistribution::Gaussian => envelope_gaussian(cfg.n, cfg.p, cfg.m)?,
        Ensemble::Gram => envelope_general(cfg.n, cfg.p, cfg.m, cfg.dist.eta())?,
        Ensemble::Wigner => envelope_wigner(cfg.p, cfg.m, cfg.eta)?,
    };
    Ok(Some(env))
}

/// The matrix scanned by replication `rep`.
pub fn replication_matrix(cfg: &ExperimentConfig, rep: u64) -> Result<SymMatrix> {
    let seed = SeedSpec::new(cfg.master_seed, rep);
    match cfg.ensemble {
        Ensemble::Gram => Ok(gram(&gen_data(cfg.dist, cfg.n, cfg.p, seed)?)),
        Ensemble::Wigner => gen_wigner(cfg.p, cfg.eta, seed),
    }
}

fn scan(cfg: &ExperimentConfig, w: &SymMatrix) -> Result<ScanResult> {
    let opts = ScanOptions::new(cfg.scan_mode, 1);
    if cfg.le_m {
        scan_le_m(w, cfg.m, &opts)
    } else {
        scan_exact_m(w, cfg.m, &opts)
    }
}

/// Runs replication `rep` on its own.
pub fn run_replication(cfg: &ExperimentConfig, rep: u64) -> Result<ReplicationRecord> {
    let started = Instant::now();
    let env = envelope_for(cfg)?;
    let w = replication_matrix(cfg, rep)?;
    let result = scan(cfg, &w)?;
    let (zt, zv) = match (&env, cfg.ensemble) {
        (None, _) => (f64::NAN, f64::NAN),
        (Some(e), Ensemble::Gram) => normalized_deviations(result.t, result.v, cfg.n, e)?,
        (Some(e), Ensemble::Wigner) => absolute_deviations(result.t, result.v, e)?,
    };
    let (covered_t, covered_v) = covered(zt, zv, cfg.slack);
    Ok(ReplicationRecord {
        rep,
        seed: SeedSpec::new(cfg.master_seed, rep).derived(),
        t: result.t,
        v: result.v,
        zt,
        zv,
        envelope: env.map_or(f64::NAN, |e| e.value),
        covered_t,
        covered_v,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> std::result::Result<ExperimentOutcome, ExperimentFailure> {
    let fail = |error| ExperimentFailure {
        partial: Vec::new(),
        error,
    };
    cfg.validate().map_err(fail)?;
    envelope_for(cfg).map_err(fail)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| fail(Error::param(format!("cannot start {} workers: {e}", cfg.workers))))?;
    let results: Vec<Result<ReplicationRecord>> = pool.install(|| {
        (0..cfg.reps)
            .into_par_iter()
            .map(|rep| run_replication(cfg, rep))
            .collect()
    });

    let mut records = Vec::with_capacity(results.len());
    let mut first_error = None;
    for (rep, r) in (0..cfg.reps).zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) if first_error.is_none() => {
                first_error = Some(Error::Replication {
                    rep,
                    source: Box::new(e),
                })
            }
            Err(_) => {}
        }
    }
    if let Some(error) = first_error {
        return Err(ExperimentFailure {
            partial: records,
            error,
        });
    }
    let summary = aggregate_coverage(&records, cfg.slack);
    Ok(ExperimentOutcome {
        records,
        summary,
        outside_regime: cfg.outside_asymptotic_regime(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Spread {
    fn of(values: &mut [f64]) -> Spread {
        values.sort_by(f64::total_cmp);
        let k = values.len();
        let median = if k % 2 == 1 {
            values[k / 2]
        } else {
            0.5 * (values[k / 2 - 1] + values[k / 2])
        };
        Spread {
            min: values[0],
            median,
            max: values[k - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageSummary {
    pub reps: usize,
    pub slack: f64,
    pub frac_t: f64,
    pub frac_v: f64,
    pub frac_joint: f64,
    pub zt: Spread,
    pub zv: Spread,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Aggregate {
    /// No records; coverage fractions are undefined.
    Empty,
    Coverage(CoverageSummary),
}

impl Aggregate {
    pub fn coverage(&self) -> Option<&CoverageSummary> {
        match self {
            Aggregate::Empty => None,
            Aggregate::Coverage(c) => Some(c),
        }
    }
}

/// Coverage fractions at tolerance `slack`, recomputed from `zT`, `zV`.
pub fn aggregate_coverage(records: &[ReplicationRecord], slack: f64) -> Aggregate {
    if records.is_empty() {
        return Aggregate::Empty;
    }
    let k = records.len() as f64;
    let (mut ct, mut cv, mut cj) = (0usize, 0usize, 0usize);
    for r in records {
        let (t, v) = covered(r.zt, r.zv, slack);
        ct += t as usize;
        cv += v as usize;
        cj += (t && v) as usize;
    }
    let mut zt: Vec<f64> = records.iter().map(|r| r.zt).collect();
    let mut zv: Vec<f64> = records.iter().map(|r| r.zv).collect();
    Aggregate::Coverage(CoverageSummary {
        reps: records.len(),
        slack,
        frac_t: ct as f64 / k,
        frac_v: cv as f64 / k,
        frac_joint: cj as f64 / k,
        zt: Spread::of(&mut zt),
        zv: Spread::of(&mut zv),
    })
}

/// Human-readable summary of one run.
pub fn format_summary(summary: &Aggregate) -> String {
    match summary {
        Aggregate::Empty => "coverage: (no replications)".to_string(),
        Aggregate::Coverage(c) => format!(
            "reps = {}, slack = {}\ncoverage T = {:.4}, V = {:.4}, joint = {:.4}\n\
             zT min/median/max = {:.4} / {:.4} / {:.4}\nzV min/median/max = {:.4} / {:.4} / {:.4}",
            c.reps,
            c.slack,
            c.frac_t,
            c.frac_v,
            c.frac_joint,
            c.zt.min,
            c.zt.median,
            c.zt.max,
            c.zv.min,
            c.zv.median,
            c.zv.max
        ),
    }
}

/// Joint coverage across a sweep of configurations, one row per label.
pub fn trend_table(rows: &[(String, Aggregate)]) -> String {
    let mut out = String::from("config,reps,frac_T,frac_V,frac_joint\n");
    for (label, agg) in rows {
        match agg.coverage() {
            Some(c) => out.push_str(&format!(
                "{label},{},{:.4},{:.4},{:.4}\n",
                c.reps, c.frac_t, c.frac_v, c.frac_joint
            )),
            None => out.push_str(&format!("{label},0,,,\n")),
        }
    }
    out
}

/// True if `fractions` never drops by more than `tolerance` from one entry to
/// the next.
pub fn nondecreasing_within(fractions: &[f64], tolerance: f64) -> bool {
    fractions.windows(2).all(|w| w[1] >= w[0] - tolerance)
}
