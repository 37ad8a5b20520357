//! Empirical lockedness probe: perturb a touching configuration by δ, try
//! to flatten it, and record how far anything moved.
//!
//! A finite number of trials cannot establish strong lockedness; every
//! summary this module writes says "empirical" for that reason.

use std::fmt::Write as _;

use linklock_core::flatten::{flatten_components, FlattenError, FlattenOptions};
use linklock_core::touching::{TouchError, TouchingConfig};
use linklock_core::FLAT_TOL;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Certification depth of the re-check applied to every trial's motion.
pub const RECHECK_DEPTH: u32 = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeParams {
    /// Strictly decreasing.
    pub deltas: Vec<f64>,
    pub trials: u32,
    /// Solver steps per trial.
    pub budget: u64,
    pub seed: u64,
    /// Preferred flattening root; components without it use their first vertex.
    pub root: String,
    /// Whether the fixture is expected to stay unflattened.
    pub expect_locked: bool,
}

impl Default for ProbeParams {
    fn default() -> Self {
        ProbeParams { deltas: vec![0.1, 0.05, 0.01], trials: 10, budget: 100_000, seed: 0, root: "C".into(), expect_locked: true }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ProbeError {
    #[error("invalid probe parameters: {0}")]
    Params(String),
    #[error("perturbation by {delta} refused: {source}")]
    Perturb { delta: f64, source: TouchError },
    #[error("flatten failed: {0}")]
    Flatten(#[from] FlattenError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct TrialRecord {
    pub delta: f64,
    pub trial: u32,
    /// Largest over the components of the flattened configuration.
    pub max_displacement: f64,
    pub final_flatness: f64,
    /// Worst component status.
    pub status: String,
    /// The motion passed the independent certificate re-check.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SweepRow {
    pub delta: f64,
    pub trials: u32,
    pub budget: u64,
    pub max_max_displacement: f64,
    pub max_final_flatness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ProbeReport {
    pub fixture: String,
    pub seed: u64,
    pub expect_locked: bool,
    pub sweep: Vec<SweepRow>,
    pub records: Vec<TrialRecord>,
    pub verdict_summary: String,
}

/// Seed of trial `trial` at sweep position `di`.
pub fn trial_seed(seed: u64, di: usize, trial: u32) -> u64 {
    // splitmix64 finalizer over a packed key.
    let mut z = seed ^ ((di as u64) << 32 | trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_trial(tc: &TouchingConfig, delta: f64, di: usize, trial: u32, p: &ProbeParams) -> Result<TrialRecord, ProbeError> {
    let s = trial_seed(p.seed, di, trial);
    let c = tc.perturb(delta, s).map_err(|source| ProbeError::Perturb { delta, source })?;
    let opts = FlattenOptions { budget: p.budget, seed: s, restarts: 1, ..FlattenOptions::default() };
    let parts = flatten_components(&c, &p.root, &opts)?;
    let mut rec = TrialRecord { delta, trial, max_displacement: 0.0, final_flatness: 0.0, status: "flattened".into(), certified: true };
    for (part, r) in &parts {
        if part.linkage().edge_count() == 0 {
            continue;
        }
        rec.max_displacement = rec.max_displacement.max(r.max_displacement);
        rec.final_flatness = rec.final_flatness.max(r.final_flatness);
        if r.status.name() != "flattened" {
            rec.status = r.status.name().to_string();
        }
        rec.certified &= r.motion.first_uncertified_time(RECHECK_DEPTH).is_none();
    }
    Ok(rec)
}

/// Runs every (δ, trial) pair, in parallel; results are ordered by sweep
/// position then trial index, so the report depends only on the inputs.
pub fn run_probe(fixture: &str, tc: &TouchingConfig, p: &ProbeParams) -> Result<ProbeReport, ProbeError> {
    if p.trials == 0 {
        return Err(ProbeError::Params("trials must be at least 1".into()));
    }
    if p.deltas.is_empty() || p.deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(ProbeError::Params("deltas must be positive".into()));
    }
    if p.deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(ProbeError::Params("deltas must be strictly decreasing".into()));
    }
    // Refuse oversize δ before spending time on the others.
    for &d in &p.deltas {
        if d > tc.max_safe_delta() {
            return Err(ProbeError::Perturb { delta: d, source: TouchError::DeltaTooLarge { delta: d, max_safe: tc.max_safe_delta() } });
        }
    }
    let jobs: Vec<(usize, f64, u32)> = p.deltas.iter().enumerate().flat_map(|(di, &d)| (0..p.trials).map(move |t| (di, d, t))).collect();
    let records = jobs.par_iter().map(|&(di, d, t)| run_trial(tc, d, di, t, p)).collect::<Result<Vec<_>, _>>()?;
    let sweep = p
        .deltas
        .iter()
        .map(|&d| {
            let rs = records.iter().filter(|r| r.delta == d);
            let (md, ff) = rs.fold((0.0f64, 0.0f64), |(m, f), r| (m.max(r.max_displacement), f.max(r.final_flatness)));
            SweepRow { delta: d, trials: p.trials, budget: p.budget, max_max_displacement: md, max_final_flatness: ff }
        })
        .collect();
    let mut report = ProbeReport { fixture: fixture.to_string(), seed: p.seed, expect_locked: p.expect_locked, sweep, records, verdict_summary: String::new() };
    report.verdict_summary = summarize(&report);
    Ok(report)
}

impl ProbeReport {
    /// Whether the sweep's max displacement never grows, within `tol`, as δ shrinks.
    pub fn trend_non_increasing(&self, tol: f64) -> bool {
        self.sweep.windows(2).all(|w| w[1].max_max_displacement <= w[0].max_max_displacement + tol)
    }

    /// Trials that contradict the expected outcome: for a fixture expected
    /// to be locked, any trial getting within 100 × FLAT_TOL of flat; for
    /// any fixture, a motion failing the certificate re-check.
    pub fn expectation_failures(&self) -> Vec<&TrialRecord> {
        self.records
            .iter()
            .filter(|r| !r.certified || (self.expect_locked && r.final_flatness < 100.0 * FLAT_TOL))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "probe {} (seed {}, empirical)", self.fixture, self.seed);
        let _ = writeln!(s, "{:>10} {:>7} {:>9} {:>22} {:>22}", "delta", "trials", "budget", "max maxDisplacement", "max finalFlatness");
        for r in &self.sweep {
            let _ = writeln!(
                s,
                "{:>10} {:>7} {:>9} {:>22.9} {:>22.9}",
                r.delta, r.trials, r.budget, r.max_max_displacement, r.max_final_flatness
            );
        }
        let _ = writeln!(s, "{}", self.verdict_summary);
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("fixture,delta,trial,maxDisplacement,finalFlatness,status\n");
        for r in &self.records {
            let _ = writeln!(s, "{},{},{},{},{},{}", self.fixture, r.delta, r.trial, r.max_displacement, r.final_flatness, r.status);
        }
        s
    }
}

fn summarize(r: &ProbeReport) -> String {
    let failures = r.expectation_failures().len();
    let trend = if r.trend_non_increasing(0.0) { "non-increasing" } else { "not monotone" };
    let expect = if !r.expect_locked {
        String::from("no lock expected")
    } else if failures == 0 {
        format!("no trial came within {} of flat", 100.0 * FLAT_TOL)
    } else {
        format!("{failures} trial(s) contradict the expected lock")
    };
    format!("empirical: max displacement {trend} as delta shrinks; {expect}; uncertified motions: {}", r.records.iter().filter(|t| !t.certified).count())
}
