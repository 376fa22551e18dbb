use std::io::Write;

use b92_core::{key_rate, Context64, KeyRatePoint64, OptimizationConfig};
use rayon::prelude::*;

use crate::args::{Plan, RunSpec, THRESHOLD_TOL};
use crate::error::CliError;
use crate::format::format_sig;

pub const POINT_HEADER: [&str; 11] =
    ["q", "alpha", "p_acc", "c_match", "c_err", "h_xy", "s_min", "key_rate", "converged", "iterations", "min_choi_eig"];

pub const THRESHOLD_HEADER: [&str; 8] =
    ["alpha", "q_star", "q_lo", "q_hi", "rate_lo", "rate_hi", "optimizer_calls", "converged"];

/// What a completed run reports back for the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunStatus {
    pub all_converged: bool,
}

impl RunStatus {
    pub fn exit_code(self) -> u8 {
        if self.all_converged {
            0
        } else {
            2
        }
    }
}

fn point_record(p: &KeyRatePoint64) -> [String; 11] {
    [
        format_sig(p.q),
        format_sig(p.alpha),
        format_sig(p.p_acc),
        format_sig(p.c_match),
        format_sig(p.c_err),
        format_sig(p.h_xy),
        format_sig(p.s_min),
        format_sig(p.key_rate),
        p.diagnostics.converged.to_string(),
        p.diagnostics.iterations_used.to_string(),
        format_sig(p.diagnostics.min_choi_eig),
    ]
}

fn evaluate(alpha: f64, q: f64, cfg: &OptimizationConfig) -> Result<KeyRatePoint64, CliError> {
    let ctx = Context64::new(alpha)?;
    Ok(key_rate(&ctx, q, cfg)?)
}

/// Result of bisecting the key rate for its zero crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub q_star: f64,
    pub q_lo: f64,
    pub q_hi: f64,
    pub rate_lo: f64,
    pub rate_hi: f64,
    pub optimizer_calls: usize,
    pub converged: bool,
}

/// Bisects `[q_lo, q_hi]` until its width is at most [`THRESHOLD_TOL`].
/// Requires a positive rate at `q_lo` and a negative one at `q_hi`.
pub fn find_threshold(alpha: f64, q_lo: f64, q_hi: f64, cfg: &OptimizationConfig) -> Result<Threshold, CliError> {
    let lo = evaluate(alpha, q_lo, cfg)?;
    let hi = evaluate(alpha, q_hi, cfg)?;
    if !(lo.key_rate > 0.0 && hi.key_rate < 0.0) {
        return Err(CliError::Bracket { q_lo, q_hi, rate_lo: lo.key_rate, rate_hi: hi.key_rate });
    }
    let mut t = Threshold {
        q_star: 0.5 * (q_lo + q_hi),
        q_lo,
        q_hi,
        rate_lo: lo.key_rate,
        rate_hi: hi.key_rate,
        optimizer_calls: 2,
        converged: lo.diagnostics.converged && hi.diagnostics.converged,
    };
    while t.q_hi - t.q_lo > THRESHOLD_TOL {
        let mid = 0.5 * (t.q_lo + t.q_hi);
        let p = evaluate(alpha, mid, cfg)?;
        t.optimizer_calls += 1;
        t.converged &= p.diagnostics.converged;
        if p.key_rate > 0.0 {
            t.q_lo = mid;
            t.rate_lo = p.key_rate;
        } else {
            t.q_hi = mid;
            t.rate_hi = p.key_rate;
        }
    }
    t.q_star = 0.5 * (t.q_lo + t.q_hi);
    Ok(t)
}

/// Everything a run computes, before it is written out.
#[derive(Debug, Clone)]
pub enum Outcome {
    Points(Vec<KeyRatePoint64>),
    Threshold { alpha: f64, threshold: Threshold },
}

impl Outcome {
    pub fn status(&self) -> RunStatus {
        let all_converged = match self {
            Outcome::Points(points) => points.iter().all(|p| p.diagnostics.converged),
            Outcome::Threshold { threshold, .. } => threshold.converged,
        };
        RunStatus { all_converged }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut wtr = csv::Writer::from_writer(out);
        match self {
            Outcome::Points(points) => {
                wtr.write_record(POINT_HEADER)?;
                for p in points {
                    wtr.write_record(point_record(p))?;
                }
            }
            Outcome::Threshold { alpha, threshold: t } => {
                wtr.write_record(THRESHOLD_HEADER)?;
                wtr.write_record([
                    format_sig(*alpha),
                    format_sig(t.q_star),
                    format_sig(t.q_lo),
                    format_sig(t.q_hi),
                    format_sig(t.rate_lo),
                    format_sig(t.rate_hi),
                    t.optimizer_calls.to_string(),
                    t.converged.to_string(),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

fn compute_plan(spec: &RunSpec) -> Result<Outcome, CliError> {
    let cfg = &spec.config;
    Ok(match &spec.plan {
        Plan::Single { q } => Outcome::Points(vec![evaluate(spec.alpha, *q, cfg)?]),
        Plan::Sweep { qs } => {
            Outcome::Points(qs.par_iter().map(|&q| evaluate(spec.alpha, q, cfg)).collect::<Result<_, _>>()?)
        }
        Plan::AlphaSweep { q, alphas } => {
            Outcome::Points(alphas.par_iter().map(|&a| evaluate(a, *q, cfg)).collect::<Result<_, _>>()?)
        }
        Plan::Threshold { q_lo, q_hi } => {
            Outcome::Threshold { alpha: spec.alpha, threshold: find_threshold(spec.alpha, *q_lo, *q_hi, cfg)? }
        }
    })
}

/// Computes `spec` on a worker pool of `spec.jobs` threads. Points come back
/// in grid order whatever order they finish in.
pub fn compute(spec: &RunSpec) -> Result<Outcome, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = spec.jobs {
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("cannot start {:?} workers: {e}", spec.jobs)))?;
    pool.install(|| compute_plan(spec))
}

/// Computes `spec` and writes its CSV to `out`.
pub fn run<W: Write>(spec: &RunSpec, out: W) -> Result<RunStatus, CliError> {
    let outcome = compute(spec)?;
    outcome.write_csv(out)?;
    Ok(outcome.status())
}
