use std::path::PathBuf;

use b92_core::{Context64, OptimizationConfig};
use clap::{Parser, ValueEnum};

use crate::error::CliError;
use crate::format::round_sig;

/// Width below which the threshold bisection stops.
pub const THRESHOLD_TOL: f64 = 1e-4;
const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Single,
    Sweep,
    Threshold,
    AlphaSweep,
}

/// Worst-case asymptotic key rate of single-photon B92 under depolarizing noise.
///
/// Output is CSV with a header row. Exit status: 0 all points converged,
/// 1 usage error, 2 some point did not converge, 3 threshold bracket has no
/// sign change.
#[derive(Debug, Clone, Parser)]
#[command(name = "b92-keyrate", version)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Mode::Single)]
    pub mode: Mode,
    /// Signal-state amplitude, in (0, 1/sqrt 2).
    #[arg(long, default_value_t = 0.39)]
    pub alpha: f64,
    /// Depolarizing rate (single and alpha-sweep modes).
    #[arg(long)]
    pub q: Option<f64>,
    /// First q of a sweep, or lower end of the threshold bracket.
    #[arg(long)]
    pub q_start: Option<f64>,
    /// Last q of a sweep, or upper end of the threshold bracket.
    #[arg(long)]
    pub q_end: Option<f64>,
    #[arg(long)]
    pub q_step: Option<f64>,
    #[arg(long)]
    pub alpha_start: Option<f64>,
    #[arg(long)]
    pub alpha_end: Option<f64>,
    #[arg(long)]
    pub alpha_step: Option<f64>,
    /// Explicit alpha grid, comma separated; overrides start/end/step.
    #[arg(long, value_delimiter = ',')]
    pub alpha_list: Vec<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Iteration budget per restart.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Gradient-norm convergence threshold, bits.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the number of processors.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    Single { q: f64 },
    Sweep { qs: Vec<f64> },
    Threshold { q_lo: f64, q_hi: f64 },
    AlphaSweep { q: f64, alphas: Vec<f64> },
}

/// Validated run request.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub plan: Plan,
    pub alpha: f64,
    pub config: OptimizationConfig,
    pub jobs: Option<usize>,
    pub output: Option<PathBuf>,
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn required(value: Option<f64>, flag: &str, mode: &str) -> Result<f64, CliError> {
    match value {
        Some(v) => Ok(v),
        None => usage(format!("--{flag} is required in {mode} mode")),
    }
}

fn check_q(q: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&q) {
        Ok(q)
    } else {
        usage(format!("q = {q} is outside [0, 1]"))
    }
}

fn check_alpha(alpha: f64) -> Result<f64, CliError> {
    match Context64::new(alpha) {
        Ok(_) => Ok(alpha),
        Err(e) => usage(e.to_string()),
    }
}

/// Inclusive arithmetic grid, each point rounded to the printed precision.
pub fn grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(start.is_finite() && end.is_finite()) {
        return usage("range bounds must be finite");
    }
    if !(step > 0.0 && step.is_finite()) {
        return usage(format!("step {step} must be positive"));
    }
    if start > end {
        return usage(format!("empty range: start {start} exceeds end {end}"));
    }
    let span = (end - start) / step;
    if span >= MAX_GRID_POINTS as f64 {
        return usage(format!("range has more than {MAX_GRID_POINTS} points"));
    }
    let n = (span + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| round_sig(start + i as f64 * step)).collect())
}

impl Cli {
    fn config(&self) -> Result<OptimizationConfig, CliError> {
        let mut cfg = OptimizationConfig::default().with_seed(self.seed);
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        if let Some(m) = self.max_iter {
            cfg.max_iterations = m;
        }
        if let Some(t) = self.tol {
            cfg.convergence_tol = t;
        }
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    fn plan(&self) -> Result<Plan, CliError> {
        Ok(match self.mode {
            Mode::Single => Plan::Single { q: check_q(required(self.q, "q", "single")?)? },
            Mode::Sweep => {
                let qs = grid(
                    required(self.q_start, "q-start", "sweep")?,
                    required(self.q_end, "q-end", "sweep")?,
                    required(self.q_step, "q-step", "sweep")?,
                )?;
                for &q in &qs {
                    check_q(q)?;
                }
                Plan::Sweep { qs }
            }
            Mode::Threshold => {
                let q_lo = check_q(required(self.q_start, "q-start", "threshold")?)?;
                let q_hi = check_q(required(self.q_end, "q-end", "threshold")?)?;
                if q_lo >= q_hi {
                    return usage(format!("threshold bracket [{q_lo}, {q_hi}] is empty"));
                }
                Plan::Threshold { q_lo, q_hi }
            }
            Mode::AlphaSweep => {
                let q = check_q(required(self.q, "q", "alpha-sweep")?)?;
                let mut alphas = if self.alpha_list.is_empty() {
                    grid(
                        required(self.alpha_start, "alpha-start", "alpha-sweep")?,
                        required(self.alpha_end, "alpha-end", "alpha-sweep")?,
                        required(self.alpha_step, "alpha-step", "alpha-sweep")?,
                    )?
                } else {
                    self.alpha_list.clone()
                };
                for &a in &alphas {
                    check_alpha(a)?;
                }
                alphas.sort_by(f64::total_cmp);
                alphas.dedup();
                Plan::AlphaSweep { q, alphas }
            }
        })
    }

    pub fn into_spec(self) -> Result<RunSpec, CliError> {
        let alpha = check_alpha(self.alpha)?;
        if self.jobs == Some(0) {
            return usage("--jobs must be positive");
        }
        Ok(RunSpec { plan: self.plan()?, alpha, config: self.config()?, jobs: self.jobs, output: self.output })
    }
}
