//! Penalized quasi-Newton minimization of Eve's ambiguity over a feasible slice.
//!
//! Equality constraints are eliminated by the slice parameterization.
//! Complete positivity enters as `μ·max(0, -λ_min(Choi) - tol)²` over an
//! increasing schedule of `μ`. Every CP-feasible point evaluated along the way
//! is a candidate; the reported optimum is the best of them, so it is always a
//! genuine feasible channel and never worse than the depolarizing start.

use rayon::prelude::*;

use super::config::OptimizationConfig;
use super::feasible::{feasible_parameterization_in, FeasibleSlice, ParameterSpace};
use crate::channel::BlochAffineChannel;
use crate::error::Result;
use crate::objective::{eve_ambiguity, relaxed_ambiguity};
use crate::protocol::B92Context;
use crate::scalar::Real;

/// Longest step, in slice coordinates, one line search may take.
const MAX_STEP: f64 = 0.1;
const ARMIJO: f64 = 1e-4;
const MIN_STEP_FRACTION: f64 = 1e-14;
/// Proposals tried per random restart before giving up on it.
const START_ATTEMPTS: usize = 1000;
/// A stage also ends once the penalized objective has moved less than
/// `PROGRESS_TOL` (bits) over the last `PROGRESS_WINDOW` iterations.
const PROGRESS_WINDOW: usize = 50;
const PROGRESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageOutcome {
    /// Gradient norm fell below the tolerance.
    Converged,
    /// No decrease along steepest descent, or no measurable progress over a
    /// window of iterations: stationary to finite-difference precision.
    Stalled,
    /// Iteration budget ran out.
    Exhausted,
}

impl StageOutcome {
    pub fn is_converged(self) -> bool {
        !matches!(self, StageOutcome::Exhausted)
    }
}

/// What one restart did.
#[derive(Debug, Clone)]
pub struct RestartSummary<T> {
    pub index: usize,
    /// Objective at the starting point; `None` if no CP start was found.
    pub start_value: Option<T>,
    /// Best feasible objective seen after each penalty stage.
    pub stage_best: Vec<T>,
    pub stage_outcomes: Vec<StageOutcome>,
    pub iterations: usize,
    pub converged: bool,
    best: Option<(T, Vec<T>)>,
}

impl<T: Real> RestartSummary<T> {
    pub fn best_value(&self) -> Option<T> {
        self.best.as_ref().map(|(v, _)| *v)
    }
}

#[derive(Debug, Clone)]
pub struct OptimizationResult<T> {
    /// Bits.
    pub min_value: T,
    pub argmin: BlochAffineChannel<T>,
    pub converged: bool,
    pub iterations_used: usize,
    pub min_choi_eig_at_opt: T,
    pub constraint_residual: T,
    pub restarts: Vec<RestartSummary<T>>,
}

/// Minimizes `S(X|EP)` over CP channels matching the depolarizing statistics
/// at rate `q`, in the symmetry-reduced parameter space.
pub fn minimize_ambiguity<T: Real>(
    ctx: &B92Context<T>,
    q: T,
    cfg: &OptimizationConfig,
) -> Result<OptimizationResult<T>> {
    minimize_ambiguity_in(ctx, q, cfg, ParameterSpace::Reduced)
}

pub fn minimize_ambiguity_in<T: Real>(
    ctx: &B92Context<T>,
    q: T,
    cfg: &OptimizationConfig,
    space: ParameterSpace,
) -> Result<OptimizationResult<T>> {
    cfg.validate()?;
    let slice = feasible_parameterization_in(ctx, q, space)?;
    let mut box_rng = super::stream_rng(cfg.rng_seed, u64::MAX - 1, q, ctx.alpha());
    let bounds = slice.sampling_box(&mut box_rng);

    let restarts: Vec<RestartSummary<T>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|index| {
            let start = if index == 0 {
                Some(vec![T::zero(); slice.dim()])
            } else {
                let mut rng = super::stream_rng(cfg.rng_seed, index as u64, q, ctx.alpha());
                (0..START_ATTEMPTS).map(|_| bounds.draw(&mut rng)).find(|u| slice.is_cp(u))
            };
            run_restart(ctx, &slice, cfg, index, start)
        })
        .collect();

    let (best_value, best_u) = restarts
        .iter()
        .filter_map(|r| r.best.as_ref())
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
        .cloned()
        .expect("restart 0 always starts at a feasible point");

    let argmin = slice.point(&best_u);
    let min_value = match eve_ambiguity(ctx, &argmin) {
        Ok(ev) => ev.value,
        Err(_) => best_value,
    };
    Ok(OptimizationResult {
        min_value,
        argmin,
        converged: restarts.iter().any(|r| r.converged),
        iterations_used: restarts.iter().map(|r| r.iterations).sum(),
        min_choi_eig_at_opt: argmin.min_choi_eigenvalue(),
        constraint_residual: slice.constraint_residual(ctx, &argmin),
        restarts,
    })
}

/// Penalized objective plus the record of the best CP-feasible point seen.
struct Tracker<'a, T> {
    ctx: &'a B92Context<T>,
    slice: &'a FeasibleSlice<T>,
    weight: T,
    best: Option<(T, Vec<T>)>,
}

impl<T: Real> Tracker<'_, T> {
    fn eval(&mut self, u: &[T]) -> T {
        let ch = self.slice.point(u);
        let lambda = ch.min_choi_eigenvalue();
        let value = relaxed_ambiguity(self.ctx, &ch);
        let violation = (-lambda - T::cp_tol()).max(T::zero());
        if violation == T::zero() && self.best.as_ref().is_none_or(|(b, _)| value < *b) {
            self.best = Some((value, u.to_vec()));
        }
        value + self.weight * violation * violation
    }

    fn gradient(&mut self, u: &[T], rel_step: T) -> Vec<T> {
        let mut x = u.to_vec();
        (0..u.len())
            .map(|i| {
                let h = rel_step * u[i].abs().max(T::one());
                x[i] = u[i] + h;
                let fp = self.eval(&x);
                x[i] = u[i] - h;
                let fm = self.eval(&x);
                x[i] = u[i];
                (fp - fm) / (h + h)
            })
            .collect()
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn run_restart<T: Real>(
    ctx: &B92Context<T>,
    slice: &FeasibleSlice<T>,
    cfg: &OptimizationConfig,
    index: usize,
    start: Option<Vec<T>>,
) -> RestartSummary<T> {
    let mut summary = RestartSummary {
        index,
        start_value: None,
        stage_best: Vec::new(),
        stage_outcomes: Vec::new(),
        iterations: 0,
        converged: false,
        best: None,
    };
    let Some(mut u) = start else {
        return summary;
    };

    let mut tracker = Tracker { ctx, slice, weight: T::zero(), best: None };
    tracker.eval(&u);
    summary.start_value = tracker.best.as_ref().map(|(v, _)| *v);

    let mut budget = cfg.max_iterations;
    for &weight in &cfg.penalty_schedule {
        tracker.weight = T::lit(weight);
        let outcome = quasi_newton(&mut tracker, &mut u, &mut budget, cfg, &mut summary.iterations);
        summary.stage_outcomes.push(outcome);
        summary.stage_best.push(tracker.best.as_ref().map(|(v, _)| *v).unwrap_or(T::infinity()));
        if outcome == StageOutcome::Exhausted {
            break;
        }
    }
    restore_feasibility(&mut tracker, &u);
    if let (Some(last), Some((v, _))) = (summary.stage_best.last_mut(), tracker.best.as_ref()) {
        *last = *v;
    }

    summary.converged = summary.stage_outcomes.len() == cfg.penalty_schedule.len()
        && summary.stage_outcomes.iter().all(|o| o.is_converged());
    summary.best = tracker.best;
    summary
}

/// Pulls a slightly infeasible terminal point back along the ray to the
/// (interior) origin, recording the CP point reached.
fn restore_feasibility<T: Real>(tracker: &mut Tracker<'_, T>, u: &[T]) {
    let scaled = |s: T| u.iter().map(|&x| x * s).collect::<Vec<_>>();
    if tracker.slice.is_cp(u) {
        tracker.eval(u);
        return;
    }
    if !tracker.slice.is_cp(&scaled(T::zero())) {
        return;
    }
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..60 {
        let mid = (lo + hi) * T::lit(0.5);
        if tracker.slice.is_cp(&scaled(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    tracker.eval(&scaled(lo));
}

/// BFGS on the penalized objective with Armijo backtracking and central
/// finite-difference gradients.
fn quasi_newton<T: Real>(
    tracker: &mut Tracker<'_, T>,
    u: &mut Vec<T>,
    budget: &mut usize,
    cfg: &OptimizationConfig,
    iterations: &mut usize,
) -> StageOutcome {
    let n = u.len();
    let rel_step = T::lit(cfg.gradient_step);
    let tol = T::lit(cfg.convergence_tol);
    let identity = || {
        let mut h = vec![T::zero(); n * n];
        for i in 0..n {
            h[i * n + i] = T::one();
        }
        h
    };

    let mut fx = tracker.eval(u);
    let mut g = tracker.gradient(u, rel_step);
    let mut h_inv = identity();
    let mut fresh = true;
    let mut history = std::collections::VecDeque::with_capacity(PROGRESS_WINDOW + 1);

    loop {
        if dot(&g, &g).sqrt() <= tol {
            return StageOutcome::Converged;
        }
        if *budget == 0 {
            return StageOutcome::Exhausted;
        }
        *budget -= 1;
        *iterations += 1;

        let mut d: Vec<T> = (0..n).map(|i| -(0..n).map(|j| h_inv[i * n + j] * g[j]).sum::<T>()).collect();
        let mut slope = dot(&g, &d);
        if !(slope < T::zero()) {
            h_inv = identity();
            fresh = true;
            d = g.iter().map(|&x| -x).collect();
            slope = dot(&g, &d);
        }
        let len = dot(&d, &d).sqrt();
        let cap = T::lit(MAX_STEP);
        if len > cap {
            let s = cap / len;
            d.iter_mut().for_each(|x| *x = *x * s);
            slope = slope * s;
        }

        let mut step = T::one();
        let accepted = loop {
            let trial: Vec<T> = u.iter().zip(&d).map(|(&x, &dx)| x + step * dx).collect();
            let ft = tracker.eval(&trial);
            if ft <= fx + T::lit(ARMIJO) * step * slope {
                break Some((trial, ft));
            }
            step = step * T::lit(0.5);
            if step < T::lit(MIN_STEP_FRACTION) {
                break None;
            }
        };
        let Some((next, f_next)) = accepted else {
            if fresh {
                return StageOutcome::Stalled;
            }
            h_inv = identity();
            fresh = true;
            continue;
        };

        let g_next = tracker.gradient(&next, rel_step);
        let s: Vec<T> = next.iter().zip(u.iter()).map(|(&a, &b)| a - b).collect();
        let y: Vec<T> = g_next.iter().zip(&g).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > T::epsilon() * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if fresh {
                // Rescale the initial inverse Hessian to the observed curvature.
                let scale = sy / dot(&y, &y);
                h_inv.iter_mut().for_each(|x| *x = *x * scale);
            }
            bfgs_update(&mut h_inv, &s, &y, sy);
            fresh = false;
        }
        *u = next;
        fx = f_next;
        g = g_next;

        history.push_back(fx);
        if history.len() > PROGRESS_WINDOW {
            let old = history.pop_front().expect("non-empty");
            if old - fx < T::lit(PROGRESS_TOL) {
                return StageOutcome::Stalled;
            }
        }
    }
}

/// `H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ` with `ρ = 1/(yᵀs)`.
fn bfgs_update<T: Real>(h: &mut [T], s: &[T], y: &[T], sy: T) {
    let n = s.len();
    let rho = T::one() / sy;
    let hy: Vec<T> = (0..n).map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum()).collect();
    let yhy = dot(y, &hy);
    let coef = (T::one() + rho * yhy) * rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] = h[i * n + j] + coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bfgs_update_satisfies_secant_condition() {
        let mut h: Vec<f64> = vec![1.0, 0.0, 0.0, 1.0];
        let s: [f64; 2] = [0.3, -0.1];
        let y = [0.5, 0.2];
        let sy = dot(&s, &y);
        bfgs_update(&mut h, &s, &y, sy);
        let hy = [h[0] * y[0] + h[1] * y[1], h[2] * y[0] + h[3] * y[1]];
        assert!((hy[0] - s[0]).abs() < 1e-14 && (hy[1] - s[1]).abs() < 1e-14);
    }

    #[test]
    fn never_worse_than_depolarizing() {
        let ctx = B92Context::<f64>::new(0.39).unwrap();
        let cfg = OptimizationConfig { restarts: 2, ..Default::default() };
        let q = 0.08;
        let res = minimize_ambiguity(&ctx, q, &cfg).unwrap();
        let start = eve_ambiguity(&ctx, &BlochAffineChannel::depolarizing(q).unwrap()).unwrap().value;
        assert!(res.min_value <= start + 1e-9);
        assert!(res.min_value >= 0.0);
        assert!(res.min_choi_eig_at_opt >= -1e-10);
        assert!(res.constraint_residual <= 1e-10);
    }
}
