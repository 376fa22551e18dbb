use super::config::OptimizationConfig;
use super::feasible::{feasible_parameterization_in, ParameterSpace};
use super::minimize::minimize_ambiguity_in;
use crate::channel::BlochAffineChannel;
use crate::error::Result;
use crate::objective::eve_ambiguity;
use crate::protocol::B92Context;
use crate::scalar::Real;

/// Optimizer diagnostics carried with each key-rate point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationSummary<T> {
    pub converged: bool,
    pub iterations_used: usize,
    pub min_choi_eig: T,
    pub constraint_residual: T,
}

/// One row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRatePoint<T> {
    pub q: T,
    pub alpha: T,
    /// Probability of a conclusive outcome.
    pub p_acc: T,
    pub c_match: T,
    pub c_err: T,
    /// `H(X'|Y')`, bits.
    pub h_xy: T,
    /// Minimized `S(X|EP)`, bits.
    pub s_min: T,
    /// `s_min / p_acc - h_xy`, bits per sifted bit.
    pub key_rate: T,
    pub diagnostics: OptimizationSummary<T>,
}

struct Observed<T> {
    p_acc: T,
    c_match: T,
    c_err: T,
    h_xy: T,
}

fn observed<T: Real>(ctx: &B92Context<T>, q: T) -> Result<Observed<T>> {
    let rho = ctx.joint_state(&BlochAffineChannel::depolarizing(q)?);
    let c = ctx.constraint_values(&rho);
    Ok(Observed {
        p_acc: ctx.acceptance_probability(&rho),
        c_match: c.c_match,
        c_err: c.c_err,
        h_xy: ctx.reconciliation_cost(&rho)?,
    })
}

fn assemble<T: Real>(
    ctx: &B92Context<T>,
    q: T,
    obs: Observed<T>,
    s_min: T,
    diagnostics: OptimizationSummary<T>,
) -> KeyRatePoint<T> {
    KeyRatePoint {
        q,
        alpha: ctx.alpha(),
        p_acc: obs.p_acc,
        c_match: obs.c_match,
        c_err: obs.c_err,
        h_xy: obs.h_xy,
        s_min,
        key_rate: s_min / obs.p_acc - obs.h_xy,
        diagnostics,
    }
}

/// Asymptotic key rate under depolarizing noise at rate `q`, minimizing over
/// the symmetry-reduced channel family.
pub fn key_rate<T: Real>(ctx: &B92Context<T>, q: T, cfg: &OptimizationConfig) -> Result<KeyRatePoint<T>> {
    key_rate_in(ctx, q, cfg, ParameterSpace::Reduced)
}

pub fn key_rate_in<T: Real>(
    ctx: &B92Context<T>,
    q: T,
    cfg: &OptimizationConfig,
    space: ParameterSpace,
) -> Result<KeyRatePoint<T>> {
    let obs = observed(ctx, q)?;
    let opt = minimize_ambiguity_in(ctx, q, cfg, space)?;
    let diagnostics = OptimizationSummary {
        converged: opt.converged,
        iterations_used: opt.iterations_used,
        min_choi_eig: opt.min_choi_eig_at_opt,
        constraint_residual: opt.constraint_residual,
    };
    Ok(assemble(ctx, q, obs, opt.min_value, diagnostics))
}

/// The key-rate formula with `S(X|EP)` taken at one given channel instead of
/// minimized. Statistics still come from `depolarizing(q)`.
pub fn evaluate_key_rate<T: Real>(ctx: &B92Context<T>, q: T, ch: &BlochAffineChannel<T>) -> Result<KeyRatePoint<T>> {
    let obs = observed(ctx, q)?;
    let slice = feasible_parameterization_in(ctx, q, ParameterSpace::Full)?;
    let s = eve_ambiguity(ctx, ch)?.value;
    let diagnostics = OptimizationSummary {
        converged: true,
        iterations_used: 0,
        min_choi_eig: ch.min_choi_eigenvalue(),
        constraint_residual: slice.constraint_residual(ctx, ch),
    };
    Ok(assemble(ctx, q, obs, s, diagnostics))
}
