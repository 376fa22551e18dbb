//! Worst-case key rate: minimization of Eve's ambiguity over every completely
//! positive channel consistent with the observed statistics.

mod config;
mod feasible;
mod keyrate;
mod minimize;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;

pub use config::OptimizationConfig;
pub use feasible::{
    feasible_parameterization, feasible_parameterization_in, sample_feasible, sample_slice, FeasibleSlice,
    ParameterSpace, SamplingBox,
};
pub use keyrate::{evaluate_key_rate, key_rate, key_rate_in, KeyRatePoint, OptimizationSummary};
pub use minimize::{minimize_ambiguity, minimize_ambiguity_in, OptimizationResult, RestartSummary, StageOutcome};

/// Independent random stream for one (seed, purpose, q, alpha) combination.
///
/// Keyed on the values of `q` and `alpha`, not on their position in a sweep,
/// so a point computes identically whichever sweep it belongs to.
pub(crate) fn stream_rng<T: Real>(seed: u64, purpose: u64, q: T, alpha: T) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = splitmix(purpose);
    h = splitmix(h ^ q.as_f64().to_bits());
    h = splitmix(h ^ alpha.as_f64().to_bits());
    rng.set_stream(h);
    rng
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
