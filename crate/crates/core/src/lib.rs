//! Asymptotic secret key rate of the single-photon B92 protocol.
//!
//! The rate per sifted bit is `min S(X|EP) / P_acc - H(X'|Y')`, where the
//! minimum runs over every completely positive qubit channel that reproduces
//! the observed conclusive statistics. Modules, bottom up:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigensolver, entropies
//! - [`channel`]: Bloch-affine qubit channels and the Choi positivity test
//! - [`protocol`]: signal states, POVM, joint state and its statistics
//! - [`objective`]: purification, post-selection, `S(X|EP)`
//! - [`optimizer`]: feasible-slice parameterization, minimization, key rate
//!
//! All numerics are generic over [`Real`] (`f32`, `f64`); the `*64` aliases
//! below name the double-precision instances used by the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod channel;
mod error;
pub mod linalg;
pub mod objective;
pub mod optimizer;
pub mod protocol;
mod scalar;

pub use channel::BlochAffineChannel;
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use objective::{eve_ambiguity, AmbiguityEvaluation};
pub use optimizer::{key_rate, minimize_ambiguity, KeyRatePoint, OptimizationConfig, OptimizationResult};
pub use protocol::B92Context;
pub use scalar::Real;

pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type ComplexMatrix32 = ComplexMatrix<f32>;
pub type Channel64 = BlochAffineChannel<f64>;
pub type Channel32 = BlochAffineChannel<f32>;
pub type Context64 = B92Context<f64>;
pub type Context32 = B92Context<f32>;
pub type KeyRatePoint64 = KeyRatePoint<f64>;
pub type OptimizationResult64 = OptimizationResult<f64>;
pub type AmbiguityEvaluation64 = AmbiguityEvaluation<f64>;
