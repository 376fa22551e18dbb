//! Eve's ambiguity `S(X|EP)` about Alice's bit.
//!
//! Eve holds a purification E of `ρ₁,AB` (dimension fixed at 4) and learns the
//! public discard flag P. Bob's measurement is applied as a trace-preserving
//! instrument; on discarded rounds Alice's bit is set to 0. The resulting
//! state is block diagonal in P and X, so the conditional entropy reduces to
//! entropies of 4x4 blocks on E.

use num_complex::Complex;

use crate::channel::BlochAffineChannel;
use crate::error::Result;
use crate::linalg::{clamp_spectrum, entropy_term, hermitian_eig, ComplexMatrix};
use crate::protocol::{B92Context, Outcome};
use crate::scalar::Real;

/// Dimension of Eve's purifying register.
pub const EVE_DIM: usize = 4;

/// Pure state on A⊗B⊗E, amplitude index `(2a + b)·4 + e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Purification<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> Purification<T> {
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Self {
        assert_eq!(amplitudes.len(), 4 * EVE_DIM, "purification lives on a 2x2x4 space");
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, e: usize) -> Complex<T> {
        self.amplitudes[(2 * a + b) * EVE_DIM + e]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `|Φ⟩⟨Φ|` as a 16x16 matrix.
    pub fn projector(&self) -> ComplexMatrix<T> {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// Applies `I_A ⊗ I_B ⊗ U` for a 4x4 matrix `U` on Eve's register.
    pub fn act_on_eve(&self, u: &ComplexMatrix<T>) -> Self {
        assert!(u.rows() == EVE_DIM && u.cols() == EVE_DIM);
        let mut out = vec![Complex::new(T::zero(), T::zero()); 4 * EVE_DIM];
        for ab in 0..4 {
            let row = &self.amplitudes[ab * EVE_DIM..(ab + 1) * EVE_DIM];
            out[ab * EVE_DIM..(ab + 1) * EVE_DIM].copy_from_slice(&u.apply(row));
        }
        Self { amplitudes: out }
    }
}

/// `Σᵢ √λᵢ |eᵢ⟩_AB |i⟩_E` over the spectral decomposition of `ρ₁,AB`.
///
/// Rejects eigenvalues below `-1e-9` (f64); smaller negatives are clamped.
pub fn purify<T: Real>(rho_ab: &ComplexMatrix<T>) -> Result<Purification<T>> {
    purify_with_floor(rho_ab, T::psd_floor())
}

pub(crate) fn purify_with_floor<T: Real>(rho_ab: &ComplexMatrix<T>, floor: T) -> Result<Purification<T>> {
    if rho_ab.rows() != 4 || rho_ab.cols() != 4 {
        return Err(crate::Error::InvalidArgument(format!(
            "purify expects a 4x4 two-qubit state, got {}x{}",
            rho_ab.rows(),
            rho_ab.cols()
        )));
    }
    let eig = hermitian_eig(rho_ab)?;
    let mut values = eig.values;
    clamp_spectrum(&mut values, floor)?;
    let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 4 * EVE_DIM];
    for (i, &lambda) in values.iter().enumerate() {
        let s = lambda.sqrt();
        for ab in 0..4 {
            amplitudes[ab * EVE_DIM + i] = eig.vectors[(ab, i)] * s;
        }
    }
    Ok(Purification { amplitudes })
}

/// Eve's operators after Bob's instrument, before entropies are taken.
#[derive(Debug, Clone)]
pub struct PostSelectedBlocks<T> {
    /// `A_{jk}`: Alice's bit j, Bob's conclusive outcome k, on E.
    pub conclusive: [[ComplexMatrix<T>; 2]; 2],
    /// Discarded rounds, summed over both inconclusive outcomes and over A.
    pub inconclusive: ComplexMatrix<T>,
}

impl<T: Real> PostSelectedBlocks<T> {
    /// `ρ_XE` conditioned on P = 0, bit-j block: `A_{j0} + A_{j1}`.
    pub fn kept_block(&self, j: usize) -> ComplexMatrix<T> {
        &self.conclusive[j][0] + &self.conclusive[j][1]
    }

    pub fn prob_conclusive(&self) -> T {
        self.conclusive.iter().flatten().map(|b| b.trace().re).sum()
    }

    pub fn prob_inconclusive(&self) -> T {
        self.inconclusive.trace().re
    }
}

/// Applies Bob's measurement to Eve's purification and traces out A, B as
/// appropriate.
pub fn post_selected_state<T: Real>(ctx: &B92Context<T>, phi: &Purification<T>) -> PostSelectedBlocks<T> {
    let zero = Complex::new(T::zero(), T::zero());

    // (√F ⊗ I_E) restricted to Alice's value a: v[b][e] = Σ_c √F[b][c] Φ[a][c][e]
    let branch = |a: usize, k: Outcome| -> [[Complex<T>; EVE_DIM]; 2] {
        let s = ctx.sqrt_povm(k);
        let mut v = [[zero; EVE_DIM]; 2];
        for (b, vb) in v.iter_mut().enumerate() {
            for (e, cell) in vb.iter_mut().enumerate() {
                *cell = (0..2).fold(zero, |acc, c| acc + s[(b, c)] * phi.get(a, c, e));
            }
        }
        v
    };
    // Tr_B of the branch projector: M[e][e'] = Σ_b v[b][e] v*[b][e']
    let accumulate = |m: &mut ComplexMatrix<T>, v: &[[Complex<T>; EVE_DIM]; 2]| {
        for vb in v {
            for e in 0..EVE_DIM {
                for f in 0..EVE_DIM {
                    m[(e, f)] = m[(e, f)] + vb[e] * vb[f].conj();
                }
            }
        }
    };

    let conclusive = [0, 1].map(|j| {
        Outcome::CONCLUSIVE.map(|k| {
            let mut m = ComplexMatrix::zeros(EVE_DIM, EVE_DIM);
            accumulate(&mut m, &branch(j, k));
            m
        })
    });
    let mut inconclusive = ComplexMatrix::zeros(EVE_DIM, EVE_DIM);
    for k in Outcome::INCONCLUSIVE {
        for a in 0..2 {
            accumulate(&mut inconclusive, &branch(a, k));
        }
    }
    PostSelectedBlocks { conclusive, inconclusive }
}

/// `S(X|EP)` with the blocks it was computed from.
#[derive(Debug, Clone)]
pub struct AmbiguityEvaluation<T> {
    /// Bits.
    pub value: T,
    pub conclusive_blocks: [[ComplexMatrix<T>; 2]; 2],
    pub inconclusive_block: ComplexMatrix<T>,
    pub prob_conclusive: T,
    pub prob_inconclusive: T,
}

/// `-Σ λ log₂ λ` over a positive block of any trace.
fn block_entropy<T: Real>(m: &ComplexMatrix<T>, floor: T) -> Result<T> {
    let mut values = hermitian_eig(&m.hermitian_part())?.values;
    clamp_spectrum(&mut values, floor)?;
    Ok(values.into_iter().map(entropy_term).sum())
}

/// Evaluates `S(X|EP) = S(ρ₂,XEP) - S(ρ₂,EP)` from a purification.
pub fn ambiguity_from_purification<T: Real>(
    ctx: &B92Context<T>,
    phi: &Purification<T>,
) -> Result<AmbiguityEvaluation<T>> {
    let blocks = post_selected_state(ctx, phi);
    let floor = T::psd_floor();
    let kept = [blocks.kept_block(0), blocks.kept_block(1)];
    let kept_e = &kept[0] + &kept[1];

    let s_xe_kept = block_entropy(&kept[0], floor)? + block_entropy(&kept[1], floor)?;
    let s_e_kept = block_entropy(&kept_e, floor)?;
    // Discarded rounds carry X = 0, so that block adds S̃(B) - S̃(B) = 0.
    // Its spectrum is still checked for positivity.
    block_entropy(&blocks.inconclusive, floor)?;
    let value = s_xe_kept - s_e_kept;

    Ok(AmbiguityEvaluation {
        value,
        prob_conclusive: blocks.prob_conclusive(),
        prob_inconclusive: blocks.prob_inconclusive(),
        conclusive_blocks: blocks.conclusive,
        inconclusive_block: blocks.inconclusive,
    })
}

/// Eve's ambiguity for a given channel.
///
/// Tolerates joint states with eigenvalues down to `-1e-8` (f64), which occur
/// on the complete-positivity boundary.
pub fn eve_ambiguity<T: Real>(ctx: &B92Context<T>, ch: &BlochAffineChannel<T>) -> Result<AmbiguityEvaluation<T>> {
    let phi = purify_with_floor(&ctx.joint_state(ch), T::boundary_floor())?;
    ambiguity_from_purification(ctx, &phi)
}

/// Objective value that never fails: negative eigenvalues of the joint state
/// are clamped however large. Only meaningful alongside a CP penalty.
pub(crate) fn relaxed_ambiguity<T: Real>(ctx: &B92Context<T>, ch: &BlochAffineChannel<T>) -> T {
    let phi = purify_with_floor(&ctx.joint_state(ch), T::infinity()).expect("clamping purification");
    let blocks = post_selected_state(ctx, &phi);
    let inf = T::infinity();
    let kept = [blocks.kept_block(0), blocks.kept_block(1)];
    let kept_e = &kept[0] + &kept[1];
    let s = |m: &ComplexMatrix<T>| block_entropy(m, inf).expect("clamped entropy");
    s(&kept[0]) + s(&kept[1]) - s(&kept_e)
}
