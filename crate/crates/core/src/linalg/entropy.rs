//! Entropy functionals, in bits.

use super::eig::hermitian_eig;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `-x log2 x` with `0 log 0 = 0`.
#[inline]
pub fn entropy_term<T: Real>(x: T) -> T {
    if x > T::zero() {
        -x * x.log2()
    } else {
        T::zero()
    }
}

/// Binary entropy `h(p)`.
pub fn binary_entropy<T: Real>(p: T) -> T {
    entropy_term(p) + entropy_term(T::one() - p)
}

/// Clamps a spectrum to be nonnegative, rejecting eigenvalues below `-floor`.
pub(crate) fn clamp_spectrum<T: Real>(values: &mut [T], floor: T) -> Result<()> {
    for v in values.iter_mut() {
        if *v < -floor {
            return Err(Error::NotPositive { eigenvalue: v.as_f64() });
        }
        if *v < T::zero() {
            *v = T::zero();
        }
    }
    Ok(())
}

/// `-Σ λ log2 λ` over the eigenvalues of a positive semidefinite matrix.
///
/// The trace need not be one; unnormalized blocks give the per-block
/// contribution `S̃` whose sum over a direct sum equals the entropy of the whole.
pub fn von_neumann_entropy<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    let mut values = hermitian_eig(m)?.values;
    clamp_spectrum(&mut values, T::psd_floor())?;
    Ok(values.into_iter().map(entropy_term).sum())
}

/// Shannon entropy of a finite distribution (no normalization check).
pub fn shannon_entropy<T: Real>(p: impl IntoIterator<Item = T>) -> T {
    p.into_iter().map(entropy_term).sum()
}

/// `H(X|Y)` for a 2x2 joint table indexed `[x][y]`.
pub fn shannon_conditional_entropy<T: Real>(joint: &[[T; 2]; 2]) -> Result<T> {
    let mut total = T::zero();
    for &p in joint.iter().flatten() {
        if !(p >= T::zero()) {
            return Err(Error::InvalidDistribution(format!("entry {p} is negative")));
        }
        total = total + p;
    }
    if (total - T::one()).abs() > T::psd_floor() {
        return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
    }
    let h_joint = shannon_entropy(joint.iter().flatten().copied());
    let h_y = shannon_entropy((0..2).map(|y| joint[0][y] + joint[1][y]));
    Ok(h_joint - h_y)
}
