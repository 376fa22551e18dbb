//! Qubit channels in Bloch-affine form.
//!
//! A trace-preserving, Hermiticity-preserving qubit map sends a Bloch vector
//! `b` to `R b + t`. Components are ordered **(z, x, y)** throughout: row and
//! column 0 of `R` is z, 1 is x, 2 is y. [`pauli`] is the only place that
//! ordering meets concrete matrices.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, min_eigenvalue, ComplexMatrix};
use crate::scalar::Real;

pub const Z: usize = 0;
pub const X: usize = 1;
pub const Y: usize = 2;

/// Number of real parameters of a general channel (9 for `R`, 3 for `t`).
pub const FULL_PARAMS: usize = 12;
/// Number of parameters left after symmetry reduction.
pub const REDUCED_PARAMS: usize = 7;

/// Positions in the full parameter vector (`R` row-major, then `t`) of the
/// parameters kept by symmetry reduction: R_zz, R_zx, R_xz, R_xx, R_yy, t_z, t_x.
pub const REDUCED_INDICES: [usize; REDUCED_PARAMS] = [0, 1, 3, 4, 8, 9, 10];

/// Pauli matrix for Bloch component `axis` in (z, x, y) order.
pub fn pauli<T: Real>(axis: usize) -> ComplexMatrix<T> {
    let (o, l) = (T::zero(), T::one());
    let c = |re: T, im: T| Complex::new(re, im);
    let data = match axis {
        Z => vec![c(l, o), c(o, o), c(o, o), c(-l, o)],
        X => vec![c(o, o), c(l, o), c(l, o), c(o, o)],
        Y => vec![c(o, o), c(o, -l), c(o, l), c(o, o)],
        _ => panic!("Bloch axis {axis} out of range"),
    };
    ComplexMatrix::from_vec(2, 2, data).expect("2x2")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAffineChannel<T> {
    r: [[T; 3]; 3],
    t: [T; 3],
    symmetry_reduced: bool,
}

impl<T: Real> BlochAffineChannel<T> {
    /// Validated constructor: entries finite, `‖R‖₂ ≤ 2`, `‖t‖ ≤ 2`.
    pub fn new(r: [[T; 3]; 3], t: [T; 3]) -> Result<Self> {
        if r.iter().flatten().chain(t.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite channel parameter".into()));
        }
        let two = T::lit(2.0);
        let t_norm = t.iter().map(|&v| v * v).sum::<T>().sqrt();
        if t_norm > two {
            return Err(Error::InvalidArgument(format!("|t| = {t_norm} exceeds 2")));
        }
        let r_norm = spectral_norm(&r);
        if r_norm > two {
            return Err(Error::InvalidArgument(format!("|R| = {r_norm} exceeds 2")));
        }
        Ok(Self::from_parts(r, t))
    }

    /// Unvalidated constructor, also used for parameter-space directions that
    /// are not channels themselves.
    pub fn from_parts(r: [[T; 3]; 3], t: [T; 3]) -> Self {
        let mut ch = Self { r, t, symmetry_reduced: false };
        ch.symmetry_reduced = ch.has_reduced_form();
        ch
    }

    pub fn identity() -> Self {
        let mut r = [[T::zero(); 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = T::one();
        }
        Self::from_parts(r, [T::zero(); 3])
    }

    /// Maps every state to `I/2`.
    pub fn zero() -> Self {
        Self::from_parts([[T::zero(); 3]; 3], [T::zero(); 3])
    }

    /// Depolarizing channel with Bloch contraction `1 - 4q/3`.
    pub fn depolarizing(q: T) -> Result<Self> {
        if !(q >= T::zero() && q <= T::one()) {
            return Err(Error::InvalidArgument(format!("depolarizing rate {q} outside [0, 1]")));
        }
        let s = T::one() - T::lit(4.0) * q / T::lit(3.0);
        let mut r = [[T::zero(); 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = s;
        }
        Ok(Self::from_parts(r, [T::zero(); 3]))
    }

    pub fn r(&self) -> &[[T; 3]; 3] {
        &self.r
    }

    pub fn t(&self) -> &[T; 3] {
        &self.t
    }

    /// True when `R_zy = R_yz = R_xy = R_yx = t_y = 0`.
    pub fn is_symmetry_reduced(&self) -> bool {
        self.symmetry_reduced
    }

    fn has_reduced_form(&self) -> bool {
        let zero = T::zero();
        self.r[Z][Y] == zero
            && self.r[Y][Z] == zero
            && self.r[X][Y] == zero
            && self.r[Y][X] == zero
            && self.t[Y] == zero
    }

    /// Zeroes the five parameters outside the symmetry-reduced family.
    pub fn symmetrize(&self) -> Self {
        let mut out = *self;
        out.r[Z][Y] = T::zero();
        out.r[Y][Z] = T::zero();
        out.r[X][Y] = T::zero();
        out.r[Y][X] = T::zero();
        out.t[Y] = T::zero();
        out.symmetry_reduced = true;
        out
    }

    /// `R` row-major followed by `t`.
    pub fn params(&self) -> [T; FULL_PARAMS] {
        let mut p = [T::zero(); FULL_PARAMS];
        for i in 0..3 {
            for j in 0..3 {
                p[3 * i + j] = self.r[i][j];
            }
            p[9 + i] = self.t[i];
        }
        p
    }

    pub fn from_params(p: &[T; FULL_PARAMS]) -> Self {
        let mut r = [[T::zero(); 3]; 3];
        let mut t = [T::zero(); 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = p[3 * i + j];
            }
            t[i] = p[9 + i];
        }
        Self::from_parts(r, t)
    }

    /// `self + s · dir`, entrywise on the parameters.
    pub fn offset(&self, dir: &Self, s: T) -> Self {
        let a = self.params();
        let b = dir.params();
        let mut p = [T::zero(); FULL_PARAMS];
        for i in 0..FULL_PARAMS {
            p[i] = a[i] + s * b[i];
        }
        Self::from_params(&p)
    }

    /// Entrywise `λ·a + (1-λ)·b`.
    pub fn mix(a: &Self, b: &Self, lambda: T) -> Self {
        let pa = a.params();
        let pb = b.params();
        let mut p = [T::zero(); FULL_PARAMS];
        for i in 0..FULL_PARAMS {
            p[i] = lambda * pa[i] + (T::one() - lambda) * pb[i];
        }
        Self::from_params(&p)
    }

    /// Linear extension of the channel to arbitrary 2x2 operators.
    ///
    /// Writes `M = c₀ I + Σ cᵢ σᵢ` with complex coefficients and returns
    /// `c₀ I + Σ (R c + c₀ t)ᵢ σᵢ`. On a density matrix (`c₀ = 1/2`,
    /// `c = b/2`) this is exactly `½(I + (R b + t)·σ)`.
    pub fn apply_linear(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert!(m.rows() == 2 && m.cols() == 2, "qubit channel applied to a {}x{} matrix", m.rows(), m.cols());
        let half = T::lit(0.5);
        let c0 = (m[(0, 0)] + m[(1, 1)]) * half;
        // Tr[M σ]/2 for σ in (z, x, y).
        let c = [
            (m[(0, 0)] - m[(1, 1)]) * half,
            (m[(0, 1)] + m[(1, 0)]) * half,
            (m[(0, 1)] - m[(1, 0)]) * Complex::new(T::zero(), half),
        ];
        let mut out = ComplexMatrix::identity(2).scale_complex(c0);
        for (i, row) in self.r.iter().enumerate() {
            let ci = row.iter().zip(&c).fold(c0 * self.t[i], |acc, (&rij, &cj)| acc + cj * rij);
            out += &pauli::<T>(i).scale_complex(ci);
        }
        out
    }

    /// Applies the channel to a qubit density matrix.
    pub fn apply_channel(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if rho.rows() != 2 || rho.cols() != 2 {
            return Err(Error::InvalidArgument(format!("expected a qubit state, got {}x{}", rho.rows(), rho.cols())));
        }
        let tr = rho.trace();
        if (tr.re - T::one()).abs() > T::psd_floor() || tr.im.abs() > T::psd_floor() {
            return Err(Error::InvalidArgument(format!("state has trace {tr}")));
        }
        let lambda_min = hermitian_eig(rho)?.min_value();
        if lambda_min < -T::psd_floor() {
            return Err(Error::NotPositive { eigenvalue: lambda_min.as_f64() });
        }
        Ok(self.apply_linear(rho))
    }

    /// `Σ_{ij} |i⟩⟨j| ⊗ E(|i⟩⟨j|)`, input copy on the left.
    pub fn choi_matrix(&self) -> ComplexMatrix<T> {
        let mut choi = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                let mut unit = ComplexMatrix::zeros(2, 2);
                unit[(i, j)] = Complex::new(T::one(), T::zero());
                let image = self.apply_linear(&unit);
                for k in 0..2 {
                    for l in 0..2 {
                        choi[(2 * i + k, 2 * j + l)] = image[(k, l)];
                    }
                }
            }
        }
        choi
    }

    pub fn min_choi_eigenvalue(&self) -> T {
        min_eigenvalue(&self.choi_matrix())
    }

    /// Completely positive up to [`Real::cp_tol`].
    pub fn is_completely_positive(&self) -> bool {
        self.min_choi_eigenvalue() >= -T::cp_tol()
    }
}

fn spectral_norm<T: Real>(r: &[[T; 3]; 3]) -> T {
    // sqrt of the largest eigenvalue of RᵀR
    let mut rtr = [T::zero(); 9];
    for i in 0..3 {
        for j in 0..3 {
            rtr[3 * i + j] = (0..3).map(|k| r[k][i] * r[k][j]).sum();
        }
    }
    let m = ComplexMatrix::from_real(3, 3, &rtr).expect("3x3");
    hermitian_eig(&m).map(|e| e.values[0].max(T::zero()).sqrt()).unwrap_or_else(|_| T::infinity())
}
