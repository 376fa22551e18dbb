//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Matrices here never exceed 32x32, where Jacobi is both simple and accurate
//! to a few ulps in the eigenvalues.

use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// Spectral decomposition `M = V Λ V^†`.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    /// Eigenvalues, descending.
    pub values: Vec<T>,
    /// Eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `V Λ V^†`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            for i in 0..n {
                let vi = self.vectors[(i, k)] * lambda;
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn min_value(&self) -> T {
        *self.values.last().expect("non-empty spectrum")
    }
}

/// Eigen-decomposes a Hermitian matrix.
///
/// Eigenvalues are sorted descending. Each eigenvector is rotated so that its
/// largest-magnitude component (first one on ties) is real and nonnegative.
pub fn hermitian_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(format!("eigendecomposition of a {}x{} matrix", m.rows(), m.cols())));
    }
    let defect = m.hermiticity_defect();
    if !(defect <= T::hermitian_tol()) {
        return Err(Error::InvalidArgument(format!("matrix not Hermitian (defect {:e})", defect.as_f64())));
    }
    Ok(jacobi(m.hermitian_part()))
}

/// Smallest eigenvalue of a Hermitian matrix, skipping the input check.
pub(crate) fn min_eigenvalue<T: Real>(m: &ComplexMatrix<T>) -> T {
    jacobi(m.hermitian_part()).min_value()
}

fn jacobi<T: Real>(mut a: ComplexMatrix<T>) -> HermitianEigen<T> {
    let n = a.rows();
    let zero = Complex::new(T::zero(), T::zero());
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    let threshold = T::epsilon() * T::epsilon() * scale * scale;

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= threshold || scale == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == T::zero() {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Tiny element relative to the diagonal: zero it outright.
                if mag <= T::epsilon() * T::epsilon() * (app.abs() + aqq.abs()) {
                    a[(p, q)] = zero;
                    a[(q, p)] = zero;
                    continue;
                }
                let phase = apq / mag;
                let tau = (aqq - app) / (mag + mag);
                let t = {
                    let denom = tau.abs() + (T::one() + tau * tau).sqrt();
                    if tau >= T::zero() {
                        T::one() / denom
                    } else {
                        -T::one() / denom
                    }
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;

                // Unitary acting on the (p, q) plane: diag(1, conj(phase)) · real rotation.
                let u_pp = Complex::new(c, T::zero());
                let u_pq = Complex::new(s, T::zero());
                let u_qp = phase.conj() * (-s);
                let u_qq = phase.conj() * c;

                // A ← A U
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                // A ← U^† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = zero;
                a[(q, p)] = zero;
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
                // V ← V U
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap_or(std::cmp::Ordering::Equal));

    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut pivot = 0;
        let mut best = T::neg_infinity();
        for i in 0..n {
            let mag = v[(i, src)].norm();
            if mag > best {
                best = mag;
                pivot = i;
            }
        }
        let p = v[(pivot, src)];
        let rot = if best > T::zero() { p.conj() / best } else { Complex::new(T::one(), T::zero()) };
        for i in 0..n {
            vectors[(i, col)] = v[(i, src)] * rot;
        }
        vectors[(pivot, col)] = Complex::new(vectors[(pivot, col)].re, T::zero());
    }
    HermitianEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix<f64> {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(rng.random_range(-1.0..1.0), 0.0);
            for j in (i + 1)..n {
                let z = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn identity_spectrum() {
        let e = hermitian_eig(&ComplexMatrix::<f64>::identity(4)).unwrap();
        assert_eq!(e.values, vec![1.0; 4]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::<f64>::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = hermitian_eig(&x).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_16x16_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let m = random_hermitian(16, &mut rng);
            let e = hermitian_eig(&m).unwrap();
            assert!((&e.reconstruct() - &m).frobenius_norm() <= 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            // Orthonormal columns.
            let vv = e.vectors.adjoint().matmul(&e.vectors);
            assert!(vv.max_abs_diff(&ComplexMatrix::identity(16)) < 1e-12);
        }
    }

    #[test]
    fn phase_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian(6, &mut rng);
        let e = hermitian_eig(&m).unwrap();
        for k in 0..6 {
            let col = e.vectors.column(k);
            let (idx, _) = col.iter().enumerate().max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap()).unwrap();
            assert!(col[idx].im == 0.0 && col[idx].re > 0.0);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::<f64>::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn single_precision() {
        let m = ComplexMatrix::<f32>::from_real(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]).unwrap();
        let e = hermitian_eig(&m).unwrap();
        let s2 = std::f32::consts::SQRT_2;
        assert!((e.values[0] - (2.0 + s2)).abs() < 1e-5);
        assert!((e.values[1] - 2.0).abs() < 1e-5);
        assert!((e.values[2] - (2.0 - s2)).abs() < 1e-5);
    }
}
