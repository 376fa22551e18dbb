//! Shared helpers for the integration tests: random matrices and channels,
//! and an independent full-tensor evaluation of the objective.
#![allow(dead_code, clippy::needless_range_loop)]

use b92_core::channel::pauli;
use b92_core::linalg::{hermitian_eig, kron, partial_trace, von_neumann_entropy};
use b92_core::objective::Purification;
use b92_core::protocol::Outcome;
use b92_core::{Channel64, ComplexMatrix64, Context64};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ALPHA: f64 = 0.39;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ctx() -> Context64 {
    Context64::new(ALPHA).unwrap()
}

fn gaussian_ish<R: Rng>(rng: &mut R) -> f64 {
    // Sum of four centered uniforms.
    (0..4).map(|_| rng.random::<f64>() - 0.5).sum()
}

pub fn random_complex_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix64 {
    let data = (0..rows * cols).map(|_| Complex64::new(gaussian_ish(rng), gaussian_ish(rng))).collect();
    ComplexMatrix64::from_vec(rows, cols, data).unwrap()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix64 {
    random_complex_matrix(rng, n, n).hermitian_part()
}

/// Random full-rank density matrix `G G† / Tr`.
pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix64 {
    let g = random_complex_matrix(rng, n, n);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    m.scale(1.0 / tr).hermitian_part()
}

/// Eigenvector matrix of a random Hermitian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix64 {
    hermitian_eig(&random_hermitian(rng, n)).unwrap().vectors
}

/// Normalized Kraus operators `Gₖ S^{-1/2}` with `S = Σ Gₖ†Gₖ`.
pub fn random_kraus<R: Rng>(rng: &mut R, count: usize) -> Vec<ComplexMatrix64> {
    let gs: Vec<_> = (0..count).map(|_| random_complex_matrix(rng, 2, 2)).collect();
    let mut s = ComplexMatrix64::zeros(2, 2);
    for g in &gs {
        s += &(&g.adjoint() * g);
    }
    let eig = hermitian_eig(&s.hermitian_part()).unwrap();
    let inv_sqrt = eig.values.iter().map(|v| 1.0 / v.sqrt()).collect::<Vec<_>>();
    let d = ComplexMatrix64::from_diag(&inv_sqrt);
    let s_inv_sqrt = &(&eig.vectors * &d) * &eig.vectors.adjoint();
    gs.iter().map(|g| g * &s_inv_sqrt).collect()
}

pub fn apply_kraus(kraus: &[ComplexMatrix64], rho: &ComplexMatrix64) -> ComplexMatrix64 {
    let mut out = ComplexMatrix64::zeros(2, 2);
    for k in kraus {
        out += &(&(k * rho) * &k.adjoint());
    }
    out
}

/// Bloch-affine coordinates of a Kraus channel:
/// `R_ij = Tr(σᵢ E(σⱼ)) / 2`, `t_i = Tr(σᵢ E(I)) / 2`.
pub fn bloch_from_kraus(kraus: &[ComplexMatrix64]) -> Channel64 {
    let mut r = [[0.0; 3]; 3];
    let mut t = [0.0; 3];
    let image_of_identity = apply_kraus(kraus, &ComplexMatrix64::identity(2));
    for i in 0..3 {
        let si = pauli::<f64>(i);
        for j in 0..3 {
            r[i][j] = 0.5 * si.trace_product(&apply_kraus(kraus, &pauli(j))).re;
        }
        t[i] = 0.5 * si.trace_product(&image_of_identity).re;
    }
    Channel64::new(r, t).unwrap()
}

/// Completely positive channel spread over the whole 12-parameter family.
pub fn random_cp_channel<R: Rng>(rng: &mut R) -> Channel64 {
    let count = rng.random_range(1..=4);
    bloch_from_kraus(&random_kraus(rng, count))
}

/// `E*`: the channel conjugated by complex conjugation, which flips the sign
/// of every parameter coupling y to z or x.
pub fn conjugate_channel(ch: &Channel64) -> Channel64 {
    let mut p = ch.params();
    for i in [2, 5, 6, 7, 11] {
        p[i] = -p[i];
    }
    Channel64::from_params(&p)
}

fn projector(dim: usize, i: usize) -> ComplexMatrix64 {
    let mut m = ComplexMatrix64::zeros(dim, dim);
    m[(i, i)] = Complex64::new(1.0, 0.0);
    m
}

fn sandwich(op: &ComplexMatrix64, rho: &ComplexMatrix64) -> ComplexMatrix64 {
    &(op * rho) * &op.adjoint()
}

/// `S(X|EP)` assembled literally: build `ρ₂,ABEP` on A⊗B⊗E⊗P (32x32), trace
/// out B, dephase A into X, and take `S(ρ₂,XEP) - S(ρ₂,EP)` of the full
/// 16x16 matrix.
pub fn literal_ambiguity(ctx: &Context64, phi: &Purification<f64>) -> f64 {
    let eve = phi.amplitudes().len() / 4;
    let id_a = ComplexMatrix64::identity(2);
    let id_e = ComplexMatrix64::identity(eve);
    let rho_abe = phi.projector();

    let mut rho_abep = ComplexMatrix64::zeros(32, 32);
    let kept = projector(2, 0);
    let discarded = projector(2, 1);
    for k in Outcome::CONCLUSIVE {
        let op = kron(&kron(&id_a, ctx.sqrt_povm(k)), &id_e);
        rho_abep += &kron(&sandwich(&op, &rho_abe), &kept);
    }
    let rho_be = partial_trace(&rho_abe, &[2, 2, eve], &[1, 2]).unwrap();
    let alice_zero = projector(2, 0);
    for k in Outcome::INCONCLUSIVE {
        let op = kron(ctx.sqrt_povm(k), &id_e);
        rho_abep += &kron(&kron(&alice_zero, &sandwich(&op, &rho_be)), &discarded);
    }

    let rho_aep = partial_trace(&rho_abep, &[2, 2, eve, 2], &[0, 2, 3]).unwrap();
    let id_ep = ComplexMatrix64::identity(2 * eve);
    let mut rho_xep = ComplexMatrix64::zeros(4 * eve, 4 * eve);
    for j in 0..2 {
        let pj = kron(&projector(2, j), &id_ep);
        rho_xep += &sandwich(&pj, &rho_aep);
    }
    let rho_ep = partial_trace(&rho_xep, &[2, eve, 2], &[1, 2]).unwrap();
    von_neumann_entropy(&rho_xep.hermitian_part()).unwrap() - von_neumann_entropy(&rho_ep.hermitian_part()).unwrap()
}
