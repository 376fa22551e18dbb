//! B92 signal states, Bob's four-outcome measurement, and the observable
//! statistics of the entanglement-based picture.
//!
//! Alice holds register A of `|Ψ⟩ = (|0⟩|φ₀⟩ + |1⟩|φ₁⟩)/√2` and Bob receives
//! B through the channel. All statistics are exact operator traces.

use num_complex::Complex;

use crate::channel::BlochAffineChannel;
use crate::error::{Error, Result};
use crate::linalg::{shannon_conditional_entropy, ComplexMatrix};
use crate::scalar::Real;

/// Bob's outcomes, in the order the POVM is stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Conclusive, key bit 0.
    Zero = 0,
    /// Conclusive, key bit 1.
    One = 1,
    /// Inconclusive (`F_0̄`).
    ZeroBar = 2,
    /// Inconclusive (`F_1̄`).
    OneBar = 3,
}

impl Outcome {
    pub const CONCLUSIVE: [Outcome; 2] = [Outcome::Zero, Outcome::One];
    pub const INCONCLUSIVE: [Outcome; 2] = [Outcome::ZeroBar, Outcome::OneBar];
}

/// Matched and mismatched conclusive weights of a joint state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintValues<T> {
    /// `Tr[(|0⟩⟨0|⊗F₀ + |1⟩⟨1|⊗F₁) ρ]`
    pub c_match: T,
    /// `Tr[(|1⟩⟨1|⊗F₀ + |0⟩⟨0|⊗F₁) ρ]`
    pub c_err: T,
}

/// Everything derived from the signal amplitude `alpha`.
#[derive(Debug, Clone)]
pub struct B92Context<T> {
    alpha: T,
    beta: T,
    phi: [[T; 2]; 2],
    phibar: [[T; 2]; 2],
    povm: [ComplexMatrix<T>; 4],
    sqrt_povm: [ComplexMatrix<T>; 4],
    psi: [T; 4],
}

impl<T: Real> B92Context<T> {
    /// Requires `0 < alpha < 1/√2`.
    pub fn new(alpha: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::FRAC_1_SQRT_2()) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} outside (0, 1/sqrt 2)")));
        }
        let beta = (T::one() - alpha * alpha).sqrt();
        // |φ_j⟩ = β|0⟩ + (-1)^j α|1⟩,  |φ̄_j⟩ = α|0⟩ - (-1)^j β|1⟩
        let phi = [[beta, alpha], [beta, -alpha]];
        let phibar = [[alpha, -beta], [alpha, beta]];

        let half = T::lit(0.5);
        let inv_sqrt2 = T::FRAC_1_SQRT_2();
        // F₀ ∝ φ̄₁, F₁ ∝ φ̄₀, F₀̄ ∝ φ₁, F₁̄ ∝ φ₀
        let vectors = [phibar[1], phibar[0], phi[1], phi[0]];
        let povm = vectors.map(|v| ComplexMatrix::real_projector(&v).scale(half));
        let sqrt_povm = vectors.map(|v| ComplexMatrix::real_projector(&v).scale(inv_sqrt2));

        let psi = [beta * inv_sqrt2, alpha * inv_sqrt2, beta * inv_sqrt2, -alpha * inv_sqrt2];
        Ok(Self { alpha, beta, phi, phibar, povm, sqrt_povm, psi })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// Signal state `|φ_j⟩`.
    pub fn phi(&self, j: usize) -> [T; 2] {
        self.phi[j]
    }

    /// `|φ̄_j⟩`, orthogonal to `|φ_j⟩`.
    pub fn phibar(&self, j: usize) -> [T; 2] {
        self.phibar[j]
    }

    pub fn povm(&self, k: Outcome) -> &ComplexMatrix<T> {
        &self.povm[k as usize]
    }

    /// `√F_k = |v⟩⟨v|/√2` for `F_k = |v⟩⟨v|/2`.
    pub fn sqrt_povm(&self, k: Outcome) -> &ComplexMatrix<T> {
        &self.sqrt_povm[k as usize]
    }

    /// Source state `|Ψ⟩` on A⊗B.
    pub fn psi(&self) -> [T; 4] {
        self.psi
    }

    /// `⟨φ₀|φ₁⟩ = 1 - 2α²`.
    pub fn signal_overlap(&self) -> T {
        self.phi[0][0] * self.phi[1][0] + self.phi[0][1] * self.phi[1][1]
    }

    /// `ρ₁,AB = (I ⊗ E)|Ψ⟩⟨Ψ|`, built block by block from the channel's
    /// linear action on `|φ_i⟩⟨φ_j|`.
    pub fn joint_state(&self, ch: &BlochAffineChannel<T>) -> ComplexMatrix<T> {
        let half = T::lit(0.5);
        let mut rho = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                let block = ch.apply_linear(&outer_real(&self.phi[i], &self.phi[j]));
                for b in 0..2 {
                    for c in 0..2 {
                        rho[(2 * i + b, 2 * j + c)] = block[(b, c)] * half;
                    }
                }
            }
        }
        rho
    }

    /// `Tr[(|j⟩⟨j|_A ⊗ F_k) ρ]`.
    pub fn outcome_weight(&self, rho_ab: &ComplexMatrix<T>, j: usize, k: Outcome) -> T {
        let f = self.povm(k);
        let mut acc = Complex::new(T::zero(), T::zero());
        for b in 0..2 {
            for c in 0..2 {
                acc = acc + rho_ab[(2 * j + b, 2 * j + c)] * f[(c, b)];
            }
        }
        acc.re
    }

    /// Probability that Bob's outcome is conclusive, `Tr[ρ (I ⊗ (F₀+F₁))]`.
    pub fn acceptance_probability(&self, rho_ab: &ComplexMatrix<T>) -> T {
        (0..2).flat_map(|j| Outcome::CONCLUSIVE.map(|k| (j, k))).map(|(j, k)| self.outcome_weight(rho_ab, j, k)).sum()
    }

    pub fn constraint_values(&self, rho_ab: &ComplexMatrix<T>) -> ConstraintValues<T> {
        let w = |j, k| self.outcome_weight(rho_ab, j, k);
        ConstraintValues {
            c_match: w(0, Outcome::Zero) + w(1, Outcome::One),
            c_err: w(1, Outcome::Zero) + w(0, Outcome::One),
        }
    }

    /// Joint distribution of (Alice's bit, Bob's conclusive outcome),
    /// conditioned on a conclusive outcome. Indexed `[j][k]`.
    pub fn sifted_distribution(&self, rho_ab: &ComplexMatrix<T>) -> Result<[[T; 2]; 2]> {
        let p_acc = self.acceptance_probability(rho_ab);
        if !(p_acc > T::lit(1e-12)) {
            return Err(Error::DegenerateSifting { p_acc: p_acc.as_f64() });
        }
        let mut table = [[T::zero(); 2]; 2];
        for (j, row) in table.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                *cell = self.outcome_weight(rho_ab, j, Outcome::CONCLUSIVE[k]) / p_acc;
            }
        }
        Ok(table)
    }

    /// `H(X'|Y')` in bits: one-way reconciliation cost per sifted bit.
    pub fn reconciliation_cost(&self, rho_ab: &ComplexMatrix<T>) -> Result<T> {
        let mut table = self.sifted_distribution(rho_ab)?;
        // Exact-trace weights can dip below zero by roundoff.
        for cell in table.iter_mut().flatten() {
            if *cell < T::zero() && *cell > -T::psd_floor() {
                *cell = T::zero();
            }
        }
        shannon_conditional_entropy(&table)
    }
}

fn outer_real<T: Real>(v: &[T; 2], w: &[T; 2]) -> ComplexMatrix<T> {
    let data = [v[0] * w[0], v[0] * w[1], v[1] * w[0], v[1] * w[1]];
    ComplexMatrix::from_real(2, 2, &data).expect("2x2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, partial_trace};

    type Ch = BlochAffineChannel<f64>;

    fn ctx() -> B92Context<f64> {
        B92Context::new(0.39).unwrap()
    }

    #[test]
    fn alpha_range_enforced() {
        assert!(B92Context::<f64>::new(0.0).is_err());
        assert!(B92Context::<f64>::new(std::f64::consts::FRAC_1_SQRT_2).is_err());
        assert!(B92Context::<f64>::new(-0.2).is_err());
        assert!(B92Context::<f64>::new(0.7).is_ok());
    }

    #[test]
    fn overlap_at_default_alpha() {
        assert!((ctx().signal_overlap() - 0.6958).abs() < 1e-12);
    }

    #[test]
    fn states_are_orthonormal_pairs() {
        let c = ctx();
        for j in 0..2 {
            let (p, pb) = (c.phi(j), c.phibar(j));
            assert!((p[0] * p[0] + p[1] * p[1] - 1.0).abs() < 1e-12);
            assert!((pb[0] * pb[0] + pb[1] * pb[1] - 1.0).abs() < 1e-12);
            assert!((p[0] * pb[0] + p[1] * pb[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn povm_complete_and_positive() {
        for k in 1..14 {
            let alpha = 0.05 * k as f64;
            let c = B92Context::new(alpha).unwrap();
            let mut sum = ComplexMatrix::zeros(2, 2);
            for k in [Outcome::Zero, Outcome::One, Outcome::ZeroBar, Outcome::OneBar] {
                let f = c.povm(k);
                assert!(hermitian_eig(f).unwrap().min_value() >= -1e-15);
                assert!((f.trace().re - 0.5).abs() < 1e-15);
                assert!(c.sqrt_povm(k).matmul(c.sqrt_povm(k)).max_abs_diff(f) < 1e-15);
                sum += f;
            }
            assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12, "alpha = {alpha}");
        }
    }

    #[test]
    fn identity_channel_gives_source_projector() {
        let c = ctx();
        let rho = c.joint_state(&Ch::identity());
        assert!(rho.max_abs_diff(&ComplexMatrix::real_projector(&c.psi())) < 1e-15);
    }

    #[test]
    fn zero_channel_decouples_bob() {
        let c = ctx();
        let psi = ComplexMatrix::real_projector(&c.psi());
        let rho_a = partial_trace(&psi, &[2, 2], &[0]).unwrap();
        let expect = crate::linalg::kron(&rho_a, &ComplexMatrix::identity(2).scale(0.5));
        assert!(c.joint_state(&Ch::zero()).max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn acceptance_closed_forms() {
        for alpha in [0.2, 0.39, 0.6] {
            let c = B92Context::new(alpha).unwrap();
            let p = c.acceptance_probability(&c.joint_state(&Ch::identity()));
            assert!((p - 2.0 * alpha * alpha * (1.0 - alpha * alpha)).abs() < 1e-14);
            let p0 = c.acceptance_probability(&c.joint_state(&Ch::zero()));
            assert!((p0 - 0.5).abs() < 1e-14);
        }
        let c = ctx();
        let p = c.acceptance_probability(&c.joint_state(&Ch::identity()));
        assert!((p - 0.25793118).abs() < 1e-8);
    }

    #[test]
    fn constraint_examples() {
        let c = ctx();
        let id = c.constraint_values(&c.joint_state(&Ch::identity()));
        assert!(id.c_err.abs() < 1e-15);
        let z = c.constraint_values(&c.joint_state(&Ch::zero()));
        assert!((z.c_match - 0.25).abs() < 1e-15);
        assert!((z.c_err - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sifted_examples() {
        let c = ctx();
        let t = c.sifted_distribution(&c.joint_state(&Ch::identity())).unwrap();
        assert!((t[0][0] - 0.5).abs() < 1e-14 && (t[1][1] - 0.5).abs() < 1e-14);
        assert!(t[0][1].abs() < 1e-14 && t[1][0].abs() < 1e-14);
        let t = c.sifted_distribution(&c.joint_state(&Ch::zero())).unwrap();
        for cell in t.iter().flatten() {
            assert!((cell - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn sifting_rejects_zero_acceptance() {
        let c = ctx();
        let zero = ComplexMatrix::zeros(4, 4);
        assert!(matches!(c.sifted_distribution(&zero), Err(Error::DegenerateSifting { .. })));
    }

    #[test]
    fn reconciliation_examples() {
        let c = ctx();
        assert!(c.reconciliation_cost(&c.joint_state(&Ch::identity())).unwrap().abs() < 1e-12);
        assert!((c.reconciliation_cost(&c.joint_state(&Ch::zero())).unwrap() - 1.0).abs() < 1e-12);
        let h = c.reconciliation_cost(&c.joint_state(&Ch::depolarizing(0.065).unwrap())).unwrap();
        assert!(h > 0.0 && h < 1.0);
    }

    #[test]
    fn single_precision_context() {
        let c = B92Context::<f32>::new(0.39).unwrap();
        let p = c.acceptance_probability(&c.joint_state(&BlochAffineChannel::identity()));
        assert!((p - 0.257_931_18).abs() < 1e-6);
    }
}
