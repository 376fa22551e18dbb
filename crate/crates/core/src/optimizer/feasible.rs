//! The affine slice of channel space that reproduces the observed statistics.
//!
//! Both constraint functionals are affine in the channel parameters, so the
//! feasible channels form `origin + span(basis)` with `basis` an orthonormal
//! basis of the constraint matrix's nullspace. Complete positivity is left to
//! the caller.

use rand::Rng;

use crate::channel::{BlochAffineChannel, FULL_PARAMS, REDUCED_INDICES, REDUCED_PARAMS};
use crate::error::{Error, Result};
use crate::protocol::{B92Context, ConstraintValues};
use crate::scalar::Real;

/// Which channel parameters the optimizer may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParameterSpace {
    /// R_zz, R_zx, R_xz, R_xx, R_yy, t_z, t_x.
    Reduced,
    /// All twelve entries of R and t.
    Full,
}

impl ParameterSpace {
    pub fn coordinates(self) -> &'static [usize] {
        const FULL: [usize; FULL_PARAMS] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];
        match self {
            ParameterSpace::Reduced => &REDUCED_INDICES,
            ParameterSpace::Full => &FULL,
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            ParameterSpace::Reduced => REDUCED_PARAMS,
            ParameterSpace::Full => FULL_PARAMS,
        }
    }
}

/// Feasible channels `origin + Σ uᵢ basisᵢ`.
#[derive(Debug, Clone)]
pub struct FeasibleSlice<T> {
    space: ParameterSpace,
    origin: BlochAffineChannel<T>,
    basis: Vec<BlochAffineChannel<T>>,
    /// Rows: c_match, c_err; one column per coordinate of `space`.
    constraint_matrix: [Vec<T>; 2],
    targets: ConstraintValues<T>,
}

fn unit_channel<T: Real>(index: usize) -> BlochAffineChannel<T> {
    let mut p = [T::zero(); FULL_PARAMS];
    p[index] = T::one();
    BlochAffineChannel::from_params(&p)
}

fn as_pair<T: Real>(c: ConstraintValues<T>) -> [T; 2] {
    [c.c_match, c.c_err]
}

/// Feasible slice in the symmetry-reduced space through `depolarizing(q)`.
pub fn feasible_parameterization<T: Real>(ctx: &B92Context<T>, q: T) -> Result<FeasibleSlice<T>> {
    feasible_parameterization_in(ctx, q, ParameterSpace::Reduced)
}

pub fn feasible_parameterization_in<T: Real>(
    ctx: &B92Context<T>,
    q: T,
    space: ParameterSpace,
) -> Result<FeasibleSlice<T>> {
    let origin = BlochAffineChannel::depolarizing(q)?;
    let targets = ctx.constraint_values(&ctx.joint_state(&origin));

    let offset = as_pair(ctx.constraint_values(&ctx.joint_state(&BlochAffineChannel::zero())));
    let coords = space.coordinates();
    let mut constraint_matrix = [Vec::with_capacity(coords.len()), Vec::with_capacity(coords.len())];
    for &idx in coords {
        let c = as_pair(ctx.constraint_values(&ctx.joint_state(&unit_channel(idx))));
        for r in 0..2 {
            constraint_matrix[r].push(c[r] - offset[r]);
        }
    }

    // The affine model must reproduce the targets at the origin.
    let p = origin.params();
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(100.0));
    for (r, target) in as_pair(targets).into_iter().enumerate() {
        let model: T = offset[r] + coords.iter().zip(&constraint_matrix[r]).map(|(&i, &a)| a * p[i]).sum::<T>();
        if (model - target).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "constraint model mismatch at the depolarizing channel ({} vs {})",
                model, target
            )));
        }
    }

    let [s_max, s_min] = singular_values(&constraint_matrix);
    if !(s_min > T::lit(1e-10) * s_max) {
        return Err(Error::DegenerateConstraints { sigma_max: s_max.as_f64(), sigma_min: s_min.as_f64() });
    }

    let basis = nullspace(&constraint_matrix)
        .into_iter()
        .map(|v| {
            let mut p = [T::zero(); FULL_PARAMS];
            for (&i, &x) in coords.iter().zip(&v) {
                p[i] = x;
            }
            BlochAffineChannel::from_params(&p)
        })
        .collect();

    Ok(FeasibleSlice { space, origin, basis, constraint_matrix, targets })
}

/// Singular values of a 2xn matrix, descending.
fn singular_values<T: Real>(a: &[Vec<T>; 2]) -> [T; 2] {
    let dot = |x: &[T], y: &[T]| x.iter().zip(y).map(|(&p, &q)| p * q).sum::<T>();
    let g00 = dot(&a[0], &a[0]);
    let g11 = dot(&a[1], &a[1]);
    let g01 = dot(&a[0], &a[1]);
    let half_tr = (g00 + g11) * T::lit(0.5);
    let disc = (((g00 - g11) * T::lit(0.5)).powi(2) + g01 * g01).sqrt();
    [(half_tr + disc).max(T::zero()).sqrt(), (half_tr - disc).max(T::zero()).sqrt()]
}

/// Orthonormal basis of `{x : A x = 0}` for a rank-2, 2xn `A`, from the
/// Householder QR of `Aᵀ`.
fn nullspace<T: Real>(a: &[Vec<T>; 2]) -> Vec<Vec<T>> {
    let n = a[0].len();
    let reflector = |x: &[T], start: usize| -> Vec<T> {
        // v with (I - 2vvᵀ/vᵀv) x = ∓|x| e_start, zero above `start`.
        let norm = x[start..].iter().map(|&v| v * v).sum::<T>().sqrt();
        let mut v = vec![T::zero(); n];
        v[start..].copy_from_slice(&x[start..]);
        let sign = if x[start] >= T::zero() { T::one() } else { -T::one() };
        v[start] = v[start] + sign * norm;
        v
    };
    let reflect = |v: &[T], x: &mut [T]| {
        let vv: T = v.iter().map(|&p| p * p).sum();
        if vv == T::zero() {
            return;
        }
        let s = T::lit(2.0) * v.iter().zip(x.iter()).map(|(&p, &q)| p * q).sum::<T>() / vv;
        for (xi, &vi) in x.iter_mut().zip(v) {
            *xi = *xi - s * vi;
        }
    };

    let v1 = reflector(&a[0], 0);
    let mut col2 = a[1].clone();
    reflect(&v1, &mut col2);
    let v2 = reflector(&col2, 1);

    (2..n)
        .map(|k| {
            let mut e = vec![T::zero(); n];
            e[k] = T::one();
            reflect(&v2, &mut e);
            reflect(&v1, &mut e);
            e
        })
        .collect()
}

impl<T: Real> FeasibleSlice<T> {
    pub fn space(&self) -> ParameterSpace {
        self.space
    }

    /// Dimension of the slice (parameters minus two constraints).
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn origin(&self) -> &BlochAffineChannel<T> {
        &self.origin
    }

    pub fn basis(&self) -> &[BlochAffineChannel<T>] {
        &self.basis
    }

    /// The constraint values every feasible channel must reproduce.
    pub fn targets(&self) -> ConstraintValues<T> {
        self.targets
    }

    pub fn constraint_matrix(&self) -> &[Vec<T>; 2] {
        &self.constraint_matrix
    }

    pub fn constraint_singular_values(&self) -> [T; 2] {
        singular_values(&self.constraint_matrix)
    }

    pub fn point(&self, u: &[T]) -> BlochAffineChannel<T> {
        assert_eq!(u.len(), self.basis.len(), "slice coordinate dimension");
        let mut p = self.origin.params();
        for (dir, &ui) in self.basis.iter().zip(u) {
            for (pi, di) in p.iter_mut().zip(dir.params()) {
                *pi = *pi + ui * di;
            }
        }
        BlochAffineChannel::from_params(&p)
    }

    /// Largest deviation of a channel's constraint values from the targets.
    pub fn constraint_residual(&self, ctx: &B92Context<T>, ch: &BlochAffineChannel<T>) -> T {
        let c = ctx.constraint_values(&ctx.joint_state(ch));
        (c.c_match - self.targets.c_match).abs().max((c.c_err - self.targets.c_err).abs())
    }

    pub fn is_cp(&self, u: &[T]) -> bool {
        self.point(u).is_completely_positive()
    }

    /// Largest `s ∈ [0, limit]` with `origin + s·dir` completely positive,
    /// assuming the origin is.
    fn cp_extent(&self, dir: &[T], limit: T) -> T {
        let at = |s: T| dir.iter().map(|&d| d * s).collect::<Vec<_>>();
        if self.is_cp(&at(limit)) {
            return limit;
        }
        let (mut lo, mut hi) = (T::zero(), limit);
        for _ in 0..40 {
            let mid = (lo + hi) * T::lit(0.5);
            if self.is_cp(&at(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Axis-aligned box in slice coordinates around the CP part of the slice,
    /// clipped to half-width 1.
    ///
    /// Fitted from boundary points found by bisection along random rays from
    /// the origin, then widened by 10% per side so the convex region is
    /// covered.
    pub fn sampling_box<R: Rng>(&self, rng: &mut R) -> SamplingBox<T> {
        let n = self.dim();
        let one = T::one();
        let mut lo = vec![T::zero(); n];
        let mut hi = vec![T::zero(); n];
        if self.point(&vec![T::zero(); n]).is_completely_positive() {
            for _ in 0..64 * n {
                let mut dir: Vec<T> = (0..n).map(|_| T::lit(standard_normal(rng))).collect();
                let norm = dir.iter().map(|&d| d * d).sum::<T>().sqrt();
                if norm == T::zero() {
                    continue;
                }
                dir.iter_mut().for_each(|d| *d = *d / norm);
                let s = self.cp_extent(&dir, T::lit(2.0));
                for i in 0..n {
                    let x = dir[i] * s;
                    lo[i] = lo[i].min(x);
                    hi[i] = hi[i].max(x);
                }
            }
        }
        let margin = T::lit(0.1);
        let mut degenerate = false;
        for i in 0..n {
            let w = hi[i] - lo[i];
            if !(w > T::lit(1e-9)) {
                degenerate = true;
            }
            lo[i] = (lo[i] - margin * w).max(-one);
            hi[i] = (hi[i] + margin * w).min(one);
        }
        if degenerate {
            // No interior found; fall back to the full unit box.
            lo = vec![-one; n];
            hi = vec![one; n];
        }
        SamplingBox { lo, hi }
    }
}

/// Box-shaped proposal region in slice coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingBox<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Real> SamplingBox<T> {
    pub fn draw<R: Rng>(&self, rng: &mut R) -> Vec<T> {
        self.lo.iter().zip(&self.hi).map(|(&l, &h)| l + (h - l) * T::lit(rng.random::<f64>())).collect()
    }
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Rejection sampler over the CP part of a slice.
///
/// Draws up to `100·n` proposals; fewer than `n` acceptances is an error.
pub fn sample_slice<T: Real, R: Rng>(
    slice: &FeasibleSlice<T>,
    n: usize,
    rng: &mut R,
) -> Result<Vec<BlochAffineChannel<T>>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let bounds = slice.sampling_box(rng);
    let max_attempts = 100 * n;
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n && attempts < max_attempts {
        attempts += 1;
        let ch = slice.point(&bounds.draw(rng));
        if ch.is_completely_positive() {
            out.push(ch);
        }
    }
    if out.len() < n {
        return Err(Error::ThinFeasibleSet { accepted: out.len(), requested: n, attempts });
    }
    Ok(out)
}

/// `n` CP channels matching the depolarizing statistics at `q`, in the
/// symmetry-reduced space. Deterministic in `seed`.
pub fn sample_feasible<T: Real>(ctx: &B92Context<T>, q: T, n: usize, seed: u64) -> Result<Vec<BlochAffineChannel<T>>> {
    let slice = feasible_parameterization(ctx, q)?;
    let mut rng = super::stream_rng(seed, u64::MAX, q, ctx.alpha());
    sample_slice(&slice, n, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> B92Context<f64> {
        B92Context::new(0.39).unwrap()
    }

    #[test]
    fn origin_is_depolarizing() {
        let s = feasible_parameterization(&ctx(), 0.05).unwrap();
        assert_eq!(s.point(&[0.0; 5]), BlochAffineChannel::depolarizing(0.05).unwrap());
        assert_eq!(s.dim(), 5);
    }

    #[test]
    fn basis_is_orthonormal_and_in_nullspace() {
        for space in [ParameterSpace::Reduced, ParameterSpace::Full] {
            let s = feasible_parameterization_in(&ctx(), 0.065, space).unwrap();
            assert_eq!(s.dim(), space.param_count() - 2);
            let vecs: Vec<[f64; 12]> = s.basis().iter().map(|b| b.params()).collect();
            for (i, a) in vecs.iter().enumerate() {
                for (j, b) in vecs.iter().enumerate() {
                    let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((d - want).abs() < 1e-12);
                }
                for row in s.constraint_matrix() {
                    let d: f64 = space.coordinates().iter().zip(row).map(|(&k, &r)| a[k] * r).sum();
                    assert!(d.abs() < 1e-12);
                }
            }
            if space == ParameterSpace::Reduced {
                assert!(s.basis().iter().all(|b| b.is_symmetry_reduced()));
            }
        }
    }

    #[test]
    fn random_points_keep_constraints() {
        let c = ctx();
        let s = feasible_parameterization(&c, 0.065).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let u: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert!(s.constraint_residual(&c, &s.point(&u)) <= 1e-10);
        }
    }

    #[test]
    fn constraints_have_rank_two() {
        for q in [0.046, 0.065] {
            let [hi, lo] = feasible_parameterization(&ctx(), q).unwrap().constraint_singular_values();
            assert!(lo > 1e-3 * hi, "q = {q}: {hi} {lo}");
        }
    }

    #[test]
    fn nullspace_of_known_matrix() {
        let a: [Vec<f64>; 2] = [vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 1.0, 0.0]];
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(v[0].abs() < 1e-15);
            assert!((v[1] + v[2]).abs() < 1e-15);
        }
        assert_eq!(singular_values(&a).map(|s: f64| (s * s).round()), [2.0, 1.0]);
    }

    #[test]
    fn samples_are_feasible_and_deterministic() {
        let c = ctx();
        let a = sample_feasible(&c, 0.065, 200, 9).unwrap();
        let b = sample_feasible(&c, 0.065, 200, 9).unwrap();
        assert_eq!(a, b);
        let s = feasible_parameterization(&c, 0.065).unwrap();
        for ch in &a {
            assert!(ch.min_choi_eigenvalue() >= -1e-10);
            assert!(s.constraint_residual(&c, ch) <= 1e-10);
        }
        assert_ne!(a, sample_feasible(&c, 0.065, 200, 10).unwrap());
    }

    #[test]
    fn zero_noise_slice_is_too_thin() {
        let err = sample_feasible(&ctx(), 0.0, 10, 1).unwrap_err();
        assert!(matches!(err, Error::ThinFeasibleSet { .. }));
    }
}
