//! Seeded random states, unitaries and channels.
//!
//! Everything draws from [`SeededRng`] (ChaCha8) so runs are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::{Channel, DensityOperator};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_fn, Matrix};
use crate::scalar::{cx, Cx, Real};

/// The crate's deterministic generator.
pub type SeededRng = ChaCha8Rng;

/// Default seed used by the CLI and the sampled residual checks.
pub const DEFAULT_SEED: u64 = 42;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<T: Real>(rng: &mut impl Rng) -> Cx<T> {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    cx(T::lit(a), T::lit(b))
}

/// Haar-random unit vector in `C^d`.
pub fn haar_vector<T: Real>(rng: &mut impl Rng, d: usize) -> Vec<Cx<T>> {
    let v: Vec<Cx<T>> = (0..d).map(|_| gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn haar_state<T: Real>(rng: &mut impl Rng, d: usize) -> DensityOperator<T> {
    DensityOperator::pure(&haar_vector(rng, d)).expect("unit vector")
}

/// Random mixed state `GG†/Tr(GG†)` from a Ginibre matrix.
pub fn random_density<T: Real>(rng: &mut impl Rng, d: usize) -> DensityOperator<T> {
    let g = Matrix::from_fn(d, d, |_, _| gaussian(rng));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(m.scale_real(T::one() / tr)).expect("Ginibre state")
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn haar_unitary<T: Real>(rng: &mut impl Rng, d: usize) -> Matrix<T> {
    let g = Matrix::from_fn(d, d, |_, _| gaussian::<T>(rng));
    let mut cols: Vec<Vec<Cx<T>>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.col(j);
        for u in &cols {
            let proj: Cx<T> = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    Matrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Random channel with `count` Kraus operators: `Aₖ = Gₖ (Σ G†G)^{-1/2}`.
///
/// Needs `count · dim_out ≥ dim_in` so that `Σ G†G` is invertible.
pub fn random_channel<T: Real>(
    rng: &mut impl Rng,
    dim_in: usize,
    dim_out: usize,
    count: usize,
) -> Result<Channel<T>> {
    if count * dim_out < dim_in {
        return Err(Error::ShapeMismatch(format!(
            "{count} Kraus operators of size {dim_out}x{dim_in} cannot be trace preserving"
        )));
    }
    let gs: Vec<Matrix<T>> = (0..count)
        .map(|_| Matrix::from_fn(dim_out, dim_in, |_, _| gaussian(rng)))
        .collect();
    let mut s = Matrix::zeros(dim_in, dim_in);
    for g in &gs {
        s += &(&g.adjoint() * g);
    }
    let inv_sqrt = hermitian_fn(&s, |l| T::one() / l.sqrt())?;
    Channel::new(gs.iter().map(|g| g * &inv_sqrt).collect())
}

/// Channel `ρ ↦ (1−p)ρ + p·Φ(ρ)` for a random `Φ`; close to identity for small `p`.
pub fn random_near_identity<T: Real>(rng: &mut impl Rng, d: usize, p: T) -> Result<Channel<T>> {
    let phi = random_channel::<T>(rng, d, d, 2)?;
    let mut kraus = vec![Matrix::identity(d).scale_real((T::one() - p).sqrt())];
    kraus.extend(phi.kraus().iter().map(|k| k.scale_real(p.sqrt())));
    Channel::new(kraus)
}

/// Uniform point in the unit ball.
pub fn ball_point<T: Real>(rng: &mut impl Rng) -> [T; 3] {
    loop {
        let p: [f64; 3] = [
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        ];
        if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return [T::lit(p[0]), T::lit(p[1]), T::lit(p[2])];
        }
    }
}
