//! Seeded randomness: Haar-random vectors and per-shard generator streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{inner, normalize, Operator, C64};
use crate::states::Effect;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for Monte Carlo shard `shard` of a run seeded with `seed`.
///
/// Shard streams depend only on `(seed, shard)`, so merged results do not
/// depend on how shards are spread across workers.
pub fn shard_rng(seed: u64, shard: u64) -> SeededRng {
    rng_from_seed(seed ^ shard)
}

/// Number of trials handled by one shard.
pub const SHARD_SIZE: usize = 64;

/// Splits `n` trials into `(shard_index, trials)` chunks of [`SHARD_SIZE`].
pub fn shards(n: usize) -> Vec<(u64, usize)> {
    (0..n.div_ceil(SHARD_SIZE))
        .map(|s| (s as u64, SHARD_SIZE.min(n - s * SHARD_SIZE)))
        .collect()
}

/// Unit vector distributed uniformly (unitarily invariant) on the sphere in `C^dim`:
/// a normalized vector of i.i.d. standard complex Gaussians.
pub fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Some(u) = normalize(&v) {
            return u;
        }
    }
}

/// Haar-random orthonormal basis (Gram-Schmidt on Gaussian vectors).
pub fn haar_basis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v = haar_vector(dim, rng);
        for b in &basis {
            let c = inner(b, &v);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        if let Some(u) = normalize(&v) {
            if crate::linalg::vector_norm(&v) > 1e-6 {
                basis.push(u);
            }
        }
    }
    basis
}

/// Unit vector orthogonal to `avoid`, Haar-distributed on that subspace.
pub fn haar_vector_orthogonal_to<R: Rng + ?Sized>(avoid: &[C64], rng: &mut R) -> Vec<C64> {
    loop {
        let mut v = haar_vector(avoid.len(), rng);
        let c = inner(avoid, &v);
        for (vi, ai) in v.iter_mut().zip(avoid) {
            *vi -= c * ai;
        }
        if crate::linalg::vector_norm(&v) > 1e-6 {
            return normalize(&v).expect("nonzero");
        }
    }
}

/// Effect `U diag(l_1, ..., l_d) U^dag` with Haar `U` and eigenvalues uniform in `[0, 1)`.
pub fn random_effect<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Effect {
    let mut op = Operator::zeros(dim);
    for v in haar_basis(dim, rng) {
        let l: f64 = rng.random();
        op = &op + &Operator::outer(&v, &v).scale(l);
    }
    Effect::new(op).expect("spectrum in [0, 1)")
}
