//! Lüders state updates and the measurement-as-update probes built on them.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{trace_norm_distance, HermitianOperator, Operator};
use crate::observables::DiscretePom;
use crate::sampling::{self, haar_basis, haar_vector_orthogonal_to};
use crate::states::{degree_of_reality, Effect, Projection, State};

/// Outcomes below this probability are not conditioned on.
pub const ZERO_PROBABILITY_TOL: f64 = 1e-14;

/// Result of conditioning a state on one effect.
#[derive(Clone, Debug)]
pub struct LudersUpdate {
    pub probability: f64,
    pub post_state: State,
    /// Trace-norm distance between the input and the normalized post state.
    pub trace_distance: f64,
}

#[derive(Clone, Debug)]
pub struct MeasurementOutcomeRecord {
    pub outcome: String,
    pub index: usize,
    pub probability: f64,
    pub post_state: State,
    pub trace_distance: f64,
}

fn conditioned(s: &State, kraus: &Operator, probability: f64) -> Result<LudersUpdate> {
    if probability <= ZERO_PROBABILITY_TOL {
        return Err(Error::ZeroProbability { probability });
    }
    let unnormalized = &(kraus * s.operator()) * kraus;
    let norm = unnormalized.trace().re;
    if norm <= ZERO_PROBABILITY_TOL {
        return Err(Error::ZeroProbability { probability: norm });
    }
    let post_state = State::new(HermitianOperator::new(unnormalized.scale(1.0 / norm))?.into_operator())?;
    let trace_distance = trace_norm_distance(s.operator(), post_state.operator())?;
    Ok(LudersUpdate {
        probability,
        post_state,
        trace_distance,
    })
}

/// `rho -> P rho P / tr[rho P]`
pub fn luders_sharp(s: &State, p: &Projection) -> Result<LudersUpdate> {
    let probability = degree_of_reality(s, p.effect())?;
    conditioned(s, p.operator(), probability)
}

/// `rho -> E^{1/2} rho E^{1/2} / tr[rho E]`
pub fn luders_general(s: &State, e: &Effect) -> Result<LudersUpdate> {
    let probability = degree_of_reality(s, e)?;
    conditioned(s, e.sqrt().as_operator(), probability)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RobustnessProbe {
    pub p_before: f64,
    pub p_after: f64,
    pub trace_distance: f64,
    /// `1 - p_before`
    pub epsilon: f64,
}

impl RobustnessProbe {
    /// `trace_distance / sqrt(epsilon)`; zero when nothing moved.
    pub fn distance_ratio(&self) -> f64 {
        if self.epsilon <= 0.0 {
            if self.trace_distance <= 1e-12 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.trace_distance / self.epsilon.sqrt()
        }
    }
}

/// Measures how much a generalized Lüders update on a near-certain effect
/// moves the state, and whether it lowers the effect's probability.
pub fn epr_robustness_probe(s: &State, e: &Effect) -> Result<RobustnessProbe> {
    let update = luders_general(s, e)?;
    let p_before = update.probability;
    let p_after = degree_of_reality(&update.post_state, e)?;
    Ok(RobustnessProbe {
        p_before,
        p_after,
        trace_distance: update.trace_distance,
        epsilon: (1.0 - p_before).max(0.0),
    })
}

/// Samples an outcome with probability `tr[rho E_i]` (cumulative inversion of
/// one uniform draw) and applies the generalized Lüders update for it.
pub fn measure_and_update<R: Rng + ?Sized>(
    s: &State,
    pom: &DiscretePom,
    rng: &mut R,
) -> Result<MeasurementOutcomeRecord> {
    let probs = pom.probabilities(s)?;
    let total: f64 = probs.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut index = probs.len() - 1;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            index = i;
            break;
        }
    }
    // guard against the last bucket having zero weight when u lands on the rounding edge
    while probs[index] <= ZERO_PROBABILITY_TOL && index > 0 {
        index -= 1;
    }
    let update = luders_general(s, &pom.effects()[index])?;
    Ok(MeasurementOutcomeRecord {
        outcome: pom.outcomes()[index].clone(),
        index,
        probability: update.probability,
        post_state: update.post_state,
        trace_distance: update.trace_distance,
    })
}

pub fn measure_and_update_seeded(
    s: &State,
    pom: &DiscretePom,
    seed: u64,
) -> Result<MeasurementOutcomeRecord> {
    measure_and_update(s, pom, &mut sampling::rng_from_seed(seed))
}

/// Probability of obtaining `outcome` again immediately after it was obtained.
pub fn repeatability_score(s: &State, pom: &DiscretePom, outcome: &str) -> Result<f64> {
    let e = pom.effect(outcome)?;
    let update = luders_general(s, e)?;
    degree_of_reality(&update.post_state, e)
}

/// Random effect with top eigenvalue exactly one, paired with a pure state
/// whose probability for that effect is exactly `1 - eps`.
///
/// The effect is `U diag(1, l_2, ...) U^dag` with `l_k` uniform in `[0, 1)`;
/// the state mixes the top eigenvector with a random orthogonal direction.
pub fn random_near_eigenstate_pair<R: Rng + ?Sized>(
    dim: usize,
    eps: f64,
    rng: &mut R,
) -> Result<(State, Effect)> {
    if dim < 2 {
        return Err(Error::param("near-eigenstate pairs need dimension >= 2"));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::param(format!("eps must lie in [0, 1), got {eps}")));
    }
    loop {
        let basis = haar_basis(dim, rng);
        let mut effect_op = Operator::outer(&basis[0], &basis[0]);
        for v in &basis[1..] {
            let l: f64 = rng.random::<f64>();
            effect_op = &effect_op + &Operator::outer(v, v).scale(l);
        }
        let effect = Effect::new(effect_op)?;
        let w = haar_vector_orthogonal_to(&basis[0], rng);
        let ew = effect.operator().expectation(&w).re;
        let delta = eps / (1.0 - ew);
        // the orthogonal direction must sit far enough below 1 in E to reach eps
        if delta > 1.0 || !delta.is_finite() {
            continue;
        }
        let (c0, c1) = ((1.0 - delta).sqrt(), delta.sqrt());
        let psi: Vec<_> = basis[0].iter().zip(&w).map(|(a, b)| a * c0 + b * c1).collect();
        return Ok((State::pure(&psi)?, effect));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RobustnessSweepRow {
    pub epsilon: f64,
    pub trials: usize,
    /// `min (p_after - (1 - eps))` over trials; nonnegative when no trial lost probability.
    pub min_probability_margin: f64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

/// Robustness probes on `trials` random near-eigenstate pairs per `eps`.
///
/// Trials are split into fixed shards seeded `seed ^ shard_index`; the
/// result is independent of the number of worker threads.
pub fn epr_robustness_sweep(
    dim: usize,
    eps_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<RobustnessSweepRow>> {
    let shards = sampling::shards(trials);
    let n_shards = shards.len() as u64;
    eps_grid
        .iter()
        .enumerate()
        .map(|(ei, &eps)| {
            let probes: Vec<RobustnessProbe> = shards
                .par_iter()
                .map(|&(shard, n)| {
                    let mut rng = sampling::shard_rng(seed, ei as u64 * n_shards + shard);
                    (0..n)
                        .map(|_| {
                            let (s, e) = random_near_eigenstate_pair(dim, eps, &mut rng)?;
                            epr_robustness_probe(&s, &e)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<Vec<_>>>>()?
                .into_iter()
                .flatten()
                .collect();
            let ratios: Vec<f64> = probes.iter().map(|p| p.distance_ratio()).collect();
            Ok(RobustnessSweepRow {
                epsilon: eps,
                trials: probes.len(),
                min_probability_margin: probes
                    .iter()
                    .map(|p| p.p_after - (1.0 - eps))
                    .fold(f64::INFINITY, f64::min),
                max_ratio: ratios.iter().copied().fold(0.0, f64::max),
                mean_ratio: ratios.iter().sum::<f64>() / ratios.len().max(1) as f64,
            })
        })
        .collect()
}
