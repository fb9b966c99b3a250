//! Classical presentation of quantum states on ray space.
//!
//! A finitely supported probability measure `mu` on the set of rank-1
//! projections reduces to the density operator `R(mu) = sum_i w_i P_i`, and a
//! quantum effect `E` becomes the fuzzy indicator `f_E(P) = tr[P E]`.
//! Distinct measures with the same reduction are different preparations of
//! one quantum state; no effect can tell them apart.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{normalize, operator_norm, Operator, C64};
use crate::sampling::haar_vector;
use crate::states::{Effect, Projection, State};

/// A point of ray space: a rank-1 projection, kept with a unit representative vector.
#[derive(Clone, Debug, PartialEq)]
pub struct RayPoint {
    vector: Vec<C64>,
    projection: Projection,
}

impl RayPoint {
    pub fn from_vector(v: &[C64]) -> Result<Self> {
        let vector = normalize(v).ok_or_else(|| Error::param("zero vector spans no ray"))?;
        let projection = Projection::rank_one(&vector)?;
        Ok(Self { vector, projection })
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn vector(&self) -> &[C64] {
        &self.vector
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }
}

/// Unitarily invariant random ray.
pub fn sample_haar_ray<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<RayPoint> {
    if dim < 2 {
        return Err(Error::param("ray space needs dimension >= 2"));
    }
    RayPoint::from_vector(&haar_vector(dim, rng))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub ray: RayPoint,
    pub weight: f64,
}

/// Finitely supported probability measure on ray space.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalMeasure {
    atoms: Vec<Atom>,
}

impl ClassicalMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| Error::param("a measure needs at least one atom"))?;
        let dim = first.ray.dim();
        let mut total = 0.0;
        for a in &atoms {
            if a.ray.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: a.ray.dim(),
                });
            }
            if a.weight.is_nan() || a.weight < 0.0 {
                return Err(Error::param(format!("negative atom weight {}", a.weight)));
            }
            total += a.weight;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!("atom weights sum to {total}, not 1")));
        }
        Ok(Self { atoms })
    }

    pub fn point_mass(ray: RayPoint) -> Self {
        Self {
            atoms: vec![Atom { ray, weight: 1.0 }],
        }
    }

    /// Uniform weights over the given rays.
    pub fn uniform(rays: Vec<RayPoint>) -> Result<Self> {
        let w = 1.0 / rays.len().max(1) as f64;
        Self::new(rays.into_iter().map(|ray| Atom { ray, weight: w }).collect())
    }

    /// `lambda mu1 + (1 - lambda) mu2` as a concatenated atom list.
    pub fn mixture(lambda: f64, mu1: &Self, mu2: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::param(format!("mixing weight {lambda} outside [0, 1]")));
        }
        let atoms = mu1
            .atoms
            .iter()
            .map(|a| Atom {
                ray: a.ray.clone(),
                weight: lambda * a.weight,
            })
            .chain(mu2.atoms.iter().map(|a| Atom {
                ray: a.ray.clone(),
                weight: (1.0 - lambda) * a.weight,
            }))
            .collect();
        Self::new(atoms)
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].ray.dim()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    fn sample_index<R: Rng + ?Sized>(&self, cumulative: &[f64], rng: &mut R) -> usize {
        let u = rng.random::<f64>() * cumulative[cumulative.len() - 1];
        cumulative
            .partition_point(|&c| c <= u)
            .min(self.atoms.len() - 1)
    }
}

/// The affine reduction `R(mu) = sum_i w_i P_i`.
pub fn mb_reduce(mu: &ClassicalMeasure) -> Result<State> {
    let op = mu.atoms.iter().fold(Operator::zeros(mu.dim()), |acc, a| {
        &acc + &a.ray.projection.operator().scale(a.weight)
    });
    State::new(op)
}

/// `f_E(P) = tr[P E]`, the classical (fuzzy) image of a quantum effect.
#[derive(Clone, Debug)]
pub struct ClassicalEffectFn {
    effect: Effect,
}

impl ClassicalEffectFn {
    pub fn new(effect: Effect) -> Self {
        Self { effect }
    }

    pub fn effect(&self) -> &Effect {
        &self.effect
    }
}

pub fn classical_effect_eval(f: &ClassicalEffectFn, p: &RayPoint) -> Result<f64> {
    if f.effect.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            left: f.effect.dim(),
            right: p.dim(),
        });
    }
    Ok(f.effect.operator().expectation(&p.vector).re.clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McConsistency {
    pub mc_estimate: f64,
    pub exact: f64,
    pub std_error: f64,
}

/// Monte Carlo estimate of `int f_E dmu` (atoms drawn by weight) against the
/// exact `tr[R(mu) E]`.
pub fn mb_consistency_mc<R: Rng + ?Sized>(
    mu: &ClassicalMeasure,
    e: &Effect,
    n_samples: usize,
    rng: &mut R,
) -> Result<McConsistency> {
    if n_samples == 0 {
        return Err(Error::param("n_samples must be at least 1"));
    }
    let f = ClassicalEffectFn::new(e.clone());
    let values = mu
        .atoms
        .iter()
        .map(|a| classical_effect_eval(&f, &a.ray))
        .collect::<Result<Vec<_>>>()?;
    let mut cumulative = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for a in &mu.atoms {
        acc += a.weight;
        cumulative.push(acc);
    }

    let (mut mean, mut m2) = (0.0, 0.0);
    for k in 1..=n_samples {
        let x = values[mu.sample_index(&cumulative, rng)];
        let d = x - mean;
        mean += d / k as f64;
        m2 += d * (x - mean);
    }
    let var = if n_samples > 1 {
        m2 / (n_samples - 1) as f64
    } else {
        0.0
    };
    let exact = crate::states::degree_of_reality(&mb_reduce(mu)?, e)?;
    Ok(McConsistency {
        mc_estimate: mean,
        exact,
        std_error: (var / n_samples as f64).sqrt(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RayGeometry {
    /// `tr[P P']`
    pub overlap: f64,
    /// `||P - P'||`
    pub opnorm_dist: f64,
    /// `| ||P - P'||^2 - (1 - tr[P P']) |`
    pub identity_residual: f64,
}

pub fn ray_overlap_geometry(p: &RayPoint, q: &RayPoint) -> Result<RayGeometry> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let (pp, qq) = (p.projection.operator(), q.projection.operator());
    let overlap = pp.trace_product(qq).re;
    let opnorm_dist = operator_norm(&(pp - qq));
    Ok(RayGeometry {
        overlap,
        opnorm_dist,
        identity_residual: (opnorm_dist * opnorm_dist - (1.0 - overlap)).abs(),
    })
}
