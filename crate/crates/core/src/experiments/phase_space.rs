//! Joint unsharp position-momentum measurement in a truncated Fock space.
//!
//! Units have `hbar = 1`, `q = (a + a^dag)/sqrt 2`, `p = (a - a^dag)/(i sqrt 2)`
//! and coherent amplitudes `alpha = (q + i p)/sqrt 2`. The covariant
//! phase-space observable is discretized on a square grid of cells, each
//! carrying the rank-one effect `(dq dp / 2 pi) |alpha><alpha|` at its center.

use rand::Rng;
use serde::Serialize;

use crate::channels::luders_general;
use crate::error::{Error, Result};
use crate::linalg::{inner, operator_norm, vector_norm, HermitianOperator, Operator, C64, PSD_TOL};
use crate::observables::DiscretePom;
use crate::states::{Effect, State};

pub const REMAINDER_LABEL: &str = "remainder";

#[derive(Clone, Debug)]
pub struct FockSpace {
    dim: usize,
    a: Operator,
    a_dag: Operator,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::param("Fock truncation needs at least two levels"));
        }
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for n in 1..dim {
            entries[(n - 1) * dim + n] = C64::new((n as f64).sqrt(), 0.0);
        }
        let a = Operator::from_rows(dim, entries)?;
        let a_dag = a.adjoint();
        Ok(Self { dim, a, a_dag })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn annihilation(&self) -> &Operator {
        &self.a
    }

    pub fn creation(&self) -> &Operator {
        &self.a_dag
    }

    pub fn position(&self) -> Operator {
        (&self.a + &self.a_dag).scale(std::f64::consts::FRAC_1_SQRT_2)
    }

    pub fn momentum(&self) -> Operator {
        (&self.a - &self.a_dag).scale_complex(C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2))
    }

    /// Largest entry of `[a, a^dag] - I` on the first `dim - 1` levels; the last
    /// level is where truncation necessarily breaks the relation.
    pub fn commutator_defect(&self) -> f64 {
        let c = self.a.commutator(&self.a_dag);
        let n = self.dim - 1;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((c.get(i, j) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Coherent state `|alpha>` projected onto the truncated space, unnormalized.
    pub fn coherent_vector(&self, alpha: C64) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.dim);
        let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        v.push(c);
        for n in 1..self.dim {
            c = c * alpha / (n as f64).sqrt();
            v.push(c);
        }
        v
    }

    /// Normalized truncated coherent state together with `1 - |P alpha|^2`.
    pub fn coherent_state(&self, alpha: C64) -> (Vec<C64>, f64) {
        let v = self.coherent_vector(alpha);
        let norm = vector_norm(&v);
        (v.iter().map(|z| z / norm).collect(), 1.0 - norm * norm)
    }

    /// Free evolution under `omega a^dag a` for time `t`.
    pub fn evolve_harmonic(&self, psi: &[C64], omega: f64, t: f64) -> Vec<C64> {
        psi.iter()
            .enumerate()
            .map(|(n, z)| z * C64::from_polar(1.0, -omega * n as f64 * t))
            .collect()
    }
}

/// `alpha = (q + i p) / sqrt 2`
pub fn amplitude(q: f64, p: f64) -> C64 {
    C64::new(q, p) * std::f64::consts::FRAC_1_SQRT_2
}

/// Square grid of `cells x cells` over `[-half_width, half_width]^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HusimiGrid {
    pub half_width: f64,
    pub cells: usize,
}

impl HusimiGrid {
    pub fn new(half_width: f64, cells: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) || cells == 0 {
            return Err(Error::param("grid needs a positive half width and at least one cell"));
        }
        Ok(Self { half_width, cells })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells).map(|i| self.center(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.cells * self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells == 0
    }

    /// Cell index `iq * cells + ip`.
    pub fn cell_center(&self, index: usize) -> (f64, f64) {
        (self.center(index / self.cells), self.center(index % self.cells))
    }
}

impl Default for HusimiGrid {
    fn default() -> Self {
        Self {
            half_width: 6.0,
            cells: 48,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HusimiPom {
    fock: FockSpace,
    grid: HusimiGrid,
    /// `sqrt(dq dp / 2 pi) P|alpha>` per cell, so each effect is `v v^dag`.
    cell_vectors: Vec<Vec<C64>>,
    remainder: Effect,
}

/// Builds the cell effects and the remainder `I - sum cells`.
pub fn husimi_pom(fock: &FockSpace, grid: HusimiGrid) -> Result<HusimiPom> {
    let d = fock.dim();
    let weight = (grid.spacing().powi(2) / std::f64::consts::TAU).sqrt();
    let cell_vectors: Vec<Vec<C64>> = (0..grid.len())
        .map(|k| {
            let (q, p) = grid.cell_center(k);
            fock.coherent_vector(amplitude(q, p))
                .into_iter()
                .map(|z| z * weight)
                .collect()
        })
        .collect();

    let mut rem = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        rem[i * d + i] = C64::new(1.0, 0.0);
    }
    for v in &cell_vectors {
        for i in 0..d {
            for j in 0..d {
                rem[i * d + j] -= v[i] * v[j].conj();
            }
        }
    }
    let rem = HermitianOperator::new(Operator::from_rows(d, rem)?)?;
    let min_eigenvalue = rem.eig().min_eigenvalue();
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::RemainderNotPositive { min_eigenvalue });
    }
    let remainder = Effect::new(rem.into_operator())?;

    Ok(HusimiPom {
        fock: fock.clone(),
        grid,
        cell_vectors,
        remainder,
    })
}

impl HusimiPom {
    pub fn grid(&self) -> HusimiGrid {
        self.grid
    }

    pub fn fock(&self) -> &FockSpace {
        &self.fock
    }

    pub fn remainder(&self) -> &Effect {
        &self.remainder
    }

    /// Operator norm of `I - sum cells`.
    pub fn remainder_norm(&self) -> f64 {
        operator_norm(self.remainder.operator())
    }

    pub fn cell_effect(&self, index: usize) -> Result<Effect> {
        Effect::rank_one(&self.cell_vectors[index], 1.0)
    }

    /// Cell probabilities for a pure state followed by the remainder probability.
    pub fn pure_probabilities(&self, psi: &[C64]) -> Vec<f64> {
        let mut probs: Vec<f64> = self.cell_vectors.iter().map(|v| inner(v, psi).norm_sqr()).collect();
        let cells: f64 = probs.iter().sum();
        let norm = vector_norm(psi).powi(2);
        probs.push((norm - cells).max(0.0));
        probs
    }

    /// Cell probabilities `<v|rho|v>` followed by the remainder probability.
    pub fn probabilities(&self, s: &State) -> Result<Vec<f64>> {
        if s.dim() != self.fock.dim() {
            return Err(Error::DimensionMismatch {
                left: self.fock.dim(),
                right: s.dim(),
            });
        }
        let rho = s.operator();
        let mut probs: Vec<f64> = self
            .cell_vectors
            .iter()
            .map(|v| rho.expectation(v).re.max(0.0))
            .collect();
        probs.push(rho.trace_product(self.remainder.operator()).re.max(0.0));
        Ok(probs)
    }

    /// Full POM with outcomes `"q,p"` at cell centers plus the remainder.
    pub fn to_discrete_pom(&self) -> Result<DiscretePom> {
        let mut outcomes = Vec::with_capacity(self.cell_vectors.len() + 1);
        let mut effects = Vec::with_capacity(self.cell_vectors.len() + 1);
        for k in 0..self.cell_vectors.len() {
            let (q, p) = self.grid.cell_center(k);
            outcomes.push(format!("{q},{p}"));
            effects.push(self.cell_effect(k)?);
        }
        outcomes.push(REMAINDER_LABEL.to_string());
        effects.push(self.remainder.clone());
        DiscretePom::new(outcomes, effects)
    }

    /// Coarse-grained position observable: cells summed over momentum, plus the remainder.
    pub fn q_marginal(&self) -> Result<DiscretePom> {
        let d = self.fock.dim();
        let n = self.grid.cells;
        let mut outcomes = Vec::with_capacity(n + 1);
        let mut effects = Vec::with_capacity(n + 1);
        for iq in 0..n {
            let mut acc = Operator::zeros(d);
            for ip in 0..n {
                let v = &self.cell_vectors[iq * n + ip];
                acc = &acc + &Operator::outer(v, v);
            }
            outcomes.push(self.grid.center(iq).to_string());
            effects.push(Effect::new(acc)?);
        }
        outcomes.push(REMAINDER_LABEL.to_string());
        effects.push(self.remainder.clone());
        DiscretePom::new(outcomes, effects)
    }

    /// Mean and variance per axis of the cell readouts, conditioned on landing in a cell.
    pub fn readout_moments(&self, psi: &[C64]) -> ReadoutMoments {
        let probs = self.pure_probabilities(psi);
        let cells = &probs[..probs.len() - 1];
        let total: f64 = cells.iter().sum();
        let (mut mq, mut mp, mut sq, mut sp) = (0.0, 0.0, 0.0, 0.0);
        for (k, w) in cells.iter().enumerate() {
            let (q, p) = self.grid.cell_center(k);
            mq += w * q;
            mp += w * p;
            sq += w * q * q;
            sp += w * p * p;
        }
        let (mq, mp) = (mq / total, mp / total);
        ReadoutMoments {
            mean_q: mq,
            mean_p: mp,
            var_q: sq / total - mq * mq,
            var_p: sp / total - mp * mp,
            cell_mass: total,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, probs: &[f64], rng: &mut R) -> usize {
        let total: f64 = probs.iter().sum();
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReadoutMoments {
    pub mean_q: f64,
    pub mean_p: f64,
    pub var_q: f64,
    pub var_p: f64,
    pub cell_mass: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Dynamics {
    None,
    Harmonic { omega: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateRule {
    /// Replace the state by the coherent state at the readout.
    #[default]
    CoherentCollapse,
    /// Generalized Lüders update with the cell effect.
    Luders,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrackStep {
    pub time: f64,
    pub q: f64,
    pub p: f64,
    /// `1 - |P alpha|^2` for the collapsed state: probability lost to truncation.
    pub norm_deficit: f64,
    /// Trace distance between the states just before and just after the readout.
    pub disturbance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrackRecord {
    pub steps: Vec<TrackStep>,
    /// Step at which the remainder outcome was drawn; the record stops there.
    pub halted_at: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrackParams {
    pub alpha0: C64,
    pub dynamics: Dynamics,
    pub n_steps: usize,
    pub dt: f64,
    pub rule: UpdateRule,
}

/// Repeated joint readouts: sample a cell from the current state, update the
/// state for that readout, then evolve for `dt`.
pub fn track_simulate<R: Rng + ?Sized>(
    pom: &HusimiPom,
    params: &TrackParams,
    rng: &mut R,
) -> Result<TrackRecord> {
    if !(params.dt.is_finite() && params.dt >= 0.0) {
        return Err(Error::param("time step must be finite and non-negative"));
    }
    let fock = pom.fock();
    let (mut psi, _) = fock.coherent_state(params.alpha0);
    let mut steps = Vec::with_capacity(params.n_steps);
    for k in 0..params.n_steps {
        let time = k as f64 * params.dt;
        let probs = pom.pure_probabilities(&psi);
        let index = pom.sample(&probs, rng);
        if index == pom.cell_vectors.len() {
            return Ok(TrackRecord {
                steps,
                halted_at: Some(k),
            });
        }
        let (q, p) = pom.grid.cell_center(index);
        let (post, norm_deficit) = match params.rule {
            UpdateRule::CoherentCollapse => fock.coherent_state(amplitude(q, p)),
            UpdateRule::Luders => {
                let update = luders_general(&State::pure(&psi)?, &pom.cell_effect(index)?)?;
                let v = update
                    .post_state
                    .pure_vector()
                    .ok_or(Error::NotRankOne { rank: 0 })?;
                (v, 1.0 - vector_norm(&fock.coherent_vector(amplitude(q, p))).powi(2))
            }
        };
        let overlap = inner(&psi, &post).norm_sqr();
        steps.push(TrackStep {
            time,
            q,
            p,
            norm_deficit,
            disturbance: (1.0 - overlap).max(0.0).sqrt(),
        });
        psi = match params.dynamics {
            Dynamics::None => post,
            Dynamics::Harmonic { omega } => fock.evolve_harmonic(&post, omega, params.dt),
        };
    }
    Ok(TrackRecord {
        steps,
        halted_at: None,
    })
}

/// Classical phase-space point reached from `(q, p)` after time `t` at frequency `omega`.
pub fn classical_rotation(q: f64, p: f64, omega: f64, t: f64) -> (f64, f64) {
    let z = C64::new(q, p) * C64::from_polar(1.0, -omega * t);
    (z.re, z.im)
}
