//! States, effects and sharp properties, with the elementary readings of
//! `tr[rho E]` as a degree of reality.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_eig, operator_norm, EigenSystem, HermitianOperator, Operator, C64, PSD_TOL,
};

/// Tolerance on `|tr rho - 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Tolerance on `max |E^2 - E|` for an effect to count as a projection.
pub const PROJECTION_TOL: f64 = 1e-9;

/// Density operator.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    op: HermitianOperator,
}

impl State {
    pub fn new(op: Operator) -> Result<Self> {
        let op = HermitianOperator::new(op)?;
        let trace = op.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotNormalized { trace });
        }
        let es = op.eig();
        let min = es.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { op })
    }

    /// Pure state `|v><v|`; `v` need not be normalized.
    pub fn pure(v: &[C64]) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Empty);
        }
        if linalg::vector_norm(v) == 0.0 {
            return Err(Error::param("zero state vector"));
        }
        Ok(Self {
            op: HermitianOperator::new(Operator::projector(v))?,
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOperator::new(Operator::identity(dim).scale(1.0 / dim as f64))
                .expect("identity is Hermitian"),
        }
    }

    /// Qubit state `(I + r . sigma) / 2` with `|r| <= 1`.
    pub fn qubit(bloch: [f64; 3]) -> Result<Self> {
        let norm = bloch.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1.0 + 1e-12 {
            return Err(Error::param(format!("Bloch vector norm {norm} exceeds 1")));
        }
        Self::new(linalg::pauli::combination(
            0.5,
            [0.5 * bloch[0], 0.5 * bloch[1], 0.5 * bloch[2]],
        ))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &Operator {
        self.op.as_operator()
    }

    pub fn hermitian(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn purity(&self) -> f64 {
        self.op.trace_product(&self.op).re
    }

    /// State vector when the state is pure within `1e-9`, up to a global phase.
    pub fn pure_vector(&self) -> Option<Vec<C64>> {
        let es = self.op.eig();
        if (es.max_eigenvalue() - 1.0).abs() > 1e-9 {
            return None;
        }
        es.vectors.into_iter().next()
    }
}

/// Operator `E` with `0 <= E <= I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Effect {
    op: HermitianOperator,
}

impl Effect {
    /// Validates the spectrum against `[-PSD_TOL, 1 + PSD_TOL]` and clamps
    /// into `[0, 1]` when it strays inside the tolerance band.
    pub fn new(op: Operator) -> Result<Self> {
        let op = HermitianOperator::new(op)?;
        let es = op.eig();
        let (min, max) = (es.min_eigenvalue(), es.max_eigenvalue());
        if min < -PSD_TOL || max > 1.0 + PSD_TOL {
            return Err(Error::NotAnEffect { min, max });
        }
        if min < 0.0 || max > 1.0 {
            let clamped = es.map_spectrum(|l| l.clamp(0.0, 1.0));
            return Ok(Self {
                op: HermitianOperator::new(clamped)?,
            });
        }
        Ok(Self { op })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            op: HermitianOperator::new(Operator::identity(dim)).expect("identity"),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            op: HermitianOperator::new(Operator::zeros(dim)).expect("zero"),
        }
    }

    /// `c I` for `c` in `[0, 1]`.
    pub fn scalar(dim: usize, c: f64) -> Result<Self> {
        Self::new(Operator::identity(dim).scale(c))
    }

    /// `w |v><v|`, checked through its single nonzero eigenvalue `w <v|v>`.
    pub fn rank_one(v: &[C64], weight: f64) -> Result<Self> {
        let lambda = weight * linalg::vector_norm(v).powi(2);
        if !lambda.is_finite() {
            return Err(Error::NonFinite);
        }
        if !(-PSD_TOL..=1.0 + PSD_TOL).contains(&lambda) {
            return Err(Error::NotAnEffect {
                min: lambda.min(0.0),
                max: lambda.max(0.0),
            });
        }
        let op = Operator::outer(v, v).scale(weight);
        Ok(Self {
            op: HermitianOperator::new(op)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &Operator {
        self.op.as_operator()
    }

    pub fn hermitian(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn spectrum(&self) -> EigenSystem {
        self.op.eig()
    }

    pub fn sqrt(&self) -> HermitianOperator {
        linalg::operator_sqrt(&self.op).expect("effects are positive")
    }

    pub fn to_projection(&self) -> Result<Projection> {
        Projection::new(self.clone())
    }
}

/// Idempotent effect, a sharp property.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    effect: Effect,
}

impl Projection {
    pub fn new(effect: Effect) -> Result<Self> {
        let e = effect.operator();
        let deviation = (e * e).max_abs_diff(e);
        if deviation > PROJECTION_TOL {
            return Err(Error::NotProjection { deviation });
        }
        Ok(Self { effect })
    }

    pub fn from_operator(op: Operator) -> Result<Self> {
        Self::new(Effect::new(op)?)
    }

    /// Rank-1 projection onto the ray of `v`.
    pub fn rank_one(v: &[C64]) -> Result<Self> {
        if linalg::vector_norm(v) == 0.0 {
            return Err(Error::param("zero vector spans no ray"));
        }
        Self::from_operator(Operator::projector(v))
    }

    /// Qubit projection `(I + n . sigma) / 2` for a unit vector `n`.
    pub fn qubit(direction: [f64; 3]) -> Result<Self> {
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::param(format!(
                "direction must be a unit vector, norm is {norm}"
            )));
        }
        let n = direction.map(|x| 0.5 * x / norm);
        Self::from_operator(linalg::pauli::combination(0.5, n))
    }

    pub fn dim(&self) -> usize {
        self.effect.dim()
    }

    pub fn rank(&self) -> usize {
        self.effect.operator().trace().re.round() as usize
    }

    pub fn effect(&self) -> &Effect {
        &self.effect
    }

    pub fn operator(&self) -> &Operator {
        self.effect.operator()
    }

    pub fn complement(&self) -> Projection {
        Projection {
            effect: complement(&self.effect),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PropertyKind {
    Actual,
    Absent,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PropertyStatus {
    pub kind: PropertyKind,
    pub approximately_real: bool,
    pub approximately_absent: bool,
    pub degree: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub is_sharp: bool,
    /// `|| E - E^2 ||`, zero exactly for projections.
    pub overlap_norm: f64,
}

const HALF_TOL: f64 = 1e-12;

/// `tr[rho E]`, clamped into `[0, 1]`.
pub fn degree_of_reality(s: &State, e: &Effect) -> Result<f64> {
    s.operator().check_same_dim(e.operator())?;
    let d = s.operator().trace_product(e.operator()).re;
    Ok(d.clamp(0.0, 1.0))
}

/// `P rho = rho` within `1e-9`.
pub fn is_eigenstate(s: &State, p: &Projection) -> Result<bool> {
    s.operator().check_same_dim(p.operator())?;
    let prho = p.operator() * s.operator();
    Ok(prho.max_abs_diff(s.operator()) <= 1e-9)
}

/// Reads the degree of reality of `e` in `s` against the tolerance `eps`.
///
/// `eps = 0` demands degree exactly one (resp. zero) for `Actual` (resp.
/// `Absent`). The two approximate flags use strict inequalities around one half.
pub fn classify_property(s: &State, e: &Effect, eps: f64) -> Result<PropertyStatus> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::param(format!("eps must lie in [0, 1/2), got {eps}")));
    }
    let degree = degree_of_reality(s, e)?;
    let kind = if degree >= 1.0 - eps - HALF_TOL {
        PropertyKind::Actual
    } else if degree <= eps + HALF_TOL {
        PropertyKind::Absent
    } else {
        PropertyKind::Indeterminate
    };
    Ok(PropertyStatus {
        kind,
        approximately_real: degree > 0.5 + HALF_TOL,
        approximately_absent: degree < 0.5 - HALF_TOL,
        degree,
    })
}

/// Spectrum reaches strictly above and strictly below one half.
pub fn is_regular(e: &Effect) -> bool {
    let es = e.spectrum();
    es.max_eigenvalue() > 0.5 + HALF_TOL && es.min_eigenvalue() < 0.5 - HALF_TOL
}

/// `I - E`
pub fn complement(e: &Effect) -> Effect {
    let op = &Operator::identity(e.dim()) - e.operator();
    Effect {
        op: HermitianOperator::new(op).expect("difference of Hermitian operators"),
    }
}

pub fn sharpness_report(e: &Effect) -> SharpnessReport {
    let op = e.operator();
    let overlap_norm = operator_norm(&(op - &(op * op)));
    SharpnessReport {
        is_sharp: overlap_norm <= PROJECTION_TOL,
        overlap_norm,
    }
}

/// Writes `E = sum_k w_k Q_k` over the distinct nonzero eigenvalues `w_k`,
/// with mutually orthogonal spectral projections `Q_k`.
pub fn spectral_decompose_effect(e: &Effect) -> Vec<(f64, Projection)> {
    e.spectrum()
        .eigenspaces(1e-9)
        .into_iter()
        .filter(|(w, _)| *w > 1e-12)
        .map(|(w, q)| {
            let p = Projection::from_operator(q).expect("eigenprojector");
            (w.clamp(0.0, 1.0), p)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct QubitDecomposition {
    pub beta: f64,
    pub rprime: Projection,
}

/// For a trace-one qubit effect `E` and a rank-1 projection `R`, finds the
/// unique `beta` in `(0, 1)` and rank-1 `R'` with `E = beta R + (1 - beta) R'`.
///
/// `beta` is the root of `det(E - beta R) = 0` that leaves `E - beta R`
/// positive; `R'` is then the normalized remainder.
pub fn qubit_nonorthogonal_decomposition(e: &Effect, r: &Projection) -> Result<QubitDecomposition> {
    if e.dim() != 2 {
        return Err(Error::param(format!("expected a qubit effect, got dimension {}", e.dim())));
    }
    e.operator().check_same_dim(r.operator())?;
    let trace = e.operator().trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::param(format!(
            "decomposition needs a trace-one qubit effect, trace is {trace}"
        )));
    }
    if r.rank() != 1 {
        return Err(Error::NotRankOne { rank: r.rank() });
    }

    let (eo, ro) = (e.operator(), r.operator());
    let det = |m: &Operator| (m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0)).re;
    let c2 = det(ro);
    let c1 = -(eo.get(0, 0) * ro.get(1, 1) + ro.get(0, 0) * eo.get(1, 1)
        - eo.get(0, 1) * ro.get(1, 0)
        - ro.get(0, 1) * eo.get(1, 0))
    .re;
    let c0 = det(eo);

    let roots: Vec<f64> = if c2.abs() <= 1e-12 {
        if c1.abs() <= 1e-15 {
            vec![]
        } else {
            vec![-c0 / c1]
        }
    } else {
        let disc = (c1 * c1 - 4.0 * c2 * c0).max(0.0).sqrt();
        vec![(-c1 + disc) / (2.0 * c2), (-c1 - disc) / (2.0 * c2)]
    };

    let remainder = |beta: f64| eo - &ro.scale(beta);
    let admissible = roots.into_iter().find(|&beta| {
        beta > 0.0
            && beta < 1.0
            && HermitianOperator::new(remainder(beta))
                .map(|h| h.eig().min_eigenvalue() >= -1e-9)
                .unwrap_or(false)
    });
    let beta = admissible.ok_or_else(|| {
        Error::param("no admissible decomposition: effect spectrum must lie in (0, 1)")
    })?;

    let rest = HermitianOperator::new(remainder(beta).scale(1.0 / (1.0 - beta)))?;
    let top = hermitian_eig(&rest);
    let rprime = Projection::rank_one(&top.vectors[0])?;
    Ok(QubitDecomposition { beta, rprime })
}
