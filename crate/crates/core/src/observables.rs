//! Discrete positive operator measures and the constructions built on them:
//! smearing of sharp observables, smeared position on a grid, marginals of a
//! joint POM, and the joint-measurability decision for unbiased qubit pairs.

use std::collections::HashSet;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{pauli, Operator};
use crate::states::{degree_of_reality, Effect, Projection, State};

/// Tolerance on `max |sum E_i - I|`.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Separator between the two components of a product outcome label.
pub const PRODUCT_SEPARATOR: char = ',';

pub fn product_label(a: &str, b: &str) -> String {
    format!("{a}{PRODUCT_SEPARATOR}{b}")
}

/// Finite-outcome POM. Labels are ordered and unique.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretePom {
    outcomes: Vec<String>,
    effects: Vec<Effect>,
}

impl DiscretePom {
    pub fn new(outcomes: Vec<String>, effects: Vec<Effect>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::param("a POM needs at least one outcome"));
        }
        if outcomes.len() != effects.len() {
            return Err(Error::param(format!(
                "{} labels for {} effects",
                outcomes.len(),
                effects.len()
            )));
        }
        let mut seen = HashSet::new();
        for o in &outcomes {
            if !seen.insert(o.as_str()) {
                return Err(Error::param(format!("duplicate outcome label {o:?}")));
            }
        }
        let dim = effects[0].dim();
        let mut total = Operator::zeros(dim);
        for e in &effects {
            total.check_same_dim(e.operator())?;
            total = &total + e.operator();
        }
        let deviation = total.max_abs_diff(&Operator::identity(dim));
        if deviation > NORMALIZATION_TOL {
            return Err(Error::PomNotNormalized { deviation });
        }
        Ok(Self { outcomes, effects })
    }

    /// Sharp POM from mutually orthogonal projections summing to the identity.
    pub fn sharp(outcomes: Vec<String>, projections: Vec<Projection>) -> Result<Self> {
        Self::new(
            outcomes,
            projections.into_iter().map(|p| p.effect().clone()).collect(),
        )
    }

    /// Projective measurement in the computational basis, labels `"0"`, `"1"`, ...
    pub fn computational_basis(dim: usize) -> Self {
        let effects = (0..dim)
            .map(|k| {
                let mut d = vec![0.0; dim];
                d[k] = 1.0;
                Effect::new(Operator::diag(&d)).expect("diagonal projection")
            })
            .collect();
        Self {
            outcomes: (0..dim).map(|k| k.to_string()).collect(),
            effects,
        }
    }

    /// Two-outcome qubit observable `{(I + a.sigma)/2, (I - a.sigma)/2}` labelled `"+"`, `"-"`.
    pub fn unbiased_qubit(a: BlochVector) -> Self {
        Self {
            outcomes: vec!["+".into(), "-".into()],
            effects: vec![a.effect(1.0), a.effect(-1.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|o| o == label)
            .ok_or_else(|| Error::UnknownOutcome(label.to_string()))
    }

    pub fn effect(&self, label: &str) -> Result<&Effect> {
        Ok(&self.effects[self.index_of(label)?])
    }

    pub fn probabilities(&self, s: &State) -> Result<Vec<f64>> {
        self.effects.iter().map(|e| degree_of_reality(s, e)).collect()
    }

    pub fn is_sharp(&self) -> bool {
        self.effects.iter().all(|e| Projection::new(e.clone()).is_ok())
    }
}

/// Column-stochastic matrix `M` (rows: smeared outcomes, columns: sharp outcomes).
#[derive(Clone, Debug, PartialEq)]
pub struct SmearingMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl SmearingMatrix {
    /// `entries` in row-major order.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::param(format!(
                "smearing matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        for c in 0..cols {
            let mut sum = 0.0;
            for r in 0..rows {
                let m = entries[r * cols + c];
                if m.is_nan() || m < 0.0 {
                    return Err(Error::NotStochastic {
                        column: c,
                        reason: format!("has entry {m} at row {r}"),
                    });
                }
                sum += m;
            }
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::NotStochastic {
                    column: c,
                    reason: format!("sums to {sum}"),
                });
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for k in 0..n {
            entries[k * n + k] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }
}

/// `E_i = sum_j M_ij P_j` for a sharp POM `{P_j}`.
pub fn smear_discrete(sharp: &DiscretePom, m: &SmearingMatrix) -> Result<DiscretePom> {
    if m.cols() != sharp.len() {
        return Err(Error::param(format!(
            "smearing matrix has {} columns but the observable has {} outcomes",
            m.cols(),
            sharp.len()
        )));
    }
    if !sharp.is_sharp() {
        return Err(Error::param("smearing input must consist of projections"));
    }
    let dim = sharp.dim();
    let effects = (0..m.rows())
        .map(|i| {
            let op = sharp
                .effects()
                .iter()
                .enumerate()
                .fold(Operator::zeros(dim), |acc, (j, p)| {
                    &acc + &p.operator().scale(m.get(i, j))
                });
            Effect::new(op)
        })
        .collect::<Result<Vec<_>>>()?;
    let outcomes = if m.rows() == sharp.len() {
        sharp.outcomes().to_vec()
    } else {
        (0..m.rows()).map(|i| i.to_string()).collect()
    };
    DiscretePom::new(outcomes, effects)
}

/// Uniform position grid `x_k = x0 + k dx`, `k = 0..n`, with the position
/// basis as the Hilbert space basis; `Q({x_k}) = |k><k|`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPositionMeasure {
    x0: f64,
    dx: f64,
    n: usize,
}

impl GridPositionMeasure {
    pub fn new(x0: f64, dx: f64, n: usize) -> Result<Self> {
        if n == 0 || dx.is_nan() || dx <= 0.0 || !x0.is_finite() {
            return Err(Error::param(format!("invalid grid x0={x0} dx={dx} n={n}")));
        }
        Ok(Self { x0, dx, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.dx
    }

    pub fn point(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.point(k)).collect()
    }

    pub fn projection(&self, k: usize) -> Projection {
        let mut d = vec![0.0; self.n];
        d[k] = 1.0;
        Projection::from_operator(Operator::diag(&d)).expect("diagonal projection")
    }

    /// Sharp position POM, one outcome per grid point.
    pub fn sharp_pom(&self) -> DiscretePom {
        let mut pom = DiscretePom::computational_basis(self.n);
        pom.outcomes = self.points().iter().map(|x| format!("{x}")).collect();
        pom
    }
}

/// Confidence weights on integer grid offsets, starting at `min_offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    min_offset: i64,
    weights: Vec<f64>,
}

impl Kernel {
    pub fn new(min_offset: i64, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::param("kernel needs at least one weight"));
        }
        if let Some(w) = weights.iter().find(|w| w.is_nan() || **w < 0.0) {
            return Err(Error::param(format!("kernel weight {w} is negative")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!("kernel weights sum to {sum}, not 1")));
        }
        Ok(Self {
            min_offset,
            weights,
        })
    }

    /// Weights centred on offset zero (odd length).
    pub fn centered(weights: Vec<f64>) -> Result<Self> {
        if weights.len().is_multiple_of(2) {
            return Err(Error::param("centered kernel needs an odd number of weights"));
        }
        let half = (weights.len() / 2) as i64;
        Self::new(-half, weights)
    }

    pub fn point_mass() -> Self {
        Self {
            min_offset: 0,
            weights: vec![1.0],
        }
    }

    fn offsets(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(j, &w)| (self.min_offset + j as i64, w))
    }
}

/// Smeared indicator of the index set `bin`: the returned effect is diagonal
/// in the position basis with eigenvalue `sum_o w_o 1[k - o in bin]` at grid
/// point `k`. Bins may reach past the grid (e.g. `i64::MIN..=3`).
pub fn smear_position(
    qm: &GridPositionMeasure,
    kernel: &Kernel,
    bin: RangeInclusive<i64>,
) -> Result<Effect> {
    if bin.is_empty() {
        return Err(Error::param("empty position bin"));
    }
    let values: Vec<f64> = (0..qm.len() as i64)
        .map(|k| {
            kernel
                .offsets()
                .filter(|(o, _)| bin.contains(&(k - o)))
                .map(|(_, w)| w)
                .sum::<f64>()
                .min(1.0)
        })
        .collect();
    Effect::new(Operator::diag(&values))
}

/// Smeared position POM over the partition of the integers cut at
/// `boundaries` (sorted, each the first index of a new bin). The outer bins
/// extend to infinity, so the effects sum to the identity.
pub fn smeared_position_pom(
    qm: &GridPositionMeasure,
    kernel: &Kernel,
    boundaries: &[i64],
) -> Result<DiscretePom> {
    if boundaries.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("bin boundaries must be strictly increasing"));
    }
    let mut lo = i64::MIN;
    let mut bins = Vec::with_capacity(boundaries.len() + 1);
    for &b in boundaries {
        bins.push(lo..=b - 1);
        lo = b;
    }
    bins.push(lo..=i64::MAX);
    let effects = bins
        .iter()
        .map(|b| smear_position(qm, kernel, b.clone()))
        .collect::<Result<Vec<_>>>()?;
    let outcomes = (0..effects.len()).map(|i| format!("bin{i}")).collect();
    DiscretePom::new(outcomes, effects)
}

/// First and second marginals of a POM whose labels are `"a,b"` pairs
/// covering a complete product grid. Marginal labels keep first-appearance order.
pub fn marginals(joint: &DiscretePom) -> Result<(DiscretePom, DiscretePom)> {
    let mut pairs = Vec::with_capacity(joint.len());
    for label in joint.outcomes() {
        let mut parts = label.split(PRODUCT_SEPARATOR);
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => pairs.push((a.to_string(), b.to_string())),
            _ => {
                return Err(Error::NotProductLabels(format!(
                    "label {label:?} is not of the form a{PRODUCT_SEPARATOR}b"
                )))
            }
        }
    }
    let mut first: Vec<String> = Vec::new();
    let mut second: Vec<String> = Vec::new();
    for (a, b) in &pairs {
        if !first.contains(a) {
            first.push(a.clone());
        }
        if !second.contains(b) {
            second.push(b.clone());
        }
    }
    if first.len() * second.len() != pairs.len() {
        return Err(Error::NotProductLabels(format!(
            "{} labels cannot cover a {}x{} grid",
            pairs.len(),
            first.len(),
            second.len()
        )));
    }

    let dim = joint.dim();
    let sum_over = |pick: &dyn Fn(&(String, String)) -> bool| {
        pairs
            .iter()
            .zip(joint.effects())
            .filter(|(p, _)| pick(p))
            .fold(Operator::zeros(dim), |acc, (_, e)| &acc + e.operator())
    };
    let first_effects = first
        .iter()
        .map(|a| Effect::new(sum_over(&|p| &p.0 == a)))
        .collect::<Result<Vec<_>>>()?;
    let second_effects = second
        .iter()
        .map(|b| Effect::new(sum_over(&|p| &p.1 == b)))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        DiscretePom::new(first, first_effects)?,
        DiscretePom::new(second, second_effects)?,
    ))
}

/// Real 3-vector of length at most one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub fn new(v: [f64; 3]) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = norm3(v);
        if n > 1.0 + 1e-12 {
            return Err(Error::param(format!("Bloch vector norm {n} exceeds 1")));
        }
        Ok(Self(v))
    }

    /// Unit vector at polar angle `theta` from +z, azimuth `phi` from +x.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self([
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm3(self.0)
    }

    pub fn scaled(&self, eta: f64) -> Result<Self> {
        Self::new(self.0.map(|x| eta * x))
    }

    /// `(I + sign a.sigma) / 2`
    pub fn effect(&self, sign: f64) -> Effect {
        let v = self.0.map(|x| 0.5 * sign * x);
        Effect::new(pauli::combination(0.5, v)).expect("|a| <= 1 gives an effect")
    }
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[derive(Clone, Debug)]
pub enum JointMeasurability {
    Feasible {
        pom: DiscretePom,
        gamma: f64,
        criterion: f64,
    },
    Infeasible {
        criterion: f64,
    },
}

impl JointMeasurability {
    pub fn is_feasible(&self) -> bool {
        matches!(self, JointMeasurability::Feasible { .. })
    }

    /// `|a + b| + |a - b|`
    pub fn criterion(&self) -> f64 {
        match self {
            JointMeasurability::Feasible { criterion, .. }
            | JointMeasurability::Infeasible { criterion } => *criterion,
        }
    }
}

/// Decides whether the unbiased qubit observables with Bloch vectors `a`, `b`
/// are marginals of a common four-outcome POM, and builds one if so.
///
/// Feasible iff `|a + b| + |a - b| <= 2`; the certificate is
/// `G_jk = [(1 + jk g) I + (j a + k b).sigma] / 4` with
/// `g = (|a + b| - |a - b|) / 2`.
pub fn construct_joint_qubit(a: BlochVector, b: BlochVector) -> Result<JointMeasurability> {
    let (av, bv) = (a.components(), b.components());
    let sum = [av[0] + bv[0], av[1] + bv[1], av[2] + bv[2]];
    let diff = [av[0] - bv[0], av[1] - bv[1], av[2] - bv[2]];
    let (ns, nd) = (norm3(sum), norm3(diff));
    let criterion = ns + nd;
    if criterion > 2.0 + 1e-12 {
        return Ok(JointMeasurability::Infeasible { criterion });
    }
    let gamma = 0.5 * (ns - nd);
    let signs = [(1.0, "+"), (-1.0, "-")];
    let mut outcomes = Vec::with_capacity(4);
    let mut effects = Vec::with_capacity(4);
    for (j, jl) in signs {
        for (k, kl) in signs {
            let v = [0, 1, 2].map(|i| 0.25 * (j * av[i] + k * bv[i]));
            let op = pauli::combination(0.25 * (1.0 + j * k * gamma), v);
            outcomes.push(product_label(jl, kl));
            effects.push(Effect::new(op)?);
        }
    }
    Ok(JointMeasurability::Feasible {
        pom: DiscretePom::new(outcomes, effects)?,
        gamma,
        criterion,
    })
}
