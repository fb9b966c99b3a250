//! Unitary premeasurement coupling an object to a pointer: `U|phi_i>|0> = |phi_i>|i>`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inner, singular_values, Operator, C64};
use crate::states::State;

const ORTHONORMAL_TOL: f64 = 1e-10;
const SCHMIDT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Premeasurement {
    /// Object (x) pointer, dimension `d^2`.
    pub post_state: State,
    pub post_vector: Vec<C64>,
    /// Descending.
    pub schmidt_coefficients: Vec<f64>,
    pub pointer_probabilities: Vec<f64>,
    pub schmidt_rank: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PremeasurementSummary {
    pub schmidt_rank: usize,
    pub is_product: bool,
}

impl Premeasurement {
    pub fn summary(&self) -> PremeasurementSummary {
        PremeasurementSummary {
            schmidt_rank: self.schmidt_rank,
            is_product: self.schmidt_rank == 1,
        }
    }
}

fn check_basis(basis: &[Vec<C64>], d: usize) -> Result<()> {
    if basis.len() != d {
        return Err(Error::param(format!(
            "basis has {} vectors for dimension {d}",
            basis.len()
        )));
    }
    for (i, u) in basis.iter().enumerate() {
        if u.len() != d {
            return Err(Error::DimensionMismatch { left: d, right: u.len() });
        }
        for (j, v) in basis.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            if (inner(u, v) - C64::new(expected, 0.0)).norm() > ORTHONORMAL_TOL {
                return Err(Error::param("premeasurement basis is not orthonormal"));
            }
        }
    }
    Ok(())
}

/// Couples a pure object state to a pointer prepared in `|0>` and reads off the
/// entanglement of the result.
pub fn premeasurement_demo(object: &State, basis: &[Vec<C64>]) -> Result<Premeasurement> {
    let d = object.dim();
    check_basis(basis, d)?;
    let psi = object
        .pure_vector()
        .ok_or_else(|| Error::param("premeasurement needs a pure object state"))?;

    // U acts as sum_i |phi_i><phi_i| (x) X^i on the pointer, so only amplitudes matter
    let amplitudes: Vec<C64> = basis.iter().map(|phi| inner(phi, &psi)).collect();
    let mut post = vec![C64::new(0.0, 0.0); d * d];
    for (i, (phi, c)) in basis.iter().zip(&amplitudes).enumerate() {
        for (a, x) in phi.iter().enumerate() {
            post[a * d + i] += c * x;
        }
    }

    // reshaped coefficient matrix; its singular values are the Schmidt coefficients
    let coeffs = Operator::from_rows(d, post.clone())?;
    let schmidt_coefficients = singular_values(&coeffs);
    let schmidt_rank = schmidt_coefficients.iter().filter(|&&s| s > SCHMIDT_TOL).count();

    let post_state = State::pure(&post)?;
    let pointer = post_state.operator().partial_trace_first(d, d)?;
    let pointer_probabilities = (0..d).map(|i| pointer.get(i, i).re).collect();

    Ok(Premeasurement {
        post_state,
        post_vector: post,
        schmidt_coefficients,
        pointer_probabilities,
        schmidt_rank,
    })
}
