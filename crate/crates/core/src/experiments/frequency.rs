//! Statistics of the frequency operator `F_N = (1/N) sum_k P^(k)` in a product state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Operator, C64};

/// Largest `N` for which the tensor-product route is built.
pub const MAX_TENSOR_SYSTEMS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FrequencyMode {
    ClosedForm,
    /// Builds `psi^(x)N` and applies each embedded `P^(k)` to it.
    Tensor,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrequencyStats {
    pub mean: f64,
    pub variance: f64,
}

/// Mean and variance of `F_N` in `psi^(x)N`, where `|<u|psi>|^2 = p_plus` and `P = |u><u|`.
pub fn frequency_operator_stats(p_plus: f64, n: usize, mode: FrequencyMode) -> Result<FrequencyStats> {
    if !(0.0..=1.0).contains(&p_plus) {
        return Err(Error::param(format!("p_plus {p_plus} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::param("need at least one system"));
    }
    match mode {
        FrequencyMode::ClosedForm => Ok(FrequencyStats {
            mean: p_plus,
            variance: p_plus * (1.0 - p_plus) / n as f64,
        }),
        FrequencyMode::Tensor => {
            if n > MAX_TENSOR_SYSTEMS {
                return Err(Error::param(format!(
                    "tensor mode supports at most {MAX_TENSOR_SYSTEMS} systems, got {n}"
                )));
            }
            Ok(tensor_stats(p_plus, n))
        }
    }
}

/// Single-system data in a deliberately tilted basis: the projection `|u><u|`
/// and a state `psi` with `|<u|psi>|^2 = p_plus`.
pub(crate) fn single_system(p_plus: f64) -> (Operator, Vec<C64>) {
    let (c, s) = (0.4f64.cos(), 0.4f64.sin());
    let phase = C64::from_polar(1.0, 0.7);
    let u = [C64::new(c, 0.0), phase * s];
    let u_perp = [-phase.conj() * s, C64::new(c, 0.0)];
    let (a, b) = (p_plus.sqrt(), (1.0 - p_plus).sqrt());
    let rel = C64::from_polar(1.0, -1.3);
    let psi = vec![u[0] * a + u_perp[0] * b * rel, u[1] * a + u_perp[1] * b * rel];
    (Operator::projector(&u), psi)
}

fn tensor_stats(p_plus: f64, n: usize) -> FrequencyStats {
    let (proj, psi) = single_system(p_plus);
    let mut state = vec![C64::new(1.0, 0.0)];
    for _ in 0..n {
        state = state
            .iter()
            .flat_map(|x| psi.iter().map(move |y| x * y))
            .collect();
    }
    let mut f_psi = vec![C64::new(0.0, 0.0); state.len()];
    for k in 0..n {
        let local = apply_local(&proj, k, n, &state);
        for (acc, v) in f_psi.iter_mut().zip(&local) {
            *acc += v / n as f64;
        }
    }
    let mean: f64 = state.iter().zip(&f_psi).map(|(a, b)| (a.conj() * b).re).sum();
    let second: f64 = f_psi.iter().map(|z| z.norm_sqr()).sum();
    FrequencyStats {
        mean,
        variance: second - mean * mean,
    }
}

/// `(I (x) .. (x) op_k (x) .. (x) I) v` for a qubit operator on factor `k` of `n`
/// (factor 0 is the most significant bit).
fn apply_local(op: &Operator, k: usize, n: usize, v: &[C64]) -> Vec<C64> {
    let stride = 1usize << (n - 1 - k);
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for i in 0..v.len() {
        if i & stride != 0 {
            continue;
        }
        let (x0, x1) = (v[i], v[i | stride]);
        out[i] = op.get(0, 0) * x0 + op.get(0, 1) * x1;
        out[i | stride] = op.get(1, 0) * x0 + op.get(1, 1) * x1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_outcome_has_no_spread() {
        for n in [1, 5, 12] {
            let s = frequency_operator_stats(1.0, n, FrequencyMode::Tensor).unwrap();
            assert!((s.mean - 1.0).abs() < 1e-12);
            assert!(s.variance.abs() < 1e-12);
        }
    }

    #[test]
    fn binomial_half_ten() {
        let s = frequency_operator_stats(0.5, 10, FrequencyMode::ClosedForm).unwrap();
        assert_eq!(s.mean, 0.5);
        assert!((s.variance - 0.025).abs() < 1e-15);
        let t = frequency_operator_stats(0.5, 10, FrequencyMode::Tensor).unwrap();
        assert!((t.variance - 0.025).abs() < 1e-10);
    }

    #[test]
    fn tensor_matches_closed_form() {
        let a = frequency_operator_stats(0.3, 8, FrequencyMode::Tensor).unwrap();
        let b = frequency_operator_stats(0.3, 8, FrequencyMode::ClosedForm).unwrap();
        assert!((a.mean - b.mean).abs() <= 1e-10);
        assert!((a.variance - b.variance).abs() <= 1e-10);
    }

    #[test]
    fn dense_kron_operator_agrees_for_small_n() {
        // build F_N explicitly as a 2^N matrix and compare with the matrix-free route
        let p = 0.37;
        for n in 1..=5 {
            let (proj, psi) = single_system(p);
            let id = Operator::identity(2);
            let mut f = Operator::zeros(1 << n);
            for k in 0..n {
                let mut term = Operator::identity(1);
                for j in 0..n {
                    term = term.kron(if j == k { &proj } else { &id });
                }
                f = &f + &term.scale(1.0 / n as f64);
            }
            let mut state = vec![C64::new(1.0, 0.0)];
            for _ in 0..n {
                state = state.iter().flat_map(|x| psi.iter().map(move |y| x * y)).collect();
            }
            let mean = f.expectation(&state).re;
            let second = (&f * &f).expectation(&state).re;
            let t = frequency_operator_stats(p, n, FrequencyMode::Tensor).unwrap();
            assert!((t.mean - mean).abs() < 1e-12);
            assert!((t.variance - (second - mean * mean)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(frequency_operator_stats(0.5, 13, FrequencyMode::Tensor).is_err());
        assert!(frequency_operator_stats(1.5, 3, FrequencyMode::ClosedForm).is_err());
        assert!(frequency_operator_stats(0.5, 0, FrequencyMode::ClosedForm).is_err());
    }
}
