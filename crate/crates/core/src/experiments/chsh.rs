//! CHSH correlations for unbiased smeared spin observables `(I +- eta a.sigma)/2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{pauli, C64, ZERO};
use crate::observables::BlochVector;
use crate::states::State;

#[derive(Clone, Debug)]
pub struct ChshSetting {
    pub state: State,
    pub a: [BlochVector; 2],
    pub b: [BlochVector; 2],
    pub eta_a: f64,
    pub eta_b: f64,
}

impl ChshSetting {
    pub fn new(
        state: State,
        a: [BlochVector; 2],
        b: [BlochVector; 2],
        eta_a: f64,
        eta_b: f64,
    ) -> Result<Self> {
        if state.dim() != 4 {
            return Err(Error::param(format!(
                "CHSH needs a two-qubit state, got dimension {}",
                state.dim()
            )));
        }
        for eta in [eta_a, eta_b] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::param(format!("sharpness {eta} outside [0, 1]")));
            }
        }
        Ok(Self {
            state,
            a,
            b,
            eta_a,
            eta_b,
        })
    }
}

/// `(|01> - |10>) / sqrt 2`
pub fn singlet() -> State {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    State::pure(&[ZERO, C64::new(h, 0.0), C64::new(-h, 0.0), ZERO]).expect("normalized")
}

pub fn product_state(a: &[C64], b: &[C64]) -> Result<State> {
    let v: Vec<C64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
    State::pure(&v)
}

fn correlator(state: &State, a: &BlochVector, eta_a: f64, b: &BlochVector, eta_b: f64) -> f64 {
    let (sa, sb) = (a.scaled(eta_a).expect("eta <= 1"), b.scaled(eta_b).expect("eta <= 1"));
    let mut c = 0.0;
    for j in [1.0, -1.0] {
        for k in [1.0, -1.0] {
            let joint = sa.effect(j).operator().kron(sb.effect(k).operator());
            c += j * k * state.operator().trace_product(&joint).re;
        }
    }
    c
}

/// `S = |C00 + C01 + C10 - C11|` with `C_ij = sum_{jk} jk tr[rho (A_i^j (x) B_j^k)]`.
pub fn chsh_value(setting: &ChshSetting) -> f64 {
    let c = |i: usize, j: usize| {
        correlator(
            &setting.state,
            &setting.a[i],
            setting.eta_a,
            &setting.b[j],
            setting.eta_b,
        )
    };
    (c(0, 0) + c(0, 1) + c(1, 0) - c(1, 1)).abs()
}

/// `T_kl = tr[rho sigma_k (x) sigma_l]`; sharp correlators are `a^T T b`.
pub fn correlation_tensor(state: &State) -> Result<[[f64; 3]; 3]> {
    if state.dim() != 4 {
        return Err(Error::param("correlation tensor needs a two-qubit state"));
    }
    let s = [pauli::x(), pauli::y(), pauli::z()];
    let mut t = [[0.0; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            t[k][l] = state.operator().trace_product(&s[k].kron(&s[l])).re;
        }
    }
    Ok(t)
}

fn bilinear(t: &[[f64; 3]; 3], a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3)
        .map(|k| (0..3).map(|l| a[k] * t[k][l] * b[l]).sum::<f64>())
        .sum()
}

#[derive(Clone, Debug)]
pub struct ChshOptimum {
    pub s_max: f64,
    pub a: [BlochVector; 2],
    pub b: [BlochVector; 2],
}

/// Eight spherical angles `(theta, phi)` for `a0, a1, b0, b1`.
type Angles = [f64; 8];

fn vectors(x: &Angles) -> [[f64; 3]; 4] {
    [0, 1, 2, 3].map(|i| BlochVector::from_angles(x[2 * i], x[2 * i + 1]).components())
}

fn sharp_score(t: &[[f64; 3]; 3], x: &Angles) -> f64 {
    let [a0, a1, b0, b1] = vectors(x);
    (bilinear(t, a0, b0) + bilinear(t, a0, b1) + bilinear(t, a1, b0) - bilinear(t, a1, b1)).abs()
}

const COARSE_STEPS: usize = 12;

/// Maximizes `S` over measurement directions for fixed sharpness factors.
///
/// A coarse scan over directions in the x-z plane seeds a pattern search over
/// all eight spherical angles. The objective uses the correlation tensor:
/// correlators are bilinear in the Bloch vectors, so `S = eta_a eta_b S_sharp`.
pub fn chsh_optimize(state: &State, eta_a: f64, eta_b: f64) -> Result<ChshOptimum> {
    for eta in [eta_a, eta_b] {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::param(format!("sharpness {eta} outside [0, 1]")));
        }
    }
    let t = correlation_tensor(state)?;
    let step = std::f64::consts::TAU / COARSE_STEPS as f64;
    let mut best = ([0.0; 8], f64::NEG_INFINITY);
    // polar angle over a full turn with phi = 0 covers the x-z great circle
    for i0 in 0..COARSE_STEPS {
        for i1 in 0..COARSE_STEPS {
            for j0 in 0..COARSE_STEPS {
                for j1 in 0..COARSE_STEPS {
                    let x = [
                        i0 as f64 * step,
                        0.0,
                        i1 as f64 * step,
                        0.0,
                        j0 as f64 * step,
                        0.0,
                        j1 as f64 * step,
                        0.0,
                    ];
                    let s = sharp_score(&t, &x);
                    if s > best.1 {
                        best = (x, s);
                    }
                }
            }
        }
    }

    let (mut x, mut fx) = best;
    let mut h = step / 2.0;
    while h > 1e-11 {
        let mut improved = false;
        for k in 0..8 {
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[k] += dir * h;
                let fy = sharp_score(&t, &y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }

    let [a0, a1, b0, b1] = vectors(&x).map(|v| BlochVector::new(v).expect("unit"));
    let setting = ChshSetting::new(state.clone(), [a0, a1], [b0, b1], eta_a, eta_b)?;
    Ok(ChshOptimum {
        s_max: chsh_value(&setting),
        a: [a0, a1],
        b: [b0, b1],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChshScanRow {
    pub eta: f64,
    pub s_max: f64,
}

/// Optimized CHSH value on the singlet with both sides smeared by the same `eta`.
pub fn chsh_unsharpness_scan(eta_grid: &[f64]) -> Result<Vec<ChshScanRow>> {
    let state = singlet();
    eta_grid
        .iter()
        .map(|&eta| {
            Ok(ChshScanRow {
                eta,
                s_max: chsh_optimize(&state, eta, eta)?.s_max,
            })
        })
        .collect()
}

/// Smallest `eta` at which the optimized singlet value reaches the local bound 2,
/// located by bisection to within `tol`.
pub fn chsh_violation_threshold(tol: f64) -> Result<f64> {
    let state = singlet();
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if chsh_optimize(&state, mid, mid)?.s_max > 2.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
