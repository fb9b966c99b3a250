use ndarray::Array2;

use super::{HermitianOperator, Operator, C64, ONE, ZERO};

/// Spectral data of a Hermitian operator, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors; `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<Vec<C64>>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    /// `sum_k f(l_k) |v_k><v_k|`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Operator {
        let n = self.dim();
        let mut m = Array2::<C64>::zeros((n, n));
        for (l, v) in self.values.iter().zip(&self.vectors) {
            let w = f(*l);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    m[[i, j]] += vi * v[j].conj();
                }
            }
        }
        Operator::from_array(m).expect("spectral rebuild of finite data")
    }

    pub fn reconstruct(&self) -> Operator {
        self.map_spectrum(|l| l)
    }

    /// Groups eigenvalues closer than `tol` (after sorting) into blocks and
    /// returns `(mean eigenvalue, projector onto the block)` pairs.
    pub fn eigenspaces(&self, tol: f64) -> Vec<(f64, Operator)> {
        let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
        for (k, &l) in self.values.iter().enumerate() {
            match out.last_mut() {
                Some((_, idx)) if (self.values[idx[0]] - l).abs() <= tol => idx.push(k),
                _ => out.push((l, vec![k])),
            }
        }
        out.into_iter()
            .map(|(_, idx)| {
                let mean = idx.iter().map(|&k| self.values[k]).sum::<f64>() / idx.len() as f64;
                let n = self.dim();
                let mut p = Operator::zeros(n);
                for &k in &idx {
                    p = &p + &Operator::outer(&self.vectors[k], &self.vectors[k]);
                }
                (mean, p)
            })
            .collect()
    }
}

/// Eigendecomposition of a Hermitian operator.
///
/// Qubits use the closed-form quadratic; larger dimensions use cyclic complex
/// Jacobi rotations, which converge quadratically and keep the eigenvectors
/// orthonormal to working precision.
pub fn hermitian_eig(a: &HermitianOperator) -> EigenSystem {
    match a.dim() {
        1 => EigenSystem {
            values: vec![a.get(0, 0).re],
            vectors: vec![vec![ONE]],
        },
        2 => qubit_eig(a.as_operator()),
        _ => jacobi_eig(a.as_operator()),
    }
}

fn qubit_eig(a: &Operator) -> EigenSystem {
    let (p, d, b) = (a.get(0, 0).re, a.get(1, 1).re, a.get(0, 1));
    let mean = 0.5 * (p + d);
    let delta = 0.5 * (p - d);
    let h = delta.hypot(b.norm());
    let (hi, lo) = (mean + h, mean - h);

    if b.norm() == 0.0 {
        let (e0, e1) = (vec![ONE, ZERO], vec![ZERO, ONE]);
        let vectors = if p >= d { vec![e0, e1] } else { vec![e1, e0] };
        return EigenSystem {
            values: vec![hi, lo],
            vectors,
        };
    }

    // pick the row of (A - l I) v = 0 that avoids cancellation
    let (v_hi, v_lo) = if delta >= 0.0 {
        (
            vec![C64::new(h + delta, 0.0), b.conj()],
            vec![b, C64::new(-(h + delta), 0.0)],
        )
    } else {
        (
            vec![b, C64::new(h - delta, 0.0)],
            vec![C64::new(-(h - delta), 0.0), b.conj()],
        )
    };
    EigenSystem {
        values: vec![hi, lo],
        vectors: vec![
            super::normalize(&v_hi).expect("nonzero"),
            super::normalize(&v_lo).expect("nonzero"),
        ],
    }
}

const MAX_SWEEPS: usize = 100;

fn jacobi_eig(op: &Operator) -> EigenSystem {
    let n = op.dim();
    let mut a = op.as_array().clone();
    let mut v = Array2::<C64>::eye(n);
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[[p, q]].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let tau = (a[[q, q]].re - a[[p, p]].re) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]]
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;

                for k in 0..n {
                    let (akp, akq) = (a[[k, p]], a[[k, q]]);
                    a[[k, p]] = akp * g_pp + akq * g_qp;
                    a[[k, q]] = akp * g_pq + akq * g_qq;
                    let (vkp, vkq) = (v[[k, p]], v[[k, q]]);
                    v[[k, p]] = vkp * g_pp + vkq * g_qp;
                    v[[k, q]] = vkp * g_pq + vkq * g_qq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[[p, k]], a[[q, k]]);
                    a[[p, k]] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[[q, k]] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[[p, q]] = ZERO;
                a[[q, p]] = ZERO;
                a[[p, p]] = C64::new(a[[p, p]].re, 0.0);
                a[[q, q]] = C64::new(a[[q, q]].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[j, j]].re.total_cmp(&a[[i, i]].re));
    EigenSystem {
        values: order.iter().map(|&k| a[[k, k]].re).collect(),
        vectors: order
            .iter()
            .map(|&k| (0..n).map(|i| v[[i, k]]).collect())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, pauli};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> HermitianOperator {
        let mut m = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            m[[i, i]] = C64::new(rng.random_range(-2.0..2.0), 0.0);
            for j in i + 1..n {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[[i, j]] = z;
                m[[j, i]] = z.conj();
            }
        }
        HermitianOperator::new(Operator::from_array(m).unwrap()).unwrap()
    }

    fn check(a: &HermitianOperator, es: &EigenSystem) {
        assert!(es.reconstruct().max_abs_diff(a) < 1e-9);
        for w in es.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for (j, vj) in es.vectors.iter().enumerate() {
            let av = a.apply(vj);
            for i in 0..a.dim() {
                assert!((av[i] - vj[i] * es.values[j]).norm() < 1e-9);
            }
            for (k, vk) in es.vectors.iter().enumerate() {
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((inner(vj, vk) - expect).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn identity_and_pauli_z() {
        let id = HermitianOperator::new(Operator::identity(3)).unwrap();
        assert_eq!(hermitian_eig(&id).values, vec![1.0, 1.0, 1.0]);

        let z = HermitianOperator::new(pauli::z()).unwrap();
        let es = hermitian_eig(&z);
        assert_eq!(es.values, vec![1.0, -1.0]);
        assert_eq!(es.vectors[0], vec![ONE, ZERO]);
        assert_eq!(es.vectors[1], vec![ZERO, ONE]);
    }

    #[test]
    fn qubit_closed_form_agrees_with_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = random_hermitian(2, &mut rng);
            let closed = qubit_eig(&a);
            let iter = jacobi_eig(&a);
            check(&a, &closed);
            check(&a, &iter);
            for (x, y) in closed.values.iter().zip(&iter.values) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [3, 4, 5, 8, 16, 40] {
            let a = random_hermitian(n, &mut rng);
            check(&a, &hermitian_eig(&a));
        }
    }

    #[test]
    fn nearly_diagonal_qubit_is_stable() {
        let a = HermitianOperator::new(
            Operator::from_rows(
                2,
                vec![ONE, C64::new(1e-13, 1e-13), C64::new(1e-13, -1e-13), ZERO],
            )
            .unwrap(),
        )
        .unwrap();
        check(&a, &hermitian_eig(&a));
    }

    #[test]
    fn degenerate_blocks_group() {
        let a = HermitianOperator::new(Operator::diag(&[0.5, 0.2, 0.5])).unwrap();
        let spaces = hermitian_eig(&a).eigenspaces(1e-9);
        assert_eq!(spaces.len(), 2);
        assert!((spaces[0].0 - 0.5).abs() < 1e-15);
        assert!((spaces[0].1.trace().re - 2.0).abs() < 1e-12);
    }
}
