//! Dense complex operators on a finite-dimensional Hilbert space.
//!
//! [`Operator`] is the substrate for every other module. Hermitian operators
//! get their own newtype so that the spectral routines ([`hermitian_eig`],
//! [`operator_sqrt`]) can only be handed matrices that were checked once.

mod eig;

pub use eig::{hermitian_eig, EigenSystem};

use std::fmt;
use std::ops::{Add, Mul, Sub};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on `max |A - A^dag|` for a matrix to count as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero; anything lower is rejected.
pub const PSD_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct Operator {
    m: Array2<C64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator(dim = {})", self.dim())?;
        for row in self.m.rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl Operator {
    pub fn from_array(m: Array2<C64>) -> Result<Self> {
        let (rows, cols) = m.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::Empty);
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { m })
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::param(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let m = Array2::from_shape_vec((dim, dim), entries)
            .map_err(|e| Error::param(e.to_string()))?;
        Self::from_array(m)
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::from_rows(dim, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: Array2::zeros((dim, dim)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: Array2::eye(dim),
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Array2::zeros((values.len(), values.len()));
        for (i, &v) in values.iter().enumerate() {
            m[[i, i]] = C64::new(v, 0.0);
        }
        Self { m }
    }

    /// `|v><w|`
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        let n = v.len();
        let m = Array2::from_shape_fn((n, n), |(i, j)| v[i] * w[j].conj());
        Self { m }
    }

    /// Projector onto the ray spanned by `v` (normalized internally).
    pub fn projector(v: &[C64]) -> Self {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let mut p = Self::outer(v, v);
        if norm2 > 0.0 {
            p.m.mapv_inplace(|z| z / norm2);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.m
    }

    pub fn into_array(self) -> Array2<C64> {
        self.m
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[[row, col]]
    }

    pub fn row_major(&self) -> Vec<C64> {
        self.m.iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.t().mapv(|z| z.conj()),
        }
    }

    pub fn trace(&self) -> C64 {
        self.m.diag().sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: self.m.mapv(|z| z * s),
        }
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self {
            m: self.m.mapv(|z| z * s),
        }
    }

    pub fn kron(&self, other: &Operator) -> Self {
        let (n, k) = (self.dim(), other.dim());
        let m = Array2::from_shape_fn((n * k, n * k), |(r, c)| {
            self.m[[r / k, c / k]] * other.m[[r % k, c % k]]
        });
        Self { m }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.m
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `<v|A|v>`
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let av = self.apply(v);
        v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }

    /// `tr[self * other]` without forming the product.
    pub fn trace_product(&self, other: &Operator) -> C64 {
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.m[[i, j]] * other.m[[j, i]];
            }
        }
        acc
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.m[[i, j]] - self.m[[j, i]].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_deviation() <= HERMITICITY_TOL
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// Partial trace over the second factor of a `d1 x d2` bipartition.
    pub fn partial_trace_second(&self, d1: usize, d2: usize) -> Result<Operator> {
        if d1 * d2 != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: d1 * d2,
            });
        }
        let m = Array2::from_shape_fn((d1, d1), |(i, j)| {
            (0..d2).map(|k| self.m[[i * d2 + k, j * d2 + k]]).sum()
        });
        Ok(Self { m })
    }

    /// Trace over the first factor of a `d1 (x) d2` operator.
    pub fn partial_trace_first(&self, d1: usize, d2: usize) -> Result<Operator> {
        if d1 * d2 != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: d1 * d2,
            });
        }
        let m = Array2::from_shape_fn((d2, d2), |(i, j)| {
            (0..d1).map(|k| self.m[[k * d2 + i, k * d2 + j]]).sum()
        });
        Ok(Self { m })
    }

    pub(crate) fn check_same_dim(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn hermitian_part(&self) -> Self {
        let m = (&self.m + &self.m.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
        Self { m }
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator { m: &self.m + &rhs.m }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator { m: &self.m - &rhs.m }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            m: self.m.dot(&rhs.m),
        }
    }
}

/// Operator that passed the hermiticity check; stored exactly Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(Operator);

impl HermitianOperator {
    pub fn new(op: Operator) -> Result<Self> {
        let deviation = op.hermiticity_deviation();
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self(op.hermitian_part()))
    }

    pub fn as_operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn eig(&self) -> EigenSystem {
        hermitian_eig(self)
    }
}

impl std::ops::Deref for HermitianOperator {
    type Target = Operator;
    fn deref(&self) -> &Operator {
        &self.0
    }
}

/// Square root of a positive semidefinite operator.
///
/// Eigenvalues in `[-PSD_TOL, 0)` are treated as zero.
pub fn operator_sqrt(a: &HermitianOperator) -> Result<HermitianOperator> {
    let es = a.eig();
    let min = es.min_eigenvalue();
    if min < -PSD_TOL {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    let root = es.map_spectrum(|l| l.max(0.0).sqrt());
    Ok(HermitianOperator(root))
}

/// Singular values, descending.
pub fn singular_values(a: &Operator) -> Vec<f64> {
    if a.is_hermitian() {
        let es = hermitian_eig(&HermitianOperator(a.hermitian_part()));
        let mut s: Vec<f64> = es.values.iter().map(|l| l.abs()).collect();
        s.sort_by(|x, y| y.total_cmp(x));
        return s;
    }
    let gram = &a.adjoint() * a;
    let es = hermitian_eig(&HermitianOperator(gram.hermitian_part()));
    es.values.iter().map(|l| l.max(0.0).sqrt()).collect()
}

/// `||a - b||_1`, the sum of singular values of the difference.
pub fn trace_norm_distance(a: &Operator, b: &Operator) -> Result<f64> {
    a.check_same_dim(b)?;
    Ok(singular_values(&(a - b)).iter().sum())
}

/// Largest singular value.
pub fn operator_norm(a: &Operator) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// The Pauli matrices and related qubit helpers.
pub mod pauli {
    use super::{Operator, C64, ONE, ZERO};

    pub fn x() -> Operator {
        Operator::from_rows(2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
    }

    pub fn y() -> Operator {
        let i = C64::new(0.0, 1.0);
        Operator::from_rows(2, vec![ZERO, -i, i, ZERO]).unwrap()
    }

    pub fn z() -> Operator {
        Operator::diag(&[1.0, -1.0])
    }

    /// `c0 I + v . sigma`
    pub fn combination(c0: f64, v: [f64; 3]) -> Operator {
        let re = |x: f64| C64::new(x, 0.0);
        Operator::from_rows(
            2,
            vec![
                re(c0 + v[2]),
                C64::new(v[0], -v[1]),
                C64::new(v[0], v[1]),
                re(c0 - v[2]),
            ],
        )
        .unwrap()
    }

    /// Bloch coordinates `(c0, v)` of a Hermitian 2x2 operator: `A = c0 I + v . sigma`.
    pub fn coordinates(a: &Operator) -> (f64, [f64; 3]) {
        let (a00, a01, a11) = (a.get(0, 0), a.get(0, 1), a.get(1, 1));
        (
            0.5 * (a00.re + a11.re),
            [a01.re, -a01.im, 0.5 * (a00.re - a11.re)],
        )
    }
}

/// Computational basis vector `|index>` in dimension `dim`.
pub fn basis_vector(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

pub fn normalize(v: &[C64]) -> Option<Vec<C64>> {
    let n = vector_norm(v);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(v.iter().map(|z| z / n).collect())
}

pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<v|w>`
pub fn inner(v: &[C64], w: &[C64]) -> C64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}
