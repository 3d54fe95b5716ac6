//! Dense complex vectors and square matrices, plus the elementary `l^p`
//! primitives (vector norms, duality map, bilinear pairing).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::PExponent;

pub type C64 = Complex64;

/// A complex vector in `l^p_n` (the exponent is supplied per operation).
#[derive(Clone, PartialEq)]
pub struct PVector {
    data: DVector<C64>,
}

/// A dense complex `n x n` matrix viewed as an operator `l^p_n -> l^p_n`.
///
/// Entries are validated to be finite at construction. `n >= 1`.
#[derive(Clone, PartialEq)]
pub struct PMatrix {
    data: DMatrix<C64>,
}

impl PVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch("empty vector".into()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite vector entry".into()));
        }
        Ok(Self {
            data: DVector::from_vec(entries),
        })
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self {
            data: DVector::from_iterator(entries.len(), entries.iter().map(|&x| C64::new(x, 0.0))),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: DVector::zeros(n),
        }
    }

    pub fn ones(n: usize) -> Self {
        Self {
            data: DVector::from_element(n, C64::new(1.0, 0.0)),
        }
    }

    pub fn standard_basis(n: usize, i: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[i] = C64::new(1.0, 0.0);
        Self { data: v }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn entry(&self, i: usize) -> C64 {
        self.data[i]
    }

    pub fn entries(&self) -> &[C64] {
        self.data.as_slice()
    }

    pub fn conj(&self) -> Self {
        Self {
            data: self.data.map(|z| z.conj()),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            data: &self.data * c,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn as_dvector(&self) -> &DVector<C64> {
        &self.data
    }

    pub(crate) fn from_dvector(data: DVector<C64>) -> Self {
        Self { data }
    }
}

/// `(sum_i |v_i|^p)^{1/p}`, or `max_i |v_i|` for `p = inf`.
///
/// The moduli are accumulated in ascending order, which makes the result
/// invariant under permutations of the entries.
pub fn vector_p_norm(v: &PVector, p: &PExponent) -> f64 {
    let pe = p.p();
    if pe.is_infinite() {
        return v.max_abs();
    }
    let mut powers: Vec<f64> = v.data.iter().map(|z| z.norm().powf(pe)).collect();
    powers.sort_by(|a, b| a.partial_cmp(b).expect("finite entries"));
    let sum: f64 = powers.iter().sum();
    sum.powf(1.0 / pe)
}

/// The unique norming functional of a nonzero `v` in `l^p_n`, `1 < p < inf`:
/// `eta_i = conj(v_i) |v_i|^{p-2} / ||v||_p^{p-1}`, so that `||eta||_q = 1`
/// and `<v, eta> = ||v||_p` under the bilinear pairing.
pub fn duality_map(v: &PVector, p: &PExponent) -> Result<PVector> {
    p.require_interior("duality_map")?;
    let norm = vector_p_norm(v, p);
    if norm == 0.0 {
        return Err(Error::ZeroVector("duality_map"));
    }
    let pe = p.p();
    let scale = norm.powf(pe - 1.0);
    let data = v.data.map(|z| {
        let m = z.norm();
        if m == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            z.conj() * m.powf(pe - 2.0) / scale
        }
    });
    Ok(PVector { data })
}

/// Bilinear pairing `<v, w> = sum_i v_i w_i` between `l^p_n` and `l^q_n`.
pub fn pairing(v: &PVector, w: &PVector) -> C64 {
    assert_eq!(v.len(), w.len(), "pairing length mismatch");
    v.data
        .iter()
        .zip(w.data.iter())
        .map(|(a, b)| a * b)
        .sum()
}

impl PMatrix {
    /// Build from row-major rows; rejects ragged, empty, or non-finite input.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "expected {} columns, found a row with {}",
                    n,
                    row.len()
                )));
            }
        }
        let data = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let m = Self { data };
        m.validate_finite()?;
        Ok(m)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            data: DMatrix::from_fn(n, n, f),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: DMatrix::zeros(n, n),
        }
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let n = d.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                C64::new(d[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn diag(d: &[C64]) -> Self {
        let n = d.len();
        Self::from_fn(
            n,
            |i, j| if i == j { d[i] } else { C64::new(0.0, 0.0) },
        )
    }

    fn validate_finite(&self) -> Result<()> {
        if self
            .data
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::DimensionMismatch("non-finite matrix entry".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn apply(&self, v: &PVector) -> PVector {
        assert_eq!(self.dim(), v.len(), "apply dimension mismatch");
        PVector {
            data: &self.data * &v.data,
        }
    }

    /// Plain transpose (no conjugation); `||A||_{p->p} = ||A^T||_{q->q}`.
    pub fn transpose(&self) -> Self {
        Self {
            data: self.data.transpose(),
        }
    }

    /// Entrywise conjugation; a norm-preserving symmetry of `M_n^p`.
    pub fn conj(&self) -> Self {
        Self {
            data: self.data.map(|z| z.conj()),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            data: &self.data * c,
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `self + c * identity`.
    pub fn add_scalar(&self, c: C64) -> Self {
        let mut data = self.data.clone();
        for i in 0..self.dim() {
            data[(i, i)] += c;
        }
        Self { data }
    }

    pub fn try_inverse(&self) -> Option<Self> {
        self.data.clone().try_inverse().map(|data| Self { data })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise max-modulus distance to another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        (&self.data - &other.data)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Exact `l^1 -> l^1` operator norm: max column sum of moduli.
    pub fn norm_l1(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|j| (0..n).map(|i| self.data[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Exact `l^inf -> l^inf` operator norm: max row sum of moduli.
    pub fn norm_linf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.data[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_idempotent(&self, tol: f64) -> bool {
        (self * self).max_abs_diff(self) <= tol
    }

    pub fn commutes_with(&self, other: &Self, tol: f64) -> bool {
        (self * other).max_abs_diff(&(other * self)) <= tol
    }

    pub(crate) fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub(crate) fn from_dmatrix(data: DMatrix<C64>) -> Self {
        debug_assert_eq!(data.nrows(), data.ncols());
        Self { data }
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    /// Strict parse of `{"rows": n, "cols": n, "data": [[re, im], ...]}`
    /// (row-major, length `n*n`).
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: MatrixJson =
            serde_json::from_str(text).map_err(|e| Error::MatrixFormat(e.to_string()))?;
        if raw.rows != raw.cols {
            return Err(Error::MatrixFormat(format!(
                "matrix must be square, got {}x{}",
                raw.rows, raw.cols
            )));
        }
        if raw.rows == 0 {
            return Err(Error::MatrixFormat("matrix must have n >= 1".into()));
        }
        if raw.data.len() != raw.rows * raw.cols {
            return Err(Error::MatrixFormat(format!(
                "expected {} entries, got {}",
                raw.rows * raw.cols,
                raw.data.len()
            )));
        }
        let n = raw.rows;
        let m = Self::from_fn(n, |i, j| {
            let [re, im] = raw.data[i * n + j];
            C64::new(re, im)
        });
        m.validate_finite()
            .map_err(|_| Error::MatrixFormat("non-finite entry".into()))?;
        Ok(m)
    }

    pub fn to_json_string(&self) -> String {
        let n = self.dim();
        let data: Vec<[f64; 2]> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let z = self.data[(i, j)];
                [z.re, z.im]
            })
            .collect();
        serde_json::to_string(&MatrixJson {
            rows: n,
            cols: n,
            data,
        })
        .expect("matrix serialization")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &PMatrix {
            type Output = PMatrix;
            fn $method(self, rhs: &PMatrix) -> PMatrix {
                PMatrix {
                    data: &self.data $op &rhs.data,
                }
            }
        }
        impl $trait for PMatrix {
            type Output = PMatrix;
            fn $method(self, rhs: PMatrix) -> PMatrix {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &PMatrix {
    type Output = PMatrix;
    fn neg(self) -> PMatrix {
        PMatrix { data: -&self.data }
    }
}

impl fmt::Debug for PVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, z) in self.data.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for PMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PMatrix {}x{} [", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            write!(f, "  ")?;
            for j in 0..self.dim() {
                let z = self.data[(i, j)];
                write!(f, "{:.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
