//! Dense complex matrices and the spectral routines the criteria rest on.
//!
//! Storage is row-major. Eigen- and singular-value problems are delegated to
//! `nalgebra`; everything else (Kronecker products, traces, distances) is
//! done directly on the row-major buffer.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on the side length of any matrix the toolkit builds.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Relative Frobenius tolerance used when checking Hermiticity.
pub const HERMITIAN_RTOL: f64 = 1e-9;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Thresholds used to turn a spectrum into a numerical rank.
///
/// A singular value σ counts toward the rank when σ > max(atol, rtol·σ_max).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankTolerance {
    rtol: f64,
    atol: f64,
}

impl RankTolerance {
    pub const DEFAULT_RTOL: f64 = 1e-10;
    pub const DEFAULT_ATOL: f64 = 1e-12;

    pub fn new(rtol: f64, atol: f64) -> Result<Self> {
        if !(rtol.is_finite() && rtol >= 0.0) {
            return Err(Error::InvalidValue(format!("rtol must be finite and ≥ 0, got {rtol}")));
        }
        if !(atol.is_finite() && atol >= 0.0) {
            return Err(Error::InvalidValue(format!("atol must be finite and ≥ 0, got {atol}")));
        }
        Ok(Self { rtol, atol })
    }

    pub fn rtol(&self) -> f64 {
        self.rtol
    }

    pub fn atol(&self) -> f64 {
        self.atol
    }

    /// Cutoff below which a value is treated as zero, given the largest value.
    pub fn threshold(&self, largest: f64) -> f64 {
        self.atol.max(self.rtol * largest)
    }

    /// Number of entries of `values` above the cutoff. Signs are ignored.
    pub fn count_above(&self, values: &[f64]) -> usize {
        let largest = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let cut = self.threshold(largest);
        values.iter().filter(|v| v.abs() > cut).count()
    }
}

impl Default for RankTolerance {
    fn default() -> Self {
        Self {
            rtol: Self::DEFAULT_RTOL,
            atol: Self::DEFAULT_ATOL,
        }
    }
}

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        let expected = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Shape(format!("{rows}×{cols} overflows")))?;
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "{rows}×{cols} matrix needs {expected} entries, got {}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidValue(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_vec_unchecked(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        let mut data = Vec::with_capacity(u.len() * v.len());
        for a in u {
            for b in v {
                data.push(a * b.conj());
            }
        }
        Self::from_vec_unchecked(u.len(), v.len(), data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_vec_unchecked(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self::from_vec_unchecked(self.rows, self.cols, data))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self::from_vec_unchecked(self.rows, self.cols, data))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// ‖A − A†‖_F.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// (A + A†)/2. Caller guarantees squareness.
    pub(crate) fn symmetrized(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}×{} vs {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}×{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product with the default size cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_limited(a, b, DEFAULT_MAX_DIM)
}

/// Kronecker product; each side of the result must stay within `max_dim`.
pub fn kron_limited(a: &ComplexMatrix, b: &ComplexMatrix, max_dim: usize) -> Result<ComplexMatrix> {
    let rows = checked_dim(a.rows, b.rows, max_dim)?;
    let cols = checked_dim(a.cols, b.cols, max_dim)?;
    let mut data = Vec::with_capacity(rows * cols);
    for i1 in 0..a.rows {
        for i2 in 0..b.rows {
            for j1 in 0..a.cols {
                let x = a[(i1, j1)];
                data.extend(b.row(i2).iter().map(|y| x * y));
            }
        }
    }
    Ok(ComplexMatrix::from_vec_unchecked(rows, cols, data))
}

fn checked_dim(x: usize, y: usize, max_dim: usize) -> Result<usize> {
    match x.checked_mul(y) {
        Some(d) if d <= max_dim => Ok(d),
        Some(d) => Err(Error::SizeLimit {
            what: "matrix dimension",
            size: d,
            max: max_dim,
        }),
        None => Err(Error::SizeLimit {
            what: "matrix dimension",
            size: usize::MAX,
            max: max_dim,
        }),
    }
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {}×{}",
            a.rows, a.cols
        )));
    }
    let deviation = a.hermitian_deviation();
    let allowed = HERMITIAN_RTOL * a.frobenius_norm();
    if deviation > allowed {
        return Err(Error::Symmetry { deviation, allowed });
    }
    Ok(())
}

/// Real eigenvalues of a Hermitian matrix, in descending order.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    Ok(sym_eigenvalues(&a.symmetrized()))
}

/// Eigenpairs of a Hermitian matrix, in descending eigenvalue order.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<Vec<(f64, Vec<Complex64>)>> {
    check_hermitian(a)?;
    Ok(sym_eigen(&a.symmetrized()))
}

/// Eigenvalues of an already-symmetrized matrix.
pub(crate) fn sym_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    let n = a.rows;
    match n {
        0 => Vec::new(),
        1 => vec![a[(0, 0)].re],
        _ => {
            let mut values: Vec<f64> = SymmetricEigen::new(a.to_nalgebra())
                .eigenvalues
                .iter()
                .copied()
                .collect();
            values.sort_by(|x, y| y.total_cmp(x));
            values
        }
    }
}

pub(crate) fn sym_eigen(a: &ComplexMatrix) -> Vec<(f64, Vec<Complex64>)> {
    let n = a.rows;
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![(a[(0, 0)].re, vec![ONE])];
    }
    let eig = SymmetricEigen::new(a.to_nalgebra());
    let mut pairs: Vec<(f64, Vec<Complex64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &value)| (value, eig.eigenvectors.column(k).iter().copied().collect()))
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    pairs
}

/// Singular values in descending order; there are min(rows, cols) of them.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.rows == 0 || a.cols == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = SVD::new(a.to_nalgebra(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

/// Number of singular values above `max(atol, rtol·σ_max)`.
pub fn numerical_rank(a: &ComplexMatrix, tol: RankTolerance) -> usize {
    tol.count_above(&singular_values(a))
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_same_shape(b)?;
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
