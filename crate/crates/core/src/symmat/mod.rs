//! Dense matrix kernel used by the relaxation: row-major storage, trace inner
//! products, Kronecker and `vec` utilities, symmetric eigendecomposition and
//! the projection onto the positive semidefinite cone.

mod eigen;
mod jacobi;

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

pub use eigen::{eigenvalues, psd_project, sym_eig, EigenDecomposition};
pub use jacobi::sym_eig_jacobi;

/// Relative asymmetry accepted (and then averaged away) by [`SymMatrix::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dims("positive shape", format!("{rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::dims(rows * cols, data.len()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix shape must be positive");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::dims(c, bad.len()));
        }
        Self::new(r, c, rows.concat())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dims(
                format!("inner dimension {}", self.cols),
                format!("{}", other.rows),
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        gemm(
            self.rows,
            self.cols,
            other.cols,
            (&self.data, self.cols as isize, 1),
            (&other.data, other.cols as isize, 1),
            &mut out.data,
        );
        Ok(out)
    }

    /// `selfᵀ · other` without materializing the transpose.
    pub fn tr_matmul(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::dims(
                format!("inner dimension {}", self.rows),
                format!("{}", other.rows),
            ));
        }
        let mut out = Self::zeros(self.cols, other.cols);
        gemm(
            self.cols,
            self.rows,
            other.cols,
            (&self.data, 1, self.cols as isize),
            (&other.data, other.cols as isize, 1),
            &mut out.data,
        );
        Ok(out)
    }

    /// `self · otherᵀ` without materializing the transpose.
    pub fn matmul_tr(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::dims(
                format!("inner dimension {}", self.cols),
                format!("{}", other.cols),
            ));
        }
        let mut out = Self::zeros(self.rows, other.rows);
        gemm(
            self.rows,
            self.cols,
            other.rows,
            (&self.data, self.cols as isize, 1),
            (&other.data, 1, other.cols as isize),
            &mut out.data,
        );
        Ok(out)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::dims(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(())
    }
}

/// `out = a · b` for an `m×k` and a `k×n` operand given as (data, row stride, col stride).
fn gemm(m: usize, k: usize, n: usize, a: (&[f64], isize, isize), b: (&[f64], isize, isize), out: &mut [f64]) {
    debug_assert_eq!(out.len(), m * n);
    // SAFETY: the strides describe views lying inside the provided slices, and
    // `out` is an exclusively borrowed m×n row-major buffer.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.0.as_ptr(),
            a.1,
            a.2,
            b.0.as_ptr(),
            b.1,
            b.2,
            0.0,
            out.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Symmetric matrix in full dense storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DenseMatrix);

impl SymMatrix {
    /// Validates squareness and symmetry; asymmetry up to
    /// `SYMMETRY_TOL · max|entry|` is averaged out, anything larger is rejected.
    pub fn new(m: DenseMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::dims("square matrix", format!("{}x{}", m.rows, m.cols)));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite { context: "symmetric matrix construction" });
        }
        let n = m.rows;
        let mut asym: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                asym = asym.max((m.get(i, j) - m.get(j, i)).abs());
            }
        }
        if asym > SYMMETRY_TOL * m.max_abs() {
            return Err(Error::Asymmetric { asymmetry: asym });
        }
        Ok(Self::symmetrize(m))
    }

    /// Averages `m` with its transpose. Panics if `m` is not square.
    pub fn symmetrize(mut m: DenseMatrix) -> Self {
        assert_eq!(m.rows, m.cols, "symmetrize needs a square matrix");
        let n = m.rows;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (m.data[i * n + j] + m.data[j * n + i]);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        Self(m)
    }

    /// Builds from the upper triangle of `f` (only `i <= j` is queried).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        Self(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DenseMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DenseMatrix::identity(n))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.0.set(i, i, v);
        }
        m
    }

    /// The unit matrix `E00` with a single one in the top-left corner.
    pub fn e00(n: usize) -> Self {
        let mut m = Self::zeros(n);
        m.0.set(0, 0, 1.0);
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_dense(self) -> DenseMatrix {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn frob_norm(&self) -> f64 {
        self.0.frob_norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.scaled(s))
    }

    /// Entrywise map; `f` must send symmetric pairs to symmetric pairs,
    /// which holds for any function of `(i, j, value)` symmetric in `(i, j)`.
    pub(crate) fn map_indexed(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Self {
        let n = self.dim();
        Self::from_fn(n, |i, j| f(i, j, self.get(i, j)))
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Result<Self> {
        self.0.zip_with(&other.0, |a, b| a + s * b).map(Self)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eigenvalues(self)?[0])
    }
}

impl AsRef<DenseMatrix> for DenseMatrix {
    fn as_ref(&self) -> &DenseMatrix {
        self
    }
}

impl AsRef<DenseMatrix> for SymMatrix {
    fn as_ref(&self) -> &DenseMatrix {
        &self.0
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;

    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(self.0.zip_with(&rhs.0, |a, b| a + b).expect("dimension mismatch in add"))
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;

    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(self.0.zip_with(&rhs.0, |a, b| a - b).expect("dimension mismatch in sub"))
    }
}

impl Mul<f64> for &SymMatrix {
    type Output = SymMatrix;

    fn mul(self, rhs: f64) -> SymMatrix {
        self.scaled(rhs)
    }
}

/// Trace inner product `⟨A, B⟩ = Tr(AᵀB)`.
pub fn frob_inner<A: AsRef<DenseMatrix>, B: AsRef<DenseMatrix>>(a: A, b: B) -> Result<f64> {
    let (a, b) = (a.as_ref(), b.as_ref());
    a.check_same_shape(b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum())
}

/// Kronecker product; block `(i, j)` of the result is `a[i][j] · b`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (m, n) = a.shape();
    let (p, q) = b.shape();
    let mut out = DenseMatrix::zeros(m * p, n * q);
    let cols = n * q;
    for i in 0..m {
        for j in 0..n {
            let aij = a.get(i, j);
            if aij == 0.0 {
                continue;
            }
            for k in 0..p {
                let dst = (i * p + k) * cols + j * q;
                for (o, &bv) in out.data[dst..dst + q].iter_mut().zip(b.row(k)) {
                    *o = aij * bv;
                }
            }
        }
    }
    out
}

/// Column-major stacking of `c`.
pub fn vec(c: &DenseMatrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(c.rows * c.cols);
    for j in 0..c.cols {
        for i in 0..c.rows {
            out.push(c.get(i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn frob_inner_examples() {
        let i2 = DenseMatrix::identity(2);
        assert_eq!(frob_inner(&i2, &i2).unwrap(), 2.0);
        let a = m(&[&[1.0, 2.0], &[2.0, 3.0]]);
        let b = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(frob_inner(&a, &b).unwrap(), 4.0);
        assert!((frob_inner(&a, &a).unwrap() - a.frob_norm().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn frob_inner_shape_mismatch() {
        let err = frob_inner(DenseMatrix::zeros(2, 2), DenseMatrix::zeros(2, 3)).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
    }

    #[test]
    fn kron_identity_and_shape() {
        assert_eq!(kron(&DenseMatrix::identity(2), &DenseMatrix::identity(2)), DenseMatrix::identity(4));
        let k = kron(&DenseMatrix::zeros(3, 2), &DenseMatrix::zeros(4, 5));
        assert_eq!(k.shape(), (12, 10));
    }

    #[test]
    fn vec_is_column_major() {
        assert_eq!(vec(&DenseMatrix::identity(2)), vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(vec(&m(&[&[1.0, 2.0], &[3.0, 4.0]])), vec![1.0, 3.0, 2.0, 4.0]);
    }

    #[test]
    fn symmetric_construction() {
        assert!(matches!(
            SymMatrix::new(m(&[&[1.0, 2.0], &[2.5, 1.0]])),
            Err(Error::Asymmetric { .. })
        ));
        let s = SymMatrix::new(m(&[&[1.0, 2.0], &[2.0 + 1e-15, 1.0]])).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
        assert!(SymMatrix::new(DenseMatrix::zeros(2, 3)).is_err());
        assert!(DenseMatrix::new(0, 0, vec![]).is_err());
    }

    #[test]
    fn transposed_products_agree() {
        let a = DenseMatrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64 - 5.0);
        let b = DenseMatrix::from_fn(3, 2, |i, j| (i as f64) * 0.5 - j as f64);
        let direct = a.transpose().matmul(&b).unwrap();
        assert_eq!(a.tr_matmul(&b).unwrap(), direct);
        let c = DenseMatrix::from_fn(2, 4, |i, j| (i + j) as f64);
        assert_eq!(a.matmul_tr(&c).unwrap(), a.matmul(&c.transpose()).unwrap());
    }
}
