//! Symmetric eigensolver: Householder reduction to tridiagonal form followed
//! by the implicit QL iteration (the EISPACK `tred2`/`tql2` pair).
//!
//! The working basis is kept column-major so that both the reduction and the
//! QL plane rotations sweep contiguous memory.

use super::{DenseMatrix, SymMatrix};
use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 60;

/// `source = basis · diag(values) · basisᵀ` with `values` ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub basis: DenseMatrix,
    pub values: Vec<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `P · diag(f(λ)) · Pᵀ`. Columns where `f` vanishes are skipped.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.dim();
        let weights: Vec<(usize, f64)> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &l)| (i, f(l)))
            .filter(|&(_, w)| w != 0.0)
            .collect();
        if weights.is_empty() {
            return SymMatrix::zeros(n);
        }
        let k = weights.len();
        let mut left = DenseMatrix::zeros(n, k);
        let mut right = DenseMatrix::zeros(n, k);
        for r in 0..n {
            for (c, &(col, w)) in weights.iter().enumerate() {
                let p = self.basis.get(r, col);
                right.set(r, c, p);
                left.set(r, c, p * w);
            }
        }
        SymMatrix::symmetrize(left.matmul_tr(&right).expect("shapes agree"))
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map_spectrum(|l| l)
    }
}

/// Full spectral decomposition with ascending eigenvalues.
pub fn sym_eig(s: &SymMatrix) -> Result<EigenDecomposition> {
    let n = s.dim();
    if !s.is_finite() {
        return Err(Error::NonFinite { context: "sym_eig input" });
    }
    // Column-major copy; identical to row-major because `s` is symmetric.
    let mut v = s.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, &mut v, &mut d, &mut e, true);
    tridiagonal_ql(n, &mut d, &mut e, Some(&mut v))?;
    // `v` holds the eigenvectors column-major, i.e. row-major Pᵀ.
    let basis = DenseMatrix::new(n, n, v).expect("square buffer").transpose();
    Ok(EigenDecomposition { basis, values: d })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(s: &SymMatrix) -> Result<Vec<f64>> {
    let n = s.dim();
    if !s.is_finite() {
        return Err(Error::NonFinite { context: "eigenvalues input" });
    }
    let mut v = s.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, &mut v, &mut d, &mut e, false);
    tridiagonal_ql(n, &mut d, &mut e, None)?;
    Ok(d)
}

/// Orthogonal projection onto the positive semidefinite cone: `P·diag(max(λ,0))·Pᵀ`.
pub fn psd_project(s: &SymMatrix) -> Result<SymMatrix> {
    Ok(sym_eig(s)?.map_spectrum(|l| l.max(0.0)))
}

#[inline(always)]
fn at(n: usize, row: usize, col: usize) -> usize {
    col * n + row
}

/// Householder reduction. On exit `d` is the diagonal and `e[1..]` the
/// subdiagonal of the tridiagonal matrix; with `accumulate` the orthogonal
/// transformation overwrites `v`.
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], accumulate: bool) {
    for j in 0..n {
        d[j] = v[at(n, n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(n, i - 1, j)];
                v[at(n, i, j)] = 0.0;
                v[at(n, j, i)] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in &mut e[..i] {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(n, j, i)] = f;
                g = e[j] + v[at(n, j, j)] * f;
                let col = &v[at(n, 0, j)..at(n, 0, j) + n];
                for k in (j + 1)..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let base = at(n, 0, j);
                let col = &mut v[base..base + n];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = col[i - 1];
                col[i] = 0.0;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for j in 0..n {
            d[j] = v[at(n, j, j)];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n.saturating_sub(1) {
        v[at(n, n - 1, i)] = v[at(n, i, i)];
        v[at(n, i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            let next = at(n, 0, i + 1);
            for k in 0..=i {
                d[k] = v[next + k] / h;
            }
            for j in 0..=i {
                let cj = at(n, 0, j);
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[next + k] * v[cj + k];
                }
                for k in 0..=i {
                    v[cj + k] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(n, k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n, n - 1, j)];
        v[at(n, n - 1, j)] = 0.0;
    }
    v[at(n, n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal `(d, e)`; eigenvalues are returned sorted
/// ascending in `d` with the matching columns of `v` permuted alongside.
fn tridiagonal_ql(n: usize, d: &mut [f64], e: &mut [f64], mut v: Option<&mut [f64]>) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n-1] == 0 guarantees m < n.
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence { iterations: iter });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[(l + 2)..n] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        let (lo, hi) = v.split_at_mut(at(n, 0, i + 1));
                        let col_i = &mut lo[at(n, 0, i)..];
                        let col_i1 = &mut hi[..n];
                        for (a, b) in col_i.iter_mut().zip(col_i1.iter_mut()) {
                            let hb = *b;
                            *b = s * *a + c * hb;
                            *a = c * *a - s * hb;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { context: "tridiagonal QL" });
    }

    // Selection sort keeps the permutation of basis columns explicit.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d.swap(i, k);
            if let Some(v) = v.as_deref_mut() {
                for row in 0..n {
                    v.swap(at(n, row, i), at(n, row, k));
                }
            }
        }
    }
    Ok(())
}
