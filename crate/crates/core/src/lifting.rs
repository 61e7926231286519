//! Data of the facially reduced relaxation: the lifted cost `L_Q`, the
//! minimal-face basis `V̂`, and the gangster index set `J`.
//!
//! Lifted coordinates: index 0 is the homogenizing coordinate and `X[i][j]`
//! sits at `1 + j·n + i`, i.e. column-major like [`crate::symmat::vec`].

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::qaplib::{PermutationMatrix, QapInstance};
use crate::symmat::{kron, vec, DenseMatrix, SymMatrix};

static LIFTINGS_BUILT: AtomicUsize = AtomicUsize::new(0);

/// Number of [`Lifting::build`] calls in this process.
pub fn lifting_build_count() -> usize {
    LIFTINGS_BUILT.load(Ordering::SeqCst)
}

#[inline]
pub fn lifted_index(n: usize, row: usize, col: usize) -> usize {
    1 + col * n + row
}

/// Gangster index set, stored both as canonical `i ≤ j` pairs and as a
/// symmetric dense mask.
#[derive(Debug, Clone)]
pub struct GangsterSet {
    dim: usize,
    pairs: Vec<(usize, usize)>,
    mask: Vec<bool>,
}

impl GangsterSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// True for `(i, j)` or its mirror in `J`.
    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.dim + j]
    }

    pub(crate) fn mask(&self) -> &[bool] {
        &self.mask
    }
}

/// `J = {(0,0)}` ∪ off-diagonal entries of the diagonal blocks (two entries of
/// one column of `X`) ∪ diagonal entries of the off-diagonal blocks (two
/// entries of one row of `X`).
pub fn gangster_indices(n: usize) -> Result<GangsterSet> {
    if n < 2 {
        return Err(Error::dims("n >= 2", n));
    }
    let dim = n * n + 1;
    let mut mask = vec![false; dim * dim];
    let mut mark = |a: usize, b: usize| {
        mask[a * dim + b] = true;
        mask[b * dim + a] = true;
    };
    mark(0, 0);
    for col in 0..n {
        for i in 0..n {
            for k in (i + 1)..n {
                mark(lifted_index(n, i, col), lifted_index(n, k, col));
            }
        }
    }
    for row in 0..n {
        for j in 0..n {
            for l in (j + 1)..n {
                mark(lifted_index(n, row, j), lifted_index(n, row, l));
            }
        }
    }
    let mut pairs = Vec::new();
    for i in 0..dim {
        for j in i..dim {
            if mask[i * dim + j] {
                pairs.push((i, j));
            }
        }
    }
    Ok(GangsterSet { dim, pairs, mask })
}

fn check_gangster_dim(y: &SymMatrix, j: &GangsterSet) -> Result<()> {
    if y.dim() != j.dim {
        return Err(Error::dims(j.dim, y.dim()));
    }
    Ok(())
}

/// `G_J(Y)`: keep the entries indexed by `J`, zero the rest.
pub fn gangster_apply(y: &SymMatrix, j: &GangsterSet) -> Result<SymMatrix> {
    check_gangster_dim(y, j)?;
    Ok(y.map_indexed(|a, b, v| if j.contains(a, b) { v } else { 0.0 }))
}

/// `G_{J^C}(Y)`: zero on `J`, identity elsewhere.
pub fn gangster_complement_apply(y: &SymMatrix, j: &GangsterSet) -> Result<SymMatrix> {
    check_gangster_dim(y, j)?;
    Ok(y.map_indexed(|a, b, v| if j.contains(a, b) { 0.0 } else { v }))
}

/// `L_Q = [[0, −vec(C)ᵀ/2], [−vec(C)/2, D ⊗ F]]`.
pub fn build_lq(inst: &QapInstance) -> SymMatrix {
    let n = inst.n();
    let big = n * n + 1;
    let df = kron(inst.distance.as_dense(), inst.flow.as_dense());
    let c = vec(&inst.linear);
    SymMatrix::from_fn(big, |i, j| match (i, j) {
        (0, 0) => 0.0,
        (0, j) => -0.5 * c[j - 1],
        (i, j) => df.get(i - 1, j - 1),
    })
}

/// Orthonormal basis of `{x ∈ ℝⁿ : eᵀx = 0}` from modified Gram–Schmidt on
/// the columns of `[I_{n−1}; −eᵀ]`.
fn sum_zero_basis(n: usize) -> DenseMatrix {
    let mut cols: Vec<Vec<f64>> = (0..n - 1)
        .map(|j| {
            let mut c = vec![0.0; n];
            c[j] = 1.0;
            c[n - 1] = -1.0;
            c
        })
        .collect();
    for j in 0..cols.len() {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let q = &done[k];
            let c = &mut rest[0];
            let proj: f64 = q.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
            for (ci, qi) in c.iter_mut().zip(q) {
                *ci -= proj * qi;
            }
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut cols[j] {
            *v /= norm;
        }
    }
    DenseMatrix::from_fn(n, n - 1, |i, j| cols[j][i])
}

/// `V̂ = [[1/√2, 0], [(e⊗e)/(n√2), Ṽ⊗Ṽ]]`, an orthonormal basis of the
/// range of the minimal-face matrix.
pub fn build_vhat(n: usize) -> Result<DenseMatrix> {
    if n < 2 {
        return Err(Error::dims("n >= 2", n));
    }
    let vt = sum_zero_basis(n);
    let kv = kron(&vt, &vt);
    let big = n * n + 1;
    let small = (n - 1) * (n - 1) + 1;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(DenseMatrix::from_fn(big, small, |i, j| match (i, j) {
        (0, 0) => s,
        (0, _) => 0.0,
        (_, 0) => s / n as f64,
        (i, j) => kv.get(i - 1, j - 1),
    }))
}

/// Rank-one lift `(1; vec X)(1; vec X)ᵀ`.
pub fn lift_permutation(x: &PermutationMatrix) -> SymMatrix {
    let mut y = vec![1.0];
    y.extend(vec(&x.to_dense()));
    SymMatrix::from_fn(y.len(), |i, j| y[i] * y[j])
}

/// Relaxation data shared by both engines; immutable once built.
#[derive(Debug, Clone)]
pub struct Lifting {
    n: usize,
    lq: SymMatrix,
    vhat: DenseMatrix,
    gangster: GangsterSet,
}

impl Lifting {
    pub fn build(inst: &QapInstance) -> Result<Self> {
        let n = inst.n();
        let vhat = build_vhat(n)?;
        let gangster = gangster_indices(n)?;
        LIFTINGS_BUILT.fetch_add(1, Ordering::SeqCst);
        Ok(Self {
            n,
            lq: build_lq(inst),
            vhat,
            gangster,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn big_dim(&self) -> usize {
        self.n * self.n + 1
    }

    pub fn small_dim(&self) -> usize {
        (self.n - 1) * (self.n - 1) + 1
    }

    pub fn lq(&self) -> &SymMatrix {
        &self.lq
    }

    pub fn vhat(&self) -> &DenseMatrix {
        &self.vhat
    }

    pub fn gangster(&self) -> &GangsterSet {
        &self.gangster
    }

    /// `V̂ᵀ A V̂`.
    pub fn compress(&self, a: &SymMatrix) -> Result<SymMatrix> {
        if a.dim() != self.big_dim() {
            return Err(Error::dims(self.big_dim(), a.dim()));
        }
        let av = a.as_dense().matmul(&self.vhat)?;
        Ok(SymMatrix::symmetrize(self.vhat.tr_matmul(&av)?))
    }

    /// `V̂ R V̂ᵀ`.
    pub fn expand(&self, r: &SymMatrix) -> Result<SymMatrix> {
        if r.dim() != self.small_dim() {
            return Err(Error::dims(self.small_dim(), r.dim()));
        }
        let vr = self.vhat.matmul(r.as_dense())?;
        Ok(SymMatrix::symmetrize(vr.matmul_tr(&self.vhat)?))
    }
}
