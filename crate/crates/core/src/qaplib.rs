//! QAPLIB instances: parsing, the trace-form objective, and a brute-force
//! oracle for tiny problems.
//!
//! File convention: `n`, then the `n²` entries of the first matrix, then the
//! `n²` entries of the second, all row-major and whitespace separated. The
//! first matrix is read as the flow matrix `F`, the second as the distance
//! matrix `D`. With no linear term the objective `tr(F X D Xᵀ)` is invariant
//! under swapping `F` and `D` together with `X ↦ Xᵀ`, so the optimal value does
//! not depend on the order, but individual permutation values do.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::symmat::{frob_inner, DenseMatrix, SymMatrix};

/// Largest instance accepted without an explicit override.
pub const MAX_N: usize = 40;

/// Largest instance [`brute_force_opt`] will enumerate.
pub const BRUTE_FORCE_MAX_N: usize = 9;

#[derive(Debug, Clone)]
pub struct QapInstance {
    pub name: String,
    pub flow: SymMatrix,
    pub distance: SymMatrix,
    pub linear: DenseMatrix,
    pub known_optimum: Option<f64>,
}

impl QapInstance {
    pub fn new(
        name: impl Into<String>,
        flow: SymMatrix,
        distance: SymMatrix,
        linear: Option<DenseMatrix>,
    ) -> Result<Self> {
        let n = flow.dim();
        if distance.dim() != n {
            return Err(Error::dims(n, distance.dim()));
        }
        let linear = linear.unwrap_or_else(|| DenseMatrix::zeros(n, n));
        if linear.shape() != (n, n) {
            return Err(Error::dims(format!("{n}x{n}"), format!("{:?}", linear.shape())));
        }
        let name = name.into();
        let known_optimum = known_optimum(&name);
        Ok(Self {
            name,
            flow,
            distance,
            linear,
            known_optimum,
        })
    }

    pub fn n(&self) -> usize {
        self.flow.dim()
    }

    /// Serializes back into the QAPLIB text layout (linear term dropped).
    pub fn to_qaplib_string(&self) -> String {
        let n = self.n();
        let mut out = format!("{n}\n");
        for m in [&self.flow, &self.distance] {
            out.push('\n');
            for i in 0..n {
                let row: Vec<String> = (0..n).map(|j| format_entry(m.get(i, j))).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        out
    }
}

fn format_entry(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

pub fn parse_instance(text: &str, name: &str) -> Result<QapInstance> {
    parse_instance_with(text, name, false)
}

/// Parses QAPLIB text; `allow_large` lifts the `n ≤ MAX_N` guard.
pub fn parse_instance_with(text: &str, name: &str, allow_large: bool) -> Result<QapInstance> {
    let err = |message: String| Error::Parse {
        source_name: name.to_string(),
        message,
    };
    let mut tokens = text.split_ascii_whitespace();
    let first = tokens.next().ok_or_else(|| err("empty input".into()))?;
    let n: i64 = first
        .parse()
        .map_err(|_| err(format!("invalid size token {first:?}")))?;
    if n <= 0 {
        return Err(err(format!("instance size must be positive, got {n}")));
    }
    let n = n as usize;
    if n > MAX_N && !allow_large {
        return Err(Error::SizeGuard { n, limit: MAX_N });
    }

    let mut read_matrix = |label: &str| -> Result<DenseMatrix> {
        let mut data = Vec::with_capacity(n * n);
        for k in 0..n * n {
            let tok = tokens.next().ok_or_else(|| {
                err(format!("truncated input: matrix {label} has {k} of {} entries", n * n))
            })?;
            let v: f64 = tok
                .parse()
                .map_err(|_| err(format!("non-numeric token {tok:?} in matrix {label}")))?;
            if !v.is_finite() {
                return Err(err(format!("non-finite token {tok:?} in matrix {label}")));
            }
            data.push(v);
        }
        Ok(DenseMatrix::new(n, n, data).expect("n > 0"))
    };
    let a = read_matrix("A")?;
    let b = read_matrix("B")?;
    if let Some(tok) = tokens.next() {
        return Err(err(format!("unexpected trailing token {tok:?}")));
    }

    let exact_symmetric = |m: DenseMatrix, label: &str| -> Result<SymMatrix> {
        for i in 0..n {
            for j in (i + 1)..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(err(format!("matrix {label} is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(SymMatrix::symmetrize(m))
    };
    let flow = exact_symmetric(a, "A")?;
    let distance = exact_symmetric(b, "B")?;
    QapInstance::new(name, flow, distance, None)
}

/// Reads an instance file; the instance name is the lowercase file stem.
pub fn load_instance(path: &Path, allow_large: bool) -> Result<QapInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_lowercase())
        .unwrap_or_else(|| "instance".to_string());
    parse_instance_with(&text, &name, allow_large)
}

/// Permutation `i ↦ perm[i]` (0-based), i.e. the matrix with `X[i][perm[i]] = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationMatrix {
    perm: Vec<usize>,
}

impl PermutationMatrix {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        if n == 0 {
            return Err(Error::dims("non-empty permutation", 0));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidConfig(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(Self { perm })
    }

    /// From the 1-based listing used by QAPLIB solution files.
    pub fn from_one_based(perm: &[usize]) -> Result<Self> {
        if perm.contains(&0) {
            return Err(Error::InvalidConfig("1-based permutation contains 0".into()));
        }
        Self::new(perm.iter().map(|p| p - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.n();
        let mut x = DenseMatrix::zeros(n, n);
        for (i, &p) in self.perm.iter().enumerate() {
            x.set(i, p, 1.0);
        }
        x
    }

    /// Advances to the next permutation in lexicographic order.
    fn advance(&mut self) -> bool {
        let p = &mut self.perm;
        let Some(i) = (0..p.len().saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            return false;
        };
        let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).expect("pivot exists");
        p.swap(i, j);
        p[i + 1..].reverse();
        true
    }
}

/// `⟨F X D − C, X⟩`.
pub fn qap_objective(inst: &QapInstance, x: &PermutationMatrix) -> Result<f64> {
    let n = inst.n();
    if x.n() != n {
        return Err(Error::dims(n, x.n()));
    }
    let xd = x.to_dense();
    let fxd = inst
        .flow
        .as_dense()
        .matmul(&xd)?
        .matmul(inst.distance.as_dense())?;
    let g = fxd.zip_with(&inst.linear, |a, c| a - c)?;
    frob_inner(&g, &xd)
}

/// Exhaustive minimization over all `n!` permutations. Ties keep the
/// lexicographically first permutation.
pub fn brute_force_opt(inst: &QapInstance) -> Result<(PermutationMatrix, f64)> {
    let n = inst.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::SizeGuard {
            n,
            limit: BRUTE_FORCE_MAX_N,
        });
    }
    let f = inst.flow.as_dense();
    let d = inst.distance.as_dense();
    let c = &inst.linear;
    let value = |p: &[usize]| -> f64 {
        let mut v = 0.0;
        for i in 0..n {
            for j in 0..n {
                v += f.get(i, j) * d.get(p[i], p[j]);
            }
            v -= c.get(i, p[i]);
        }
        v
    };
    let mut cur = PermutationMatrix::identity(n);
    let mut best = cur.clone();
    let mut best_val = value(cur.as_slice());
    while cur.advance() {
        let v = value(cur.as_slice());
        if v < best_val {
            best_val = v;
            best = cur.clone();
        }
    }
    Ok((best, best_val))
}

/// Optimal (or best known) objective values of the bundled QAPLIB instances.
const KNOWN_OPTIMA: &[(&str, f64)] = &[
    ("chr12a", 9552.0),
    ("chr12b", 9742.0),
    ("chr12c", 11156.0),
    ("chr15a", 9896.0),
    ("chr15b", 7990.0),
    ("chr15c", 9504.0),
    ("chr18a", 11098.0),
    ("chr18b", 1534.0),
    ("chr20a", 2192.0),
    ("chr20b", 2298.0),
    ("chr20c", 14142.0),
    ("chr22a", 6156.0),
    ("chr22b", 6194.0),
    ("chr25a", 3796.0),
    ("els19", 17212548.0),
    ("had12", 1652.0),
    ("had14", 2724.0),
    ("had16", 3720.0),
    ("had18", 5358.0),
    ("had20", 6922.0),
    ("kra30a", 88900.0),
    ("kra30b", 91420.0),
    ("kra32", 88900.0),
    ("nug12", 578.0),
    ("nug14", 1014.0),
    ("nug15", 1150.0),
    ("nug16a", 1610.0),
    ("nug16b", 1240.0),
    ("nug17", 1732.0),
    ("nug18", 1930.0),
    ("nug20", 2570.0),
    ("nug21", 2438.0),
    ("nug22", 3596.0),
    ("nug24", 3488.0),
    ("nug25", 3744.0),
    ("nug27", 5234.0),
    ("nug28", 5166.0),
    ("nug30", 6124.0),
    ("rou12", 235528.0),
    ("rou15", 354210.0),
    ("rou20", 725522.0),
    ("scr12", 31410.0),
    ("scr15", 51140.0),
    ("scr20", 110030.0),
    ("tai12a", 224416.0),
    ("tai15a", 388214.0),
    ("tai17a", 491812.0),
    ("tai20a", 703482.0),
    ("tai25a", 1167256.0),
    ("tai30a", 1818146.0),
    ("tai35a", 2422002.0),
    ("tho30", 149936.0),
];

/// Registry lookup, case-insensitive. Used by reporting and tests only.
pub fn known_optimum(name: &str) -> Option<f64> {
    let key = name.to_ascii_lowercase();
    KNOWN_OPTIMA
        .iter()
        .find(|(k, _)| *k == key)
        .map(|&(_, v)| v)
}
