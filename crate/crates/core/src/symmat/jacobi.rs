use super::eigen::EigenDecomposition;
use super::{DenseMatrix, SymMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver.
///
/// A rotation is skipped once `|a_pq| ≤ ε·√|a_pp·a_qq|`, and sweeps stop when
/// one passes without rotating. The test is relative to the diagonal, so small
/// eigenvalues of a positive definite input keep their relative accuracy.
/// Slower than [`super::sym_eig`] by a sizeable constant but shares no code
/// with it, which makes it the reference in tests.
pub fn sym_eig_jacobi(s: &SymMatrix) -> Result<EigenDecomposition> {
    let n = s.dim();
    if !s.is_finite() {
        return Err(Error::NonFinite { context: "jacobi input" });
    }
    let mut a = s.as_dense().clone();
    let mut v = DenseMatrix::identity(n);

    let mut sweeps = 0;
    loop {
        sweeps += 1;
        if sweeps > MAX_SWEEPS {
            return Err(Error::NoConvergence { iterations: sweeps });
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                if apq.abs() <= f64::EPSILON * (app * aqq).abs().sqrt() || apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in (0..n).filter(|&k| k != p && k != q) {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    let np = c * akp - sn * akq;
                    let nq = sn * akp + c * akq;
                    a.set(k, p, np);
                    a.set(p, k, np);
                    a.set(k, q, nq);
                    a.set(q, k, nq);
                }
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - sn * vkq);
                    v.set(k, q, sn * vkp + c * vkq);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)));
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let basis = DenseMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    Ok(EigenDecomposition { basis, values })
}
