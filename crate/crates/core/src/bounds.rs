//! Quantities read off an iterate: the relaxation objective, lower bounds on
//! the QAP optimum built from the dual matrix `Z`, and KKT residuals.
//!
//! Both bounds rest on the fact that every lifted permutation `Y` has
//! `G_J(Y) = E00`, entries in `{0, 1}` and `tr Y = n + 1`, and lies in the
//! face `V̂ S₊ V̂ᵀ`.

use crate::admm::IterateState;
use crate::error::{Error, Result};
use crate::lifting::{gangster_apply, gangster_complement_apply, Lifting};
use crate::symmat::{frob_inner, DenseMatrix, SymMatrix};

/// The five KKT residuals in order: complementarity, gangster feasibility,
/// dual support, `R ⪰ 0`, `−V̂ᵀZV̂ ⪰ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals(pub [f64; 5]);

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub primal_obj: f64,
    pub certified_lb: f64,
    pub box_lb: f64,
    /// Larger of the two bounds; this is what traces report.
    pub lb: f64,
    pub lambda_min_w: f64,
    pub kkt: KktResiduals,
}

/// `⟨L_Q, Y⟩`.
pub fn primal_objective(lift: &Lifting, y: &SymMatrix) -> Result<f64> {
    frob_inner(lift.lq(), y)
}

fn check_z(lift: &Lifting, z: &SymMatrix) -> Result<()> {
    if z.dim() != lift.big_dim() {
        return Err(Error::dims(lift.big_dim(), z.dim()));
    }
    Ok(())
}

fn trace_cap(lift: &Lifting) -> f64 {
    (lift.n() + 1) as f64
}

/// Lagrangian bound after repairing the support of `L_Q + Z`:
/// `A = −G_J(L_Q + Z)`, `W = V̂ᵀ(L_Q + A)V̂`,
/// `LB = −A₀₀ + (n+1)·min(0, λ_min(W))`. Returns `(LB, λ_min(W))`.
pub fn certified_lower_bound(lift: &Lifting, z: &SymMatrix) -> Result<(f64, f64)> {
    check_z(lift, z)?;
    let lqz = lift.lq() + z;
    let a = gangster_apply(&lqz, lift.gangster())?.scaled(-1.0);
    let w = lift.compress(&(lift.lq() + &a))?;
    let lam = w.min_eigenvalue()?;
    Ok((-a.get(0, 0) + trace_cap(lift) * lam.min(0.0), lam))
}

/// Lagrangian bound that also uses `0 ≤ Y ≤ 1` off the gangster set:
/// `LB = (L_Q+Z)₀₀ + Σ_{J^C} min(0, (L_Q+Z)ᵢⱼ) + (n+1)·min(0, λ_min(−V̂ᵀZV̂))`,
/// the sum running over both triangles. Returns `(LB, λ_min(−V̂ᵀZV̂))`.
pub fn box_lower_bound(lift: &Lifting, z: &SymMatrix) -> Result<(f64, f64)> {
    check_z(lift, z)?;
    let lqz = lift.lq() + z;
    let off: f64 = lqz
        .as_slice()
        .iter()
        .zip(lift.gangster().mask())
        .filter(|(_, &in_j)| !in_j)
        .map(|(&v, _)| v.min(0.0))
        .sum();
    let lam = lift.compress(z)?.scaled(-1.0).min_eigenvalue()?;
    Ok((lqz.get(0, 0) + off + trace_cap(lift) * lam.min(0.0), lam))
}

/// `max` of [`certified_lower_bound`] and [`box_lower_bound`].
pub fn best_lower_bound(lift: &Lifting, z: &SymMatrix) -> Result<f64> {
    let (a, _) = certified_lower_bound(lift, z)?;
    let (b, _) = box_lower_bound(lift, z)?;
    Ok(a.max(b))
}

pub fn kkt_residuals(lift: &Lifting, r: &SymMatrix, z: &SymMatrix, mu: f64) -> Result<KktResiduals> {
    check_z(lift, z)?;
    if r.dim() != lift.small_dim() {
        return Err(Error::dims(lift.small_dim(), r.dim()));
    }
    let neg_w = lift.compress(z)?.scaled(-1.0);
    let prod = neg_w.as_dense().matmul(r.as_dense())?;
    let target = DenseMatrix::identity(r.dim()).scaled(mu);
    let res1 = prod.zip_with(&target, |a, b| a - b)?.frob_norm();
    let g = gangster_apply(&lift.expand(r)?, lift.gangster())?;
    let res2 = (&g - &SymMatrix::e00(lift.big_dim())).frob_norm();
    let res3 = gangster_complement_apply(&(lift.lq() + z), lift.gangster())?.frob_norm();
    let res4 = (-r.min_eigenvalue()?).max(0.0);
    let res5 = (-neg_w.min_eigenvalue()?).max(0.0);
    Ok(KktResiduals([res1, res2, res3, res4, res5]))
}

pub fn bound_report(lift: &Lifting, state: &IterateState) -> Result<BoundReport> {
    let (certified_lb, lambda_min_w) = certified_lower_bound(lift, &state.z)?;
    let (box_lb, _) = box_lower_bound(lift, &state.z)?;
    Ok(BoundReport {
        primal_obj: primal_objective(lift, &state.y)?,
        certified_lb,
        box_lb,
        lb: certified_lb.max(box_lb),
        lambda_min_w,
        kkt: kkt_residuals(lift, &state.r, &state.z, state.mu)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qaplib::{parse_instance, qap_objective, PermutationMatrix};

    fn small() -> Lifting {
        let inst = parse_instance("3\n0 1 2\n1 0 3\n2 3 0\n0 5 1\n5 0 2\n1 2 0", "t").unwrap();
        Lifting::build(&inst).unwrap()
    }

    #[test]
    fn primal_objective_examples() {
        let lift = small();
        assert_eq!(primal_objective(&lift, &SymMatrix::e00(10)).unwrap(), 0.0);
        let inst = parse_instance("3\n0 1 2\n1 0 3\n2 3 0\n0 5 1\n5 0 2\n1 2 0", "t").unwrap();
        let x = PermutationMatrix::new(vec![1, 2, 0]).unwrap();
        let y = crate::lifting::lift_permutation(&x);
        let got = primal_objective(&lift, &y).unwrap();
        assert!((got - qap_objective(&inst, &x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn bound_on_dual_feasible_z_is_z00() {
        let inst = parse_instance("3\n0 0 0\n0 0 0\n0 0 0\n0 5 1\n5 0 2\n1 2 0", "zero").unwrap();
        let lift = Lifting::build(&inst).unwrap();
        let z = SymMatrix::e00(10).scaled(-2.5);
        let (lb, lam) = certified_lower_bound(&lift, &z).unwrap();
        assert!(lam >= -1e-12);
        assert!((lb + 2.5).abs() < 1e-12);
        let (bl, _) = box_lower_bound(&lift, &z).unwrap();
        assert!((bl + 2.5).abs() < 1e-12);
        let k = kkt_residuals(&lift, &SymMatrix::zeros(lift.small_dim()), &z, 0.0).unwrap();
        assert!(k.0[2] == 0.0 && k.0[4] == 0.0);
    }

    #[test]
    fn kkt_negative_identity() {
        let lift = small();
        let r = SymMatrix::identity(lift.small_dim()).scaled(-1.0);
        let z = SymMatrix::zeros(lift.big_dim());
        let k = kkt_residuals(&lift, &r, &z, 0.0).unwrap();
        assert!((k.0[3] - 1.0).abs() < 1e-12);
    }
}
