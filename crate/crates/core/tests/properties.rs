mod common;

use cadmm_core::admm::{update_r_standard, update_y, update_z};
use cadmm_core::bounds::{box_lower_bound, certified_lower_bound, primal_objective};
use cadmm_core::centering::update_r_centering;
use cadmm_core::lifting::{gangster_apply, gangster_complement_apply, lift_permutation};
use cadmm_core::qaplib::{qap_objective, PermutationMatrix};
use cadmm_core::symmat::{frob_inner, kron, psd_project, sym_eig, sym_eig_jacobi, vec};
use cadmm_core::{DenseMatrix, Lifting, SymMatrix};
use common::{random_instance, random_instance_with_linear, random_sym, rng};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn rel(a: f64, scale: f64) -> f64 {
    a / (1.0 + scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigensolvers_agree_and_reconstruct(seed in any::<u64>(), n in 1usize..24) {
        let mut r = rng(seed);
        let s = random_sym(&mut r, n, 10.0);
        let a = sym_eig(&s).unwrap();
        let b = sym_eig_jacobi(&s).unwrap();
        let norm = s.frob_norm();
        prop_assert!(rel((&a.reconstruct() - &s).frob_norm(), norm) <= 1e-9);
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + norm));
        }
        prop_assert!(a.values.windows(2).all(|w| w[0] <= w[1]));
        let gram = a.basis.tr_matmul(&a.basis).unwrap();
        let err = gram.zip_with(&DenseMatrix::identity(n), |x, y| x - y).unwrap().frob_norm();
        prop_assert!(err <= 1e-10);
    }

    #[test]
    fn psd_projection_moreau(seed in any::<u64>(), n in 1usize..16) {
        let mut r = rng(seed);
        let s = random_sym(&mut r, n, 5.0);
        let p = psd_project(&s).unwrap();
        let m = psd_project(&s.scaled(-1.0)).unwrap();
        let norm = s.frob_norm();
        prop_assert!(rel((&(&p - &m) - &s).frob_norm(), norm) <= 1e-9);
        prop_assert!(frob_inner(&p, &m).unwrap().abs() <= 1e-9 * (1.0 + norm * norm));
        prop_assert!(p.min_eigenvalue().unwrap() >= -1e-9 * (1.0 + norm));
        prop_assert!(rel((&psd_project(&p).unwrap() - &p).frob_norm(), norm) <= 1e-9);
    }

    #[test]
    fn kron_vec_identity(seed in any::<u64>(), m in 1usize..5, n in 1usize..5, p in 1usize..5) {
        let mut r = rng(seed);
        let a = DenseMatrix::from_fn(m, n, |_, _| r.gen_range(-2.0..2.0));
        let x = DenseMatrix::from_fn(n, p, |_, _| r.gen_range(-2.0..2.0));
        let b = DenseMatrix::from_fn(p, m, |_, _| r.gen_range(-2.0..2.0));
        let lhs = vec(&a.matmul(&x).unwrap().matmul(&b).unwrap());
        let k = kron(&b.transpose(), &a);
        let vx = vec(&x);
        for (i, l) in lhs.iter().enumerate() {
            let rhs: f64 = k.row(i).iter().zip(&vx).map(|(u, v)| u * v).sum();
            prop_assert!((l - rhs).abs() <= 1e-12 * (1.0 + l.abs()));
        }
    }

    #[test]
    fn gangster_is_self_adjoint_projection(seed in any::<u64>(), n in 2usize..6) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, n);
        let lift = Lifting::build(&inst).unwrap();
        let j = lift.gangster();
        let a = random_sym(&mut r, lift.big_dim(), 3.0);
        let b = random_sym(&mut r, lift.big_dim(), 3.0);
        let ga = gangster_apply(&a, j).unwrap();
        let lhs = frob_inner(&ga, &b).unwrap();
        let rhs = frob_inner(&a, &gangster_apply(&b, j).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        prop_assert_eq!(gangster_apply(&ga, j).unwrap(), ga.clone());
        let sum = &ga + &gangster_complement_apply(&a, j).unwrap();
        prop_assert_eq!(sum, a);
    }

    #[test]
    fn lifted_permutations_match_objective_and_face(seed in any::<u64>(), n in 2usize..7) {
        let mut r = rng(seed);
        let inst = random_instance_with_linear(&mut r, n);
        let lift = Lifting::build(&inst).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let x = PermutationMatrix::new(perm).unwrap();
        let y = lift_permutation(&x);
        let obj = qap_objective(&inst, &x).unwrap();
        prop_assert!((primal_objective(&lift, &y).unwrap() - obj).abs() <= 1e-9 * (1.0 + obj.abs()));
        prop_assert_eq!(gangster_apply(&y, lift.gangster()).unwrap(), SymMatrix::e00(lift.big_dim()));
        let back = lift.expand(&lift.compress(&y).unwrap()).unwrap();
        prop_assert!((&back - &y).frob_norm() <= 1e-10);
        prop_assert!((lift.compress(&y).unwrap().trace() - (n + 1) as f64).abs() <= 1e-9);
    }

    #[test]
    fn y_update_feasibility_and_box(seed in any::<u64>(), n in 2usize..6, clip in any::<bool>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, n);
        let lift = Lifting::build(&inst).unwrap();
        let rr = psd_project(&random_sym(&mut r, lift.small_dim(), 1.0)).unwrap();
        let z = random_sym(&mut r, lift.big_dim(), 5.0);
        let rho = r.gen_range(0.1..10.0);
        let y = update_y(&lift, &rr, &z, rho, clip).unwrap();
        prop_assert_eq!(gangster_apply(&y, lift.gangster()).unwrap(), SymMatrix::e00(lift.big_dim()));
        if clip {
            prop_assert!(y.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn y_update_is_stationary_without_clip(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, n);
        let lift = Lifting::build(&inst).unwrap();
        let rr = psd_project(&random_sym(&mut r, lift.small_dim(), 1.0)).unwrap();
        let z = random_sym(&mut r, lift.big_dim(), 5.0);
        let rho = r.gen_range(0.1..10.0);
        let y = update_y(&lift, &rr, &z, rho, false).unwrap();
        let grad = &(lift.lq() + &z) + &(&y - &lift.expand(&rr).unwrap()).scaled(rho);
        for _ in 0..20 {
            let h = gangster_complement_apply(&random_sym(&mut r, lift.big_dim(), 1.0), lift.gangster()).unwrap();
            let g = frob_inner(&grad, &h).unwrap();
            prop_assert!(g.abs() <= 1e-9 * (1.0 + grad.frob_norm()));
        }
    }

    #[test]
    fn dual_support_after_one_sweep(seed in any::<u64>(), n in 2usize..6) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, n);
        let lift = Lifting::build(&inst).unwrap();
        let y0 = random_sym(&mut r, lift.big_dim(), 1.0);
        let z0 = random_sym(&mut r, lift.big_dim(), 5.0);
        let rho = r.gen_range(0.5..8.0);
        let rr = update_r_standard(&lift, &y0, &z0, rho).unwrap();
        let y = update_y(&lift, &rr, &z0, rho, false).unwrap();
        let z = update_z(&lift, &z0, &y, &rr, rho).unwrap();
        let off = gangster_complement_apply(&(lift.lq() + &z), lift.gangster()).unwrap();
        prop_assert!(off.frob_norm() <= 1e-10 * (1.0 + lift.lq().frob_norm()));
    }

    #[test]
    fn r_update_recovers_face_matrix(seed in any::<u64>(), n in 2usize..6) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, n);
        let lift = Lifting::build(&inst).unwrap();
        let s = psd_project(&random_sym(&mut r, lift.small_dim(), 2.0)).unwrap();
        let y = lift.expand(&s).unwrap();
        let got = update_r_standard(&lift, &y, &SymMatrix::zeros(lift.big_dim()), 3.0).unwrap();
        prop_assert!((&got - &s).frob_norm() <= 1e-9 * (1.0 + s.frob_norm()));
    }

    #[test]
    fn barrier_step_identity_and_limit(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, n);
        let lift = Lifting::build(&inst).unwrap();
        let y = random_sym(&mut r, lift.big_dim(), 1.0);
        let z = random_sym(&mut r, lift.big_dim(), 5.0);
        let rho = r.gen_range(0.1..10.0);
        let mu = r.gen_range(1e-3..2.0);
        let rb = update_r_centering(&lift, &y, &z, rho, mu).unwrap();
        let eig = sym_eig_jacobi(&rb).unwrap();
        prop_assert!(eig.values[0] > 0.0);
        let inv = eig.map_spectrum(|l| 1.0 / l);
        let m = lift.compress(&z.axpy(rho, &y).unwrap()).unwrap();
        let resid = &(&rb.scaled(rho) - &inv.scaled(mu)) - &m;
        prop_assert!(resid.frob_norm() <= 1e-9 * (1.0 + m.frob_norm()));

        let near = update_r_centering(&lift, &y, &z, rho, 1e-14).unwrap();
        let std = update_r_standard(&lift, &y, &z, rho).unwrap();
        prop_assert!((&near - &std).frob_norm() <= 1e-6);
    }

    #[test]
    fn support_repair_is_idempotent(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, n);
        let lift = Lifting::build(&inst).unwrap();
        let z = random_sym(&mut r, lift.big_dim(), 5.0);
        let repair = gangster_complement_apply(&(lift.lq() + &z), lift.gangster()).unwrap();
        let z2 = &z - &repair;
        let (a, wa) = certified_lower_bound(&lift, &z).unwrap();
        let (b, wb) = certified_lower_bound(&lift, &z2).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        prop_assert!((wa - wb).abs() <= 1e-9 * (1.0 + wa.abs()));
        // On a repaired dual both bounds coincide.
        let (c, _) = box_lower_bound(&lift, &z2).unwrap();
        prop_assert!((b - c).abs() <= 1e-9 * (1.0 + b.abs()));
    }

    #[test]
    fn primal_objective_is_linear(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, n);
        let lift = Lifting::build(&inst).unwrap();
        let a = random_sym(&mut r, lift.big_dim(), 1.0);
        let b = random_sym(&mut r, lift.big_dim(), 1.0);
        let t = r.gen_range(-3.0..3.0);
        let lhs = primal_objective(&lift, &a.axpy(t, &b).unwrap()).unwrap();
        let rhs = primal_objective(&lift, &a).unwrap() + t * primal_objective(&lift, &b).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }
}
