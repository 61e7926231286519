//! Quick installation check: small deterministic instances exercised through
//! every module in a few seconds.

use crate::centering::{update_r_centering, CenteringConfig};
use crate::harness::{compare_methods, Method};
use crate::lifting::{build_vhat, Lifting};
use crate::qaplib::{brute_force_opt, QapInstance};
use crate::symmat::{sym_eig, sym_eig_jacobi, DenseMatrix, SymMatrix};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Small multiplicative congruential generator; enough for fixture data.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn int(&mut self, hi: u32) -> f64 {
        (self.next() * f64::from(hi)).floor()
    }

    fn sym(&mut self, n: usize, hi: u32, zero_diag: bool) -> SymMatrix {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = if zero_diag && i == j { 0.0 } else { self.int(hi) };
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        SymMatrix::symmetrize(m)
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

pub fn run() -> Vec<Check> {
    let mut out = Vec::new();
    let mut rng = Lcg(0x5eed);

    let s = rng.sym(12, 100, false);
    let a = sym_eig(&s).map(|e| e.values);
    let b = sym_eig_jacobi(&s).map(|e| e.values);
    out.push(match (a, b) {
        (Ok(a), Ok(b)) => {
            let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            check("eigensolvers agree", err <= 1e-9 * s.frob_norm(), format!("max gap {err:.2e}"))
        }
        (a, b) => check("eigensolvers agree", false, format!("{:?} {:?}", a.err(), b.err())),
    });

    let v = build_vhat(6).expect("n >= 2");
    let gram = v.tr_matmul(&v).expect("shapes agree");
    let err = gram
        .zip_with(&DenseMatrix::identity(v.cols()), |x, y| x - y)
        .expect("shapes agree")
        .frob_norm();
    out.push(check("face basis orthonormal", err <= 1e-10, format!("{err:.2e}")));

    let inst = QapInstance::new("selftest", rng.sym(5, 10, true), rng.sym(5, 10, true), None).expect("valid");
    let (_, opt) = brute_force_opt(&inst).expect("n = 5");
    let lift = Lifting::build(&inst).expect("n = 5");
    let y = SymMatrix::identity(lift.big_dim());
    let z = rng.sym(lift.big_dim(), 5, false);
    let identity_ok = update_r_centering(&lift, &y, &z, 2.0, 0.5).is_ok_and(|r| r.min_eigenvalue().is_ok_and(|l| l > 0.0));
    out.push(check("barrier step positive definite", identity_ok, String::new()));

    let mut cfg = CenteringConfig::default();
    cfg.inner.max_iters = 2000;
    match compare_methods(&inst, &cfg) {
        Ok(cmp) => {
            for (m, o) in [(Method::Standard, &cmp.standard), (Method::Centering, &cmp.centering)] {
                let worst = o.trace.iter().map(|r| r.lb).fold(f64::NEG_INFINITY, f64::max);
                let name = match m {
                    Method::Standard => "standard bound valid",
                    Method::Centering => "centering bound valid",
                };
                out.push(check(name, worst <= opt + 1e-6, format!("best lb {worst:.4}, optimum {opt}")));
            }
        }
        Err(e) => out.push(check("engines run", false, e.to_string())),
    }
    out
}
