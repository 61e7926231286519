#![allow(dead_code)]

use std::path::PathBuf;

use cadmm_core::{DenseMatrix, QapInstance, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_sym(rng: &mut impl Rng, n: usize, scale: f64) -> SymMatrix {
    SymMatrix::from_fn(n, |_, _| rng.gen_range(-scale..scale))
}

/// Integer flow and distance matrices with zero diagonals.
pub fn random_instance(rng: &mut impl Rng, n: usize) -> QapInstance {
    let mut int_sym = |hi: u32| {
        SymMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { f64::from(rng.gen_range(0..hi)) })
    };
    let f = int_sym(10);
    let d = int_sym(10);
    QapInstance::new(format!("rand{n}"), f, d, None).unwrap()
}

pub fn random_instance_with_linear(rng: &mut impl Rng, n: usize) -> QapInstance {
    let base = random_instance(rng, n);
    let c = DenseMatrix::from_fn(n, n, |_, _| f64::from(rng.gen_range(0..6)));
    QapInstance::new(base.name, base.flow, base.distance, Some(c)).unwrap()
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/qaplib").join(format!("{name}.dat"))
}
