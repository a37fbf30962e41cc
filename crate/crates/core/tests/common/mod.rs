//! Seeded random state-set generators shared by the integration suites.
#![allow(dead_code)]

use probclone_core::linalg::{self, inner};
use probclone_core::{gram, make_state, Complex64, StateSet, StateVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    make_state(random_vector(rng, dim)).unwrap()
}

/// Independent set whose Gram matrix has minimum eigenvalue at least `min_eig`.
pub fn random_independent_set(rng: &mut ChaCha8Rng, n: usize, dim: usize, min_eig: f64) -> StateSet {
    assert!(n <= dim);
    loop {
        let set = StateSet::new((0..n).map(|_| random_state(rng, dim)).collect()).unwrap();
        if gram(&set, 1).min_eigenvalue() >= min_eig {
            return set;
        }
    }
}

/// Independent set with all amplitudes real and nonnegative, so every
/// pairwise overlap is a nonnegative real.
pub fn random_nonnegative_set(rng: &mut ChaCha8Rng, n: usize, dim: usize, min_eig: f64) -> StateSet {
    assert!(n <= dim);
    loop {
        let states = (0..n)
            .map(|_| {
                let amps: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal).abs()).collect();
                StateVector::from_real(&amps).unwrap()
            })
            .collect();
        let set = StateSet::new(states).unwrap();
        if gram(&set, 1).min_eigenvalue() >= min_eig {
            return set;
        }
    }
}

/// `n ≥ 2` states spanning at most `n − 1` dimensions.
pub fn random_dependent_set(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> StateSet {
    assert!(n >= 2);
    if n > dim {
        return StateSet::new((0..n).map(|_| random_state(rng, dim)).collect()).unwrap();
    }
    let mut states: Vec<StateVector> = (0..n - 1).map(|_| random_state(rng, dim)).collect();
    let weights = random_vector(rng, n - 1);
    let mut combo = vec![Complex64::new(0.0, 0.0); dim];
    for (w, s) in weights.iter().zip(&states) {
        for (c, a) in combo.iter_mut().zip(s.amplitudes()) {
            *c += w * a;
        }
    }
    let at = rng.random_range(0..n);
    states.insert(at, make_state(combo).unwrap());
    StateSet::new(states).unwrap()
}

pub fn random_orthonormal_set(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> StateSet {
    assert!(n <= dim);
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    while out.len() < n {
        let mut v = random_vector(rng, dim);
        for _ in 0..2 {
            for q in &out {
                let p = inner(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
        let r = linalg::norm(&v);
        if r < 1e-6 {
            continue;
        }
        out.push(v.iter().map(|z| z / r).collect());
    }
    StateSet::new(out.into_iter().map(|v| make_state(v).unwrap()).collect()).unwrap()
}

/// The canonical real pair `{|0⟩, s|0⟩ + √(1−s²)|1⟩}`.
pub fn overlap_pair(s: f64) -> StateSet {
    StateSet::new(vec![
        StateVector::basis(2, 0),
        StateVector::from_real(&[s, (1.0 - s * s).sqrt()]).unwrap(),
    ])
    .unwrap()
}
