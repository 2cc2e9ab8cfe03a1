//! Alternating-eigenvector ("see-saw") minimization of `⟨e,f|H|e,f⟩` over
//! unit product vectors, with seeded independent restarts.
//!
//! Fixing `f`, the objective is the quadratic form of the reduced matrix
//! `(I ⊗ ⟨f|) H (I ⊗ |f⟩)` in `e`, minimized by its lowest eigenvector; the
//! roles then swap. Each half-step can only lower the objective.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::Result;
use crate::linops::{min_eigenpair, CMatrix, CVector, Hermitian, C64};
use crate::states::ProductVector;

/// Controls for multistart product-vector searches.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Restarts whose final value lies within `tol` of the best count as agreeing.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { restarts: 64, seed: 0, tol: 1e-6, max_iters: 1000 }
    }
}

impl SearchOptions {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Outcome of one see-saw run.
#[derive(Clone, Debug)]
pub struct Descent {
    pub value: f64,
    pub vector: ProductVector,
    /// Objective after every half-step (only filled when requested).
    pub history: Vec<f64>,
    pub iterations: usize,
}

/// Deterministic RNG for stream `stream` under `seed`.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn random_unit_vector<R: rand::Rng + ?Sized>(rng: &mut R, d: usize) -> CVector {
    loop {
        let v = CVector::from_fn(d, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        });
        let n = v.norm();
        if n > 1e-12 {
            return v.unscale(n);
        }
    }
}

/// `(I ⊗ ⟨f|) H (I ⊗ |f⟩)`.
fn reduce_second(h: &CMatrix, d1: usize, d2: usize, f: &CVector) -> CMatrix {
    CMatrix::from_fn(d1, d1, |i1, i2| {
        let mut acc = C64::new(0.0, 0.0);
        for j1 in 0..d2 {
            let fc = f[j1].conj();
            for j2 in 0..d2 {
                acc += fc * h[(i1 * d2 + j1, i2 * d2 + j2)] * f[j2];
            }
        }
        acc
    })
}

/// `(⟨e| ⊗ I) H (|e⟩ ⊗ I)`.
fn reduce_first(h: &CMatrix, d1: usize, d2: usize, e: &CVector) -> CMatrix {
    CMatrix::from_fn(d2, d2, |j1, j2| {
        let mut acc = C64::new(0.0, 0.0);
        for i1 in 0..d1 {
            let ec = e[i1].conj();
            for i2 in 0..d1 {
                acc += ec * h[(i1 * d2 + j1, i2 * d2 + j2)] * e[i2];
            }
        }
        acc
    })
}

fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()).scale(0.5)
}

/// Runs the alternating minimization from the starting second factor `f0`
/// until the objective changes by less than `1e-12` (relative to `max(1, |value|)`).
pub fn see_saw(h: &Hermitian, f0: CVector, max_iters: usize, record: bool) -> Result<Descent> {
    let (d1, d2) = h.dims().pair()?;
    let m = h.matrix();
    let mut f = f0.normalize();
    let mut e;
    let mut history = Vec::new();
    let mut prev = f64::INFINITY;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let (ve, new_e) = min_eigenpair(&hermitize(reduce_second(m, d1, d2, &f)));
        e = new_e;
        let (vf, new_f) = min_eigenpair(&hermitize(reduce_first(m, d1, d2, &e)));
        f = new_f;
        if record {
            history.push(ve);
            history.push(vf);
        }
        let done = (prev - vf).abs() <= 1e-12 * vf.abs().max(1.0);
        prev = vf;
        if done || iterations >= max_iters {
            break;
        }
    }
    let vector = ProductVector::new(e, f)?;
    let value = h.expectation(&vector.vector());
    Ok(Descent { value, vector, history, iterations })
}

/// Every restart's descent, in restart order. Restart `i` draws its
/// starting vector from RNG stream `i`; `warm` (if any) is run as an extra
/// final restart.
pub fn multistart(
    h: &Hermitian,
    opts: &SearchOptions,
    warm: Option<&ProductVector>,
) -> Result<Vec<Descent>> {
    let (_, d2) = h.dims().pair()?;
    let restarts = opts.restarts.max(1);
    let mut runs: Vec<Descent> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(opts.seed, i as u64);
            let f0 = random_unit_vector(&mut rng, d2);
            see_saw(h, f0, opts.max_iters, false)
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(w) = warm {
        runs.push(see_saw(h, w.f().clone(), opts.max_iters, false)?);
    }
    Ok(runs)
}

/// Index of the smallest value; ties go to the earliest restart.
pub(crate) fn best_index(runs: &[Descent]) -> usize {
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value < runs[best].value {
            best = i;
        }
    }
    best
}
