//! Fixtures and independent oracles shared by the integration tests.
//!
//! The oracles use only eigenvalues and the partial transpose, never the
//! product-vector searches they are used to check.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use witness_core::linops::{eig_hermitian, pt, CMatrix, CVector, Dims, Hermitian, C64};
use witness_core::states::{bell, mix, random_state, random_unitary, Bell, DensityMatrix};

pub const WERNER_THIRD: f64 = 1.0 / 3.0;

/// `Λ = 3(1 − p)/2` for entangled Werner states.
pub fn werner_lambda(p: f64) -> f64 {
    (1.5 * (1.0 - p)).min(1.0)
}

/// `tr(|φ⟩⟨φ|^Γ ρ_p) = (1 − 3p)/4`.
pub fn flip_pairing(p: f64) -> f64 {
    (1.0 - 3.0 * p) / 4.0
}

pub fn flip_witness() -> Hermitian {
    pt(bell(Bell::PhiSinglet).op()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn two_qubits() -> Dims {
    Dims::bipartite(2, 2)
}

pub fn min_eig(h: &Hermitian) -> f64 {
    eig_hermitian(h).values[0]
}

/// Largest `λ` with `ρ − λ|x⟩⟨x| ⪰ 0`, by bisection on the smallest
/// eigenvalue. Exact up to `tol` for full-rank `ρ`.
pub fn bisect_max_weight(rho: &DensityMatrix, x: &CVector, tol: f64) -> f64 {
    let proj = Hermitian::projector(x, rho.dims().clone()).unwrap();
    let ok = |l: f64| min_eig(&(rho.op() - &proj.scaled(l))) >= -1e-14;
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Largest `Λ` for which `(ρ − (1 − Λ)σ)/Λ` is a PPT state, with `σ` the
/// known remainder. In two qubits PPT is separability, so this is the
/// separable weight of the decomposition `ρ = Λρ^S + (1 − Λ)σ`.
///
/// `h(Λ) = min(λ_min(T), λ_min(T^Γ))` with `T = ρ − (1 − Λ)σ` is concave
/// in `Λ`, so its feasible set `h ≥ 0` is an interval: bisection on the
/// slope finds its peak, then bisection on the sign finds the right end.
pub fn bisect_separable_weight(rho: &DensityMatrix, sigma: &DensityMatrix) -> Option<f64> {
    let h = |l: f64| {
        let t = rho.op() - &sigma.op().scaled(1.0 - l);
        min_eig(&t).min(min_eig(&pt(&t).unwrap()))
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if h(mid + 1e-9) > h(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let peak = 0.5 * (lo + hi);
    if h(peak) < -1e-9 {
        return None;
    }
    let (mut lo, mut hi) = (peak, 1.0);
    if h(1.0) >= -1e-9 {
        return Some(1.0);
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if h(mid) >= -1e-9 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// `(U1 ⊗ U2) ρ (U1 ⊗ U2)†` for Haar-random local unitaries.
pub fn local_unitary_conjugate(rho: &DensityMatrix, seed: u64) -> DensityMatrix {
    let (d1, d2) = rho.dims().pair().unwrap();
    let mut r = rng(seed);
    let u1 = random_unitary(&mut r, d1);
    let u2 = random_unitary(&mut r, d2);
    let u = u1.kronecker(&u2);
    DensityMatrix::from_operator(rho.op().conjugate_by(&u)).unwrap()
}

/// Entangled pure two-qubit states, skipping seeds whose draw is too close
/// to a product.
pub fn random_pure_entangled(count: usize, seed0: u64) -> Vec<DensityMatrix> {
    let mut out = Vec::new();
    let mut seed = seed0;
    while out.len() < count {
        let rho = random_state(&two_qubits(), 1, seed).unwrap();
        if min_eig(&pt(rho.op()).unwrap()) < -1e-2 {
            out.push(rho);
        }
        seed += 1;
    }
    out
}

/// Full-rank NPT states `0.7|ψ⟩⟨ψ| + 0.3σ` with random pure `ψ` and random
/// full-rank `σ`.
pub fn random_full_rank_entangled(count: usize, seed0: u64) -> Vec<DensityMatrix> {
    let mut out = Vec::new();
    let mut seed = seed0;
    while out.len() < count {
        let psi = random_state(&two_qubits(), 1, seed).unwrap();
        let sigma = random_state(&two_qubits(), 4, seed + 100_000).unwrap();
        let rho = mix(&[(0.7, &psi), (0.3, &sigma)]).unwrap();
        if min_eig(&pt(rho.op()).unwrap()) < -1e-2 && min_eig(rho.op()) > 1e-4 {
            out.push(rho);
        }
        seed += 1;
    }
    out
}

/// `span{|01⟩ − |10⟩, |02⟩ − |11⟩}` in 2⊗3. The vector `a(|01⟩ − |10⟩) +
/// b(|02⟩ − |11⟩)` has coefficient matrix `[[0, a, b], [−a, −b, 0]]`, whose
/// 2x2 minors are `a²` and `b²`; it is a product only when `a = b = 0`.
pub fn ces_2x3_vectors() -> Vec<CVector> {
    let basis = |i: usize, j: usize| {
        let mut v = CVector::zeros(6);
        v[3 * i + j] = C64::new(1.0, 0.0);
        v
    };
    vec![basis(0, 1) - basis(1, 0), basis(0, 2) - basis(1, 1)]
}

pub fn frob(m: &CMatrix) -> f64 {
    m.norm()
}
