use rand::Rng;

use super::{is_block_positive, DETECTION_TOL};
use crate::error::Result;
use crate::linops::{eig_hermitian, pt, CVector, Hermitian, C64};
use crate::product_search::{random_unit_vector, stream_rng, SearchOptions};
use crate::states::{gaussian_matrix, DensityMatrix};

/// Finite sample of `D_ρ = {W : tr(ρW) < 0}`: unit-Frobenius block-positive
/// operators that each detect `source`.
#[derive(Clone, Debug)]
pub struct WitnessSample {
    pub witnesses: Vec<Hermitian>,
    pub source: DensityMatrix,
    pub seed: u64,
}

impl WitnessSample {
    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// Draws `n` witnesses `(|η⟩⟨η|)^Γ` where `η` is a random combination of the
/// negative eigenvectors of `ρ^Γ` plus a random perturbation of random size,
/// keeping those with `tr(Wρ) < -1e-9` that pass a block-positivity check.
///
/// Returns an empty sample when `ρ^Γ` has no negative eigenvalue, which
/// covers every separable state.
pub fn sample_detecting_witnesses(rho: &DensityMatrix, n: usize, seed: u64) -> Result<WitnessSample> {
    let g = pt(rho.op())?;
    let eig = eig_hermitian(&g);
    let negative: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] < -DETECTION_TOL).collect();
    let mut witnesses = Vec::with_capacity(n);
    if negative.is_empty() || n == 0 {
        return Ok(WitnessSample { witnesses, source: rho.clone(), seed });
    }

    let dim = rho.op().dim();
    let dims = rho.dims().clone();
    let mut rng = stream_rng(seed, 0);
    let check = SearchOptions::default().with_restarts(4).with_seed(seed);
    let max_attempts = 1000 * n + 1000;
    for _ in 0..max_attempts {
        if witnesses.len() == n {
            break;
        }
        let coeffs = gaussian_matrix(&mut rng, negative.len(), 1);
        let mut core = CVector::zeros(dim);
        for (k, &i) in negative.iter().enumerate() {
            core += eig.vector(i) * coeffs[(k, 0)];
        }
        let core = core.normalize();
        let spread: f64 = rng.random::<f64>() * 1.5;
        let kick = random_unit_vector(&mut rng, dim);
        let eta = (core + kick * C64::new(spread, 0.0)).normalize();
        if g.expectation(&eta) >= -DETECTION_TOL {
            continue;
        }
        let w = pt(&Hermitian::projector(&eta, dims.clone())?)?;
        let w = w.scaled(1.0 / w.frobenius_norm());
        if !is_block_positive(&w, &check)? {
            continue;
        }
        witnesses.push(w);
    }
    Ok(WitnessSample { witnesses, source: rho.clone(), seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::hs_inner;
    use crate::states::{bell, werner, Bell};

    #[test]
    fn separable_state_gives_empty_sample() {
        let s = sample_detecting_witnesses(&werner(0.2).unwrap(), 20, 0).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn bell_sample_detects_and_stays_block_positive() {
        let psi = bell(Bell::PsiPlus);
        let s = sample_detecting_witnesses(&psi, 50, 1).unwrap();
        assert_eq!(s.len(), 50);
        let sep = werner(0.2).unwrap();
        for w in &s.witnesses {
            assert!((w.frobenius_norm() - 1.0).abs() < 1e-12);
            assert!(hs_inner(w, psi.op()).unwrap() < -DETECTION_TOL);
            assert!(hs_inner(w, sep.op()).unwrap() >= -1e-6);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let rho = werner(0.7).unwrap();
        let a = sample_detecting_witnesses(&rho, 10, 3).unwrap();
        let b = sample_detecting_witnesses(&rho, 10, 3).unwrap();
        assert_eq!(a.witnesses, b.witnesses);
    }
}
