//! Completely entangled subspaces: subspaces containing no product vector.

use crate::bsa::{overlap_search, RangeSearch};
use crate::error::{Error, Result};
use crate::linops::{CMatrix, CVector, Dims, Hermitian};
use crate::product_search::{stream_rng, SearchOptions};
use crate::states::{gaussian_matrix, DensityMatrix};

/// Restarts used by [`ces_search_options`].
pub const CES_RESTARTS: usize = 256;
const INDEPENDENCE_TOL: f64 = 1e-10;

pub fn ces_search_options() -> SearchOptions {
    SearchOptions::default().with_restarts(CES_RESTARTS)
}

/// A subspace with an orthonormal basis stored as matrix columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: CMatrix,
    dims: Dims,
}

impl Subspace {
    /// Orthonormalizes `vectors` (Gram–Schmidt with reorthogonalization).
    /// Linearly dependent input is an error.
    pub fn span(vectors: &[CVector], dims: Dims) -> Result<Self> {
        let n = dims.total();
        if vectors.is_empty() {
            return Err(Error::InvalidParameter("empty spanning set".into()));
        }
        let mut basis: Vec<CVector> = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != n {
                return Err(Error::Dimension(format!("vector length {} vs {n}", v.len())));
            }
            let scale = v.norm();
            let mut u = v.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dotc(&u);
                    u -= b * c;
                }
            }
            let r = u.norm();
            if r.is_nan() || r <= INDEPENDENCE_TOL * scale.max(1.0) {
                return Err(Error::InvalidParameter("spanning vectors are linearly dependent".into()));
            }
            basis.push(u / crate::linops::C64::new(r, 0.0));
        }
        Ok(Self { basis: CMatrix::from_columns(&basis), dims })
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projector(&self) -> Hermitian {
        let m = &self.basis * self.basis.adjoint();
        Hermitian::new(m, self.dims.clone()).expect("V V† is Hermitian")
    }
}

/// `d_1⋯d_k − (d_1 + ⋯ + d_k) + k − 1`.
pub fn max_ces_dim(dims: &Dims) -> Result<usize> {
    let k = dims.parties();
    if k < 2 {
        return Err(Error::Dimension(format!("need at least two parties, got {dims}")));
    }
    let sum: usize = dims.as_slice().iter().sum();
    Ok(dims.total() + k - 1 - sum)
}

/// Maximizes `‖Π_S (e ⊗ f)‖²`; the result carries the maximizer, which is
/// reported as contained when the overlap exceeds `1 − 1e-6`.
pub fn subspace_contains_product(s: &Subspace, opts: &SearchOptions) -> Result<RangeSearch> {
    s.dims.pair()?;
    overlap_search(&s.projector(), opts)
}

pub fn is_ces(s: &Subspace, opts: &SearchOptions) -> Result<bool> {
    Ok(subspace_contains_product(s, opts)?.product().is_none())
}

/// Random mixed state whose support is exactly `s`.
pub fn random_state_on(s: &Subspace, seed: u64) -> Result<DensityMatrix> {
    let k = s.dim();
    let mut rng = stream_rng(seed, 0);
    let g = gaussian_matrix(&mut rng, k, k);
    let v = &s.basis * g;
    DensityMatrix::normalized_from(&Hermitian::new(&v * v.adjoint(), s.dims.clone())?)
}
