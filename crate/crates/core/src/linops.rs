//! Dense complex linear algebra on small bipartite operators.
//!
//! Everything here works on column-major `nalgebra` matrices. Ambient
//! dimensions stay small (a few dozen at most), so there is no sparse path.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative tolerance on `‖H − H†‖_F / ‖H‖_F` accepted by [`Hermitian::new`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Default relative eigenvalue cutoff for [`pinv`].
pub const DEFAULT_PINV_CUTOFF: f64 = 1e-12;

/// Local dimensions `d_1, …, d_k` of a composite system.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dims(Vec<usize>);

impl Dims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Dimension("empty dimension list".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Dimension(format!(
                "local dimension {d} is below 2"
            )));
        }
        Ok(Self(dims))
    }

    /// Two-party dimensions; panics if either is below 2.
    pub fn bipartite(d1: usize, d2: usize) -> Self {
        Self::new(vec![d1, d2]).expect("bipartite dims must be >= 2")
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn parties(&self) -> usize {
        self.0.len()
    }

    /// Ambient dimension, the product of the local dimensions.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// `(d_1, d_2)` for a bipartite system.
    pub fn pair(&self) -> Result<(usize, usize)> {
        match self.0.as_slice() {
            [a, b] => Ok((*a, *b)),
            other => Err(Error::Dimension(format!(
                "expected a bipartite system, got {} parties",
                other.len()
            ))),
        }
    }

    pub fn concat(&self, other: &Dims) -> Dims {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Dims(v)
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A Hermitian matrix annotated with its subsystem structure.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian {
    m: CMatrix,
    dims: Dims,
}

impl Hermitian {
    /// Validates Hermiticity to [`HERMITIAN_TOL`] and stores `(M + M†)/2`.
    pub fn new(m: CMatrix, dims: Dims) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, not square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() != dims.total() {
            return Err(Error::Dimension(format!(
                "matrix dimension {} does not match dims {} (product {})",
                m.nrows(),
                dims,
                dims.total()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        let adj = m.adjoint();
        let dev = (&m - &adj).norm();
        let scale = m.norm();
        if scale > 0.0 && dev > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(dev / scale));
        }
        let m = (m + adj).scale(0.5);
        Ok(Self { m, dims })
    }

    pub(crate) fn from_parts_unchecked(m: CMatrix, dims: Dims) -> Self {
        debug_assert_eq!(m.nrows(), dims.total());
        Self { m, dims }
    }

    pub fn zeros(dims: Dims) -> Self {
        let n = dims.total();
        Self { m: CMatrix::zeros(n, n), dims }
    }

    pub fn identity(dims: Dims) -> Self {
        let n = dims.total();
        Self { m: CMatrix::identity(n, n), dims }
    }

    pub fn from_real_diagonal(diag: &[f64], dims: Dims) -> Result<Self> {
        let v: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(CMatrix::from_diagonal(&CVector::from_vec(v)), dims)
    }

    /// `|v⟩⟨v|`, without normalizing `v`.
    pub fn projector(v: &CVector, dims: Dims) -> Result<Self> {
        if v.len() != dims.total() {
            return Err(Error::Dimension(format!(
                "vector length {} does not match dims {}",
                v.len(),
                dims
            )));
        }
        Ok(Self { m: v * v.adjoint(), dims })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    /// `⟨v|H|v⟩`.
    pub fn expectation(&self, v: &CVector) -> f64 {
        (v.adjoint() * &self.m * v)[(0, 0)].re
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { m: self.m.scale(s), dims: self.dims.clone() }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eig_hermitian(self).values[0]
    }

    /// Spectral norm (largest absolute eigenvalue).
    pub fn spectral_norm(&self) -> f64 {
        let e = eig_hermitian(self);
        e.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Frobenius distance to `other`; panics on dimension mismatch.
    pub fn distance(&self, other: &Hermitian) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        (&self.m - &other.m).norm()
    }

    /// Same matrix with different subsystem annotation.
    pub fn with_dims(&self, dims: Dims) -> Result<Self> {
        if dims.total() != self.dim() {
            return Err(Error::Dimension(format!(
                "dims {} do not match matrix dimension {}",
                dims,
                self.dim()
            )));
        }
        Ok(Self { m: self.m.clone(), dims })
    }

    /// Conjugation `U H U†` by a unitary of matching dimension.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        let m = u * &self.m * u.adjoint();
        let m = (&m + m.adjoint()).scale(0.5);
        Self { m, dims: self.dims.clone() }
    }
}

fn assert_same_shape(a: &Hermitian, b: &Hermitian) {
    assert_eq!(
        a.dims, b.dims,
        "operator dims mismatch: {} vs {}",
        a.dims, b.dims
    );
}

impl Add for &Hermitian {
    type Output = Hermitian;
    fn add(self, rhs: &Hermitian) -> Hermitian {
        assert_same_shape(self, rhs);
        Hermitian { m: &self.m + &rhs.m, dims: self.dims.clone() }
    }
}

impl Add for Hermitian {
    type Output = Hermitian;
    fn add(self, rhs: Hermitian) -> Hermitian {
        &self + &rhs
    }
}

impl Sub for &Hermitian {
    type Output = Hermitian;
    fn sub(self, rhs: &Hermitian) -> Hermitian {
        assert_same_shape(self, rhs);
        Hermitian { m: &self.m - &rhs.m, dims: self.dims.clone() }
    }
}

impl Sub for Hermitian {
    type Output = Hermitian;
    fn sub(self, rhs: Hermitian) -> Hermitian {
        &self - &rhs
    }
}

impl Neg for &Hermitian {
    type Output = Hermitian;
    fn neg(self) -> Hermitian {
        self.scaled(-1.0)
    }
}

impl Neg for Hermitian {
    type Output = Hermitian;
    fn neg(self) -> Hermitian {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &Hermitian {
    type Output = Hermitian;
    fn mul(self, s: f64) -> Hermitian {
        self.scaled(s)
    }
}

impl Mul<f64> for Hermitian {
    type Output = Hermitian;
    fn mul(self, s: f64) -> Hermitian {
        self.scaled(s)
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenSystem {
    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    /// `V diag(values) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|x| x)
    }

    /// `V diag(f(values)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let s = f(self.values[j]);
            scaled.column_mut(j).scale_mut(s);
        }
        scaled * self.vectors.adjoint()
    }
}

/// Complex Kronecker product of two matrices.
pub fn kron_matrix(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vector(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// `a ⊗ b`, with dims concatenated.
pub fn kron(a: &Hermitian, b: &Hermitian) -> Hermitian {
    Hermitian {
        m: a.m.kronecker(&b.m),
        dims: a.dims.concat(&b.dims),
    }
}

/// Transpose on one factor of a bipartite operator (`subsystem` 0 or 1).
pub fn partial_transpose(h: &Hermitian, subsystem: usize) -> Result<Hermitian> {
    let (d1, d2) = h.dims.pair()?;
    if subsystem > 1 {
        return Err(Error::Dimension(format!(
            "subsystem index {subsystem} out of range for a bipartite system"
        )));
    }
    let n = d1 * d2;
    let src = &h.m;
    let out = CMatrix::from_fn(n, n, |r, c| {
        let (i1, j1) = (r / d2, r % d2);
        let (i2, j2) = (c / d2, c % d2);
        if subsystem == 1 {
            src[(i1 * d2 + j2, i2 * d2 + j1)]
        } else {
            src[(i2 * d2 + j1, i1 * d2 + j2)]
        }
    });
    Ok(Hermitian { m: out, dims: h.dims.clone() })
}

/// Partial transpose on the second factor, the convention used throughout.
pub fn pt(h: &Hermitian) -> Result<Hermitian> {
    partial_transpose(h, 1)
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn eig_hermitian(h: &Hermitian) -> EigenSystem {
    eig_matrix(&h.m)
}

/// Eigendecomposition of a matrix assumed Hermitian (not checked).
pub(crate) fn eig_matrix(m: &CMatrix) -> EigenSystem {
    let n = m.nrows();
    let se = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
    EigenSystem { values, vectors }
}

/// Eigenvector of the smallest eigenvalue of a small Hermitian matrix.
pub(crate) fn min_eigenpair(m: &CMatrix) -> (f64, CVector) {
    let se = SymmetricEigen::new(m.clone());
    let (idx, val) = se
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
    (val, se.eigenvectors.column(idx).into_owned())
}

/// Moore–Penrose pseudo-inverse over eigenvalues with
/// `|λ| > cutoff · max|λ|`.
pub fn pinv(h: &Hermitian, cutoff: f64) -> Hermitian {
    let e = eig_hermitian(h);
    let max = e.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if max == 0.0 {
        return Hermitian::zeros(h.dims.clone());
    }
    let thresh = cutoff * max;
    let m = e.reconstruct_with(|v| if v.abs() > thresh { 1.0 / v } else { 0.0 });
    Hermitian::from_parts_unchecked((&m + m.adjoint()).scale(0.5), h.dims.clone())
}

/// Orthogonal projector onto the span of eigenvectors with
/// `|λ| > cutoff · max|λ|`.
pub fn range_projector(h: &Hermitian, cutoff: f64) -> Hermitian {
    let e = eig_hermitian(h);
    let max = e.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let thresh = cutoff * max;
    let m = e.reconstruct_with(|v| if max > 0.0 && v.abs() > thresh { 1.0 } else { 0.0 });
    Hermitian::from_parts_unchecked((&m + m.adjoint()).scale(0.5), h.dims.clone())
}

/// Clips negative eigenvalues to zero.
pub fn psd_part(h: &Hermitian) -> Hermitian {
    let m = eig_hermitian(h).reconstruct_with(|v| v.max(0.0));
    Hermitian::from_parts_unchecked((&m + m.adjoint()).scale(0.5), h.dims.clone())
}

/// Trace pairing `tr(a b)`.
pub fn hs_inner(a: &Hermitian, b: &Hermitian) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "hs_inner of {}-dimensional and {}-dimensional operators",
            a.dim(),
            b.dim()
        )));
    }
    Ok(trace_product(&a.m, &b.m))
}

pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    // tr(AB) = Σ_ij A_ij B_ji; B Hermitian so B_ji = conj(B_ij)
    a.iter()
        .zip(b.transpose().iter())
        .map(|(x, y)| (x * y).re)
        .sum()
}
