//! Density matrices, product vectors, standard two-qubit fixtures and the
//! separability decision.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bsa::{bsa_decompose, BsaOptions};
use crate::error::{Error, Result};
use crate::linops::{eig_hermitian, kron_vector, pt, CMatrix, CVector, Dims, Hermitian, C64};
use crate::product_search::{random_unit_vector, stream_rng};
use crate::witness::witness_for_state;

/// Minimum eigenvalue accepted for a state.
pub const STATE_PSD_TOL: f64 = 1e-9;
/// Accepted `|tr ρ − 1|`.
pub const STATE_TRACE_TOL: f64 = 1e-9;
/// Minimum eigenvalue of `ρ^Γ` still counted as PPT.
pub const PPT_TOL: f64 = 1e-9;
/// `Λ` at or above `1 − SEPARABLE_LAMBDA_TOL` counts as a full separable decomposition.
pub const SEPARABLE_LAMBDA_TOL: f64 = 1e-6;

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: Hermitian,
}

impl DensityMatrix {
    pub fn from_operator(op: Hermitian) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > STATE_TRACE_TOL {
            return Err(Error::Trace(tr));
        }
        let min = op.min_eigenvalue();
        if min < -STATE_PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { op })
    }

    /// Normalizes a positive operator to unit trace, clipping eigenvalues
    /// that rounding pushed slightly below zero.
    pub(crate) fn normalized_from(op: &Hermitian) -> Result<Self> {
        let op = if op.min_eigenvalue() < 0.0 { crate::linops::psd_part(op) } else { op.clone() };
        let tr = op.trace();
        if tr <= 0.0 {
            return Err(Error::Trace(tr));
        }
        Self::from_operator(op.scaled(1.0 / tr))
    }

    pub fn op(&self) -> &Hermitian {
        &self.op
    }

    pub fn dims(&self) -> &Dims {
        self.op.dims()
    }

    pub fn purity(&self) -> f64 {
        crate::linops::hs_inner(&self.op, &self.op).expect("same operator")
    }

    /// `⟨v|ρ|v⟩` for a unit vector.
    pub fn fidelity_with_pure(&self, v: &CVector) -> f64 {
        self.op.expectation(v)
    }

    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        self.op.distance(&other.op)
    }
}

/// Validates raw entries as a density matrix.
pub fn make_density(entries: CMatrix, dims: Dims) -> Result<DensityMatrix> {
    DensityMatrix::from_operator(Hermitian::new(entries, dims)?)
}

/// A unit product vector `e ⊗ f` with the phase of the first nonzero
/// component of each factor fixed real and non-negative.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductVector {
    e: CVector,
    f: CVector,
}

fn gauge(v: CVector) -> Result<CVector> {
    let n = v.norm();
    if !n.is_finite() || n <= 1e-300 {
        return Err(Error::InvalidParameter("zero or non-finite factor".into()));
    }
    let v = v.unscale(n);
    let pivot = v.iter().find(|z| z.norm() > 1e-12).copied().unwrap_or(C64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    Ok(v.map(|z| z * phase))
}

impl ProductVector {
    /// Normalizes both factors and fixes their phases.
    pub fn new(e: CVector, f: CVector) -> Result<Self> {
        Ok(Self { e: gauge(e)?, f: gauge(f)? })
    }

    /// Computational basis product `|i⟩ ⊗ |j⟩`.
    pub fn basis(d1: usize, d2: usize, i: usize, j: usize) -> Self {
        let mut e = CVector::zeros(d1);
        let mut f = CVector::zeros(d2);
        e[i] = C64::new(1.0, 0.0);
        f[j] = C64::new(1.0, 0.0);
        Self { e, f }
    }

    pub fn e(&self) -> &CVector {
        &self.e
    }

    pub fn f(&self) -> &CVector {
        &self.f
    }

    pub fn vector(&self) -> CVector {
        kron_vector(&self.e, &self.f)
    }

    pub fn dims(&self) -> Dims {
        Dims::bipartite(self.e.len(), self.f.len())
    }

    pub fn projector(&self) -> Hermitian {
        Hermitian::projector(&self.vector(), self.dims()).expect("dims match by construction")
    }

    pub fn state(&self) -> DensityMatrix {
        DensityMatrix { op: self.projector() }
    }
}

/// A convex product decomposition `Σ w_i |e_i f_i⟩⟨e_i f_i|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductDecomposition {
    pub terms: Vec<(f64, ProductVector)>,
    /// `‖ρ − Σ w_i P_i‖_F` against the decomposed state.
    pub residual: f64,
}

impl ProductDecomposition {
    pub fn assemble(&self, dims: &Dims) -> Hermitian {
        sum_terms(&self.terms, dims)
    }
}

pub(crate) fn sum_terms(terms: &[(f64, ProductVector)], dims: &Dims) -> Hermitian {
    let n = dims.total();
    let mut m = CMatrix::zeros(n, n);
    for (w, p) in terms {
        let v = p.vector();
        m += (&v * v.adjoint()).scale(*w);
    }
    Hermitian::from_parts_unchecked(m, dims.clone())
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeparabilityVerdict {
    /// Certificate present when requested in [`SeparabilityOptions`].
    Separable(Option<ProductDecomposition>),
    /// Carries a block-positive witness `W` with `tr(Wρ) < 0`.
    Entangled(Hermitian),
    /// PPT beyond 2x3 without a full product decomposition; `lambda` is the
    /// separable weight found.
    Undetermined { lambda: f64 },
}

impl SeparabilityVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, Self::Separable(_))
    }

    pub fn is_entangled(&self) -> bool {
        matches!(self, Self::Entangled(_))
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::Separable(_) => "separable",
            Self::Entangled(_) => "entangled",
            Self::Undetermined { .. } => "undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparabilityOptions {
    /// Build a product decomposition for separable states.
    pub certify: bool,
    pub bsa: BsaOptions,
}

impl Default for SeparabilityOptions {
    fn default() -> Self {
        Self { certify: true, bsa: BsaOptions::default() }
    }
}

impl SeparabilityOptions {
    /// Verdict only, no certificates in 2x2 / 2x3.
    pub fn quick() -> Self {
        Self { certify: false, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bell {
    /// `(|00⟩ + |11⟩)/√2`
    PsiPlus,
    /// `(|00⟩ − |11⟩)/√2`
    PsiMinus,
    /// `(|10⟩ − |01⟩)/√2`
    PhiSinglet,
}

pub fn bell_vector(which: Bell) -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = match which {
        Bell::PsiPlus => [s, 0.0, 0.0, s],
        Bell::PsiMinus => [s, 0.0, 0.0, -s],
        Bell::PhiSinglet => [0.0, -s, s, 0.0],
    };
    CVector::from_iterator(4, v.iter().map(|&x| C64::new(x, 0.0)))
}

pub fn bell(which: Bell) -> DensityMatrix {
    DensityMatrix {
        op: Hermitian::projector(&bell_vector(which), Dims::bipartite(2, 2)).expect("4-dim"),
    }
}

fn unit_interval(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("{name} = {x} is outside [0, 1]")));
    }
    Ok(())
}

/// `p |ψ⁺⟩⟨ψ⁺| + (1 − p) I/4`.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    unit_interval("p", p)?;
    let dims = Dims::bipartite(2, 2);
    let op = bell(Bell::PsiPlus).op.scaled(p) + Hermitian::identity(dims).scaled((1.0 - p) / 4.0);
    DensityMatrix::from_operator(op)
}

/// `q |ψ⁻⟩⟨ψ⁻| + (1 − q) |ψ⁺⟩⟨ψ⁺|`.
pub fn eta(q: f64) -> Result<DensityMatrix> {
    unit_interval("q", q)?;
    let op = bell(Bell::PsiMinus).op.scaled(q) + bell(Bell::PsiPlus).op.scaled(1.0 - q);
    DensityMatrix::from_operator(op)
}

/// Convex combination of states with weights summing to one.
pub fn mix(parts: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
    let (_, first) = parts
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
    let dims = first.dims().clone();
    let mut total = 0.0;
    let mut acc = Hermitian::zeros(dims.clone());
    for (w, s) in parts {
        if w.is_nan() || *w < 0.0 {
            return Err(Error::InvalidParameter(format!("negative weight {w}")));
        }
        if s.dims() != &dims {
            return Err(Error::Dimension(format!("mixing {} with {}", dims, s.dims())));
        }
        total += w;
        acc = acc + s.op.scaled(*w);
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("weights sum to {total}")));
    }
    DensityMatrix::from_operator(acc)
}

pub fn random_product_vector(dims: &Dims, seed: u64) -> Result<ProductVector> {
    let (d1, d2) = dims.pair()?;
    let mut rng = stream_rng(seed, 0);
    ProductVector::new(random_unit_vector(&mut rng, d1), random_unit_vector(&mut rng, d2))
}

/// `G G† / tr(G G†)` for an `n × rank` complex Gaussian `G`.
pub fn random_state(dims: &Dims, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let n = dims.total();
    if rank == 0 || rank > n {
        return Err(Error::InvalidParameter(format!("rank {rank} not in 1..={n}")));
    }
    let mut rng = stream_rng(seed, 0);
    let g = gaussian_matrix(&mut rng, n, rank);
    let m = &g * g.adjoint();
    DensityMatrix::normalized_from(&Hermitian::new(m, dims.clone())?)
}

pub(crate) fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

/// Random Hermitian operator with Gaussian entries (GUE-like).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dims: &Dims) -> Hermitian {
    let n = dims.total();
    let g = gaussian_matrix(rng, n, n);
    Hermitian::from_parts_unchecked((&g + g.adjoint()).scale(0.5), dims.clone())
}

/// Haar-random unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let g = gaussian_matrix(rng, d, d);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Minimum eigenvalue of `ρ^Γ`.
pub fn min_pt_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    Ok(eig_hermitian(&pt(rho.op())?).values[0])
}

/// Positive partial transpose test at [`PPT_TOL`].
pub fn is_ppt(rho: &DensityMatrix) -> Result<bool> {
    Ok(min_pt_eigenvalue(rho)? >= -PPT_TOL)
}

pub(crate) fn ppt_is_decisive(dims: &Dims) -> Result<bool> {
    let (d1, d2) = dims.pair()?;
    Ok(d1 * d2 <= 6)
}

/// Separability decision.
///
/// In 2x2 and 2x3 the PPT test is exact: NPT states are returned with the
/// witness from [`witness_for_state`]; PPT states are separable and, when
/// `certify` is set, come with the product decomposition produced by the
/// best separable approximation. In larger systems NPT is still decisive,
/// while a PPT state is separable only if the best separable approximation
/// reaches `Λ ≥ 1 − 1e-6`; otherwise the verdict is `Undetermined`.
pub fn is_separable(rho: &DensityMatrix, opts: &SeparabilityOptions) -> Result<SeparabilityVerdict> {
    let decisive = ppt_is_decisive(rho.dims())?;
    if !is_ppt(rho)? {
        return Ok(SeparabilityVerdict::Entangled(witness_for_state(rho)?));
    }
    if decisive && !opts.certify {
        return Ok(SeparabilityVerdict::Separable(None));
    }
    let bsa = bsa_decompose(rho, &opts.bsa)?;
    let certificate = || {
        let assembled = sum_terms(&bsa.terms, rho.dims());
        ProductDecomposition {
            terms: bsa.terms.clone(),
            residual: assembled.distance(rho.op()),
        }
    };
    if decisive {
        return Ok(SeparabilityVerdict::Separable(Some(certificate())));
    }
    if bsa.lambda >= 1.0 - SEPARABLE_LAMBDA_TOL {
        Ok(SeparabilityVerdict::Separable(opts.certify.then(certificate)))
    } else {
        Ok(SeparabilityVerdict::Undetermined { lambda: bsa.lambda })
    }
}
