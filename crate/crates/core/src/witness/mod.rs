//! Block-positivity, the operator hierarchy (separable states, entangled
//! states, entanglement witnesses, everything else), and witness construction.

mod decompose;
mod sampling;

pub use decompose::{
    decompose_witness, nondecomposability_certificate, CertificateOptions, DecomposabilityVerdict,
    DecomposeOptions,
};
pub use sampling::{sample_detecting_witnesses, WitnessSample};

use crate::error::{Error, Result};
use crate::linops::{eig_hermitian, pt, Hermitian};
use crate::product_search::{best_index, multistart, SearchOptions};
use crate::states::{
    is_separable, DensityMatrix, ProductDecomposition, ProductVector, SeparabilityOptions,
    SeparabilityVerdict, PPT_TOL,
};

/// Minimum product expectation still accepted as block-positive.
pub const BLOCK_POSITIVE_TOL: f64 = 1e-6;
/// A pairing must be below `-DETECTION_TOL` to count as detection.
pub const DETECTION_TOL: f64 = 1e-9;
/// Minimum eigenvalue (after spectral-norm scaling) still counted as positive.
pub const PSD_TOL: f64 = 1e-9;

/// Heuristic global minimum of `⟨e,f|H|e,f⟩` over unit product vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductMinimum {
    pub value: f64,
    pub argmin: ProductVector,
    /// Restarts that ended within `tol` of `value`.
    pub restarts_agreeing: usize,
    pub restarts: usize,
}

/// See-saw minimization with `opts.restarts` seeded starts.
pub fn min_product_expectation(h: &Hermitian, opts: &SearchOptions) -> Result<ProductMinimum> {
    let runs = multistart(h, opts, None)?;
    let best = best_index(&runs);
    let value = runs[best].value;
    let restarts_agreeing = runs.iter().filter(|r| (r.value - value).abs() <= opts.tol).count();
    Ok(ProductMinimum {
        value,
        argmin: runs[best].vector.clone(),
        restarts_agreeing,
        restarts: runs.len(),
    })
}

pub fn is_block_positive(h: &Hermitian, opts: &SearchOptions) -> Result<bool> {
    Ok(min_product_expectation(h, opts)?.value >= -BLOCK_POSITIVE_TOL)
}

/// Where an operator sits in the hierarchy, with the evidence for it.
#[derive(Clone, Debug, PartialEq)]
pub enum HierarchyClass {
    /// Separable state, with its product decomposition when one was built.
    SeparableState { decomposition: Option<ProductDecomposition> },
    /// Entangled state; `witness` is an entanglement witness it detects.
    EntangledState { witness: Hermitian },
    /// PPT state beyond 2x3 whose separability could not be settled.
    UndeterminedState { lambda: f64 },
    /// Block-positive, not positive: `detected_state` has negative pairing and
    /// `product_minimum` shows the non-negative product expectation.
    EntanglementWitness { detected_state: DensityMatrix, product_minimum: ProductMinimum },
    /// Negative on the product vector `product`; its projector is a
    /// separable state detecting the operator.
    NonBlockPositive { product: ProductVector, expectation: f64 },
}

impl HierarchyClass {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::SeparableState { .. } => "separable_state",
            Self::EntangledState { .. } => "entangled_state",
            Self::UndeterminedState { .. } => "undetermined_state",
            Self::EntanglementWitness { .. } => "entanglement_witness",
            Self::NonBlockPositive { .. } => "non_block_positive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub class: HierarchyClass,
    /// Original trace when a positive input had to be rescaled to unit trace.
    pub normalized_from_trace: Option<f64>,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClassifyOptions {
    pub search: SearchOptions,
    pub separability: SeparabilityOptions,
}

/// Places `h` in the hierarchy. Tags do not change under positive scaling:
/// the positivity and block-positivity tests run on `h / ‖h‖₂`, and a
/// positive operator is normalized to unit trace before the separability test.
pub fn classify(h: &Hermitian, opts: &ClassifyOptions) -> Result<Classification> {
    h.dims().pair()?;
    let scale = h.spectral_norm();
    if scale == 0.0 {
        return Err(Error::InvalidParameter("cannot classify the zero operator".into()));
    }
    let unit = h.scaled(1.0 / scale);
    let eig = eig_hermitian(&unit);
    let min_eigenvalue = eig.values[0] * scale;

    if eig.values[0] >= -PSD_TOL {
        let tr = h.trace();
        let normalized_from_trace = ((tr - 1.0).abs() > 1e-9).then_some(tr);
        let rho = DensityMatrix::normalized_from(h)?;
        let class = match is_separable(&rho, &opts.separability)? {
            SeparabilityVerdict::Separable(decomposition) => HierarchyClass::SeparableState { decomposition },
            SeparabilityVerdict::Entangled(witness) => HierarchyClass::EntangledState { witness },
            SeparabilityVerdict::Undetermined { lambda } => HierarchyClass::UndeterminedState { lambda },
        };
        return Ok(Classification { class, normalized_from_trace, min_eigenvalue });
    }

    let pm = min_product_expectation(&unit, &opts.search)?;
    let class = if pm.value >= -BLOCK_POSITIVE_TOL {
        let v = eig.vector(0);
        let detected_state = DensityMatrix::from_operator(Hermitian::projector(&v, h.dims().clone())?)?;
        let product_minimum = ProductMinimum { value: pm.value * scale, ..pm };
        HierarchyClass::EntanglementWitness { detected_state, product_minimum }
    } else {
        let expectation = h.expectation(&pm.argmin.vector());
        HierarchyClass::NonBlockPositive { product: pm.argmin, expectation }
    };
    Ok(Classification { class, normalized_from_trace: None, min_eigenvalue })
}

/// `(|η⟩⟨η|)^Γ` for the eigenvector `η` of the most negative eigenvalue of
/// `ρ^Γ`. The result is block-positive and `tr(Wρ)` equals that eigenvalue.
pub fn witness_for_state(rho: &DensityMatrix) -> Result<Hermitian> {
    let g = pt(rho.op())?;
    let e = eig_hermitian(&g);
    if e.values[0] >= -PPT_TOL {
        return Err(Error::NoNptWitness);
    }
    pt(&Hermitian::projector(&e.vector(0), rho.dims().clone())?)
}

/// The product state `|e,f⟩⟨e,f|` minimizing the expectation of a
/// non-block-positive `o`; it has `tr(σ o) < 0`.
pub fn higher_level_witness_for(o: &Hermitian, opts: &SearchOptions) -> Result<DensityMatrix> {
    let pm = min_product_expectation(o, opts)?;
    if pm.value >= -BLOCK_POSITIVE_TOL {
        return Err(Error::NotWitnessable);
    }
    Ok(pm.argmin.state())
}
