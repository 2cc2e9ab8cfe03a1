//! Best separable approximation `ρ = Λ ρ^S + (1 − Λ) ρ^optE`.
//!
//! The separable part is built greedily: at each step the product vector
//! `x = e ⊗ f` that allows the largest subtraction `ρ − λ|x⟩⟨x| ⪰ 0` is found,
//! and a damped fraction of that weight is removed. The loop ends when no
//! product projector can be removed with appreciable weight; what is left is
//! the optimal entangled remainder.
//!
//! In 2x2 and 2x3 a PPT input is separable. There each step also keeps the
//! partial transpose of the leftover positive, so the leftover stays
//! separable, and full steps are taken: every step lowers the rank of the
//! leftover or of its partial transpose, and the loop ends after at most
//! `2·d1·d2` subtractions.

use crate::error::{Error, Result};
use crate::linops::{eig_hermitian, pt, CVector, Hermitian};
use crate::product_search::{multistart, SearchOptions};
use crate::states::{
    is_ppt, is_separable, ppt_is_decisive, sum_terms, DensityMatrix, ProductVector, SeparabilityOptions, SeparabilityVerdict,
    SEPARABLE_LAMBDA_TOL,
};

/// Relative eigenvalue cutoff defining `range(ρ)`.
pub const RANGE_CUTOFF: f64 = 1e-10;
/// `x ∈ range(ρ)` iff `‖Π_R x‖² > 1 − RANGE_MEMBERSHIP_TOL`.
pub const RANGE_MEMBERSHIP_TOL: f64 = 1e-10;
/// A product vector lies in the range when its squared overlap exceeds `1 − PRODUCT_IN_RANGE_TOL`.
pub const PRODUCT_IN_RANGE_TOL: f64 = 1e-6;
/// Subtractable weight below which a state counts as optimal.
pub const OPTIMAL_WEIGHT_TOL: f64 = 1e-6;
/// The greedy loop stops once the best subtraction is below `tol * STOP_FRACTION`.
pub const STOP_FRACTION: f64 = 0.01;
/// Out-of-range penalty relative to the largest eigenvalue of `ρ⁺`.
const PENALTY: f64 = 1e7;

#[derive(Clone, Debug, PartialEq)]
pub struct BsaOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Product-vector restarts per subtraction step.
    pub restarts: usize,
    /// Fraction of the maximal weight removed per step.
    pub damping: f64,
}

impl Default for BsaOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iters: 10_000, seed: 0, restarts: 128, damping: 0.25 }
    }
}

#[derive(Clone, Debug)]
pub struct BsaResult {
    pub lambda: f64,
    /// `(Λ_α, P_α)` in subtraction order; weights sum to `lambda`.
    pub terms: Vec<(f64, ProductVector)>,
    /// Normalized `ρ^S`; absent when nothing was subtracted.
    pub separable_part: Option<DensityMatrix>,
    /// Normalized `ρ^optE`; absent when `Λ ≥ 1 − 1e-6`.
    pub remainder: Option<DensityMatrix>,
    /// Trace of the unnormalized remainder.
    pub trace_residual: f64,
    /// `‖ρ − Λρ^S − (1 − Λ)ρ^optE‖_F`.
    pub reconstruction_error: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl BsaResult {
    pub fn is_separable(&self) -> bool {
        self.remainder.is_none()
    }
}

/// Range projector, pseudo-inverse and the penalized search matrix of a
/// positive operator.
struct Geometry {
    pinv: Hermitian,
    range: Hermitian,
    penalized: Hermitian,
}

impl Geometry {
    fn of(r: &Hermitian) -> Option<Self> {
        Self::with_cutoff(r, RANGE_CUTOFF)
    }

    fn with_cutoff(r: &Hermitian, cutoff: f64) -> Option<Self> {
        let e = eig_hermitian(r);
        let max = e.values.iter().fold(0.0_f64, |a, v| a.max(*v));
        if max <= 0.0 {
            return None;
        }
        let keep = |v: f64| v > cutoff * max;
        let smallest = e.values.iter().copied().filter(|&v| keep(v)).fold(f64::INFINITY, f64::min);
        let pinv = e.reconstruct_with(|v| if keep(v) { 1.0 / v } else { 0.0 });
        let range = e.reconstruct_with(|v| if keep(v) { 1.0 } else { 0.0 });
        let penalty = PENALTY / smallest;
        let outside = e.reconstruct_with(|v| if keep(v) { 0.0 } else { penalty });
        let dims = r.dims().clone();
        let herm = |m: crate::linops::CMatrix| {
            Hermitian::from_parts_unchecked((&m + m.adjoint()).scale(0.5), dims.clone())
        };
        Some(Self {
            penalized: herm(&pinv + &outside),
            pinv: herm(pinv),
            range: herm(range),
        })
    }

    fn weight(&self, x: &CVector) -> f64 {
        if self.range.expectation(x) > 1.0 - RANGE_MEMBERSHIP_TOL {
            1.0 / self.pinv.expectation(x)
        } else {
            0.0
        }
    }
}

fn check_unit(x: &CVector) -> Result<()> {
    let n = x.norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("vector norm {n} is not 1")));
    }
    Ok(())
}

/// Largest `λ ≥ 0` with `ρ − λ|x⟩⟨x| ⪰ 0`: `1/⟨x|ρ⁺|x⟩` when `x ∈ range(ρ)`,
/// zero otherwise.
pub fn max_subtractable_weight(rho: &DensityMatrix, x: &CVector) -> Result<f64> {
    check_unit(x)?;
    if x.len() != rho.op().dim() {
        return Err(Error::Dimension(format!("vector length {} vs state dimension {}", x.len(), rho.op().dim())));
    }
    Ok(Geometry::of(rho.op()).map_or(0.0, |g| g.weight(x)))
}

/// `e ⊗ f̄`, so that `(|x⟩⟨x|)^Γ = |x̄_2⟩⟨x̄_2|` for `x = e ⊗ f`.
fn conj_second(x: &ProductVector) -> CVector {
    crate::linops::kron_vector(x.e(), &x.f().conjugate())
}

fn best_subtraction(
    r: &Hermitian,
    opts: &SearchOptions,
    warm: Option<&ProductVector>,
    keep_ppt: Option<f64>,
) -> Result<Option<(ProductVector, f64)>> {
    // full steps leave rounding-level eigenvalues behind; in PPT mode those
    // are cut off at `tol` instead of counting as range
    let cutoff = keep_ppt.unwrap_or(RANGE_CUTOFF);
    let Some(geom) = Geometry::with_cutoff(r, cutoff) else {
        return Ok(None);
    };
    // ⟨e ⊗ f̄|A|e ⊗ f̄⟩ = ⟨e ⊗ f|A^Γ|e ⊗ f⟩, so both bounds search as one form
    let transposed = if keep_ppt.is_some() {
        match Geometry::with_cutoff(&pt(r)?, cutoff) {
            Some(g) => Some(g),
            None => return Ok(None),
        }
    } else {
        None
    };
    let target = match &transposed {
        Some(t) => &geom.penalized + &pt(&t.penalized)?,
        None => geom.penalized.clone(),
    };
    let runs = multistart(&target, opts, warm)?;
    let mut best: Option<(ProductVector, f64)> = None;
    for run in runs {
        let mut w = geom.weight(&run.vector.vector());
        if let Some(t) = &transposed {
            w = w.min(t.weight(&conj_second(&run.vector)));
        }
        if best.as_ref().is_none_or(|(_, bw)| w > *bw) {
            best = Some((run.vector, w));
        }
    }
    Ok(best)
}

/// Product vector with the largest subtractable weight found over
/// `opts.restarts` starts (default 128 in [`OptimalityOptions`]).
pub fn best_product_subtraction(rho: &DensityMatrix, opts: &SearchOptions) -> Result<(ProductVector, f64)> {
    rho.dims().pair()?;
    let found = best_subtraction(rho.op(), opts, None, None)?;
    Ok(found.expect("a density matrix is nonzero"))
}

fn iteration_seed(seed: u64, iteration: usize) -> u64 {
    seed ^ (iteration as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Greedy damped subtraction of product projectors.
pub fn bsa_decompose(rho: &DensityMatrix, opts: &BsaOptions) -> Result<BsaResult> {
    rho.dims().pair()?;
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidParameter(format!("damping {} not in (0, 1]", opts.damping)));
    }
    let dims = rho.dims().clone();
    let keep_ppt = (ppt_is_decisive(&dims)? && is_ppt(rho)?).then_some(opts.tol);
    let damping = if keep_ppt.is_some() { 1.0 } else { opts.damping };
    let stop = opts.tol * STOP_FRACTION;
    let mut r = rho.op().clone();
    let mut terms: Vec<(f64, ProductVector)> = Vec::new();
    let mut lambda = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    let mut warm: Option<ProductVector> = None;

    while iterations < opts.max_iters {
        let search = SearchOptions {
            restarts: opts.restarts,
            seed: iteration_seed(opts.seed, iterations),
            ..SearchOptions::default()
        };
        let best = best_subtraction(&r, &search, warm.as_ref(), keep_ppt)?;
        let Some((x, w)) = best.filter(|(_, w)| *w >= stop) else {
            converged = true;
            break;
        };
        iterations += 1;
        let step = damping * w;
        r = &r - &x.projector().scaled(step);
        lambda += step;
        terms.push((step, x.clone()));
        warm = Some(x);
    }
    if !converged {
        // budget spent; one more probe tells whether the loop had in fact finished
        let search = SearchOptions { restarts: opts.restarts, seed: opts.seed, ..SearchOptions::default() };
        converged = best_subtraction(&r, &search, warm.as_ref(), keep_ppt)?.is_none_or(|(_, w)| w < stop);
    }

    if converged {
        r = drop_residue(&r, opts.tol)?;
    }
    let trace_residual = r.trace();
    let remainder = if lambda >= 1.0 - SEPARABLE_LAMBDA_TOL {
        None
    } else {
        Some(DensityMatrix::normalized_from(&r)?)
    };
    let separable_part = if lambda > 0.0 {
        Some(DensityMatrix::normalized_from(&sum_terms(&terms, &dims))?)
    } else {
        None
    };

    let mut rebuilt = Hermitian::zeros(dims.clone());
    if let Some(s) = &separable_part {
        rebuilt = &rebuilt + &s.op().scaled(lambda);
    }
    if let Some(rem) = &remainder {
        rebuilt = &rebuilt + &rem.op().scaled(1.0 - lambda);
    }
    let reconstruction_error = rebuilt.distance(rho.op());

    Ok(BsaResult {
        lambda,
        terms,
        separable_part,
        remainder,
        trace_residual,
        reconstruction_error,
        iterations,
        converged,
    })
}

/// Zeroes eigenvalues of the leftover below `tol` times the largest. The
/// greedy loop only approaches the separable boundary, so a converged
/// leftover keeps a few eigenvalues of the order of the stopping weight;
/// left in place they would put spurious product vectors in its range.
fn drop_residue(r: &Hermitian, tol: f64) -> Result<Hermitian> {
    let e = eig_hermitian(r);
    let top = e.values.last().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return Ok(r.clone());
    }
    let cut = tol * top;
    Hermitian::new(e.reconstruct_with(|v| if v < cut { 0.0 } else { v }), r.dims().clone())
}

#[derive(Clone, Debug)]
pub struct RangeSearch {
    /// Best product vector found and its squared overlap with `range(ρ)`.
    pub best: ProductVector,
    pub overlap: f64,
}

impl RangeSearch {
    /// The maximizer, if it lies in the range.
    pub fn product(&self) -> Option<&ProductVector> {
        (self.overlap > 1.0 - PRODUCT_IN_RANGE_TOL).then_some(&self.best)
    }
}

/// Multistart maximization of `‖Π_R (e ⊗ f)‖²`.
pub fn range_product_search(rho: &DensityMatrix, opts: &SearchOptions) -> Result<RangeSearch> {
    let proj = crate::linops::range_projector(rho.op(), RANGE_CUTOFF);
    overlap_search(&proj, opts)
}

/// Maximizes `⟨x|Π|x⟩` over product vectors for an orthogonal projector `Π`.
pub(crate) fn overlap_search(proj: &Hermitian, opts: &SearchOptions) -> Result<RangeSearch> {
    let pm = crate::witness::min_product_expectation(&-proj, opts)?;
    Ok(RangeSearch { overlap: -pm.value, best: pm.argmin })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalityOptions {
    pub range: SearchOptions,
    pub subtraction: SearchOptions,
}

impl Default for OptimalityOptions {
    fn default() -> Self {
        Self {
            range: SearchOptions::default(),
            subtraction: SearchOptions::default().with_restarts(128),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimalityReport {
    pub is_optimal: bool,
    pub violating_product: Option<ProductVector>,
    pub max_range_overlap: f64,
    pub best_subtractable_weight: f64,
}

/// Optimal iff no product vector lies in the range and no product
/// projector can be subtracted with weight `≥ 1e-6`.
pub fn is_optimal_entangled(rho: &DensityMatrix, opts: &OptimalityOptions) -> Result<OptimalityReport> {
    if let SeparabilityVerdict::Separable(_) = is_separable(rho, &SeparabilityOptions::quick())? {
        return Err(Error::NotEntangled);
    }
    let range = range_product_search(rho, &opts.range)?;
    let (x, weight) = best_product_subtraction(rho, &opts.subtraction)?;
    let in_range = range.product().cloned();
    let violating_product = in_range.or_else(|| (weight >= OPTIMAL_WEIGHT_TOL).then_some(x));
    Ok(OptimalityReport {
        is_optimal: violating_product.is_none(),
        violating_product,
        max_range_overlap: range.overlap,
        best_subtractable_weight: weight,
    })
}
