//! The finer preorder on entangled states, families, and common witnesses.
//!
//! `ρ2` is finer than `ρ1` when every witness detecting `ρ1` also detects
//! `ρ2`. Finer verdicts are certified by writing `ρ1 = (1 − ε)ρ2 + εP` with
//! separable `P`; refutations are sampled witnesses that detect `ρ1` but not
//! `ρ2`.

use rayon::prelude::*;

use crate::bsa::{bsa_decompose, BsaOptions};
use crate::error::{Error, Result};
use crate::linops::{hs_inner, pt, Hermitian};
use crate::states::{is_separable, mix, DensityMatrix, SeparabilityOptions, SeparabilityVerdict};
use crate::witness::{witness_for_state, DETECTION_TOL};

pub use crate::witness::{sample_detecting_witnesses, WitnessSample};

/// Bisection tolerance on the mixing weight `μ`.
pub const MU_TOL: f64 = 1e-10;
/// Remainders closer than this (Frobenius) belong to the same family.
pub const FAMILY_TOL: f64 = 1e-3;
const PSD_MARGIN: f64 = 1e-12;
const MU_GRID: usize = 32;

/// `min_W |tr(Wρ2) / tr(Wρ1)|` over a sample drawn from `D_{ρ1}`.
pub fn delta_hat(rho1: &DensityMatrix, rho2: &DensityMatrix, sample: &WitnessSample) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if sample.source.distance(rho1) > 1e-12 {
        return Err(Error::InvalidParameter("sample was not drawn for rho1".into()));
    }
    let mut best = f64::INFINITY;
    for w in &sample.witnesses {
        let ratio = (hs_inner(w, rho2.op())? / hs_inner(w, rho1.op())?).abs();
        best = best.min(ratio);
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq)]
pub enum FinerRelation {
    /// `ρ1 = (1 − ε)ρ2 + εP`; `p` is absent when `ε = 0`.
    Finer { epsilon: f64, p: Option<DensityMatrix>, p_separable: bool },
    /// `witness` detects `ρ1` but not `ρ2`.
    NotFiner { witness: Hermitian },
    Undetermined,
}

impl FinerRelation {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Finer { .. } => "finer",
            Self::NotFiner { .. } => "not_finer",
            Self::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FinerVerdict {
    pub relation: FinerRelation,
    /// Absent when no detecting witness could be sampled for `ρ1`.
    pub delta_hat: Option<f64>,
    /// Largest `μ` with `ρ1 − μρ2 ⪰ 0`.
    pub mu_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FinerOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for FinerOptions {
    fn default() -> Self {
        Self { samples: 200, seed: 0 }
    }
}

fn require_entangled(rho: &DensityMatrix) -> Result<()> {
    match is_separable(rho, &SeparabilityOptions::quick())? {
        SeparabilityVerdict::Separable(_) => Err(Error::NotEntangled),
        _ => Ok(()),
    }
}

fn residual(rho1: &DensityMatrix, rho2: &DensityMatrix, mu: f64) -> Hermitian {
    rho1.op() - &rho2.op().scaled(mu)
}

fn is_psd_at(rho1: &DensityMatrix, rho2: &DensityMatrix, mu: f64) -> bool {
    residual(rho1, rho2, mu).min_eigenvalue() >= -PSD_MARGIN
}

/// `P(μ) = (ρ1 − μρ2) / (1 − μ)`.
fn p_at(rho1: &DensityMatrix, rho2: &DensityMatrix, mu: f64) -> Result<DensityMatrix> {
    DensityMatrix::normalized_from(&residual(rho1, rho2, mu))
}

fn p_separable(rho1: &DensityMatrix, rho2: &DensityMatrix, mu: f64) -> Result<bool> {
    let p = p_at(rho1, rho2, mu)?;
    Ok(is_separable(&p, &SeparabilityOptions::quick())?.is_separable())
}

fn max_mu(rho1: &DensityMatrix, rho2: &DensityMatrix) -> f64 {
    if is_psd_at(rho1, rho2, 1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > MU_TOL {
        let mid = 0.5 * (lo + hi);
        if is_psd_at(rho1, rho2, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Smallest `μ ∈ (0, μ_max]` for which `P(μ)` is separable, if any.
///
/// The set of such `μ` is an interval because the separable cone is convex
/// and `ρ1 − μρ2` is affine in `μ`; `μ = 0` never qualifies since `ρ1` is
/// entangled.
fn min_separable_mu(rho1: &DensityMatrix, rho2: &DensityMatrix, mu_max: f64) -> Result<Option<f64>> {
    if mu_max <= 0.0 {
        return Ok(None);
    }
    let mut inside = None;
    if p_separable(rho1, rho2, mu_max)? {
        inside = Some(mu_max);
    } else {
        for k in (1..MU_GRID).rev() {
            let mu = mu_max * k as f64 / MU_GRID as f64;
            if p_separable(rho1, rho2, mu)? {
                inside = Some(mu);
                break;
            }
        }
    }
    if inside.is_none() {
        // the interval may be a single point; it then sits at the peak of
        // the concave λ_min((ρ1 − μρ2)^Γ)
        let mu = ppt_peak(rho1, rho2, mu_max)?;
        if p_separable(rho1, rho2, mu)? {
            inside = Some(mu);
        }
    }
    let Some(mut hi) = inside else {
        return Ok(None);
    };
    let mut lo = 0.0;
    while hi - lo > MU_TOL {
        let mid = 0.5 * (lo + hi);
        if p_separable(rho1, rho2, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Maximizer of `λ_min((ρ1 − μρ2)^Γ)` over `[0, μ_max]`, by bisection on
/// the sign of the slope.
fn ppt_peak(rho1: &DensityMatrix, rho2: &DensityMatrix, mu_max: f64) -> Result<f64> {
    let h = |mu: f64| -> Result<f64> { Ok(pt(&residual(rho1, rho2, mu))?.min_eigenvalue()) };
    let step = 1e-9 * mu_max;
    let (mut lo, mut hi) = (0.0, mu_max);
    while hi - lo > MU_TOL {
        let mid = 0.5 * (lo + hi);
        if h(mid + step)? > h(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Is `rho2` finer than `rho1`?
///
/// First tries a certificate `ρ1 = (1 − ε)ρ2 + εP` with separable `P`,
/// taking the largest certified `ε`; then looks for a sampled witness of
/// `ρ1` that misses `ρ2`; otherwise reports `Undetermined`.
pub fn is_finer(rho2: &DensityMatrix, rho1: &DensityMatrix, opts: &FinerOptions) -> Result<FinerVerdict> {
    if rho1.dims() != rho2.dims() {
        return Err(Error::Dimension(format!("{} vs {}", rho1.dims(), rho2.dims())));
    }
    require_entangled(rho1)?;
    require_entangled(rho2)?;

    let sample = sample_detecting_witnesses(rho1, opts.samples, opts.seed)?;
    let delta = if sample.is_empty() { None } else { Some(delta_hat(rho1, rho2, &sample)?) };
    let mu_max = max_mu(rho1, rho2);

    if mu_max == 1.0 {
        let relation = FinerRelation::Finer { epsilon: 0.0, p: None, p_separable: true };
        return Ok(FinerVerdict { relation, delta_hat: delta, mu_max });
    }
    if let Some(mu) = min_separable_mu(rho1, rho2, mu_max)? {
        let relation = FinerRelation::Finer {
            epsilon: 1.0 - mu,
            p: Some(p_at(rho1, rho2, mu)?),
            p_separable: true,
        };
        return Ok(FinerVerdict { relation, delta_hat: delta, mu_max });
    }

    let mut counterexample: Option<(f64, &Hermitian)> = None;
    for w in &sample.witnesses {
        let v = hs_inner(w, rho2.op())?;
        if v >= -DETECTION_TOL && counterexample.is_none_or(|(best, _)| v > best) {
            counterexample = Some((v, w));
        }
    }
    let relation = match counterexample {
        Some((_, w)) => FinerRelation::NotFiner { witness: w.clone() },
        None => FinerRelation::Undetermined,
    };
    Ok(FinerVerdict { relation, delta_hat: delta, mu_max })
}

/// `ε = 1 − 1/δ` and `P = (δρ1 − ρ2)/(δ − 1)`, so that `ρ1 = (1 − ε)ρ2 + εP`.
pub fn lemma2_decompose(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    delta: f64,
) -> Result<(f64, Option<DensityMatrix>)> {
    if !delta.is_finite() || delta < 1.0 {
        return Err(Error::InvalidParameter(format!("delta {delta} < 1")));
    }
    let equal = rho1.distance(rho2) <= 1e-8;
    if delta - 1.0 <= 1e-12 {
        if !equal {
            return Err(Error::InconsistentDelta("delta = 1 requires rho1 = rho2".into()));
        }
        return Ok((0.0, None));
    }
    if equal {
        return Err(Error::InconsistentDelta(format!("delta {delta} > 1 for identical states")));
    }
    let op = (&rho1.op().scaled(delta) - rho2.op()).scaled(1.0 / (delta - 1.0));
    let p = DensityMatrix::from_operator(op).map_err(|e| {
        Error::InconsistentDelta(format!("P is not a state ({e}); delta was underestimated"))
    })?;
    Ok((1.0 - 1.0 / delta, Some(p)))
}

/// A family, identified by its optimal entangled state.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyId {
    pub representative: DensityMatrix,
    /// Weight of the separable part that was stripped off.
    pub lambda: f64,
}

impl FamilyId {
    pub fn same_as(&self, other: &FamilyId) -> bool {
        self.representative.dims() == other.representative.dims()
            && self.representative.distance(&other.representative) <= FAMILY_TOL
    }
}

pub fn family_of(rho: &DensityMatrix, opts: &BsaOptions) -> Result<FamilyId> {
    if is_separable(rho, &SeparabilityOptions::quick())?.is_separable() {
        return Err(Error::NoFamily);
    }
    let bsa = bsa_decompose(rho, opts)?;
    let representative = bsa.remainder.ok_or(Error::NoFamily)?;
    Ok(FamilyId { representative, lambda: bsa.lambda })
}

pub fn same_family(rho1: &DensityMatrix, rho2: &DensityMatrix, opts: &BsaOptions) -> Result<bool> {
    Ok(family_of(rho1, opts)?.same_as(&family_of(rho2, opts)?))
}

/// Separability of `λΠ1 + (1 − λ)Π2` on `n` equally spaced `λ` from 0 to 1.
pub fn mixture_line_scan(
    p1: &DensityMatrix,
    p2: &DensityMatrix,
    n: usize,
) -> Result<Vec<(f64, SeparabilityVerdict)>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("grid size {n} < 2")));
    }
    (0..n)
        .into_par_iter()
        .map(|k| {
            let lambda = k as f64 / (n - 1) as f64;
            let m = mix(&[(lambda, p1), (1.0 - lambda, p2)])?;
            Ok((lambda, is_separable(&m, &SeparabilityOptions::quick())?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum CommonWitness {
    /// `witness` detects both states; `pairings` are `tr(WΠ1), tr(WΠ2)`.
    Found { witness: Hermitian, pairings: (f64, f64), lambda: f64 },
    /// The mixture at `lambda` is separable, so no witness detects both.
    NoneExists { lambda: f64 },
    Undetermined,
}

/// Looks for one witness detecting both `p1` and `p2` by scanning the
/// segment between them on `n` grid points.
pub fn common_detected_witness(p1: &DensityMatrix, p2: &DensityMatrix, n: usize) -> Result<CommonWitness> {
    let scan = mixture_line_scan(p1, p2, n)?;
    if let Some((lambda, _)) = scan.iter().find(|(_, v)| v.is_separable()) {
        return Ok(CommonWitness::NoneExists { lambda: *lambda });
    }
    for (lambda, verdict) in scan {
        let witness = match verdict {
            SeparabilityVerdict::Entangled(w) => w,
            _ => {
                let m = mix(&[(lambda, p1), (1.0 - lambda, p2)])?;
                match witness_for_state(&m) {
                    Ok(w) => w,
                    Err(Error::NoNptWitness) => continue,
                    Err(e) => return Err(e),
                }
            }
        };
        let a = hs_inner(&witness, p1.op())?;
        let b = hs_inner(&witness, p2.op())?;
        if a < -DETECTION_TOL && b < -DETECTION_TOL {
            return Ok(CommonWitness::Found { witness, pairings: (a, b), lambda });
        }
    }
    Ok(CommonWitness::Undetermined)
}
