//! Decomposable witnesses `W = aP + (1 − a)Q^Γ` and PPT certificates for
//! non-decomposable ones.

use rayon::prelude::*;

use super::{min_product_expectation, BLOCK_POSITIVE_TOL, DETECTION_TOL};
use crate::error::{Error, Result};
use crate::linops::{hs_inner, psd_part, pt, Hermitian};
use crate::product_search::{stream_rng, SearchOptions};
use crate::states::{gaussian_matrix, DensityMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateOptions {
    pub starts: usize,
    pub seed: u64,
    /// Projected-gradient steps per start.
    pub outer_iters: usize,
    /// Dykstra sweeps per projection onto the PPT state set.
    pub inner_iters: usize,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self { starts: 64, seed: 0, outer_iters: 200, inner_iters: 20 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecomposeOptions {
    pub max_iters: usize,
    pub residual_tol: f64,
    pub search: SearchOptions,
    pub certificate: CertificateOptions,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            residual_tol: 1e-6,
            search: SearchOptions::default(),
            certificate: CertificateOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecomposabilityVerdict {
    /// `W = aP + (1 − a)Q^Γ` with `P, Q ⪰ 0` up to `residual` (Frobenius).
    Decomposable { a: f64, p: Hermitian, q: Hermitian, residual: f64 },
    /// A PPT state the witness detects: `tr(W state) = value < 0`.
    NonDecomposable { state: DensityMatrix, value: f64 },
    Undetermined { residual: f64 },
}

impl DecomposabilityVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Decomposable { .. } => "decomposable",
            Self::NonDecomposable { .. } => "non_decomposable",
            Self::Undetermined { .. } => "undetermined",
        }
    }
}

fn split(w: &Hermitian, p: Hermitian, q: Hermitian, residual: f64) -> DecomposabilityVerdict {
    let (tp, tq) = (p.trace(), q.trace());
    let zero = Hermitian::zeros(w.dims().clone());
    if tp + tq <= 0.0 {
        return DecomposabilityVerdict::Decomposable { a: 1.0, p: zero.clone(), q: zero, residual };
    }
    let a = tp / (tp + tq);
    let p = if a > 0.0 { p.scaled(1.0 / a) } else { zero.clone() };
    let q = if a < 1.0 { q.scaled(1.0 / (1.0 - a)) } else { zero };
    DecomposabilityVerdict::Decomposable { a, p, q, residual }
}

/// Looks for `P, Q ⪰ 0` with `P + Q^Γ = W` by Dykstra's alternating
/// projections between the affine set `{(P, Q) : P + Q^Γ = W}` and the cone
/// `PSD × PSD`. If none is found, searches for a PPT state detected by `W`.
pub fn decompose_witness(w: &Hermitian, opts: &DecomposeOptions) -> Result<DecomposabilityVerdict> {
    w.dims().pair()?;
    let scale = w.spectral_norm();
    if scale > 0.0 {
        let pm = min_product_expectation(&w.scaled(1.0 / scale), &opts.search)?;
        if pm.value < -BLOCK_POSITIVE_TOL {
            return Err(Error::NotBlockPositive(pm.value * scale));
        }
    }
    let zero = Hermitian::zeros(w.dims().clone());
    if w.min_eigenvalue() >= -1e-9 {
        return Ok(split(w, w.clone(), zero, 0.0));
    }
    let wg = pt(w)?;
    if wg.min_eigenvalue() >= -1e-9 {
        return Ok(split(w, zero, wg, 0.0));
    }

    let tol = opts.residual_tol * w.frobenius_norm().max(1.0);
    let (mut p, mut q) = (w.scaled(0.5), wg.scaled(0.5));
    let mut corr_affine = (zero.clone(), zero.clone());
    let mut corr_cone = (zero.clone(), zero.clone());
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iters {
        // affine step: L(P,Q) = P + Q^Γ, L L* = 2 I
        let yp = &p + &corr_affine.0;
        let yq = &q + &corr_affine.1;
        let r = &(&yp + &pt(&yq)?) - w;
        let ap = &yp - &r.scaled(0.5);
        let aq = &yq - &pt(&r)?.scaled(0.5);
        corr_affine = (&yp - &ap, &yq - &aq);

        let zp = &ap + &corr_cone.0;
        let zq = &aq + &corr_cone.1;
        p = psd_part(&zp);
        q = psd_part(&zq);
        corr_cone = (&zp - &p, &zq - &q);

        residual = (&(&p + &pt(&q)?) - w).frobenius_norm();
        if residual <= tol {
            return Ok(split(w, p, q, residual));
        }
    }
    match nondecomposability_certificate(w, &opts.certificate)? {
        Some((state, value)) => Ok(DecomposabilityVerdict::NonDecomposable { state, value }),
        None => Ok(DecomposabilityVerdict::Undetermined { residual }),
    }
}

/// Dykstra projection onto `{ρ ⪰ 0, ρ^Γ ⪰ 0, tr ρ = 1}`.
fn project_ppt_states(x: &Hermitian, sweeps: usize) -> Result<Hermitian> {
    let n = x.dim() as f64;
    let id = Hermitian::identity(x.dims().clone());
    let zero = Hermitian::zeros(x.dims().clone());
    let mut y = x.clone();
    let mut c = [zero.clone(), zero.clone(), zero];
    for _ in 0..sweeps {
        let z = &y + &c[0];
        let y1 = psd_part(&z);
        c[0] = &z - &y1;
        let z = &y1 + &c[1];
        let y2 = pt(&psd_part(&pt(&z)?))?;
        c[1] = &z - &y2;
        let z = &y2 + &c[2];
        let y3 = &z + &id.scaled((1.0 - z.trace()) / n);
        c[2] = &z - &y3;
        y = y3;
    }
    Ok(y)
}

/// Mixes with `I/n` just enough to make both `ρ` and `ρ^Γ` positive.
fn pull_inside(rho: &Hermitian) -> Result<Hermitian> {
    let n = rho.dim() as f64;
    let rho = rho.scaled(1.0 / rho.trace());
    let m = rho.min_eigenvalue().min(pt(&rho)?.min_eigenvalue());
    if m >= 0.0 {
        return Ok(rho);
    }
    let t = (-m / (-m + 1.0 / n)) * (1.0 + 1e-9);
    let id = Hermitian::identity(rho.dims().clone()).scaled(1.0 / n);
    Ok(&rho.scaled(1.0 - t) + &id.scaled(t))
}

/// Projected-gradient descent of `tr(Wρ)` over PPT states from `starts`
/// random full-rank states. Returns the most negative PPT state found with
/// `tr(Wρ) < -1e-9`; `None` is not a proof of decomposability.
pub fn nondecomposability_certificate(
    w: &Hermitian,
    opts: &CertificateOptions,
) -> Result<Option<(DensityMatrix, f64)>> {
    let norm = w.frobenius_norm();
    if norm == 0.0 {
        return Ok(None);
    }
    let wn = w.scaled(1.0 / norm);
    let n = w.dim();
    let step = 0.5 / n as f64;
    let dims = w.dims().clone();

    let found: Vec<Option<(DensityMatrix, f64)>> = (0..opts.starts.max(1))
        .into_par_iter()
        .map(|s| -> Result<Option<(DensityMatrix, f64)>> {
            let mut rng = stream_rng(opts.seed, s as u64);
            let g = gaussian_matrix(&mut rng, n, n);
            let start = Hermitian::new(&g * g.adjoint(), dims.clone())?;
            let mut rho = start.scaled(1.0 / start.trace());
            let mut prev = f64::INFINITY;
            for _ in 0..opts.outer_iters {
                rho = project_ppt_states(&(&rho - &wn.scaled(step)), opts.inner_iters)?;
                let v = hs_inner(&wn, &rho)?;
                if (prev - v).abs() < 1e-12 {
                    break;
                }
                prev = v;
            }
            let cleaned = pull_inside(&rho)?;
            let value = hs_inner(w, &cleaned)?;
            if value < -DETECTION_TOL {
                if let Ok(state) = DensityMatrix::from_operator(cleaned) {
                    if crate::states::is_ppt(&state)? {
                        return Ok(Some((state, value)));
                    }
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(found
        .into_iter()
        .flatten()
        .fold(None, |best: Option<(DensityMatrix, f64)>, cand| match best {
            Some(b) if b.1 <= cand.1 => Some(b),
            _ => Some(cand),
        }))
}
