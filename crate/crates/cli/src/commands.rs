use std::path::Path;

use serde_json::{json, Value};
use witness_core::bsa::{BsaOptions, STOP_FRACTION};
use witness_core::order::{FAMILY_TOL, MU_TOL};
use witness_core::states::{PPT_TOL, SEPARABLE_LAMBDA_TOL, STATE_PSD_TOL, STATE_TRACE_TOL};
use witness_core::witness::{BLOCK_POSITIVE_TOL, DETECTION_TOL, PSD_TOL};
use witness_core::{
    bell, bell_vector, bsa_decompose, classify, family_of, hs_inner, is_finer, max_ces_dim, pt, werner, Bell,
    ClassifyOptions, DensityMatrix, Dims, FinerOptions, FinerRelation, HierarchyClass, SearchOptions,
    SeparabilityOptions,
};

use crate::io::read_operator;
use crate::report::{self, Report};
use crate::{CliError, EXIT_NOT_CONVERGED, EXIT_OK};

/// Flags shared by every subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct Globals {
    pub seed: u64,
    pub restarts: usize,
    pub tol: f64,
}

impl Default for Globals {
    fn default() -> Self {
        Self { seed: 0, restarts: 64, tol: 1e-6 }
    }
}

impl Globals {
    fn search(&self) -> SearchOptions {
        SearchOptions { restarts: self.restarts, seed: self.seed, tol: self.tol, ..SearchOptions::default() }
    }

    /// Each subtraction step searches with twice the global restarts.
    fn bsa(&self, max_iters: usize) -> BsaOptions {
        BsaOptions { tol: self.tol, seed: self.seed, max_iters, restarts: 2 * self.restarts, ..BsaOptions::default() }
    }

    fn echo(&self, r: &mut Report) {
        r.parameter("seed", self.seed).parameter("restarts", self.restarts).parameter("tol", self.tol);
    }
}

pub struct Outcome {
    pub report: Report,
    pub exit: u8,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self { report, exit: EXIT_OK }
    }
}

fn state_tolerances(r: &mut Report) {
    r.tolerance("state_psd", STATE_PSD_TOL)
        .tolerance("state_trace", STATE_TRACE_TOL)
        .tolerance("ppt", PPT_TOL)
        .tolerance("separable_lambda", SEPARABLE_LAMBDA_TOL);
}

fn bsa_tolerances(r: &mut Report, bsa: &BsaOptions) {
    state_tolerances(r);
    r.tolerance("bsa_tol", bsa.tol)
        .tolerance("bsa_stop_weight", bsa.tol * STOP_FRACTION)
        .tolerance("bsa_damping", bsa.damping);
    r.parameter("bsa_restarts", bsa.restarts).parameter("max_iters", bsa.max_iters);
}

fn read_state(path: &Path) -> Result<(DensityMatrix, crate::io::InputRecord), CliError> {
    let (op, rec) = read_operator(path)?;
    let rho = DensityMatrix::from_operator(op).map_err(|e| CliError::from(e).context(&rec.path))?;
    Ok((rho, rec))
}

fn class_json(class: &HierarchyClass, input: &witness_core::Hermitian) -> Result<Value, CliError> {
    Ok(match class {
        HierarchyClass::SeparableState { decomposition } => json!({
            "decomposition": decomposition.as_ref().map(|d| json!({
                "terms": report::weighted_products(&d.terms),
                "residual": d.residual,
            })),
        }),
        HierarchyClass::EntangledState { witness } => json!({
            "witness": report::operator(witness),
            "pairing": hs_inner(witness, input)? / input.trace(),
        }),
        HierarchyClass::UndeterminedState { lambda } => json!({ "lambda": lambda }),
        HierarchyClass::EntanglementWitness { detected_state, product_minimum } => json!({
            "detected_state": report::state(detected_state),
            "pairing": hs_inner(detected_state.op(), input)?,
            "product_minimum": {
                "value": product_minimum.value,
                "argmin": report::product(&product_minimum.argmin),
                "restarts_agreeing": product_minimum.restarts_agreeing,
                "restarts": product_minimum.restarts,
            },
        }),
        HierarchyClass::NonBlockPositive { product, expectation } => json!({
            "product": report::product(product),
            "expectation": expectation,
        }),
    })
}

pub fn cmd_classify(path: &Path, g: &Globals) -> Result<Outcome, CliError> {
    let (op, rec) = read_operator(path)?;
    let opts = ClassifyOptions {
        search: g.search(),
        separability: SeparabilityOptions { certify: true, bsa: g.bsa(BsaOptions::default().max_iters) },
    };
    let c = classify(&op, &opts)?;
    let mut r = Report::new("classify", vec![rec]);
    g.echo(&mut r);
    bsa_tolerances(&mut r, &opts.separability.bsa);
    r.tolerance("block_positive", BLOCK_POSITIVE_TOL)
        .tolerance("detection", DETECTION_TOL)
        .tolerance("psd", PSD_TOL);
    r.result = json!({
        "tag": c.class.tag(),
        "min_eigenvalue": c.min_eigenvalue,
        "normalized_from_trace": c.normalized_from_trace,
        "evidence": class_json(&c.class, &op)?,
    });
    Ok(Outcome::ok(r))
}

pub fn cmd_bsa(path: &Path, g: &Globals, max_iters: usize) -> Result<Outcome, CliError> {
    let (rho, rec) = read_state(path)?;
    let opts = g.bsa(max_iters);
    let b = bsa_decompose(&rho, &opts)?;
    let mut r = Report::new("bsa", vec![rec]);
    g.echo(&mut r);
    bsa_tolerances(&mut r, &opts);
    r.result = json!({
        "lambda": b.lambda,
        "separable": b.is_separable(),
        "terms": report::weighted_products(&b.terms),
        "separable_part": b.separable_part.as_ref().map(report::state),
        "remainder": b.remainder.as_ref().map(report::state),
        "trace_residual": b.trace_residual,
        "reconstruction_error": b.reconstruction_error,
        "iterations": b.iterations,
        "converged": b.converged,
    });
    let exit = if b.converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
    Ok(Outcome { report: r, exit })
}

pub fn cmd_finer(finer: &Path, coarser: &Path, g: &Globals, samples: usize) -> Result<Outcome, CliError> {
    let (rho2, rec2) = read_state(finer)?;
    let (rho1, rec1) = read_state(coarser)?;
    let opts = FinerOptions { samples, seed: g.seed };
    let v = is_finer(&rho2, &rho1, &opts)?;
    let mut r = Report::new("finer", vec![rec2, rec1]);
    g.echo(&mut r);
    r.parameter("samples", samples);
    state_tolerances(&mut r);
    r.tolerance("mu_bisection", MU_TOL).tolerance("detection", DETECTION_TOL);
    let mut result = json!({
        "finer": matches!(v.relation, FinerRelation::Finer { .. }),
        "relation": v.relation.tag(),
        "delta_hat": v.delta_hat,
        "mu_max": v.mu_max,
    });
    let extra = match &v.relation {
        FinerRelation::Finer { epsilon, p, p_separable } => json!({
            "epsilon": epsilon,
            "p": p.as_ref().map(report::state),
            "p_separable": p_separable,
        }),
        FinerRelation::NotFiner { witness } => json!({
            "witness": report::operator(witness),
            "pairing_coarser": hs_inner(witness, rho1.op())?,
            "pairing_finer": hs_inner(witness, rho2.op())?,
        }),
        FinerRelation::Undetermined => json!({}),
    };
    if let (Value::Object(dst), Value::Object(src)) = (&mut result, extra) {
        dst.extend(src);
    }
    r.result = result;
    Ok(Outcome::ok(r))
}

pub fn cmd_family(path1: &Path, path2: &Path, g: &Globals) -> Result<Outcome, CliError> {
    let (rho1, rec1) = read_state(path1)?;
    let (rho2, rec2) = read_state(path2)?;
    if rho1.dims() != rho2.dims() {
        return Err(CliError::Validation(format!("dims differ: {} vs {}", rho1.dims(), rho2.dims())));
    }
    let opts = g.bsa(BsaOptions::default().max_iters);
    let f1 = family_of(&rho1, &opts).map_err(|e| CliError::from(e).context(&rec1.path))?;
    let f2 = family_of(&rho2, &opts).map_err(|e| CliError::from(e).context(&rec2.path))?;
    let mut r = Report::new("family", vec![rec1, rec2]);
    g.echo(&mut r);
    bsa_tolerances(&mut r, &opts);
    r.tolerance("family", FAMILY_TOL);
    let family = |f: &witness_core::FamilyId| json!({ "representative": report::state(&f.representative), "lambda": f.lambda });
    r.result = json!({
        "same_family": f1.same_as(&f2),
        "distance": f1.representative.distance(&f2.representative),
        "families": [family(&f1), family(&f2)],
    });
    Ok(Outcome::ok(r))
}

pub fn cmd_ces(dims: &[usize], g: &Globals) -> Result<Outcome, CliError> {
    let d = Dims::new(dims.to_vec()).map_err(|e| CliError::Parse(e.to_string()))?;
    let n = max_ces_dim(&d).map_err(|e| CliError::Parse(e.to_string()))?;
    let mut r = Report::new("ces", vec![]);
    g.echo(&mut r);
    r.parameter("dims", dims);
    r.result = json!({ "dims": dims, "max_ces_dim": n });
    Ok(Outcome::ok(r))
}

/// Werner states on a grid: classification, the flip-witness value
/// `tr(Wρ_p)`, the separable weight and the remainder's overlap with ψ⁺.
pub fn cmd_demo_werner(points: &[f64], g: &Globals) -> Result<Outcome, CliError> {
    if let Some(p) = points.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(CliError::Parse(format!("p = {p} is outside [0, 1]")));
    }
    let flip = pt(bell(Bell::PhiSinglet).op())?;
    let psi = bell_vector(Bell::PsiPlus);
    let opts = g.bsa(BsaOptions::default().max_iters);
    let copts = ClassifyOptions {
        search: g.search(),
        separability: SeparabilityOptions { certify: false, bsa: opts.clone() },
    };
    let mut rows = Vec::with_capacity(points.len());
    let mut all_converged = true;
    for &p in points {
        let rho = werner(p)?;
        let c = classify(rho.op(), &copts)?;
        let b = bsa_decompose(&rho, &opts)?;
        all_converged &= b.converged;
        rows.push(json!({
            "p": p,
            "tag": c.class.tag(),
            "entangled": c.class.tag() == "entangled_state",
            "witness_value": hs_inner(&flip, rho.op())?,
            "lambda": b.lambda,
            "lambda_expected": (1.5 * (1.0 - p)).min(1.0),
            "remainder_fidelity": b.remainder.as_ref().map(|s| s.fidelity_with_pure(&psi)),
            "converged": b.converged,
        }));
    }
    let mut r = Report::new("demo werner", vec![]);
    g.echo(&mut r);
    bsa_tolerances(&mut r, &opts);
    r.parameter("p", points);
    r.result = json!({ "points": rows });
    let exit = if all_converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
    Ok(Outcome { report: r, exit })
}
