//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test -p witness-core --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use witness_core::bsa::{bsa_decompose, is_optimal_entangled, BsaOptions, OptimalityOptions};
use witness_core::ces::{ces_search_options, is_ces, max_ces_dim, random_state_on, Subspace};
use witness_core::linops::{eig_hermitian, hs_inner, pinv, pt, CMatrix, Dims, Hermitian};
use witness_core::order::{
    common_detected_witness, delta_hat, family_of, is_finer, sample_detecting_witnesses, CommonWitness, FinerOptions,
    FinerRelation,
};
use witness_core::product_search::SearchOptions;
use witness_core::states::{
    bell, bell_vector, eta, is_separable, random_hermitian, random_unitary, werner, Bell, SeparabilityOptions,
};
use witness_core::witness::{classify, is_block_positive, min_product_expectation, ClassifyOptions};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || format!("runtime {:.1} s exceeds {limit_s} s", elapsed.as_secs_f64()))
}

fn tag_of(p: f64, opts: &ClassifyOptions) -> &'static str {
    classify(werner(p).unwrap().op(), opts).unwrap().class.tag()
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let full = ClassifyOptions::default();
    for p in [0.2, 0.3, 0.34, 0.5, 0.9, 1.0] {
        let want = if p <= WERNER_THIRD { "separable_state" } else { "entangled_state" };
        let got = tag_of(p, &full);
        ensure(got == want, || format!("p = {p}: {got}, expected {want}"))?;
    }
    let quick = ClassifyOptions { separability: SeparabilityOptions::quick(), ..ClassifyOptions::default() };
    let (mut lo, mut hi) = (0.2, 0.5);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if tag_of(mid, &quick) == "separable_state" {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let boundary = 0.5 * (lo + hi);
    ensure((boundary - WERNER_THIRD).abs() <= 1e-3, || format!("boundary {boundary}"))?;
    within(start.elapsed(), 10.0)?;
    Ok(format!("boundary {boundary:.6}"))
}

fn ac2() -> Outcome {
    let start = Instant::now();
    let psi = bell_vector(Bell::PsiPlus);
    let third = werner(WERNER_THIRD).unwrap();
    let mut worst: f64 = 0.0;
    for p in [0.4, 0.6, 0.8, 1.0] {
        let r = bsa_decompose(&werner(p).unwrap(), &BsaOptions::default()).unwrap();
        let err = (r.lambda - werner_lambda(p)).abs();
        worst = worst.max(err);
        ensure(err <= 1e-3, || format!("p = {p}: Λ = {}", r.lambda))?;
        let fid = r.remainder.as_ref().map_or(0.0, |s| s.fidelity_with_pure(&psi));
        ensure(fid >= 0.999, || format!("p = {p}: remainder fidelity {fid}"))?;
        if p < 1.0 {
            let sp = r.separable_part.as_ref().ok_or(format!("p = {p}: no separable part"))?;
            let d = sp.distance(&third);
            ensure(d <= 1e-2, || format!("p = {p}: ‖ρ^S − ρ_1/3‖ = {d}"))?;
        }
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!("max |ΔΛ| {worst:.1e}"))
}

fn ac3() -> Outcome {
    let w = flip_witness();
    let mut worst: f64 = 0.0;
    for k in 0..11 {
        let p = k as f64 / 10.0;
        let got = hs_inner(&w, werner(p).unwrap().op()).unwrap();
        worst = worst.max((got - flip_pairing(p)).abs());
    }
    ensure(worst <= 1e-12, || format!("max error {worst:e}"))?;
    Ok(format!("max error {worst:.1e}"))
}

fn ac4() -> Outcome {
    let opts = SearchOptions::default();
    let id = Hermitian::identity(two_qubits());
    let neg = bell(Bell::PsiPlus).op().scaled(-1.0);
    let cases = [("flip", flip_witness(), 0.0, 1e-6), ("identity", id, 1.0, 1e-9), ("-psi+", neg, -0.5, 1e-6)];
    let mut detail = Vec::new();
    for (name, h, want, tol) in cases {
        let pm = min_product_expectation(&h, &opts).unwrap();
        ensure((pm.value - want).abs() <= tol, || format!("{name}: minimum {}", pm.value))?;
        ensure(pm.restarts_agreeing >= 60, || format!("{name}: {}/{} restarts agree", pm.restarts_agreeing, pm.restarts))?;
        detail.push(format!("{name} {}/{}", pm.restarts_agreeing, pm.restarts));
    }
    Ok(detail.join(", "))
}

fn ac5() -> Outcome {
    let half = is_separable(&eta(0.5).unwrap(), &SeparabilityOptions::default()).unwrap();
    ensure(half.is_separable(), || format!("eta(0.5): {}", half.tag()))?;
    let rho = eta(0.75).unwrap();
    let r = bsa_decompose(&rho, &BsaOptions::default()).unwrap();
    ensure((r.lambda - 0.5).abs() <= 1e-3, || format!("eta(0.75): Λ = {}", r.lambda))?;
    let fid = r.remainder.as_ref().map_or(0.0, |s| s.fidelity_with_pure(&bell_vector(Bell::PsiMinus)));
    ensure(fid >= 0.999, || format!("eta(0.75): remainder fidelity {fid}"))?;
    let oracle = bisect_separable_weight(&rho, &bell(Bell::PsiMinus)).ok_or("oracle found no weight")?;
    ensure((r.lambda - oracle).abs() <= 1e-3, || format!("Λ = {} vs oracle {oracle}", r.lambda))?;
    let a = family_of(&rho, &BsaOptions::default()).unwrap();
    let b = family_of(&werner(0.9).unwrap(), &BsaOptions::default()).unwrap();
    ensure(!a.same_as(&b), || "eta(0.75) and werner(0.9) share a family".into())?;
    Ok(format!("Λ {:.8}, oracle {oracle:.8}", r.lambda))
}

fn ac6() -> Outcome {
    let start = Instant::now();
    let opts = OptimalityOptions::default();
    for (k, rho) in random_pure_entangled(20, 0).iter().enumerate() {
        let rep = is_optimal_entangled(rho, &opts).unwrap();
        ensure(rep.is_optimal, || format!("pure #{k}: overlap {}, weight {}", rep.max_range_overlap, rep.best_subtractable_weight))?;
    }
    let mut min_lambda = f64::INFINITY;
    for (k, rho) in random_full_rank_entangled(20, 0).iter().enumerate() {
        let l = bsa_decompose(rho, &BsaOptions::default()).unwrap().lambda;
        min_lambda = min_lambda.min(l);
        ensure(l > 1e-3, || format!("full rank #{k}: Λ = {l}"))?;
        let rep = is_optimal_entangled(rho, &opts).unwrap();
        ensure(!rep.is_optimal, || format!("full rank #{k} reported optimal"))?;
    }
    within(start.elapsed(), 300.0)?;
    Ok(format!("min Λ over full-rank states {min_lambda:.4}"))
}

fn ac7() -> Outcome {
    for (d, n) in [(vec![2, 2], 1), (vec![2, 3], 2), (vec![3, 3], 4), (vec![2, 2, 2], 4)] {
        let got = max_ces_dim(&Dims::new(d.clone()).unwrap()).unwrap();
        ensure(got == n, || format!("{d:?}: {got}, expected {n}"))?;
    }
    let search = ces_search_options();
    let mut spaces = Vec::new();
    for rho in random_pure_entangled(5, 100) {
        let v = eig_hermitian(rho.op()).vector(3);
        spaces.push(Subspace::span(&[v], two_qubits()).unwrap());
    }
    let wide = Subspace::span(&ces_2x3_vectors(), Dims::bipartite(2, 3)).unwrap();
    spaces.extend(std::iter::repeat_n(wide, 5));
    let mut optimal = 0;
    for (k, s) in spaces.iter().enumerate() {
        ensure(is_ces(s, &search).unwrap(), || format!("subspace #{k} contains a product vector"))?;
        let rho = random_state_on(s, 700 + k as u64).unwrap();
        if is_optimal_entangled(&rho, &OptimalityOptions::default()).unwrap().is_optimal {
            optimal += 1;
        }
    }
    ensure(optimal == 10, || format!("{optimal}/10 optimal"))?;
    Ok("10/10 optimal".into())
}

fn ac8() -> Outcome {
    let rho = werner(0.6).unwrap();
    let base = bsa_decompose(&rho, &BsaOptions::default()).unwrap();
    let base_rem = base.remainder.clone().ok_or("no remainder")?;
    let (mut dl, mut dr): (f64, f64) = (0.0, 0.0);
    for seed in 1..=5u64 {
        let r = bsa_decompose(&rho, &BsaOptions { seed, ..BsaOptions::default() }).unwrap();
        dl = dl.max((r.lambda - base.lambda).abs());
        dr = dr.max(r.remainder.as_ref().map_or(f64::INFINITY, |s| s.distance(&base_rem)));
    }
    ensure(dl <= 1e-4 && dr <= 1e-3, || format!("across seeds: |ΔΛ| {dl:e}, remainder {dr:e}"))?;
    let mut du: f64 = 0.0;
    for seed in 0..5u64 {
        let moved = local_unitary_conjugate(&rho, 900 + seed);
        du = du.max((bsa_decompose(&moved, &BsaOptions::default()).unwrap().lambda - base.lambda).abs());
    }
    ensure(du <= 1e-4, || format!("local unitaries: |ΔΛ| {du:e}"))?;
    Ok(format!("seeds |ΔΛ| {dl:.1e}, remainder {dr:.1e}; local unitaries |ΔΛ| {du:.1e}"))
}

fn ac9() -> Outcome {
    let psi_p = bell(Bell::PsiPlus);
    let psi_m = bell(Bell::PsiMinus);
    let opts = FinerOptions::default();
    let v = is_finer(&psi_p, &werner(0.5).unwrap(), &opts).unwrap();
    match &v.relation {
        FinerRelation::Finer { epsilon, p_separable: true, .. } if (epsilon - 0.75).abs() <= 1e-6 => {}
        other => return Err(format!("(ψ⁺, werner(0.5)): {other:?}")),
    }
    let v = is_finer(&psi_m, &psi_p, &opts).unwrap();
    let FinerRelation::NotFiner { witness } = &v.relation else {
        return Err(format!("(ψ⁻, ψ⁺): {}", v.relation.tag()));
    };
    let detects_coarser = hs_inner(witness, psi_p.op()).unwrap() < -1e-9;
    let misses_finer = hs_inner(witness, psi_m.op()).unwrap() >= -1e-9;
    let bp = is_block_positive(witness, &SearchOptions::default()).unwrap();
    ensure(detects_coarser && misses_finer && bp, || "counterexample witness fails verification".into())?;

    // (finer, coarser) pairs, each first certified
    let pairs = [
        (psi_p.clone(), werner(0.5).unwrap()),
        (psi_p.clone(), werner(0.9).unwrap()),
        (werner(0.8).unwrap(), werner(0.6).unwrap()),
        (psi_m.clone(), eta(0.75).unwrap()),
        (psi_p.clone(), psi_p.clone()),
    ];
    let mut checked = 0;
    let mut min_delta = f64::INFINITY;
    for (k, (rho2, rho1)) in pairs.iter().enumerate() {
        let v = is_finer(rho2, rho1, &opts).unwrap();
        ensure(matches!(v.relation, FinerRelation::Finer { .. }), || format!("pair #{k}: {}", v.relation.tag()))?;
        let sample = sample_detecting_witnesses(rho1, 200, 40 + k as u64).unwrap();
        ensure(sample.len() == 200, || format!("pair #{k}: only {} witnesses sampled", sample.len()))?;
        let id = Hermitian::identity(rho1.dims().clone());
        for w in &sample.witnesses {
            let a = hs_inner(w, rho1.op()).unwrap();
            let b = hs_inner(w, rho2.op()).unwrap();
            ensure(b <= a + 1e-9, || format!("pair #{k}: tr(Wρ2) = {b} > tr(Wρ1) = {a}"))?;
            let shifted = w - &id.scaled(a);
            let z = hs_inner(&shifted, rho1.op()).unwrap();
            let zb = hs_inner(&shifted, rho2.op()).unwrap();
            ensure(z.abs() <= 1e-9 && zb <= 1e-9, || format!("pair #{k}: zero clause {z} / {zb}"))?;
            checked += 1;
        }
        let d = delta_hat(rho1, rho2, &sample).unwrap();
        min_delta = min_delta.min(d);
        ensure(d >= 1.0 - 1e-9, || format!("pair #{k}: δ̂ = {d}"))?;
    }
    Ok(format!("{checked} witness clauses, min δ̂ {min_delta:.6}"))
}

fn ac10() -> Outcome {
    let psi_p = bell(Bell::PsiPlus);
    match common_detected_witness(&psi_p, &bell(Bell::PsiMinus), 101).unwrap() {
        CommonWitness::NoneExists { lambda } => {
            ensure((lambda - 0.5).abs() < 1e-12, || format!("separable point at {lambda}, expected the midpoint"))?
        }
        other => return Err(format!("(ψ⁺, ψ⁻): {other:?}")),
    }
    match common_detected_witness(&werner(0.5).unwrap(), &psi_p, 101).unwrap() {
        CommonWitness::Found { pairings: (a, b), .. } if a <= -1e-3 && b <= -1e-3 => {
            Ok(format!("pairings {a:.4}, {b:.4}"))
        }
        other => Err(format!("(werner(0.5), ψ⁺): {other:?}")),
    }
}

fn ac11() -> Outcome {
    for trial in 0..100u64 {
        let mut r = rng(trial);
        let d = Dims::bipartite(2 + (trial % 2) as usize, 2 + (trial / 2 % 2) as usize);
        let a = random_hermitian(&mut r, &d);
        let b = random_hermitian(&mut r, &d);
        let g = pt(&a).unwrap();
        ensure(pt(&g).unwrap().distance(&a) <= 1e-12, || format!("trial {trial}: involution"))?;
        ensure((g.trace() - a.trace()).abs() <= 1e-12, || format!("trial {trial}: trace"))?;
        ensure((g.matrix() - g.matrix().adjoint()).norm() <= 1e-12, || format!("trial {trial}: hermiticity"))?;
        let lhs = hs_inner(&g, &b).unwrap();
        let rhs = hs_inner(&a, &pt(&b).unwrap()).unwrap();
        ensure((lhs - rhs).abs() <= 1e-12, || format!("trial {trial}: adjoint identity"))?;
        let e = eig_hermitian(&a);
        ensure((e.reconstruct() - a.matrix()).norm() <= 1e-10 * a.frobenius_norm(), || format!("trial {trial}: eig"))?;

        let n = d.total();
        let u = random_unitary(&mut r, n);
        let zeros = (trial % 3) as usize;
        let diag: Vec<f64> = (0..n).map(|i| if i < zeros { 0.0 } else { 0.2 + i as f64 * 0.3 }).collect();
        let h = Hermitian::from_real_diagonal(&diag, d.clone()).unwrap().conjugate_by(&u);
        let (m, p): (&CMatrix, CMatrix) = (h.matrix(), pinv(&h, 1e-12).into_matrix());
        let mp = m * &p;
        let pm = &p * m;
        let ok = (&mp * m - m).norm() <= 1e-10
            && (&pm * &p - &p).norm() <= 1e-10
            && (&mp - mp.adjoint()).norm() <= 1e-10
            && (&pm - pm.adjoint()).norm() <= 1e-10;
        ensure(ok, || format!("trial {trial}: Moore–Penrose"))?;
    }
    Ok("100 trials each".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("AC1 werner boundary", ac1),
        ("AC2 werner decomposition", ac2),
        ("AC3 flip-witness pairing", ac3),
        ("AC4 block-positivity engine", ac4),
        ("AC5 eta family", ac5),
        ("AC6 optimality suite", ac6),
        ("AC7 completely entangled subspaces", ac7),
        ("AC8 uniqueness and invariance", ac8),
        ("AC9 order relations", ac9),
        ("AC10 common witnesses", ac10),
        ("AC11 linear-algebra invariants", ac11),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{name}: PASS {detail} ({secs:.1} s)"),
            Err(detail) => {
                failed += 1;
                println!("{name}: FAIL {detail} ({secs:.1} s)");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
