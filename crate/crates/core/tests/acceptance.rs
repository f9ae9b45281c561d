//! The acceptance suite: ten exact checks, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout; exits nonzero on any failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use num::{BigInt, BigRational};

use gl2lab::basechange::{bc_unit_identity, sigma_orbits, unit_group_exactness, NormCorrespondence};
use gl2lab::curves::{
    boundary_by_enumeration, boundary_ss_trace, census_checks, closed_point_trace, ss_lefschetz, Census,
};
use gl2lab::hecke::{centrality_check, hecke_context, standard_generators, tower_identity_check, tower_samples};
use gl2lab::rep::{ClassFunction, ClassGroup, PointKind};
use gl2lab::sampling::{self, DEFAULT_SEED};
use gl2lab::test_functions::{c_closed, c_r_char, GammaInvariants};
use gl2lab::tree::{
    conjugated_probes, enumerate_vertices, fixed_set, orbital_ratio, orbital_ratio_by_weights, orbital_samples,
    stabilized_line_count, stabilizes, OrbitalSample,
};
use gl2lab::{LocalContext, LocalMatrix, Result};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn norm_bijection() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, r, n) in [(2, 2, 1), (3, 2, 1), (2, 2, 2), (2, 3, 1)] {
        let t = sigma_orbits(p, r, n)?;
        ok &= t.passed() && t.orbits.len() == t.base_classes;
        parts.push(format!("({p},{r},{n}): {} orbits / {} classes", t.orbits.len(), t.base_classes));
    }
    outcome(ok, parts.join("; "))
}

fn exact_sequence() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, r, n) in [(2, 2, 1), (2, 2, 2), (3, 2, 1)] {
        let corr = NormCorrespondence::new(p, r, n)?;
        let mut gammas = sampling::choose_many(corr.base().elements(), 24, DEFAULT_SEED);
        gammas.push(corr.base().identity());
        let mut passed = 0;
        for g in &gammas {
            passed += usize::from(unit_group_exactness(&corr, g)?.passed());
        }
        ok &= passed == gammas.len();
        parts.push(format!("({p},{r},{n}): {passed}/{}", gammas.len()));
    }
    outcome(ok, parts.join("; "))
}

fn bc_unit() -> Result<Outcome> {
    let corr = NormCorrespondence::new(2, 2, 2)?;
    let cg = ClassGroup::new(2, 2)?;
    let fs = [("identity", cg.identity_delta()), ("steinberg", cg.steinberg()), ("class 3", cg.class_indicator(3))];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, f) in &fs {
        let rep = bc_unit_identity(&corr, f, 1)?;
        ok &= rep.passed();
        parts.push(format!("{name}: {} checked, {} failures", rep.checked, rep.failures));
    }
    outcome(ok, parts.join("; "))
}

fn tower() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, n) in [(2u64, 1u32), (2, 2), (3, 1)] {
        let ctx = hecke_context(p, 1, n)?;
        let samples = tower_samples(&ctx, n, 200, DEFAULT_SEED)?;
        let rep = tower_identity_check(&ctx, n, &samples)?;
        let mut need = vec!["off_support", "trace_non_unit", "ell_at_least", "k_equals_n"];
        // ℓ >= 1 whenever p = 2 divides det and the trace is odd
        if (p, n) != (2, 1) {
            need.push("ell_below");
        }
        let covered = need.iter().all(|b| rep.branches.get(*b).is_some_and(|&c| c > 0));
        ok &= rep.passed() && covered && rep.samples >= 200;
        parts.push(format!(
            "(q={p},n={n}): {} samples, {} failures, {} specialization failures, branches {:?}",
            rep.samples, rep.failures, rep.specialization_failures, rep.branches
        ));
    }
    outcome(ok, parts.join("; "))
}

fn orbital_branch(inv: &GammaInvariants, n: u32) -> &'static str {
    if inv.trace_non_unit() {
        "trace_non_unit"
    } else if inv.ell.is_some_and(|l| l.at_least(i64::from(n))) {
        if inv.ell.is_some_and(|l| l.is_infinite()) {
            "ell_infinite"
        } else {
            "ell_at_least_n"
        }
    } else {
        "ell_below_n"
    }
}

fn orbital() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, n) in [(2u64, 1u32), (2, 2), (3, 1), (3, 2)] {
        let ctx = LocalContext::new(p, 1, 14)?;
        let q = p as i64;
        let geometric = (0..n).map(|i| q.pow(i)).sum::<i64>();
        let mut seen = BTreeSet::new();
        let mut failures = 0;
        let probes = orbital_samples(&ctx, 60, DEFAULT_SEED ^ (p << 8 | u64::from(n)))?;
        for OrbitalSample { companion, probe } in &probes {
            let inv = GammaInvariants::of(companion, n)?;
            let branch = orbital_branch(&inv, n);
            seen.insert(branch);
            let expect = BigRational::from_integer(c_closed(&inv, n, p));
            // per-branch value of the unnormalised orbital sum
            let raw = match branch {
                "trace_non_unit" => int(-(1 + q) * geometric),
                "ell_below_n" => int(0),
                _ => int(q.pow(2 * n - 1) + q.pow(2 * n - 2)),
            };
            let report = orbital_ratio(probe, n)?;
            if report.ratio != expect || report.raw_sum != raw || orbital_ratio_by_weights(probe, n)? != expect {
                failures += 1;
            }
        }
        let mut need = vec!["trace_non_unit", "ell_at_least_n", "ell_infinite"];
        // a unit trace with 2 | det forces ℓ >= 1 = n
        if (p, n) != (2, 1) {
            need.push("ell_below_n");
        }
        let covered = need.iter().all(|b| seen.contains(b));
        ok &= failures == 0 && covered;
        parts.push(format!("(q={p},n={n}): {} probes, {failures} failures, branches {seen:?}", probes.len()));
    }
    outcome(ok, parts.join("; "))
}

fn character_cross_identity() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, n) in [(2u64, 1u32), (2, 2), (3, 1), (3, 2)] {
        let pi = p as i64;
        let lhs = (1 + pi) * (1 - pi.pow(n));
        let rhs = 1 - pi * (pi.pow(n) + pi.pow(n - 1) - 1);
        ok &= lhs == rhs && closed_point_trace(p, 1, n, None) == rhs;
        let group = ClassGroup::new(p, n)?;
        let e = group.identity_delta();
        let ctx = LocalContext::new(p, 1, 14)?;
        let mut seen = BTreeSet::new();
        let mut failures = 0;
        let mut checked = 0;
        for sample in orbital_samples(&ctx, 60, DEFAULT_SEED ^ 0xc0 ^ (p << 8 | u64::from(n)))? {
            let inv = GammaInvariants::of(&sample.companion, n)?;
            seen.insert(orbital_branch(&inv, n));
            let closed = c_closed(&inv, n, p);
            let chars = c_r_char(&inv, &e, 1)?;
            checked += 1;
            if chars.as_integer().map(BigInt::from) != Some(closed) {
                failures += 1;
            }
        }
        ok &= failures == 0;
        parts.push(format!(
            "(p={p},n={n}): {checked} γ, {failures} failures, branches {seen:?}, identity {lhs} = {rhs}"
        ));
    }
    outcome(ok, parts.join("; "))
}

fn drinfeld() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, n) in [(2u64, 1u32), (3, 1), (2, 2), (3, 2)] {
        let g = ClassGroup::new(p, n)?;
        let sum = g
            .units()
            .characters()
            .iter()
            .fold(g.trivial().sub(&g.trivial()), |acc: ClassFunction, chi| acc.add(&g.induced_character(chi)));
        let decomposition = sum == g.drinfeld_character();
        let modulus = g.units().modulus();
        let mut kinds = vec![PointKind::Supersingular];
        kinds.extend((1..modulus).filter(|a| a % p != 0).map(|a| PointKind::Ordinary { a }));
        let mut mismatches = 0;
        let mut checked = 0;
        for c in 0..g.classes().sizes.len() {
            let h = g.class_indicator(c);
            for &kind in &kinds {
                for r in 1..=2 {
                    checked += 1;
                    if g.ss_trace_point(kind, &h, r)? != g.ss_trace_point_by_fixed_points(kind, &h, r)? {
                        mismatches += 1;
                    }
                }
            }
        }
        ok &= decomposition && mismatches == 0;
        parts.push(format!(
            "p^n={}: decomposition {decomposition}, dual path {checked} inputs, {mismatches} mismatches",
            modulus
        ));
    }
    outcome(ok, parts.join("; "))
}

/// A lift of the residue matrix `m` with `v(det) = 1`, if one exists among small lifts.
fn lift_with_det_valuation_one(ctx: &Arc<LocalContext>, m: [i128; 4]) -> Result<Option<LocalMatrix>> {
    let p = ctx.p() as i128;
    for shift in 0..p.pow(4) {
        let lifted: [i128; 4] = std::array::from_fn(|i| m[i] + p * ((shift / p.pow(i as u32)) % p));
        let g = LocalMatrix::from_ints(ctx, 0, lifted)?;
        // exactly singular lifts have no determinant valuation
        if g.det_valuation().is_ok_and(|v| v == 1) {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

fn tree_lemma() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [2u64, 3] {
        let ctx = LocalContext::new(p, 1, 16)?;
        let q = p as i128;
        let (mut probes, mut lemma_failures) = (0, 0);
        let mut depths = BTreeSet::new();
        for probe in conjugated_probes(&ctx, 120, DEFAULT_SEED ^ p)? {
            probes += 1;
            let rep = fixed_set(&probe, probe.k_of().max(0) as u32 + 1)?;
            depths.insert(rep.k_tree);
            // integral probes, including p·M, sit at the root
            if i64::from(rep.k_tree) != probe.k_of().max(0) || !rep.nearest_unique || !rep.connected {
                lemma_failures += 1;
            }
        }
        // every residue class with p | det, lifted to v(det) = 1
        let neighbours: Vec<_> = enumerate_vertices(&ctx, 1)?.into_iter().filter(|v| v.distance() == 1).collect();
        let (mut residues, mut count_failures) = (0, 0);
        for idx in 0..q.pow(4) {
            let m: [i128; 4] = std::array::from_fn(|i| (idx / q.pow(i as u32)) % q);
            // p² divides det of any lift of the zero residue
            if m == [0; 4] || (m[0] * m[3] - m[1] * m[2]) % q != 0 {
                continue;
            }
            let Some(g) = lift_with_det_valuation_one(&ctx, m)? else { continue };
            residues += 1;
            let unstable = neighbours.iter().filter(|v| !stabilizes(&g, v).unwrap_or(true)).count() as u64;
            let expect = if (m[0] + m[3]) % q == 0 { p } else { p - 1 };
            if unstable != expect || p + 1 - stabilized_line_count(&g)? != expect {
                count_failures += 1;
            }
        }
        ok &= lemma_failures == 0 && count_failures == 0;
        parts.push(format!(
            "q={p}: {probes} probes (k_tree {depths:?}), {lemma_failures} failures; {residues} residues, {count_failures} count failures"
        ));
    }
    outcome(ok, parts.join("; "))
}

fn centrality() -> Result<Outcome> {
    let ctx = hecke_context(2, 1, 1)?;
    let gens = standard_generators(&ctx)?;
    let results = centrality_check(&ctx, 1, &gens, 100, DEFAULT_SEED)?;
    let ok = results.len() >= 3 && results.iter().all(|r| r.failures == 0 && r.samples >= 100 && r.nonzero > 0);
    let parts: Vec<String> = results
        .iter()
        .map(|r| format!("{}: {} samples, {} nonzero, {} failures", r.generator, r.samples, r.nonzero, r.failures))
        .collect();
    outcome(ok, parts.join("; "))
}

fn census() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for q in [4u64, 7, 13] {
        let census = Census::new(q)?;
        let checks = census_checks(&census);
        let lef = ss_lefschetz(&census, 0, 3)?;
        let total_matches = int(lef.total) == lef.level_points_direct;
        ok &= checks.weil_bound && checks.supersingular_criteria_agree && lef.passed() && total_matches;
        parts.push(format!(
            "q={q}: {} classes, weil {}, supersingular criteria {}, #M_3 = {} = {}",
            checks.classes, checks.weil_bound, checks.supersingular_criteria_agree, lef.total, lef.level_points_direct
        ));
    }
    for ((p, r, n, m), expect) in [((7, 1, 1, 3), 384), ((5, 2, 1, 3), 192)] {
        let formula = boundary_ss_trace(p, r, n, m)?;
        let orbits = boundary_by_enumeration(p, r, n, m)?;
        ok &= formula == int(orbits.frobenius_fixed_packets as i64) && formula == int(expect);
        parts.push(format!("boundary ({p},{r},{n},{m}): formula {formula}, orbits {}", orbits.frobenius_fixed_packets));
    }
    outcome(ok, parts.join("; "))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("norm bijection", norm_bijection),
        ("exact sequence", exact_sequence),
        ("bc unit identity", bc_unit),
        ("tower identity", tower),
        ("orbital ratio", orbital),
        ("character cross-identity", character_cross_identity),
        ("drinfeld decomposition", drinfeld),
        ("tree lemma", tree_lemma),
        ("centrality", centrality),
        ("census consistency", census),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!passed);
        println!(
            "criterion {:>2} [{}] {name} ({:.1}s): {detail}",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
