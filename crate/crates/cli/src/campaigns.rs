//! One function per subcommand; each returns a result body plus exact checks.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use num::{BigInt, BigRational};
use serde_json::{json, Value};

use gl2lab::basechange::{bc_unit_identity, sigma_orbits, unit_group_exactness, NormCorrespondence};
use gl2lab::curves::{
    boundary_by_enumeration, boundary_ss_trace, census_checks, closed_point_trace, ss_lefschetz, Census,
};
use gl2lab::hecke::{centrality_check, hecke_context, standard_generators, tower_identity_check, tower_samples};
use gl2lab::padic::{parse_local_matrix, prime_power_decompose};
use gl2lab::rep::{ClassFunction, ClassGroup, PointKind};
use gl2lab::sampling;
use gl2lab::test_functions::{c_closed, c_r_char, phi_branch, phi_p0, phi_pn, phi_pnt, GammaInvariants};
use gl2lab::tree::{
    conjugated_probes, enumerate_vertices, fixed_set, orbital_ratio, orbital_ratio_by_weights, orbital_samples,
    stabilized_line_count, stabilizes,
};
use gl2lab::{Error, LocalContext, LocalMatrix, Result};

use crate::args::*;
use crate::output::{Check, Outcome};

pub fn run(command: &Command, seed: u64) -> Result<Outcome> {
    let (name, result, checks, csv) = match command {
        Command::EvalPhi(a) => with_checks(eval_phi(a)?),
        Command::TreeOrbital(a) => with_checks(tree_orbital(a)?),
        Command::TreeFixedSet(a) => with_checks(tree_fixed_set(a, seed)?),
        Command::CharTable(a) => with_checks(char_table(a)?),
        Command::SsTrace(a) => with_checks(ss_trace(a)?),
        Command::VerifyNorm(a) => with_checks(verify_norm(a)?),
        Command::VerifyExactSeq(a) => with_checks(verify_exact_seq(a, seed)?),
        Command::VerifyBcUnit(a) => with_checks(verify_bc_unit(a)?),
        Command::VerifyTower(a) => with_checks(verify_tower(a, seed)?),
        Command::VerifyCentral(a) => with_checks(verify_central(a, seed)?),
        Command::VerifyOrbital(a) => with_checks(verify_orbital(a, seed)?),
        Command::VerifyCr(a) => with_checks(verify_cr(a, seed)?),
        Command::Census(a) => census(a)?,
        Command::Boundary(a) => with_checks(boundary(a)?),
        Command::ReportAll => with_checks(report_all(seed)?),
    }
    .named(command);
    let parameters = match serde_json::to_value(command).unwrap_or(Value::Null) {
        Value::Object(m) => m.into_iter().next().map(|(_, v)| v).unwrap_or(Value::Null),
        _ => Value::Null,
    };
    Ok(Outcome { command: name, parameters, result, checks, csv })
}

type Body = (Value, Vec<Check>);

fn with_checks((result, checks): Body) -> Partial {
    Partial { result, checks, csv: None }
}

struct Partial {
    result: Value,
    checks: Vec<Check>,
    csv: Option<String>,
}

impl Partial {
    fn named(self, command: &Command) -> (String, Value, Vec<Check>, Option<String>) {
        let name = match serde_json::to_value(command) {
            Ok(Value::Object(m)) => m.keys().next().cloned().unwrap_or_default(),
            Ok(Value::String(s)) => s,
            _ => String::new(),
        };
        (name, self.result, self.checks, self.csv)
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn split_q(q: u64) -> Result<(u64, usize)> {
    prime_power_decompose(q)
        .map(|(p, r)| (p, r as usize))
        .ok_or_else(|| invalid(format!("q = {q} is not a prime power")))
}

fn rational(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn class_function(group: &Arc<ClassGroup>, name: &str) -> Result<ClassFunction> {
    match name {
        "identity" => Ok(group.identity_delta()),
        "trivial" => Ok(group.trivial()),
        "steinberg" => Ok(group.steinberg()),
        _ => {
            let idx = name
                .strip_prefix("class:")
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| invalid(format!("unknown class function {name:?}")))?;
            let count = group.classes().sizes.len();
            if idx >= count {
                return Err(invalid(format!("class index {idx} out of range, there are {count} classes")));
            }
            Ok(group.class_indicator(idx))
        }
    }
}

/// Branches of the level-`n` orbital constant that some semisimple `γ` with `v(det) = 1` realises.
fn reachable_branches(q: u64, n: u32) -> Vec<&'static str> {
    let mut need = vec!["trace_non_unit", "ell_at_least_n", "ell_infinite"];
    // a unit trace with 2 | det forces ℓ >= 1 = n
    if (q, n) != (2, 1) {
        need.push("ell_below_n");
    }
    need
}

fn orbital_branch(inv: &GammaInvariants, n: u32) -> &'static str {
    match inv.ell {
        _ if inv.trace_non_unit() => "trace_non_unit",
        Some(l) if l.is_infinite() => "ell_infinite",
        Some(l) if l.at_least(i64::from(n)) => "ell_at_least_n",
        _ => "ell_below_n",
    }
}

fn coverage_check(name: &str, inputs: Value, need: &[&str], seen: &BTreeSet<&str>) -> Check {
    let missing: Vec<&str> = need.iter().copied().filter(|b| !seen.contains(b)).collect();
    Check::equal(name, inputs, "[]", format!("{missing:?}"))
}

fn eval_phi(a: &EvalPhiArgs) -> Result<Body> {
    let ctx = LocalContext::new(a.p, a.r, a.precision.unwrap_or(2 * a.n + 8))?;
    let g = parse_local_matrix(&ctx, &a.gamma)?;
    if a.n == 0 {
        if a.deformed {
            return Err(invalid("the deformation starts at level 1"));
        }
        return Ok((json!({ "gamma": g.to_string(), "value": phi_p0(&g)?.to_string() }), vec![]));
    }
    let mut result = json!({
        "gamma": g.to_string(),
        "branch": phi_branch(&g, a.n)?,
        "value": phi_pn(&g, a.n)?.to_string(),
    });
    if a.deformed {
        let t = phi_pnt(&g, a.n)?;
        result["deformed"] = json!(t.to_string());
        result["deformed_at_q"] = json!(t.at_q().to_string());
    }
    Ok((result, vec![]))
}

fn tree_orbital(a: &TreeOrbitalArgs) -> Result<Body> {
    let ctx = LocalContext::new(a.p, a.r, a.precision.unwrap_or(6 * a.n + 14))?;
    let g = parse_local_matrix(&ctx, &a.gamma)?;
    let report = orbital_ratio(&g, a.n)?;
    let weights = orbital_ratio_by_weights(&g, a.n)?;
    let closed = c_closed(&GammaInvariants::of(&g, a.n)?, a.n, ctx.q());
    let inputs = json!({ "gamma": g.to_string(), "n": a.n });
    let checks = vec![
        Check::equal("enumeration equals closed form", inputs.clone(), &closed, &report.ratio),
        Check::equal("weights equal closed form", inputs, &closed, &weights),
    ];
    Ok((
        json!({ "gamma": g.to_string(), "report": report, "by_weights": weights.to_string(), "closed_form": closed.to_string() }),
        checks,
    ))
}

/// A lift of the residue matrix `m` with `v(det) = 1`, if one exists among the lifts `m + p t`, `0 <= t < p`.
fn lift_with_det_valuation_one(ctx: &Arc<LocalContext>, m: [i128; 4]) -> Result<Option<LocalMatrix>> {
    let p = ctx.p() as i128;
    for shift in 0..p.pow(4) {
        let lifted: [i128; 4] = std::array::from_fn(|i| m[i] + p * ((shift / p.pow(i as u32)) % p));
        let g = LocalMatrix::from_ints(ctx, 0, lifted)?;
        if g.det_valuation().is_ok_and(|v| v == 1) {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

fn tree_fixed_set(a: &TreeFixedSetArgs, seed: u64) -> Result<Body> {
    let ctx = LocalContext::new(a.p, a.r, a.precision)?;
    if let Some(text) = &a.gamma {
        let g = parse_local_matrix(&ctx, text)?;
        let k = g.k_of().max(0);
        let rep = fixed_set(&g, a.depth.unwrap_or(k as u32 + 1))?;
        let inputs = json!({ "gamma": g.to_string() });
        let checks = vec![
            Check::equal("distance to the fixed set", inputs.clone(), k, rep.k_tree),
            Check::holds("nearest vertex unique", inputs.clone(), rep.nearest_unique),
            Check::holds("fixed set connected", inputs, rep.connected),
        ];
        return Ok((serde_json::to_value(&rep).unwrap_or(Value::Null), checks));
    }
    let mut checks = Vec::new();
    let mut depths = BTreeSet::new();
    for probe in conjugated_probes(&ctx, a.probes, seed)? {
        let k = probe.k_of().max(0);
        let rep = fixed_set(&probe, a.depth.unwrap_or(k as u32 + 1))?;
        depths.insert(rep.k_tree);
        let ok = i64::from(rep.k_tree) == k && rep.nearest_unique && rep.connected;
        checks.push(Check::equal(
            "nearest stabilized vertex",
            json!({ "gamma": probe.to_string() }),
            format!("unique, connected, distance {k}"),
            if ok { format!("unique, connected, distance {k}") } else { format!("{rep:?}") },
        ));
    }
    let mut residues = 0;
    if a.r == 1 {
        let q = a.p as i128;
        let neighbours: Vec<_> = enumerate_vertices(&ctx, 1)?.into_iter().filter(|v| v.distance() == 1).collect();
        for idx in 0..q.pow(4) {
            let m: [i128; 4] = std::array::from_fn(|i| (idx / q.pow(i as u32)) % q);
            // p² divides det of any lift of the zero residue
            if m == [0; 4] || (m[0] * m[3] - m[1] * m[2]) % q != 0 {
                continue;
            }
            let Some(g) = lift_with_det_valuation_one(&ctx, m)? else { continue };
            residues += 1;
            let mut unstable = 0u64;
            for v in &neighbours {
                unstable += u64::from(!stabilizes(&g, v)?);
            }
            let expect = if (m[0] + m[3]) % q == 0 { a.p } else { a.p - 1 };
            let inputs = json!({ "residue": format!("{m:?}"), "lift": g.to_string() });
            checks.push(Check::equal("neighbours not stabilized", inputs.clone(), expect, unstable));
            checks.push(Check::equal(
                "neighbours not stabilized, by fixed lines",
                inputs,
                expect,
                a.p + 1 - stabilized_line_count(&g)?,
            ));
        }
    }
    let result = json!({ "probes": a.probes, "distances_seen": depths, "residues": residues });
    Ok((result, checks))
}

fn char_table(a: &LevelArgs) -> Result<Body> {
    let g = ClassGroup::new(a.p, a.n)?;
    let classes: Vec<Value> = (0..g.classes().sizes.len())
        .map(|c| json!({ "index": c, "rep": g.group().format(&g.class_rep(c)), "size": g.classes().sizes[c] }))
        .collect();
    let chars = g.units().characters();
    let induced: Vec<Value> =
        chars.iter().map(|chi| json!({ "chi": chi.exps, "values": g.induced_character(chi).values() })).collect();
    let sum = chars.iter().fold(g.trivial().sub(&g.trivial()), |acc, chi| acc.add(&g.induced_character(chi)));
    let drinfeld = g.drinfeld_character();
    let inputs = json!({ "p": a.p, "n": a.n });
    let mut checks =
        vec![Check::holds("surjection character equals the principal-series sum", inputs.clone(), sum == drinfeld)];
    let modulus = g.units().modulus();
    let mut kinds = vec![PointKind::Supersingular];
    kinds.extend((1..modulus).filter(|x| x % a.p != 0).map(|x| PointKind::Ordinary { a: x }));
    let (mut compared, mut mismatches) = (0, 0);
    for c in 0..g.classes().sizes.len() {
        let h = g.class_indicator(c);
        for &kind in &kinds {
            for r in 1..=2 {
                compared += 1;
                mismatches +=
                    usize::from(g.ss_trace_point(kind, &h, r)? != g.ss_trace_point_by_fixed_points(kind, &h, r)?);
            }
        }
    }
    checks.push(Check::equal(
        "point trace by characters equals fixed-point count",
        json!({ "p": a.p, "n": a.n, "inputs": compared }),
        0,
        mismatches,
    ));
    let result = json!({
        "classes": classes,
        "principal_series": induced,
        "steinberg": g.steinberg().values(),
        "surjections": drinfeld.values(),
    });
    Ok((result, checks))
}

fn ss_trace(a: &SsTraceArgs) -> Result<Body> {
    let g = ClassGroup::new(a.p, a.n)?;
    let kind = match (a.kind, a.a) {
        (Kind::Supersingular, _) => PointKind::Supersingular,
        (Kind::Ordinary, Some(x)) => PointKind::Ordinary { a: x },
        (Kind::Ordinary, None) => return Err(invalid("ordinary points need --a")),
    };
    let h = class_function(&g, &a.function)?;
    let by_chars = g.ss_trace_point(kind, &h, a.r)?;
    let by_fixed = g.ss_trace_point_by_fixed_points(kind, &h, a.r)?;
    let inputs = json!({ "p": a.p, "n": a.n, "r": a.r, "kind": a.kind, "a": a.a, "function": a.function });
    let mut checks = vec![Check::equal("characters equal fixed points", inputs.clone(), &by_fixed, &by_chars)];
    let mut result = json!({ "by_characters": by_chars, "by_fixed_points": by_fixed });
    if a.function == "identity" {
        let closed = closed_point_trace(a.p, a.r, a.n, a.a);
        result["closed_form"] = json!(closed);
        checks.push(Check::equal("closed form", inputs, closed, &by_chars));
    }
    Ok((result, checks))
}

fn verify_norm(a: &GaloisArgs) -> Result<Body> {
    let t = sigma_orbits(a.p, a.r, a.n)?;
    let inputs = json!({ "p": a.p, "r": a.r, "n": a.n });
    let checks = vec![
        Check::equal("σ-classes against base classes", inputs.clone(), t.base_classes, t.orbits.len()),
        Check::holds("norm bijection", inputs.clone(), t.bijection),
        Check::holds("twisted centralizers match", inputs.clone(), t.centralizers_match),
        Check::holds("orbit-stabilizer", inputs.clone(), t.orbit_stabilizer),
        Check::holds("class counting identity", inputs, t.counting_identity),
    ];
    Ok((serde_json::to_value(&t).unwrap_or(Value::Null), checks))
}

fn verify_exact_seq(a: &ExactSeqArgs, seed: u64) -> Result<Body> {
    let g = &a.galois;
    let corr = NormCorrespondence::new(g.p, g.r, g.n)?;
    let mut gammas = vec![corr.base().identity()];
    gammas.extend(sampling::choose_many(corr.base().elements(), a.samples, seed));
    let mut reports = Vec::new();
    let mut checks = Vec::new();
    for gamma in &gammas {
        let rep = unit_group_exactness(&corr, gamma)?;
        checks.push(Check::holds("exact sequence of units", json!({ "gamma": rep.gamma }), rep.passed()));
        reports.push(rep);
    }
    Ok((json!({ "reports": reports }), checks))
}

fn verify_bc_unit(a: &BcUnitArgs) -> Result<Body> {
    let g = &a.galois;
    let corr = NormCorrespondence::new(g.p, g.r, g.n)?;
    let group = ClassGroup::new(g.p, g.n)?;
    let mut reports = Vec::new();
    let mut checks = Vec::new();
    for name in &a.functions {
        let f = class_function(&group, name)?;
        let rep = bc_unit_identity(&corr, &f, a.k)?;
        let inputs = json!({ "function": name, "k": a.k, "checked": rep.checked });
        checks.push(Check::equal("unit base change", inputs, 0, rep.failures));
        reports.push(json!({ "function": name, "report": rep }));
    }
    Ok((json!({ "reports": reports }), checks))
}

fn verify_tower(a: &TowerArgs, seed: u64) -> Result<Body> {
    let (p, r) = split_q(a.q)?;
    let ctx = hecke_context(p, r, a.n)?;
    let samples = tower_samples(&ctx, a.n, a.samples, seed)?;
    let rep = tower_identity_check(&ctx, a.n, &samples)?;
    let inputs = json!({ "q": a.q, "n": a.n, "samples": rep.samples });
    let mut need = vec!["off_support", "trace_non_unit", "ell_at_least", "k_equals_n"];
    if (a.q, a.n) != (2, 1) {
        need.push("ell_below");
    }
    let seen: BTreeSet<&str> = rep.branches.keys().map(String::as_str).collect();
    let checks = vec![
        Check::equal("deformed identity", inputs.clone(), 0, rep.failures),
        Check::equal("specialization at t = q", inputs.clone(), 0, rep.specialization_failures),
        coverage_check("branch coverage", inputs, &need, &seen),
    ];
    Ok((serde_json::to_value(&rep).unwrap_or(Value::Null), checks))
}

fn verify_central(a: &CentralArgs, seed: u64) -> Result<Body> {
    let (p, r) = split_q(a.q)?;
    let ctx = hecke_context(p, r, a.n.max(1))?;
    let all = standard_generators(&ctx)?;
    if a.generators == 0 || a.generators > all.len() {
        return Err(invalid(format!("--generators must lie in 1..={}", all.len())));
    }
    let gens: Vec<_> = all.into_iter().take(a.generators).collect();
    let results = centrality_check(&ctx, a.n, &gens, a.samples, seed)?;
    let checks = results
        .iter()
        .map(|res| {
            let inputs = json!({ "generator": res.generator, "samples": res.samples, "nonzero": res.nonzero });
            Check::equal("convolution commutes", inputs, 0, res.failures)
        })
        .collect();
    Ok((json!({ "generators": results }), checks))
}

fn verify_orbital(a: &OrbitalArgs, seed: u64) -> Result<Body> {
    let (p, r) = split_q(a.q)?;
    if a.n == 0 {
        return Err(invalid("orbital ratios start at level 1"));
    }
    let ctx = LocalContext::new(p, r, (4 * a.n + 6).max(14))?;
    let q = a.q as i64;
    let geometric: i64 = (0..a.n).map(|i| q.pow(i)).sum();
    let mut seen = BTreeSet::new();
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for sample in orbital_samples(&ctx, a.samples, seed)? {
        let inv = GammaInvariants::of(&sample.companion, a.n)?;
        let branch = orbital_branch(&inv, a.n);
        seen.insert(branch);
        let closed = BigRational::from_integer(c_closed(&inv, a.n, a.q));
        // unnormalised orbital sum per branch
        let raw = match branch {
            "trace_non_unit" => rational(-(1 + q) * geometric),
            "ell_below_n" => rational(0),
            _ => rational(q.pow(2 * a.n - 1) + q.pow(2 * a.n - 2)),
        };
        let report = orbital_ratio(&sample.probe, a.n)?;
        let weights = orbital_ratio_by_weights(&sample.probe, a.n)?;
        let inputs =
            json!({ "gamma": sample.probe.to_string(), "companion": sample.companion.to_string(), "branch": branch });
        checks.push(Check::equal(
            "orbital ratio",
            inputs,
            format!("ratio {closed}, sum {raw}, weights {closed}"),
            format!("ratio {}, sum {}, weights {weights}", report.ratio, report.raw_sum),
        ));
        rows.push(json!({ "gamma": sample.probe.to_string(), "branch": branch, "ratio": report.ratio.to_string() }));
    }
    checks.push(coverage_check("branch coverage", json!({ "q": a.q, "n": a.n }), &reachable_branches(a.q, a.n), &seen));
    Ok((json!({ "samples": rows }), checks))
}

fn verify_cr(a: &CrossArgs, seed: u64) -> Result<Body> {
    if a.n == 0 {
        return Err(invalid("the character formula starts at level 1"));
    }
    let group = ClassGroup::new(a.p, a.n)?;
    let e = group.identity_delta();
    let ctx = LocalContext::new(a.p, 1, (4 * a.n + 6).max(14))?;
    let p = a.p as i64;
    let lhs = (1 + p) * (1 - p.pow(a.n));
    let rhs = 1 - p * (p.pow(a.n) + p.pow(a.n - 1) - 1);
    let inputs = json!({ "p": a.p, "n": a.n });
    let mut checks = vec![
        Check::equal("(1+p)(1-p^n) = 1 - p(p^n + p^(n-1) - 1)", inputs.clone(), lhs, rhs),
        Check::equal("supersingular point trace", inputs.clone(), lhs, closed_point_trace(a.p, 1, a.n, None)),
    ];
    let mut seen = BTreeSet::new();
    for sample in orbital_samples(&ctx, a.samples, seed)? {
        let inv = GammaInvariants::of(&sample.companion, a.n)?;
        seen.insert(orbital_branch(&inv, a.n));
        let closed = c_closed(&inv, a.n, a.p);
        let chars = c_r_char(&inv, &e, 1)?;
        checks.push(Check::equal(
            "closed form against characters",
            json!({ "gamma": sample.companion.to_string() }),
            &closed,
            &chars,
        ));
    }
    checks.push(coverage_check("branch coverage", inputs, &reachable_branches(a.p, a.n), &seen));
    Ok((json!({ "samples": a.samples, "branches": seen }), checks))
}

fn census(a: &CensusArgs) -> Result<Partial> {
    let census = Census::new(a.q)?;
    if a.r.is_some_and(|r| r != census.r) {
        return Err(invalid(format!("q = {} is {}^{}, not r = {:?}", a.q, census.p, census.r, a.r)));
    }
    let checks_report = census_checks(&census);
    let lef = ss_lefschetz(&census, a.n, a.m)?;
    let inputs = json!({ "q": a.q, "m": a.m, "n": a.n });
    let mut checks = vec![
        Check::holds("Weil bound", inputs.clone(), checks_report.weil_bound),
        Check::holds("supersingular criteria agree", inputs.clone(), checks_report.supersingular_criteria_agree),
        Check::holds("orbits partition the smooth tuples", inputs.clone(), checks_report.orbit_partition),
        Check::holds("automorphism orders agree", inputs.clone(), checks_report.aut_orders_agree),
        Check::holds("mass equals q", inputs.clone(), checks_report.mass_is_q),
        Check::equal(
            "level points by classes and by tuples",
            inputs.clone(),
            &lef.level_points_direct,
            lef.level_points,
        ),
        Check::holds("point traces agree across routes", inputs.clone(), lef.paths_agree),
    ];
    if a.n == 0 {
        checks.push(Check::equal("Lefschetz total equals level points", inputs, &lef.level_points_direct, lef.total));
    }
    let csv = match a.format {
        Format::Json => None,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let header = [
                "a1",
                "a2",
                "a3",
                "a4",
                "a6",
                "j",
                "points",
                "trace",
                "aut",
                "supersingular",
                "level_points",
                "unit_eigenvalue",
                "ss_trace",
            ];
            let io = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
            w.write_record(header).map_err(io)?;
            for (class, c) in census.classes.iter().zip(&lef.classes) {
                let mut row: Vec<String> = c.coefficients.to_vec();
                row.push(class.j_invariant.clone());
                row.extend([
                    class.points.to_string(),
                    c.trace.to_string(),
                    c.aut_order.to_string(),
                    c.supersingular.to_string(),
                    c.level_points.to_string(),
                    c.unit_eigenvalue.map(|x| x.to_string()).unwrap_or_default(),
                    c.point_trace.to_string(),
                ]);
                w.write_record(&row).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| invalid(format!("csv: {e}")))?;
            let mut text = String::from_utf8(bytes).map_err(|e| invalid(format!("csv: {e}")))?;
            let _ = writeln!(text, "# total,{},level_points,{}", lef.total, lef.level_points);
            Some(text)
        }
    };
    let result = json!({ "checks": checks_report, "lefschetz": lef });
    Ok(Partial { result, checks, csv })
}

fn boundary(a: &BoundaryArgs) -> Result<Body> {
    let formula = boundary_ss_trace(a.p, a.r, a.n, a.m)?;
    let orbits = boundary_by_enumeration(a.p, a.r, a.n, a.m)?;
    let inputs = json!({ "p": a.p, "r": a.r, "n": a.n, "m": a.m });
    let checks =
        vec![Check::equal("formula equals orbit enumeration", inputs, &formula, orbits.frobenius_fixed_packets)];
    Ok((json!({ "formula": formula.to_string(), "enumeration": orbits }), checks))
}

/// The acceptance campaigns, each as the subcommands that reach it.
fn reference_campaigns() -> Vec<(&'static str, Vec<Command>)> {
    let galois = |p, r, n| GaloisArgs { p, r, n };
    vec![
        (
            "norm bijection",
            [(2, 2, 1), (3, 2, 1), (2, 2, 2), (2, 3, 1)].map(|(p, r, n)| Command::VerifyNorm(galois(p, r, n))).into(),
        ),
        (
            "exact sequence",
            [(2, 2, 1), (2, 2, 2), (3, 2, 1)]
                .map(|(p, r, n)| Command::VerifyExactSeq(ExactSeqArgs { galois: galois(p, r, n), samples: 20 }))
                .into(),
        ),
        (
            "bc unit identity",
            vec![Command::VerifyBcUnit(BcUnitArgs {
                galois: galois(2, 2, 2),
                k: 1,
                functions: ["identity", "steinberg", "class:3"].map(String::from).into(),
            })],
        ),
        (
            "tower identity",
            [(2, 1), (2, 2), (3, 1)].map(|(q, n)| Command::VerifyTower(TowerArgs { q, n, samples: 200 })).into(),
        ),
        (
            "orbital ratio",
            [(2, 1), (2, 2), (3, 1), (3, 2)]
                .map(|(q, n)| Command::VerifyOrbital(OrbitalArgs { q, n, samples: 50 }))
                .into(),
        ),
        (
            "character cross-identity",
            [(2, 1), (2, 2), (3, 1), (3, 2)].map(|(p, n)| Command::VerifyCr(CrossArgs { p, n, samples: 50 })).into(),
        ),
        (
            "drinfeld decomposition",
            [(2, 1), (3, 1), (2, 2), (3, 2)].map(|(p, n)| Command::CharTable(LevelArgs { p, n })).into(),
        ),
        (
            "tree lemma",
            [2, 3]
                .map(|p| {
                    Command::TreeFixedSet(TreeFixedSetArgs {
                        p,
                        r: 1,
                        gamma: None,
                        depth: None,
                        probes: 100,
                        precision: 16,
                    })
                })
                .into(),
        ),
        ("centrality", vec![Command::VerifyCentral(CentralArgs { q: 2, n: 1, generators: 4, samples: 100 })]),
        ("census consistency", {
            let mut cmds: Vec<Command> =
                [4, 7, 13].map(|q| Command::Census(CensusArgs { q, m: 3, n: 0, r: None, format: Format::Json })).into();
            cmds.extend(
                [(7, 1, 1, 3), (5, 2, 1, 3)].map(|(p, r, n, m)| Command::Boundary(BoundaryArgs { p, r, n, m })),
            );
            cmds
        }),
    ]
}

fn report_all(seed: u64) -> Result<Body> {
    let mut summary = Vec::new();
    let mut checks = Vec::new();
    for (i, (name, commands)) in reference_campaigns().into_iter().enumerate() {
        let mut runs = Vec::new();
        let mut pass = true;
        for cmd in &commands {
            let out = run(cmd, seed)?;
            let passed = out.passed();
            pass &= passed;
            for mut c in out.checks {
                c.name = format!("criterion {}: {}: {}", i + 1, out.command, c.name);
                checks.push(c);
            }
            runs.push(json!({ "command": out.command, "parameters": out.parameters, "pass": passed }));
        }
        summary.push(json!({ "criterion": i + 1, "name": name, "pass": pass, "runs": runs }));
    }
    Ok((json!({ "criteria": summary }), checks))
}
