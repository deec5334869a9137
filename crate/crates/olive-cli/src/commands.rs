// SPDX-License-Identifier: Apache-2.0

//! One function per subcommand. Each returns the report body; the caller
//! wraps it with the command name, seed and configuration.

use std::collections::BTreeMap;
use std::path::Path;

use olive_core::etr::{derive_ftr, validate_etr, EtrError, ExpandedTree};
use olive_core::kgroup::conjugator::{toy_conjugator as build_conjugator, Carrier};
use olive_core::kgroup::selftest::{check_associativity, check_associativity_printed, check_relations};
use olive_core::kgroup::tiered::{make_k2, toy_ell_star, toy_params, KParams};
use olive_core::kgroup::truncated::Truncated;
use olive_core::kgroup::{closure, enumerate_s_star, pi_s, pi_s_unchecked, verify_partial_iso, KModel, PartialIso, SPair};
use olive_core::ladder::{entries, Ladder};
use olive_core::par::{self, Exec};
use olive_core::relational::{
    build_nstar, check_class_olive, disjoint_union, embeds, nsop4_amalgam, omits_nstar, random_edge_model, random_structure,
    random_t0_member, FinStructure, OliveSignature, CYCLE,
};
use olive_core::rng::stream;
use olive_core::witness::sampling::sample_forbidden;
use olive_core::witness::{g5_negative_check, sweep, Evaluator};
use olive_core::words::{
    find_nonvanishing_witness, sigma_star, symbolic_certificate, verify_vanishing, CompiledWord, Generator, SymmetricGroup,
};
use olive_core::SigmaVariant;
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};

use crate::oracle::all_injections;
use crate::{CliError, CmdResult, Common, ModelKind, Outcome, SigArgs};

const EXEC: Exec = Exec::Parallel;

// Stream offsets keeping the sections of one run independent.
const UNION_STREAMS: u64 = 1 << 40;
const AMALGAM_STREAMS: u64 = 2 << 40;

fn contract(e: impl std::fmt::Display) -> CliError {
    CliError::Contract(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialise")
}

fn require_width(c: &Common) -> Result<(), CliError> {
    if c.m < 5 {
        return Err(usage(format!("m = {} is too small: the z-generators z_(2,4) need m >= 5", c.m)));
    }
    Ok(())
}

fn printed_k2(c: &Common) -> Result<KParams, CliError> {
    require_width(c)?;
    make_k2(&KParams::new(c.m), c.variant).map_err(contract)
}

/// Runs `$body` with `$k` bound to `K₂` in the selected model.
macro_rules! with_k2 {
    ($c:expr, |$k:ident| $body:expr) => {
        match $c.model {
            ModelKind::Truncated => {
                require_width($c)?;
                let $k = &Truncated::k2($c.m, $c.variant).map_err(contract)?;
                $body
            }
            ModelKind::Printed => {
                let $k = &printed_k2($c)?;
                $body
            }
        }
    };
}

fn sigma_word(variant: SigmaVariant) -> CompiledWord {
    CompiledWord::new(&sigma_star(variant), |g| match g {
        Generator::Var(n) => ["x", "y", "z"].iter().position(|v| v == n),
        _ => None,
    })
    .expect("sigma is over x, y, z")
}

fn sigma_values<M: KModel>(k: &M, variant: SigmaVariant) -> Value {
    let w = sigma_word(variant);
    let at = |a: (usize, usize), b: (usize, usize), c: (usize, usize)| {
        let v = w.eval(k, &[k.z(a.0, a.1), k.z(b.0, b.1), k.z(c.0, c.1)]);
        k.is_identity(&v)
    };
    let first = at((0, 0), (1, 1), (2, 4));
    let second = at((0, 2), (1, 3), (2, 4));
    json!({
        "params": k.fingerprint(),
        "sigma_z00_z11_z24_is_identity": first,
        "sigma_z02_z13_z24_is_identity": second,
        "pass": first && !second,
    })
}

pub fn sigma_check(c: &Common, degree: usize) -> CmdResult {
    if !(1..=6).contains(&degree) {
        return Err(usage("degree must be between 1 and 6"));
    }
    require_width(c)?;
    let w = sigma_star(c.variant);
    let vanishing: BTreeMap<&str, bool> =
        ["x", "y", "z"].into_iter().map(|v| (v, verify_vanishing(&w, &Generator::Var(v.to_owned())))).collect();
    let failing: Vec<&str> = vanishing.iter().filter(|(_, ok)| !**ok).map(|(v, _)| *v).collect();
    let witness = find_nonvanishing_witness(&w, &SymmetricGroup::new(degree)).map_err(contract)?;
    let witness_json =
        witness.as_ref().map(|a| a.iter().map(|(g, p)| (g.to_string(), p.0.clone())).collect::<BTreeMap<String, Vec<u8>>>());
    let k2 = match c.model {
        ModelKind::Truncated => Truncated::k2(c.m, c.variant).map(|k| sigma_values(&k, c.variant)),
        ModelKind::Printed => make_k2(&KParams::new(c.m), c.variant).map(|k| sigma_values(&k, c.variant)),
    };
    let (k2_json, k2_pass) = match k2 {
        Ok(v) => {
            let p = v["pass"].as_bool().unwrap_or(false);
            (v, p)
        }
        Err(e) => (json!({ "error": e.to_string(), "pass": false }), false),
    };
    let pass = failing.is_empty() && witness.is_some() && k2_pass;
    Ok(Outcome {
        report: json!({
            "sigma_variant": c.variant,
            "word": w.to_string(),
            "length": w.len(),
            "vanishing": vanishing,
            "vanishing_failures": failing,
            "nonvanishing_witness": { "group": format!("S{degree}"), "assignment": witness_json },
            "k2": k2_json,
        }),
        pass,
    })
}

pub fn kgroup_selftest(c: &Common, toy: bool, samples: Option<u64>, consistent_samples: Option<u64>) -> CmdResult {
    let (p, t) = if toy {
        (toy_params(), Truncated::toy())
    } else {
        if c.m == 0 {
            return Err(usage("m must be positive"));
        }
        (KParams::new(c.m), Truncated::k1(c.m))
    };
    let samples = samples.unwrap_or(if toy { 100_000 } else { 1_000_000 });
    let consistent_samples = consistent_samples.unwrap_or(if toy { 100_000 } else { 10_000 });

    let (closure_size, expected) = if toy {
        let gens: Vec<_> = (0..3)
            .flat_map(|j| (0..p.level_size(j)).map(move |i| (j, i)))
            .map(|(j, i)| p.k_generator(j, i).expect("in range"))
            .collect();
        (Some(closure(&p, &gens, EXEC).len()), Some(1u64 << (p.n2 + p.n1 + p.n0)))
    } else {
        (None, None)
    };
    let relations = check_relations(&p, EXEC);
    let assoc = check_associativity_printed(&p, samples, c.seed, EXEC);
    let printed_pass = closure_size.map(|s| s as u64) == expected && relations.failures == 0 && assoc.failures == 0;

    let t_closure = toy.then(|| {
        let gens: Vec<_> = (0..t.top_generators()).map(|i| t.top_generator(i)).collect();
        closure(&t, &gens, EXEC).len()
    });
    let t_assoc = check_associativity(&t, consistent_samples, c.seed, EXEC);
    let consistent_pass = t_assoc.failures == 0;
    Ok(Outcome {
        report: json!({
            "printed": {
                "params": { "m": p.m, "n2": p.n2, "n1": p.n1, "n0": p.n0 },
                "closure_size": closure_size,
                "expected_closure_size": expected,
                "relations": relations,
                "associativity": assoc,
                "pass": printed_pass,
            },
            "consistent": {
                "params": t.fingerprint(),
                "closure_size": t_closure,
                "associativity": t_assoc,
                "pass": consistent_pass,
            },
        }),
        pass: printed_pass && consistent_pass,
    })
}

fn partial_isos<M: KModel>(k: &M, c: &Common, samples: u64) -> Outcome {
    let rows: Vec<Value> = enumerate_s_star()
        .into_iter()
        .map(|s| {
            let pi = pi_s(s, c.m).expect("s is in S*");
            let r = verify_partial_iso(k, &pi, samples, c.seed, EXEC);
            json!({ "s": s, "tag": s.tag(), "report": r })
        })
        .collect();
    let all_pass = rows.iter().all(|r| r["report"]["pass"] == true);
    let excluded = verify_partial_iso(k, &pi_s_unchecked(SPair::EXCLUDED, c.m), samples, c.seed, EXEC);
    let pass = all_pass && !excluded.pass;
    Outcome {
        report: json!({
            "params": k.fingerprint(),
            "samples": samples,
            "s_star": rows,
            "s_star_size": rows.len(),
            "all_s_star_pass": all_pass,
            "excluded": { "s": SPair::EXCLUDED, "report": excluded, "rejected": !excluded.pass },
        }),
        pass,
    }
}

pub fn partial_iso_check(c: &Common, samples: u64) -> CmdResult {
    with_k2!(c, |k| Ok(partial_isos(k, c, samples)))
}

/// Every partial injection of `{0, …, n-1}` into itself, by domain mask
/// and then lexicographically.
fn partial_injections(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(dom: &[usize], used: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<(usize, usize)>>) {
        if used.len() == dom.len() {
            out.push(dom.iter().copied().zip(used.iter().copied()).collect());
            return;
        }
        for y in 0..n {
            if !used.contains(&y) {
                used.push(y);
                go(dom, used, n, out);
                used.pop();
            }
        }
    }
    let mut out = Vec::new();
    for mask in 0u32..1 << n {
        let dom: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        go(&dom, &mut Vec::new(), n, &mut out);
    }
    out
}

fn conjugators<M: KModel>(k: &M, c: &Common, samples: u64) -> Outcome {
    let carrier = Carrier::new(k, EXEC);
    let mut rows = Vec::new();
    let (mut verified, mut built, mut failures) = (0u64, 0u64, 0u64);
    for pairs in partial_injections(k.top_generators()) {
        let pi = PartialIso::new(pairs.clone()).expect("injective by construction");
        let pre = verify_partial_iso(k, &pi, samples, c.seed, EXEC);
        let mut row = json!({ "pairs": pairs, "verified": pre.pass, "kernel": pre.kernel });
        if pre.pass {
            verified += 1;
            match build_conjugator(k, &carrier, &pi, EXEC) {
                Ok(z) => {
                    built += 1;
                    failures += u64::from(!z.report.pass);
                    row["conjugator"] = to_value(&z.report);
                }
                Err(e) => {
                    failures += 1;
                    row["error"] = json!(e.to_string());
                }
            }
        }
        rows.push(row);
    }
    Outcome {
        report: json!({
            "params": k.fingerprint(),
            "carrier_size": carrier.len(),
            "maps": rows.len(),
            "verified": verified,
            "conjugators": built,
            "failures": failures,
            "per_map": rows,
        }),
        pass: failures == 0 && built > 1,
    }
}

pub fn toy_conjugator(c: &Common, samples: u64) -> CmdResult {
    match c.model {
        ModelKind::Truncated => {
            let k = Truncated::k2(1, c.variant).map_err(contract)?;
            Ok(conjugators(&k, c, samples))
        }
        ModelKind::Printed => {
            let p = toy_params();
            let l = toy_ell_star(&p, c.variant).map_err(contract)?;
            Ok(conjugators(&p.with_mask(l, c.variant), c, samples))
        }
    }
}

fn exhaustive_ladders(lambda: usize) -> Result<Vec<Ladder>, CliError> {
    if lambda == 0 || entries(lambda) > 30 {
        return Err(usage(format!("exhaustive mode needs 1 <= lambda <= 8, got {lambda}")));
    }
    Ok((0..Ladder::count(lambda)).map(|code| Ladder::from_index(lambda, code)).collect())
}

pub fn witness_verify(c: &Common, lambda: usize, exhaustive: bool, count: Option<u64>) -> CmdResult {
    let (ladders, mode, seed) = if exhaustive {
        (exhaustive_ladders(lambda)?, "exhaustive", None)
    } else {
        if lambda == 0 {
            return Err(usage("lambda must be positive"));
        }
        let n = count.ok_or_else(|| usage("pass --exhaustive or --count"))?;
        let ladders = (0..n).map(|i| Ladder::random(lambda, 2, &mut stream(c.seed, i))).collect();
        (ladders, "seeded", Some(c.seed))
    };
    with_k2!(c, |k| {
        let ev = Evaluator::new(k, c.variant).map_err(usage)?;
        let r = sweep(&ev, lambda, mode, seed, &ladders, EXEC).map_err(contract)?;
        Ok(Outcome { pass: r.pass, report: to_value(&r) })
    })
}

pub fn g5_negative(c: &Common, lambda_max: usize, count: u64, seeded_lambda_max: usize) -> CmdResult {
    if lambda_max > 7 {
        return Err(usage("lambda-max above 7 is not exhaustively checkable"));
    }
    if count > 0 && seeded_lambda_max == 0 {
        return Err(usage("seeded-lambda-max must be positive"));
    }
    let mut ladders: Vec<Ladder> = (1..=lambda_max).flat_map(|l| exhaustive_ladders(l).expect("small lambda")).collect();
    let exhaustive = ladders.len() as u64;
    ladders.extend((0..count).map(|i| {
        let mut rng = stream(c.seed, i);
        let lambda = rng.gen_range(1..=seeded_lambda_max);
        Ladder::random(lambda, 2, &mut rng)
    }));
    let variant = c.variant;
    let results = par::map(EXEC, &ladders, |l| {
        let g5 = g5_negative_check(l, variant)?;
        let fb = (0..l.lambda()).map(|b| l.check_f_beta(b)).collect::<Result<Vec<_>, _>>()?;
        Ok::<_, olive_core::witness::G5Error>((g5, fb))
    });
    let (mut outside_j, mut all_triples, mut exceptions, mut maps, mut fb_failures) = (0u64, 0u64, 0u64, 0u64, 0u64);
    let (mut first_exception, mut first_fb) = (None, None);
    for (l, r) in ladders.iter().zip(results) {
        let (g5, fb) = r.map_err(contract)?;
        outside_j += g5.outside_j;
        all_triples += g5.all_triples;
        exceptions += g5.exceptions;
        if let (None, Some(t)) = (&first_exception, g5.first_exception) {
            first_exception = Some(json!({ "ladder": l, "triple": t }));
        }
        maps += fb.len() as u64;
        for f in fb.into_iter().filter(|f| !f.pass) {
            fb_failures += 1;
            if first_fb.is_none() {
                first_fb = Some(json!({ "ladder": l, "report": f }));
            }
        }
    }
    let pass = exceptions == 0 && fb_failures == 0;
    Ok(Outcome {
        report: json!({
            "sigma_variant": variant,
            "ladders": { "exhaustive": exhaustive, "seeded": count, "total": ladders.len() },
            "retraction": {
                "outside_j_checks": outside_j,
                "all_triple_checks": all_triples,
                "exceptions": exceptions,
                "first_exception": first_exception,
            },
            "f_beta": { "maps": maps, "failures": fb_failures, "first_failure": first_fb },
        }),
        pass,
    })
}

pub fn forbidden_scan(c: &Common, samples: u64, lambda: Option<usize>) -> CmdResult {
    let cert = symbolic_certificate(&sigma_star(c.variant));
    let sampling = sample_forbidden(samples, c.seed, c.variant, EXEC);
    let families = match lambda {
        None => None,
        Some(l) => {
            let ladders = exhaustive_ladders(l)?;
            let r = with_k2!(c, |k| {
                let ev = Evaluator::new(k, c.variant).map_err(usage)?;
                sweep(&ev, l, "exhaustive", None, &ladders, EXEC).map_err(contract)?
            });
            Some(json!({
                "lambda": l,
                "ladders": r.ladders,
                "forbidden_findings": r.forbidden_findings,
                "first_bad": r.first_bad,
                "params": r.params,
            }))
        }
    };
    let families_pass = families.as_ref().is_none_or(|f| f["forbidden_findings"] == 0);
    let pass = cert.pass && sampling.pass && families_pass;
    Ok(Outcome { report: json!({ "certificate": cert, "sampling": sampling, "families": families }), pass })
}

fn signature(sig: &SigArgs) -> Result<OliveSignature, CliError> {
    let s = OliveSignature::new(sig.eta.0.clone(), sig.k).map_err(usage)?;
    Ok(s)
}

pub fn relational_olive(sig: &SigArgs, lambda_max: usize) -> CmdResult {
    if lambda_max > 6 {
        return Err(usage("exhaustive mode needs lambda-max <= 6"));
    }
    let s = signature(sig)?;
    let r = check_class_olive(&s, lambda_max, EXEC).map_err(usage)?;
    Ok(Outcome { pass: r.pass, report: to_value(&r) })
}

pub fn nstar_build(sig: &SigArgs) -> CmdResult {
    let s = signature(sig)?;
    let n = build_nstar(&s).map_err(usage)?;
    // N* embeds into itself, so it is not a member of the class
    let self_embeds = embeds(&n, &n).map_err(contract)?.is_some();
    Ok(Outcome { report: json!({ "structure": n, "universe": n.universe, "self_embeds": self_embeds }), pass: self_embeds })
}

fn shuffled_prefix(n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut pts: Vec<usize> = (0..n).collect();
    pts.shuffle(rng);
    pts.truncate(k);
    pts
}

pub fn amalgam_check(c: &Common, sig: &SigArgs, oracle_pairs: u64, unions: u64, amalgams: u64) -> CmdResult {
    let s = signature(sig)?;
    s.validate_relational().map_err(usage)?;
    let seed = c.seed;

    // backtracking search against every injective map, on at most 6 points
    let pairs = par::map_range(EXEC, oracle_pairs, |i| -> Result<(bool, bool), String> {
        let mut rng = stream(seed, i);
        let nb = rng.gen_range(0..=6);
        let b = random_structure(&s, nb, rng.gen_range(0.1..0.9), &mut rng);
        let na = rng.gen_range(0..=nb.min(5));
        let a = if rng.gen_bool(0.5) {
            b.restrict(&shuffled_prefix(nb, na, &mut rng))
        } else {
            random_structure(&s, na, rng.gen_range(0.1..0.9), &mut rng)
        };
        let fast = embeds(&a, &b).map_err(|e| e.to_string())?;
        Ok((fast == all_injections(&a, &b), fast.is_some()))
    });
    let (mut disagreements, mut embeddings, mut first_disagreement) = (0u64, 0u64, None);
    for (i, r) in pairs.into_iter().enumerate() {
        let (agree, hit) = r.map_err(contract)?;
        embeddings += u64::from(hit);
        if !agree {
            disagreements += 1;
            first_disagreement.get_or_insert(i as u64);
        }
    }

    // M₁ ⊇ M₀ ⊆ M₂ with M₀ a random substructure of M₁
    let union_results = par::map_range(EXEC, unions, |i| -> Result<(bool, bool, usize), String> {
        let mut rng = stream(seed, UNION_STREAMS + i);
        let err = |e: olive_core::relational::RelError| e.to_string();
        let m1 = random_t0_member(&s, rng.gen_range(0..=4), &mut rng).map_err(err)?;
        let k = rng.gen_range(0..=m1.universe.min(2));
        let e1 = shuffled_prefix(m1.universe, k, &mut rng);
        let m0 = m1.restrict(&e1);
        let extra = random_t0_member(&s, rng.gen_range(0..=3), &mut rng).map_err(err)?;
        let m2 = random_edge_model(&m0, &extra, &mut rng).map_err(err)?;
        let e2: Vec<usize> = (0..m0.universe).collect();
        let (u, g) = disjoint_union(&m0, &m1, &e1, &m2, &e2).map_err(err)?;
        let m1_pts: Vec<usize> = (0..m1.universe).collect();
        let extends = u.restrict(&m1_pts) == m1 && u.restrict(&g) == m2;
        let omits = omits_nstar(&u).map_err(err)?;
        let oracle_omits = all_injections(&build_nstar(&s).map_err(err)?, &u).is_none();
        Ok((omits && oracle_omits, extends, u.universe))
    });
    let (mut union_failures, mut first_union_failure, mut max_union) = (0u64, None, 0usize);
    for (i, r) in union_results.into_iter().enumerate() {
        let (omits, extends, n) = r.map_err(contract)?;
        max_union = max_union.max(n);
        if !(omits && extends) {
            union_failures += 1;
            first_union_failure.get_or_insert(i as u64);
        }
    }

    let amalgam_results = par::map_range(EXEC, amalgams, |i| -> Result<(bool, usize), String> {
        let mut rng = stream(seed, AMALGAM_STREAMS + i);
        let err = |e: olive_core::relational::RelError| e.to_string();
        let parts: Vec<FinStructure> =
            (0..4).map(|_| random_t0_member(&s, rng.gen_range(1..=3), &mut rng)).collect::<Result<_, _>>().map_err(err)?;
        let parts: [FinStructure; 4] = parts.try_into().expect("four parts");
        let edges: Vec<FinStructure> = CYCLE
            .iter()
            .map(|&(a, b)| random_edge_model(&parts[a], &parts[b], &mut rng))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let edges: [FinStructure; 4] = edges.try_into().expect("four edges");
        let (_, r) = nsop4_amalgam(&parts, &edges).map_err(err)?;
        Ok((r.pass, r.universe))
    });
    let (mut amalgam_failures, mut first_amalgam_failure, mut max_amalgam) = (0u64, None, 0usize);
    for (i, r) in amalgam_results.into_iter().enumerate() {
        let (ok, n) = r.map_err(contract)?;
        max_amalgam = max_amalgam.max(n);
        if !ok {
            amalgam_failures += 1;
            first_amalgam_failure.get_or_insert(i as u64);
        }
    }

    let pass = disagreements == 0 && union_failures == 0 && amalgam_failures == 0;
    Ok(Outcome {
        report: json!({
            "signature": s,
            "oracle": {
                "pairs": oracle_pairs,
                "embeddings_found": embeddings,
                "disagreements": disagreements,
                "first_disagreement": first_disagreement,
            },
            "unions": {
                "instances": unions,
                "max_universe": max_union,
                "failures": union_failures,
                "first_failure": first_union_failure,
            },
            "amalgams": {
                "instances": amalgams,
                "max_universe": max_amalgam,
                "failures": amalgam_failures,
                "first_failure": first_amalgam_failure,
            },
        }),
        pass,
    })
}

pub fn etr_validate(file: &Path) -> CmdResult {
    let text = std::fs::read_to_string(file).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    let tree: ExpandedTree = if text.trim().is_empty() {
        ExpandedTree::default()
    } else {
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", file.display())))?
    };
    match validate_etr(&tree) {
        Err(EtrError::Structural(m)) => Ok(Outcome { report: json!({ "structural_error": m, "violations": [] }), pass: false }),
        Err(e) => Err(contract(e)),
        Ok(v) if !v.is_empty() => Ok(Outcome { report: json!({ "violations": v }), pass: false }),
        Ok(_) => {
            let flat = derive_ftr(&tree).map_err(contract)?;
            Ok(Outcome { report: json!({ "violations": [], "flat": flat }), pass: true })
        }
    }
}
