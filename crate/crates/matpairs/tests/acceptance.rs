//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//!
//! Tolerances are fixed here and nowhere else: exact equality everywhere
//! except the unitarity defect of float nilpotent reductions.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use matpairs::blocks::{build_block, BlockKind, CongruenceStructure, Flavor, PairCanonicalStructure, Pivot, Variant};
use matpairs::codim::{check_congruence, check_pair, codim_congruence, codim_pair, enumerate_structures, Discrepancy, Profile};
use matpairs::congruence::{congruence_structure, EigenBackend};
use matpairs::fuzz;
use matpairs::oracle::{interaction_nullity, nullity_pair_system};
use matpairs::pairs::{
    is_lagrangian, nilpotent_pair_counts, nilpotent_pair_reduce, pair_canonical, pair_product, structured_pair_canonical,
    NilpotentCounts, ReduceMode, ReductionWitness,
};
use matpairs::{GaussianRational as G, Kind};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::Rng;

const UNITARY_TAU: f64 = 1e-10;
const MASTER_SEED: u64 = 0x00ac_ce97;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = took <= budget;
    let pass = out.pass && in_time;
    let timing = if in_time { String::new() } else { format!(", over the {:?} budget", budget) };
    println!(
        "criterion {id}: {} {name}: {} ({:.2?}{timing})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        took
    );
    pass
}

fn expect(checks: &[(&str, bool)]) -> Outcome {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    if failed.is_empty() {
        Outcome { pass: true, detail: format!("{} checks exact", checks.len()) }
    } else {
        Outcome { pass: false, detail: format!("failed: {}", failed.join(", ")) }
    }
}

fn worked_example() -> Outcome {
    let structure = CongruenceStructure::new(Kind::T).with_h(1, G::int(2)).with_gamma(2).with_type0(2);
    let plant = PairCanonicalStructure { pivot: Pivot::QNonsingular, structure };
    let (e, q) = plant.realize(Variant::Standard).unwrap();
    let j2 = build_block(BlockKind::J, 2, Some(&G::int(0))).unwrap();
    let h = build_block(BlockKind::H, 1, Some(&G::int(2))).unwrap();
    let g2 = build_block(BlockKind::Gamma, 2, None).unwrap();
    let want_e = matpairs::ExactMatrix::identity(4).direct_sum(&j2.transpose());
    let want_q = h.direct_sum(&g2).direct_sum(&matpairs::ExactMatrix::identity(2));
    let regular = CongruenceStructure::new(Kind::T).with_h(1, G::int(2)).with_gamma(2);
    let zero = CongruenceStructure::new(Kind::T).with_type0(2);
    let core = h.direct_sum(&g2);
    let recovered = pair_canonical(&e, &q, Kind::T, EigenBackend::ExactCandidates).unwrap();
    expect(&[
        ("realized pair", (e.clone(), q.clone()) == (want_e, want_q)),
        ("recovered structure", recovered == plant.normalize().unwrap()),
        ("codim_pair = 3", codim_pair(&plant, Profile::AsPrinted).unwrap().total == 3),
        ("pair oracle = 3", nullity_pair_system(&e, &q, Kind::T).unwrap().complex_dim == Some(3)),
        ("codim {H_2(2), Gamma_2} = 2", codim_congruence(&regular, Profile::AsPrinted).unwrap().total == 2),
        ("codim {J_2(0)} = 1", codim_congruence(&zero, Profile::AsPrinted).unwrap().total == 1),
        ("interaction = 0", interaction_nullity(&core, &j2, Kind::T).unwrap().complex_dim == Some(0)),
    ])
}

/// Congruence orbit plus both pair pivots for every structure.
fn enumeration(kind: Kind, max_dim: usize, mus: &[G], alphas: &[G], profile: Profile) -> (usize, Vec<Discrepancy>) {
    let mut checked = 0;
    let mut bad = Vec::new();
    for s in enumerate_structures(kind, max_dim, mus, alphas) {
        checked += 1;
        bad.extend(check_congruence(&s, profile).unwrap());
        for pivot in [Pivot::ENonsingular, Pivot::QNonsingular] {
            bad.extend(check_pair(&PairCanonicalStructure { pivot, structure: s.clone() }, profile).unwrap());
        }
    }
    (checked, bad)
}

fn t_enumeration() -> Outcome {
    let mus = [G::int(2), G::int(3), G::int(-1), G::i()];
    let (checked, bad) = enumeration(Kind::T, 5, &mus, &[], Profile::AsPrinted);
    for d in &bad {
        println!("    mismatch {:?} pivot {:?}: formula {} oracle {}", d.structure, d.pivot, d.formula.total, d.oracle);
    }
    Outcome { pass: bad.is_empty(), detail: format!("{checked} structures x 3 systems, {} mismatches", bad.len()) }
}

fn star_enumeration() -> Outcome {
    let mus = [G::int(2), G::from_ints(0, 3)];
    let alphas = [G::int(1), G::int(-1), G::i(), -G::i()];
    let (checked, reconciled) = enumeration(Kind::Star, 4, &mus, &alphas, Profile::Reconciled);
    let (_, printed) = enumeration(Kind::Star, 4, &mus, &alphas, Profile::AsPrinted);
    let identity = CongruenceStructure::new(Kind::Star).with_delta(1, G::int(1)).with_delta(1, G::int(1));
    let has_identity = printed
        .iter()
        .any(|d| d.pivot.is_none() && d.structure == identity && d.formula.total == 3 && d.oracle == 4);
    let mut report = String::new();
    for d in &printed {
        let parts = d.formula.differing_components(&codim_reconciled(d));
        report.push_str(&format!(
            "{:?} pivot {:?}: printed {} oracle {} (components {:?})\n",
            d.structure, d.pivot, d.formula.total, d.oracle, parts
        ));
    }
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("star_as_printed_discrepancies.txt");
    match std::fs::write(&path, report) {
        Ok(()) => println!("    as-printed discrepancy report ({} entries) written to {}", printed.len(), path.display()),
        Err(e) => println!("    could not write the discrepancy report: {e}"),
    }
    if let Some(d) = printed.iter().find(|d| d.pivot.is_none() && d.structure == identity) {
        println!("    I_2 (Star congruence): printed {} oracle {}", d.formula.total, d.oracle);
    }
    for d in &reconciled {
        println!("    reconciled mismatch {:?} pivot {:?}: formula {} oracle {}", d.structure, d.pivot, d.formula.total, d.oracle);
    }
    Outcome {
        pass: reconciled.is_empty() && has_identity,
        detail: format!(
            "{checked} structures x 3 systems, reconciled mismatches {}, as-printed mismatches {} (I_2 case listed: {has_identity})",
            reconciled.len(),
            printed.len()
        ),
    }
}

fn codim_reconciled(d: &Discrepancy) -> matpairs::codim::CodimBreakdown {
    match d.pivot {
        None => codim_congruence(&d.structure, Profile::Reconciled).unwrap(),
        Some(pivot) => codim_pair(&PairCanonicalStructure { pivot, structure: d.structure.clone() }, Profile::Reconciled).unwrap(),
    }
}

fn plant_and_recover() -> Outcome {
    let backend = EigenBackend::ExactCandidates;
    let mut failures = Vec::new();
    let trials = 200;
    for kind in [Kind::T, Kind::Star] {
        for trial in 0..trials {
            let mut rng = fuzz::trial_rng(MASTER_SEED ^ kind as u64, trial);
            let s = fuzz::random_structure(&mut rng, kind, 6);
            let a = fuzz::planted_congruence(&mut rng, &s, 3);
            let (plant, e, q) = fuzz::planted_pair(&mut rng, &s, 3);
            let single = congruence_structure(&a, kind, backend).map(|r| r == s);
            let pair = pair_canonical(&e, &q, kind, backend).map(|r| r == plant);
            if single != Ok(true) || pair != Ok(true) {
                failures.push(format!("{kind:?} trial {trial} {s:?}: congruence {single:?}, pair {pair:?}"));
            }
        }
    }
    for f in &failures {
        println!("    {f}");
    }
    Outcome { pass: failures.is_empty(), detail: format!("{} trials, {} mismatches", 2 * trials, failures.len()) }
}

fn witness_soundness() -> Outcome {
    let mut failures = Vec::new();
    for trial in 0..100u64 {
        let mut rng = fuzz::trial_rng(MASTER_SEED + 5, trial);
        let flavor = Flavor::ALL[trial as usize % 4];
        let f = fuzz::random_structured_form(&mut rng, flavor, 6);
        let (e, q) = fuzz::planted_structured(&mut rng, &f, 2);
        let (ce, cq) = f.realize().unwrap();
        match structured_pair_canonical(&e, &q, flavor.kind(), Some(flavor)) {
            Ok(got) if got.form == f => match got.witness {
                Some(w) if w.maps((&e, &q), (&ce, &cq)) => {}
                Some(_) => failures.push(format!("trial {trial}: witness does not reproduce the canonical pair")),
                None => failures.push(format!("trial {trial}: no witness ({:?})", got.witness_note)),
            },
            other => failures.push(format!("trial {trial} {f:?}: {other:?}")),
        }
    }
    let mut worst: f64 = 0.0;
    for trial in 0..100u64 {
        let mut rng = fuzz::trial_rng(MASTER_SEED + 6, trial);
        let kind = if trial % 2 == 0 { Kind::T } else { Kind::Star };
        let counts = NilpotentCounts {
            a: rng.gen_range(0..3),
            b: rng.gen_range(0..3),
            c: rng.gen_range(0..2),
            d: rng.gen_range(0..2),
        };
        if counts.dim() == 0 || counts.dim() > 6 {
            continue;
        }
        let (e, q) = fuzz::planted_nilpotent(&mut rng, counts, kind, true, 2);
        match nilpotent_pair_reduce(&e, &q, kind, ReduceMode::FloatUnitaryV { tau: UNITARY_TAU }) {
            Ok(r) => {
                let ReductionWitness::Float(w) = r.witness else { unreachable!("float mode") };
                worst = worst.max(w.unitarity_defect);
                if r.counts != counts || w.unitarity_defect > UNITARY_TAU {
                    failures.push(format!("float trial {trial}: counts {:?}, defect {:e}", r.counts, w.unitarity_defect));
                }
            }
            Err(err) => failures.push(format!("float trial {trial} {counts:?}: {err}")),
        }
    }
    for f in &failures {
        println!("    {f}");
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("100 exact witnesses, float max |V*V - I| = {worst:.1e} (tau {UNITARY_TAU:e}), {} failures", failures.len()),
    }
}

fn nilpotent_identities() -> Outcome {
    let config = Config { cases: 500, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let result = runner.run(&(proptest::prelude::any::<u64>(), 1usize..=6, proptest::bool::ANY), |(seed, n, star)| {
        let kind = if star { Kind::Star } else { Kind::T };
        let mut rng = fuzz::rng(seed);
        let (e, q) = fuzz::orthogonal_pair(&mut rng, n, kind, 2);
        let c = nilpotent_pair_counts(&e, &q, kind).expect("orthogonal by construction");
        let rank = matpairs::exactmat::rank;
        proptest::prop_assert_eq!(c.a + c.b + c.c + 2 * c.d, n);
        proptest::prop_assert_eq!(rank(&e), c.a + c.d);
        proptest::prop_assert_eq!(rank(&q), c.b + c.d);
        proptest::prop_assert_eq!(c.d > 0, !q.mul(&e.conj_transpose()).is_zero());
        // the counts survive a nonsingular U together with a unitary V
        let v = fuzz::random_unitary(&mut rng, n, 2);
        let w = matpairs::pairs::EquivalenceWitness { u: fuzz::nonsingular(&mut rng, n, 2), v, kind, v_unitary: true };
        let (e1, q1) = w.apply(&e, &q).unwrap();
        proptest::prop_assert_eq!(nilpotent_pair_counts(&e1, &q1, kind).unwrap(), c);
        Ok(())
    });
    match result {
        Ok(()) => Outcome { pass: true, detail: "500 orthogonal pairs, all identities exact".into() },
        Err(err) => Outcome { pass: false, detail: format!("{err}") },
    }
}

fn nullity_invariance() -> Outcome {
    let mut failures = Vec::new();
    for fixture in 0..20u64 {
        let mut rng = fuzz::trial_rng(MASTER_SEED + 7, fixture);
        let kind = if fixture % 2 == 0 { Kind::T } else { Kind::Star };
        let n = 2 + fixture as usize % 3;
        // alternate planted canonical pairs with arbitrary, possibly singular, pairs
        let (e, q) = if fixture % 4 < 2 {
            let s = fuzz::random_structure(&mut rng, kind, n);
            let (_, e, q) = fuzz::planted_pair(&mut rng, &s, 2);
            (e, q)
        } else {
            let r = rng.gen_range(0..=n);
            (fuzz::low_rank(&mut rng, n, n - 1, 2), fuzz::low_rank(&mut rng, n, r, 2))
        };
        let base = nullity_pair_system(&e, &q, kind).unwrap().real_dim;
        for k in 0..50 {
            let w = fuzz::random_witness(&mut rng, e.rows(), kind, 2);
            let (e1, q1) = w.apply(&e, &q).unwrap();
            let got = nullity_pair_system(&e1, &q1, kind).unwrap().real_dim;
            if got != base {
                failures.push(format!("fixture {fixture} scramble {k}: {base} became {got}"));
            }
        }
    }
    for f in &failures {
        println!("    {f}");
    }
    Outcome { pass: failures.is_empty(), detail: format!("20 fixtures x 50 equivalences, {} changes", failures.len()) }
}

fn lagrangian_clause() -> Outcome {
    let mut failures = Vec::new();
    for flavor in Flavor::ALL {
        for trial in 0..50u64 {
            let mut rng = fuzz::trial_rng(MASTER_SEED + 8 + flavor as u64, trial);
            let (e, q) = fuzz::lagrangian_pair(&mut rng, flavor, 6, 2);
            let kind = flavor.kind();
            if !is_lagrangian(&e, &q, kind) {
                failures.push(format!("{flavor:?} trial {trial}: generator produced a non-Lagrangian pair"));
                continue;
            }
            match structured_pair_canonical(&e, &q, kind, Some(flavor)) {
                Ok(got) if got.form.c == 0 && got.form.d == 0 => {}
                other => failures.push(format!(
                    "{flavor:?} trial {trial}: {other:?} (product zero: {})",
                    pair_product(&e, &q, kind).is_zero()
                )),
            }
        }
    }
    for f in &failures {
        println!("    {f}");
    }
    Outcome { pass: failures.is_empty(), detail: format!("200 Lagrangian pairs, {} with c or d nonzero", failures.len()) }
}

fn main() -> ExitCode {
    // numeric arguments select criteria; anything else (libtest flags) is ignored
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let secs = Duration::from_secs;
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 8] = [
        (1, "worked example", secs(1), worked_example),
        (2, "T formulas equal the oracle", secs(120), t_enumeration),
        (3, "Star reconciliation", secs(120), star_enumeration),
        (4, "plant and recover", secs(180), plant_and_recover),
        (5, "witness soundness", Duration::MAX, witness_soundness),
        (6, "nilpotent count identities", secs(30), nilpotent_identities),
        (7, "nullity is equivalence invariant", Duration::MAX, nullity_invariance),
        (8, "Lagrangian clause", Duration::MAX, lagrangian_clause),
    ];
    let mut total = 0;
    let mut passed = 0;
    for (id, name, budget, f) in criteria {
        if only.is_empty() || only.contains(&id) {
            total += 1;
            passed += run(id, name, budget, f) as usize;
        }
    }
    println!("acceptance: {passed}/{total} criteria passed");
    if passed == total {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
