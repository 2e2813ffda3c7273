//! Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
//!
//! The lines go straight to the stderr handle, so they show even when libtest
//! captures output.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use qcprop::diagram::CanonicalDiagram;
use qcprop::field::{CycMatrix, CycQ};
use qcprop::fragments::{all_fragments, load_fragment, FRAGMENT_NAMES};
use qcprop::harness::{completeness_evidence, group_closure, DEFAULT_CAP};
use qcprop::models::{minimality_suite, Source};
use qcprop::rewrite::{self, Budget, CLIFF_LEMMAS, CNOTDIHE_CONSERVATIVITY};
use qcprop::scalars::{self, extract_scalar, recombine};
use qcprop::semantics::{self, eval, eval_term, GateSemantics};
use qcprop::transfer::{builtin_cases, check_decenc, check_encdec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SOUNDNESS_TIME_LIMIT: Duration = Duration::from_secs(10);
const STRUCTURAL_MOVES: usize = 10_000;
const SEMANTIC_DIAGRAMS: usize = 10_000;
const EXTRACTION_SAMPLES: usize = 1_000;
const HIDDEN_PHASE_DEPTH: usize = 8;
const EVIDENCE_LEN: usize = 6;
const SEARCH_DEPTH: usize = 12;
const SEED: u64 = 0x5eed_0001;

type Criterion = (&'static str, fn() -> Line);

struct Line {
    ok: bool,
    detail: String,
}

fn line(ok: bool, detail: impl Into<String>) -> Line {
    Line {
        ok,
        detail: detail.into(),
    }
}

fn c1_soundness() -> Line {
    let start = Instant::now();
    let frags = all_fragments().unwrap();
    let mut unsound = Vec::new();
    let mut axioms = 0;
    for f in frags.iter().filter(|f| FRAGMENT_NAMES.contains(&f.name.as_str())) {
        let r = f.soundness_check();
        axioms += r.entries.len();
        unsound.extend(r.entries.iter().filter(|e| !e.sound).map(|e| format!("{}:{}", f.name, e.axiom)));
    }
    let t = start.elapsed();
    line(
        unsound.is_empty() && t < SOUNDNESS_TIME_LIMIT,
        format!("6 fragments, {axioms} axioms, unsound {unsound:?}, {:.2}s (limit {}s)", t.as_secs_f64(), SOUNDNESS_TIME_LIMIT.as_secs()),
    )
}

fn c2_independence() -> Line {
    let mut failed = Vec::new();
    let mut disagreements = Vec::new();
    let mut unresolved = Vec::new();
    let mut witnessed = 0;
    for name in FRAGMENT_NAMES {
        let f = load_fragment(name).unwrap();
        let suite = minimality_suite(&f).unwrap();
        witnessed += suite.witnessed_axioms().len();
        failed.extend(suite.failed_axioms().into_iter().map(|a| format!("{name}:{a}")));
        for r in &suite.rows {
            match (r.source, &r.interp) {
                (Some(Source::PerFragment | Source::Summary), Some(i)) => disagreements.push(format!(
                    "{name}:{}:{i}[{:?}]={}",
                    r.axiom,
                    r.source.unwrap(),
                    if r.witness { "separates" } else { "fails" }
                )),
                (None, _) => unresolved.push(format!("{name}:{}", r.axiom)),
                _ => {}
            }
        }
    }
    line(
        failed.is_empty(),
        format!(
            "{witnessed} axioms witnessed, failed {failed:?}; table disagreements {disagreements:?}; no listed interpretation {unresolved:?}"
        ),
    )
}

fn c3_structural() -> Line {
    let s = semantics::semantics_for_dim(2).unwrap();
    let gates = gate_list(&s);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut moves, mut mismatches, mut non_idempotent) = (0, 0, 0);
    let mut kinds = std::collections::BTreeMap::new();
    while moves < STRUCTURAL_MOVES {
        let n = rng.gen_range(1..=4);
        let len = rng.gen_range(0..=8);
        let mut c = random_circuit(&mut rng, &gates, n, len);
        let reference = CanonicalDiagram::from_term(&build(&mut rng, &c), &s).unwrap();
        for _ in 0..10 {
            *kinds.entry(structural_move(&mut rng, &mut c)).or_insert(0usize) += 1;
            moves += 1;
            let cd = CanonicalDiagram::from_term(&build(&mut rng, &c), &s).unwrap();
            if cd != reference {
                mismatches += 1;
            }
            if CanonicalDiagram::from_term(&cd.to_term(), &s).unwrap() != cd {
                non_idempotent += 1;
            }
        }
    }
    line(
        mismatches == 0 && non_idempotent == 0,
        format!("{moves} moves {kinds:?}, {mismatches} canonical mismatches, {non_idempotent} non-idempotent"),
    )
}

fn c4_semantics() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let sems: [GateSemantics; 2] = [semantics::semantics_for_dim(2).unwrap(), semantics::semantics_for_dim(3).unwrap()];
    let mut bad = std::collections::BTreeMap::<&str, usize>::new();
    let mut worst = 0.0f64;
    for k in 0..SEMANTIC_DIAGRAMS {
        let s = &sems[(k % 10 == 9) as usize];
        let gates = gate_list(s);
        let n = rng.gen_range(1..=if s.dim() == 3 { 2 } else { 3 });
        let len_a = rng.gen_range(0..=6);
        let a = random_circuit(&mut rng, &gates, n, len_a);
        let len_b = rng.gen_range(0..=3);
        let b = random_circuit(&mut rng, &gates, n, len_b);
        let (ta, tb) = (build(&mut rng, &a), build(&mut rng, &b));
        let ma = eval_term(&ta, s).unwrap();
        let mb = eval_term(&tb, s).unwrap();
        let d = max_diff(&exact_to_float(&ma), &float_eval(&ta, s));
        worst = worst.max(d);
        if d >= FLOAT_TOL {
            *bad.entry("oracle").or_default() += 1;
        }
        if !ma.is_unitary() {
            *bad.entry("unitary").or_default() += 1;
        }
        let seq = qcprop::diagram::Term::seq([ta.clone(), tb.clone()]);
        if eval_term(&seq, s).unwrap() != mb.matmul(&ma).unwrap() {
            *bad.entry("functor-seq").or_default() += 1;
        }
        if n == 1 {
            let par = qcprop::diagram::Term::par([ta.clone(), tb.clone()]);
            if eval_term(&par, s).unwrap() != ma.kron(&mb) {
                *bad.entry("functor-par").or_default() += 1;
            }
        }
        let mut moved = a.clone();
        structural_move(&mut rng, &mut moved);
        if eval_term(&build(&mut rng, &moved), s).unwrap() != ma {
            *bad.entry("invariance").or_default() += 1;
        }
        let scalar = s.names().find(|g| s.get(g).unwrap().arity == 0).unwrap().to_string();
        let mut with_scalar = a.clone();
        let at = rng.gen_range(0..=with_scalar.items.len());
        with_scalar.items.insert(at, Item::Gate(scalar.clone(), vec![]));
        let sv = s.matrix(&scalar).unwrap().get(0, 0).clone();
        if eval_term(&build(&mut rng, &with_scalar), s).unwrap() != ma.scale(&sv) {
            *bad.entry("scalar-central").or_default() += 1;
        }
    }
    line(
        bad.is_empty(),
        format!("{SEMANTIC_DIAGRAMS} diagrams, violations {bad:?}, worst oracle deviation {worst:.1e} (tol {FLOAT_TOL:.0e})"),
    )
}

fn c5_scalars() -> Line {
    let mut notes = Vec::new();
    let mut ok = true;

    // extraction round trip, exact and modulo the scalar order
    let cliff = load_fragment("Cliff").unwrap();
    let mut gates: Vec<(String, usize)> = cliff.generators.iter().map(|g| (g.clone(), cliff.arity(g).unwrap())).collect();
    gates.push(("w".into(), 0));
    gates.push(("w".into(), 0));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut round_trip_failures = 0;
    for _ in 0..EXTRACTION_SAMPLES {
        let n = rng.gen_range(1..=3);
        let len_c = rng.gen_range(0..=14);
        let c = random_circuit(&mut rng, &gates, n, len_c);
        let cd = CanonicalDiagram::from_term(&build(&mut rng, &c), &cliff.semantics).unwrap();
        let x = extract_scalar(&cd, None);
        let reduced = extract_scalar(&cd, Some(8));
        let m = eval(&cd, &cliff.semantics).unwrap();
        if recombine(&x) != cd || eval(&recombine(&reduced), &cliff.semantics).unwrap() != m {
            round_trip_failures += 1;
        }
    }
    ok &= round_trip_failures == 0;
    notes.push(format!("round trip {round_trip_failures}/{EXTRACTION_SAMPLES} failures"));

    // refinements
    for (file, base, expect) in [
        ("qutrit_mu6_mu12.refine", "Cliff3src", 12usize),
        ("cliffcs_mu4_mu8.refine", "CliffCSsrc", 8),
    ] {
        let src = qcprop::transfer::builtin_refine(file).unwrap();
        let spec = scalars::parse_refine(src).unwrap();
        let r = scalars::refine_from_spec(&spec, &load_fragment(base).unwrap()).unwrap();
        let sound = r.fragment.soundness_check().all_sound;
        let good = r.refined_order == expect && sound;
        ok &= good;
        notes.push(format!("{base}: mu{}->mu{} sound={sound}", r.m, r.refined_order));
    }

    // hidden phases
    let mut rx = GateSemantics::empty(2);
    rx.insert("RX2pi", CycMatrix::identity(2).scale(&CycQ::from_int(-1))).unwrap();
    let hidden = scalars::hidden_phase_scan(&rx, 1, HIDDEN_PHASE_DEPTH).unwrap();
    ok &= hidden == vec![CycQ::from_int(-1)];
    notes.push(format!("RX(2pi) hidden {:?}", hidden.iter().map(|h| h.to_string()).collect::<Vec<_>>()));
    for name in ["Cliff", "Cliff3"] {
        let h = scalars::hidden_phases(&load_fragment(name).unwrap(), 1, HIDDEN_PHASE_DEPTH).unwrap();
        ok &= h.is_empty();
        notes.push(format!("{name} hidden {}", h.len()));
    }
    line(ok, notes.join("; "))
}

fn c6_closures() -> Line {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, expect) in [("Cliff", 192usize), ("Cliff3", 2592)] {
        let r = group_closure(&load_fragment(name).unwrap(), 1, DEFAULT_CAP).unwrap();
        let good = r.order == expect && r.cross_check && r.projective_order * r.scalar_order == r.order;
        ok &= good;
        notes.push(format!("{name},1={} ({}x{})", r.order, r.projective_order, r.scalar_order));
    }
    let orders: Vec<usize> = FRAGMENT_NAMES
        .iter()
        .map(|n| scalars::visible_scalars(&load_fragment(n).unwrap()).unwrap().order)
        .collect();
    ok &= orders == [8, 2, 12, 8, 8, 8];
    notes.push(format!("scalar orders {orders:?}"));
    line(ok, notes.join("; "))
}

fn c7_evidence() -> Line {
    let budget = Budget {
        max_depth: SEARCH_DEPTH,
        ..Budget::default()
    };
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["Cliff", "RCliff", "CNOTdihe"] {
        let r = completeness_evidence(&load_fragment(name).unwrap(), 1, EVIDENCE_LEN, budget).unwrap();
        ok &= r.failures.is_empty() && r.pairs_connected == r.pairs_checked;
        notes.push(format!(
            "{name}: {} classes, {}/{} pairs, {} exhausted, max {} steps",
            r.classes,
            r.pairs_connected,
            r.pairs_checked,
            r.failures.len(),
            r.max_steps
        ));
    }
    line(ok, notes.join("; "))
}

fn c8_replay() -> Line {
    let mut ok = true;
    let mut notes = Vec::new();
    for (corpus, expected) in [
        (CLIFF_LEMMAS, vec!["Z2", "X2", "CX2", "C"]),
        (CNOTDIHE_CONSERVATIVITY, vec!["R4", "R2", "R3", "R5", "R8", "R11"]),
    ] {
        let scripts = rewrite::parse_scripts(corpus).unwrap();
        let results = rewrite::check_corpus(corpus).unwrap();
        for (s, r) in scripts.iter().zip(&results) {
            let name = s.name.clone().unwrap_or_default();
            let good = r.is_ok();
            ok &= good;
            notes.push(format!("{name}:{}", if good { "ok" } else { "FAILED" }));
        }
        let names: Vec<String> = scripts.iter().filter_map(|s| s.name.clone()).collect();
        ok &= expected.iter().all(|e| names.iter().any(|n| n == e));
    }
    // the CNOTdihe derivations must prove exactly the old axioms
    let old = load_fragment("CNOTdiheOld").unwrap();
    let new = load_fragment("CNOTdihe").unwrap();
    for s in rewrite::parse_scripts(CNOTDIHE_CONSERVATIVITY).unwrap() {
        let name = s.name.clone().unwrap();
        if name == "R4" && old.axiom("R4").is_none() {
            continue;
        }
        let ax = old.axiom(&name).unwrap();
        let same = new.canonical(&s.initial).unwrap() == new.canonical(&ax.lhs).unwrap()
            && new.canonical(&s.final_term).unwrap() == new.canonical(&ax.rhs).unwrap();
        if !same {
            ok = false;
            notes.push(format!("{name} does not state the old axiom"));
        }
    }
    line(ok, notes.join(" "))
}

fn c9_transfer() -> Line {
    let budget = Budget {
        max_depth: SEARCH_DEPTH,
        ..Budget::default()
    };
    let mut ok = true;
    let mut notes = Vec::new();
    let cases = builtin_cases().unwrap();
    for case in &cases {
        let ed = check_encdec(case).unwrap();
        let de = check_decenc(case, budget).unwrap();
        ok &= ed.all_equal && de.all_found;
        let steps: Vec<String> = de.rows.iter().map(|r| format!("{}:{:?}", r.item, r.steps)).collect();
        notes.push(format!("{}: encdec {} decenc {} {steps:?}", case.name, ed.all_equal, de.all_found));
    }
    ok &= cases.len() == 5;
    line(ok, notes.join("; "))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("soundness", c1_soundness),
        ("independence", c2_independence),
        ("structural canonicalization", c3_structural),
        ("semantic properties", c4_semantics),
        ("scalar machinery", c5_scalars),
        ("closures and scalar orders", c6_closures),
        ("completeness evidence", c7_evidence),
        ("derivation replay", c8_replay),
        ("transfer", c9_transfer),
    ];
    let mut failed = Vec::new();
    let _ = writeln!(std::io::stderr());
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let l = run();
        let _ = writeln!(
            std::io::stderr(),
            "criterion {} ({name}): {} [{:.1}s] {}",
            i + 1,
            if l.ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            l.detail
        );
        if !l.ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
