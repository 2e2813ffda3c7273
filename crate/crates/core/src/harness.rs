//! Brute-force enumeration at fixed width: exact group closures, semantic
//! classification of short words, and bounded completeness evidence.
//!
//! Matrices are keyed by their exact CycQ entries, never by floating point.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::{CanonicalDiagram, Event, Linear};
use crate::error::{Error, Result};
use crate::field::{CycMatrix, CycQ};
use crate::fragments::Fragment;
use crate::rewrite::{self, Budget, RuleSet, SearchOutcome};
use crate::semantics::{self, GateSemantics};

/// Default bound on enumerated states.
pub const DEFAULT_CAP: usize = 2_000_000;

/// A generator on fixed wires of an n-wire diagram.
#[derive(Clone, Debug)]
pub struct Placement {
    pub event: Event,
    pub matrix: CycMatrix,
}

fn injective_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for w in 0..n {
            if !cur.contains(&w) {
                cur.push(w);
                go(n, k, cur, out);
                cur.pop();
            }
        }
    }
    go(n, k, &mut cur, &mut out);
    out
}

/// Every generator of `sem` (restricted to `gens`) on every injective wire tuple.
pub fn placements(sem: &GateSemantics, gens: &[String], n: usize) -> Result<Vec<Placement>> {
    let mut out = Vec::new();
    for g in gens {
        let arity = sem.get(g).ok_or_else(|| Error::UnknownGenerator(g.clone()))?.arity;
        if arity > n {
            continue;
        }
        for wires in injective_tuples(n, arity) {
            let c = single_event(n, Event::new(g, wires.clone()));
            let matrix = semantics::eval(&c, sem)?;
            out.push(Placement {
                event: Event::new(g, wires),
                matrix,
            });
        }
    }
    Ok(out)
}

fn single_event(n: usize, e: Event) -> CanonicalDiagram {
    Linear {
        width: n,
        events: vec![e],
        perm: (0..n).collect(),
    }
    .canonical()
}

/// Outcome of a closure computation.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureResult {
    pub fragment: String,
    pub content_hash: String,
    pub wires: usize,
    pub order: usize,
    /// Number of distinct matrices up to a global phase.
    pub projective_order: usize,
    /// Order of the scalar subgroup generated by the scalar generators.
    pub scalar_order: usize,
    /// projective_order × scalar_order == order.
    pub cross_check: bool,
    /// Generator words (placement indices) reaching each element, in discovery order.
    #[serde(skip)]
    pub words: Vec<Vec<usize>>,
    #[serde(skip)]
    pub elements: Vec<CycMatrix>,
}

/// Frontier-parallel BFS closure of a set of matrices under right multiplication.
/// Returns elements in discovery order with a witness word for each.
pub fn closure_of(gens: &[CycMatrix], dim: usize, cap: usize) -> Result<(Vec<CycMatrix>, Vec<Vec<usize>>)> {
    closure_keyed(gens, dim, cap, |m| m.clone())
}

fn closure_keyed(
    gens: &[CycMatrix],
    dim: usize,
    cap: usize,
    key: impl Fn(&CycMatrix) -> CycMatrix + Sync,
) -> Result<(Vec<CycMatrix>, Vec<Vec<usize>>)> {
    let id = CycMatrix::identity(dim);
    let mut index: HashMap<CycMatrix, usize> = HashMap::new();
    index.insert(key(&id), 0);
    let mut elems = vec![id];
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let products: Vec<Vec<CycMatrix>> = frontier
            .par_iter()
            .map(|&i| gens.iter().map(|g| elems[i].matmul(g)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for (&i, prods) in frontier.iter().zip(products) {
            for (gi, m) in prods.into_iter().enumerate() {
                let k = key(&m);
                if index.contains_key(&k) {
                    continue;
                }
                if elems.len() >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                index.insert(k, elems.len());
                let mut w = words[i].clone();
                w.push(gi);
                words.push(w);
                elems.push(m);
                next.push(elems.len() - 1);
            }
        }
        frontier = next;
    }
    Ok((elems, words))
}

/// Representative of the projective class of `m`: `m` divided by its first non-zero entry.
pub fn projective_key(m: &CycMatrix) -> CycMatrix {
    let pivot = m
        .entries()
        .iter()
        .find(|x| !x.is_zero())
        .expect("unitary matrices have a non-zero entry");
    let inv = pivot.inv().expect("pivot is non-zero");
    m.scale(&inv)
}

/// Group generated by `f`'s generators on `n` wires.
///
/// The cross-check recomputes the closure modulo global phase and the scalar
/// subgroup separately; their product must equal the order whenever every
/// global phase of the group is a visible scalar.
pub fn group_closure(f: &Fragment, n: usize, cap: usize) -> Result<ClosureResult> {
    let dim = f.dim.pow(n as u32);
    let ps = placements(&f.semantics, &f.generators, n)?;
    let gens: Vec<CycMatrix> = ps.iter().map(|p| p.matrix.clone()).collect();
    let (elements, words) = closure_of(&gens, dim, cap)?;
    let (proj, _) = closure_keyed(&gens, dim, cap, projective_key)?;
    let scalars: Vec<CycMatrix> = f
        .scalar_generators()
        .iter()
        .map(|g| f.semantics.matrix(g).cloned())
        .collect::<Result<_>>()?;
    let (scal, _) = closure_of(&scalars, 1, cap)?;
    Ok(ClosureResult {
        fragment: f.name.clone(),
        content_hash: f.content_hash.clone(),
        wires: n,
        order: elements.len(),
        projective_order: proj.len(),
        scalar_order: scal.len(),
        cross_check: proj.len() * scal.len() == elements.len(),
        words,
        elements,
    })
}

/// Multiplicative closure of a set of scalars (1×1 values).
pub fn scalar_closure(values: &[CycQ]) -> Result<Vec<CycQ>> {
    let gens: Vec<CycMatrix> = values.iter().map(|v| CycMatrix::scalar(v.clone())).collect();
    let (elems, _) = closure_of(&gens, 1, DEFAULT_CAP)?;
    Ok(elems.into_iter().map(|m| m.get(0, 0).clone()).collect())
}

/// One semantic class of short circuits.
#[derive(Clone, Debug)]
pub struct SemanticClass {
    pub matrix: CycMatrix,
    /// Distinct canonical diagrams; the first (shortest) is the representative.
    pub members: Vec<CanonicalDiagram>,
}

/// All words of length ≤ `len` over `f`'s generators (every placement) on `n`
/// wires, deduplicated structurally and grouped by exact semantics. Classes are
/// ordered by the discovery of their representative.
pub fn classify_circuits(f: &Fragment, n: usize, len: usize, cap: usize) -> Result<Vec<SemanticClass>> {
    let ps = placements(&f.semantics, &f.generators, n)?;
    let start = CanonicalDiagram::identity(n);
    let mut seen: HashMap<CanonicalDiagram, ()> = HashMap::new();
    seen.insert(start.clone(), ());
    let mut all = vec![(start, CycMatrix::identity(f.dim.pow(n as u32)))];
    let mut frontier = vec![0usize];
    let steps: Vec<CanonicalDiagram> = ps.iter().map(|p| single_event(n, p.event.clone())).collect();
    for _ in 0..len {
        let ext: Vec<Vec<(CanonicalDiagram, CycMatrix)>> = frontier
            .par_iter()
            .map(|&i| {
                let (c, m) = &all[i];
                steps
                    .iter()
                    .zip(&ps)
                    .map(|(s, p)| Ok((c.seq_c(s)?, p.matrix.matmul(m)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for (c, m) in ext.into_iter().flatten() {
            if seen.contains_key(&c) {
                continue;
            }
            if all.len() >= cap {
                return Err(Error::CapExceeded(cap));
            }
            seen.insert(c.clone(), ());
            all.push((c, m));
            next.push(all.len() - 1);
        }
        frontier = next;
    }
    let mut by_matrix: HashMap<CycMatrix, usize> = HashMap::new();
    let mut classes: Vec<SemanticClass> = Vec::new();
    for (c, m) in all {
        match by_matrix.get(&m) {
            Some(&k) => classes[k].members.push(c),
            None => {
                by_matrix.insert(m.clone(), classes.len());
                classes.push(SemanticClass {
                    matrix: m,
                    members: vec![c],
                });
            }
        }
    }
    Ok(classes)
}

/// A pair the search could not connect within budget. Not a refutation.
#[derive(Clone, Debug, Serialize)]
pub struct EvidenceFailure {
    pub class: usize,
    pub member: String,
    pub representative: String,
    pub states: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvidenceReport {
    pub fragment: String,
    pub content_hash: String,
    pub wires: usize,
    pub max_len: usize,
    pub classes: usize,
    pub pairs_checked: usize,
    pub pairs_connected: usize,
    pub failures: Vec<EvidenceFailure>,
    pub max_steps: usize,
}

/// Connects every member of every semantic class to its representative by search.
pub fn completeness_evidence(f: &Fragment, n: usize, len: usize, budget: Budget) -> Result<EvidenceReport> {
    let classes = classify_circuits(f, n, len, DEFAULT_CAP)?;
    let rules = RuleSet::from_fragment(f)?;
    let pairs: Vec<(usize, &CanonicalDiagram, &CanonicalDiagram)> = classes
        .iter()
        .enumerate()
        .flat_map(|(k, c)| c.members[1..].iter().map(move |m| (k, m, &c.members[0])))
        .collect();
    let results: Vec<SearchOutcome> = pairs
        .par_iter()
        .map(|(_, m, r)| rewrite::search_canonical(m, r, &rules, budget))
        .collect::<Result<_>>()?;
    let mut failures = Vec::new();
    let mut connected = 0;
    let mut max_steps = 0;
    for ((k, m, r), res) in pairs.iter().zip(results) {
        match res {
            SearchOutcome::Found(steps) => {
                connected += 1;
                max_steps = max_steps.max(steps.len());
            }
            SearchOutcome::Exhausted { states, .. } => failures.push(EvidenceFailure {
                class: *k,
                member: m.to_term().to_string(),
                representative: r.to_term().to_string(),
                states,
            }),
        }
    }
    Ok(EvidenceReport {
        fragment: f.name.clone(),
        content_hash: f.content_hash.clone(),
        wires: n,
        max_len: len,
        classes: classes.len(),
        pairs_checked: pairs.len(),
        pairs_connected: connected,
        failures,
        max_steps,
    })
}
