//! Scalar subgroups: extraction of arity-0 factors, visible scalar groups,
//! hidden-phase scans, and refinement by an adjoined root of unity.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::diagram::{CanonicalDiagram, Linear, Term};
use crate::error::{Error, Result};
use crate::field::{CycMatrix, CycQ};
use crate::fragments::Fragment;
use crate::harness::{self, DEFAULT_CAP};
use crate::rewrite::{self, Budget, RuleSet, SearchOutcome};
use crate::semantics::{self, GateSemantics};
use crate::sexpr::{self, error_at};

/// A diagram split into its scalar factors and a scalar-free residual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarExtraction {
    /// Exponent of each scalar generator present.
    pub exponents: BTreeMap<String, u64>,
    pub residual: CanonicalDiagram,
}

/// Collects every arity-0 event. With `order`, exponents are reduced modulo it.
pub fn extract_scalar(c: &CanonicalDiagram, order: Option<u64>) -> ScalarExtraction {
    let mut exponents: BTreeMap<String, u64> = BTreeMap::new();
    let mut rest = Vec::new();
    for e in c.events() {
        if e.is_scalar() {
            *exponents.entry(e.gen.to_string()).or_insert(0) += 1;
        } else {
            rest.push(e.clone());
        }
    }
    if let Some(m) = order {
        for v in exponents.values_mut() {
            *v %= m;
        }
        exponents.retain(|_, v| *v > 0);
    }
    let residual = Linear {
        width: c.width(),
        events: rest,
        perm: c.perm().to_vec(),
    }
    .canonical();
    ScalarExtraction { exponents, residual }
}

/// `scalars ⊗ residual` as a single canonical diagram.
pub fn recombine(x: &ScalarExtraction) -> CanonicalDiagram {
    let events = x
        .exponents
        .iter()
        .flat_map(|(g, &k)| std::iter::repeat_n(crate::diagram::Event::new(g, Vec::new()), k as usize))
        .collect();
    let scal = Linear {
        width: 0,
        events,
        perm: Vec::new(),
    }
    .canonical();
    scal.par_c(&x.residual)
}

/// The group generated by a fragment's scalar generators.
#[derive(Clone, Debug, Serialize)]
pub struct ScalarGroupInfo {
    pub fragment: String,
    pub content_hash: String,
    pub scalar_generators: Vec<String>,
    /// A scalar generator whose value generates the whole group, if any.
    pub chosen: Option<String>,
    pub order: usize,
    pub cyclic: bool,
    /// Each element as k with value ζ24^k, ascending.
    pub exponents_of_zeta24: Vec<u32>,
    #[serde(skip)]
    pub elements: Vec<CycQ>,
}

pub fn visible_scalars(f: &Fragment) -> Result<ScalarGroupInfo> {
    let gens = f.scalar_generators();
    let values: Vec<CycQ> = gens
        .iter()
        .map(|g| Ok(f.semantics.matrix(g)?.get(0, 0).clone()))
        .collect::<Result<_>>()?;
    let elements = harness::scalar_closure(&values)?;
    let order = elements.len();
    let cyclic = elements
        .iter()
        .any(|x| x.root_of_unity_order().map(|o| o as usize) == Some(order));
    let chosen = gens
        .iter()
        .zip(&values)
        .find(|(_, v)| v.root_of_unity_order().map(|o| o as usize) == Some(order))
        .map(|(g, _)| g.clone());
    let mut exps: Vec<u32> = elements.iter().filter_map(CycQ::root_of_unity_exponent).collect();
    exps.sort_unstable();
    Ok(ScalarGroupInfo {
        fragment: f.name.clone(),
        content_hash: f.content_hash.clone(),
        scalar_generators: gens,
        chosen,
        order,
        cyclic,
        exponents_of_zeta24: exps,
        elements,
    })
}

/// Global phases λ·I reachable on `n` wires by words of length ≤ `depth` over
/// every gate of `sem`, keeping those outside the group generated by the
/// arity-0 gates. Sorted, without repetition.
pub fn hidden_phase_scan(sem: &GateSemantics, n: usize, depth: usize) -> Result<Vec<CycQ>> {
    let names: Vec<String> = sem.names().map(str::to_string).collect();
    let visible: Vec<CycQ> = names
        .iter()
        .filter(|g| sem.get(g).map(|x| x.arity) == Some(0))
        .map(|g| Ok(sem.matrix(g)?.get(0, 0).clone()))
        .collect::<Result<_>>()?;
    let visible: HashSet<CycQ> = harness::scalar_closure(&visible)?.into_iter().collect();
    let gens: Vec<CycMatrix> = harness::placements(sem, &names, n)?
        .into_iter()
        .map(|p| p.matrix)
        .collect();
    let id = CycMatrix::identity(sem.dim().pow(n as u32));
    let mut seen: HashSet<CycMatrix> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    let mut hidden = Vec::new();
    for _ in 0..depth {
        let mut next = Vec::new();
        for m in &frontier {
            for g in &gens {
                let p = g.matmul(m)?;
                if seen.contains(&p) {
                    continue;
                }
                if seen.len() >= DEFAULT_CAP {
                    return Err(Error::CapExceeded(DEFAULT_CAP));
                }
                if let Some(l) = p.scalar_multiple_of_identity() {
                    if !visible.contains(&l) {
                        hidden.push(l);
                    }
                }
                seen.insert(p.clone());
                next.push(p);
            }
        }
        frontier = next;
    }
    hidden.sort();
    hidden.dedup();
    Ok(hidden)
}

/// Hidden-phase scan over the generators of `f`.
pub fn hidden_phases(f: &Fragment, n: usize, depth: usize) -> Result<Vec<CycQ>> {
    hidden_phase_scan(&f.semantics, n, depth)
}

/// A fragment extended by a new scalar generator ω′ with ω′^{mℓ} = id₀ and ω′^r = s.
#[derive(Clone, Debug, Serialize)]
pub struct RefinedPresentation {
    pub base: String,
    pub base_hash: String,
    pub scalar: String,
    pub new_generator: String,
    pub zeta: [String; 8],
    pub m: u64,
    pub ell: u64,
    pub r: u64,
    /// Names of the two added relations.
    pub relations: Vec<String>,
    pub refined_order: usize,
    #[serde(skip)]
    pub fragment: Fragment,
}

fn scalar_power(g: &str, k: u64) -> Term {
    if k == 0 {
        Term::Id(0)
    } else {
        Term::par((0..k).map(|_| Term::gen(g)))
    }
}

/// Adjoins ω′ = `new` with value ζ. Requires ζ of order mℓ, ζ^r = ⟦s⟧, and ⟦s⟧ of order m.
pub fn refine(f: &Fragment, s: &str, zeta: &CycQ, m: u64, ell: u64, r: u64, new: &str) -> Result<RefinedPresentation> {
    if f.arity(s) != Some(0) {
        return Err(Error::UnknownGenerator(format!("{s} is not a scalar generator of {}", f.name)));
    }
    if f.generators.iter().any(|g| g == new) {
        return Err(Error::Invalid(format!("{new} is already a generator of {}", f.name)));
    }
    let s_val = f.semantics.matrix(s)?.get(0, 0).clone();
    let ml = m * ell;
    match zeta.root_of_unity_order() {
        Some(o) if o as u64 == ml => {}
        Some(o) => return Err(Error::RefinementFails(format!("ζ has order {o}, expected {ml}"))),
        None => return Err(Error::RefinementFails("ζ is not a root of unity".into())),
    }
    if s_val.root_of_unity_order().map(u64::from) != Some(m) {
        return Err(Error::RefinementFails(format!("⟦{s}⟧ does not have order {m}")));
    }
    if zeta.pow(r as i64)? != s_val {
        return Err(Error::RefinementFails(format!("ζ^{r} ≠ ⟦{s}⟧")));
    }
    let mut g = f.clone();
    g.name = format!("{}+{new}", f.name);
    g.generators.push(new.to_string());
    g.semantics.insert(new, CycMatrix::scalar(zeta.clone()))?;
    let order_rel = format!("{new}^{ml}");
    let root_rel = format!("{new}^{r}");
    g.push_axiom(&order_rel, scalar_power(new, ml), Term::Id(0))?;
    g.push_axiom(&root_rel, scalar_power(new, r), Term::gen(s))?;
    let sound = g.soundness_check();
    if !sound.all_sound {
        return Err(Error::RefinementFails("added relations are not sound".into()));
    }
    let descriptor = format!("{}|{s}|{}|{m}|{ell}|{r}|{new}", f.content_hash, zeta.to_strings().join(","));
    g.content_hash = hex::encode(Sha256::digest(descriptor.as_bytes()));
    let refined_order = visible_scalars(&g)?.order;
    Ok(RefinedPresentation {
        base: f.name.clone(),
        base_hash: f.content_hash.clone(),
        scalar: s.to_string(),
        new_generator: new.to_string(),
        zeta: zeta.to_strings(),
        m,
        ell,
        r,
        relations: vec![order_rel, root_rel],
        refined_order,
        fragment: g,
    })
}

/// Contents of a refinement file.
#[derive(Clone, Debug, PartialEq)]
pub struct RefineSpec {
    pub fragment: String,
    pub scalar: String,
    pub zeta: CycQ,
    pub m: u64,
    pub ell: u64,
    pub r: u64,
    pub new: String,
}

/// Parses `(refine (fragment F) (scalar s) (zeta CYCQ) (m M) (ell L) (r R) [(new NAME)])`.
pub fn parse_refine(src: &str) -> Result<RefineSpec> {
    let e = sexpr::parse_one(src)?;
    let items = sexpr::expect_form(&e, "refine")?;
    let mut fields: BTreeMap<&str, &sexpr::Sexpr> = BTreeMap::new();
    const KEYS: [&str; 7] = ["fragment", "scalar", "zeta", "m", "ell", "r", "new"];
    for it in items {
        let head = it.head().filter(|h| KEYS.contains(h));
        let args = it.as_list().map(|l| &l[1..]).unwrap_or_default();
        match (head, args) {
            (Some(h), [v]) => {
                fields.insert(h, v);
            }
            _ => return Err(error_at(it.pos(), "unexpected clause", &KEYS)),
        }
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| error_at(e.pos(), format!("missing ({k} ...)"), &[k]));
    let uint = |k: &str| -> Result<u64> {
        let v = get(k)?;
        let x = sexpr::int_atom(v)?;
        u64::try_from(x).map_err(|_| error_at(v.pos(), "expected a non-negative integer", &["INT"]))
    };
    Ok(RefineSpec {
        fragment: sexpr::name_atom(get("fragment")?)?,
        scalar: sexpr::name_atom(get("scalar")?)?,
        zeta: semantics::parse_cycq(get("zeta")?)?,
        m: uint("m")?,
        ell: uint("ell")?,
        r: uint("r")?,
        new: match fields.get("new") {
            Some(v) => sexpr::name_atom(v)?,
            None => "w'".to_string(),
        },
    })
}

pub fn refine_from_spec(spec: &RefineSpec, f: &Fragment) -> Result<RefinedPresentation> {
    refine(f, &spec.scalar, &spec.zeta, spec.m, spec.ell, spec.r, &spec.new)
}

/// A pair equal in the refined system whose base derivation was not found.
#[derive(Clone, Debug, Serialize)]
pub struct Inconclusive {
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConservativityReport {
    pub refined: String,
    pub base: String,
    pub sampled: usize,
    /// Pairs the search connected in the refined system.
    pub refined_derivable: usize,
    /// Of those, pairs also connected in the base system.
    pub confirmed: usize,
    pub inconclusive: Vec<Inconclusive>,
}

/// Samples ω′-free pairs of semantically equal words of length ≤ `len` on `n`
/// wires (every k-th pair so that at most `samples` are taken), and checks that
/// each pair derivable in the refined system is derivable in the base one.
pub fn conservativity_probe(
    refined: &RefinedPresentation,
    base: &Fragment,
    n: usize,
    len: usize,
    samples: usize,
    budget: Budget,
) -> Result<ConservativityReport> {
    let classes = harness::classify_circuits(base, n, len, DEFAULT_CAP)?;
    let pairs: Vec<(&CanonicalDiagram, &CanonicalDiagram)> = classes
        .iter()
        .flat_map(|c| c.members[1..].iter().map(move |m| (m, &c.members[0])))
        .collect();
    let chosen: Vec<_> = if samples == 0 {
        Vec::new()
    } else {
        let stride = pairs.len().div_ceil(samples).max(1);
        pairs.into_iter().step_by(stride).collect()
    };
    let ref_rules = RuleSet::from_fragment(&refined.fragment)?;
    let base_rules = RuleSet::from_fragment(base)?;
    let mut report = ConservativityReport {
        refined: refined.fragment.name.clone(),
        base: base.name.clone(),
        sampled: chosen.len(),
        refined_derivable: 0,
        confirmed: 0,
        inconclusive: Vec::new(),
    };
    for (a, b) in chosen {
        if !rewrite::search_canonical(a, b, &ref_rules, budget)?.is_found() {
            continue;
        }
        report.refined_derivable += 1;
        match rewrite::search_canonical(a, b, &base_rules, budget)? {
            SearchOutcome::Found(_) => report.confirmed += 1,
            SearchOutcome::Exhausted { .. } => report.inconclusive.push(Inconclusive {
                lhs: a.to_term().to_string(),
                rhs: b.to_term().to_string(),
            }),
        }
    }
    Ok(report)
}
