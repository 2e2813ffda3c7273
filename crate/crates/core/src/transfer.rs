//! Encoding/decoding functors between presentations and the finite checks that
//! transfer completeness from a source presentation to a target fragment.
//!
//! A translation is fixed on generators and extended homomorphically, with
//! identities and swaps preserved. Since both interpretations are strict
//! monoidal functors, equal semantics on generators gives equal semantics on
//! every circuit, so `check_encdec` only compares generator images.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::{self, Term};
use crate::error::{Error, Result};
use crate::fragments::{self, Fragment};
use crate::rewrite::{self, Budget, RuleSet, SearchOutcome};
use crate::scalars;
use crate::semantics;
use crate::sexpr::{self, error_at, Sexpr};

/// Built-in refinement files, addressable by file name from transfer cases.
pub fn builtin_refine(name: &str) -> Option<&'static str> {
    match name {
        "qutrit_mu6_mu12.refine" => Some(include_str!("../data/refine/qutrit_mu6_mu12.refine")),
        "cliffcs_mu4_mu8.refine" => Some(include_str!("../data/refine/cliffcs_mu4_mu8.refine")),
        _ => None,
    }
}

/// Built-in transfer cases, in reporting order.
pub const BUILTIN_CASES: [(&str, &str); 5] = [
    ("clifford.transfer", include_str!("../data/transfer/clifford.transfer")),
    ("real_clifford.transfer", include_str!("../data/transfer/real_clifford.transfer")),
    ("qutrit.transfer", include_str!("../data/transfer/qutrit.transfer")),
    ("clifford_t.transfer", include_str!("../data/transfer/clifford_t.transfer")),
    ("clifford_cs.transfer", include_str!("../data/transfer/clifford_cs.transfer")),
];

/// A map from source generators to terms over the target.
#[derive(Clone, Debug, PartialEq)]
pub struct GenTranslation {
    /// Source generators; those absent from `map` are sent to themselves.
    pub source: Vec<String>,
    pub map: BTreeMap<String, Term>,
}

impl GenTranslation {
    pub fn identity(gens: &[String]) -> Self {
        GenTranslation {
            source: gens.to_vec(),
            map: BTreeMap::new(),
        }
    }

    pub fn image(&self, g: &str) -> Result<Term> {
        if !self.source.iter().any(|s| s == g) {
            return Err(Error::UnknownGenerator(g.to_string()));
        }
        Ok(self.map.get(g).cloned().unwrap_or_else(|| Term::gen(g)))
    }

    /// Homomorphic image of `t`.
    pub fn translate(&self, t: &Term) -> Result<Term> {
        t.substitute(&mut |g| self.image(g).map(Some))
    }

    /// Checks that every image is a well-formed target term of the generator's arity.
    fn check_widths(&self, from: &Fragment, to: &Fragment, label: &str) -> Result<()> {
        for g in &self.source {
            let want = from.arity(g).ok_or_else(|| Error::UnknownGenerator(g.clone()))?;
            let got = to.expand(&self.image(g)?)?.width(&to.semantics)?;
            if got != want {
                return Err(Error::WidthMismatch(format!(
                    "{label}({g}) has width {got}, {g} has arity {want}"
                )));
            }
        }
        Ok(())
    }
}

/// An encoding E (target → source) and decoding D (source → target).
#[derive(Clone, Debug)]
pub struct TransferCase {
    pub name: String,
    pub e: GenTranslation,
    pub d: GenTranslation,
    pub source: Fragment,
    pub target: Fragment,
}

impl TransferCase {
    pub fn new(name: &str, e: GenTranslation, d: GenTranslation, source: Fragment, target: Fragment) -> Result<Self> {
        e.check_widths(&target, &source, "E")?;
        d.check_widths(&source, &target, "D")?;
        Ok(TransferCase {
            name: name.to_string(),
            e,
            d,
            source,
            target,
        })
    }

    /// D(E(t)) for a target term, unfolding source shortcuts in between.
    pub fn dec_enc(&self, t: &Term) -> Result<Term> {
        let et = self.source.expand(&self.e.translate(t)?)?;
        self.d.translate(&et)
    }

    /// D(t) for a source term.
    pub fn dec(&self, t: &Term) -> Result<Term> {
        self.d.translate(&self.source.expand(t)?)
    }
}

fn non_structural(f: &Fragment) -> impl Iterator<Item = &String> {
    f.generators.iter()
}

#[derive(Clone, Debug, Serialize)]
pub struct EncDecRow {
    /// "E" for a target generator, "D" for a source generator.
    pub map: &'static str,
    pub generator: String,
    pub image: String,
    pub equal: bool,
    /// Both matrices when they differ.
    pub diff: Option<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EncDecReport {
    pub case: String,
    pub rows: Vec<EncDecRow>,
    pub all_equal: bool,
}

/// ⟦g⟧ = ⟦E(g)⟧ for every target generator and ⟦g′⟧ = ⟦D(g′)⟧ for every source one.
pub fn check_encdec(case: &TransferCase) -> Result<EncDecReport> {
    let mut rows = Vec::new();
    let sides = [
        ("E", &case.target, &case.source, &case.e),
        ("D", &case.source, &case.target, &case.d),
    ];
    for (label, from, to, tr) in sides {
        for g in non_structural(from) {
            let image = tr.image(g)?;
            let want = from.semantics.matrix(g)?.clone();
            let got = to.eval_term(&image)?;
            let equal = want == got;
            rows.push(EncDecRow {
                map: label,
                generator: g.clone(),
                image: image.to_string(),
                equal,
                diff: (!equal).then(|| (semantics::print_matrix(&want), semantics::print_matrix(&got))),
            });
        }
    }
    let all_equal = rows.iter().all(|r| r.equal);
    Ok(EncDecReport {
        case: case.name.clone(),
        rows,
        all_equal,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivRow {
    pub item: String,
    pub lhs: String,
    pub rhs: String,
    /// Exact semantic equality of the two sides, checked before searching.
    pub semantically_equal: bool,
    pub found: bool,
    pub steps: Option<usize>,
    pub states: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivReport {
    pub case: String,
    pub check: &'static str,
    pub budget: Budget,
    pub rows: Vec<DerivRow>,
    pub all_found: bool,
}

fn derive_rows(
    f: &Fragment,
    items: Vec<(String, Term, Term)>,
    budget: Budget,
) -> Result<Vec<DerivRow>> {
    let rules = RuleSet::from_fragment(f)?;
    items
        .into_par_iter()
        .map(|(item, l, r)| {
            let (lc, rc) = (f.canonical(&l)?, f.canonical(&r)?);
            let semantically_equal = f.eval(&lc)? == f.eval(&rc)?;
            let (found, steps, states) = if semantically_equal {
                match rewrite::search_canonical(&lc, &rc, &rules, budget)? {
                    SearchOutcome::Found(s) => (true, Some(s.len()), None),
                    SearchOutcome::Exhausted { states, .. } => (false, None, Some(states)),
                }
            } else {
                (false, None, None)
            };
            Ok(DerivRow {
                item,
                lhs: l.to_string(),
                rhs: r.to_string(),
                semantically_equal,
                found,
                steps,
                states,
            })
        })
        .collect()
}

/// Searches D(E(g)) = g in the target for every target generator.
pub fn check_decenc(case: &TransferCase, budget: Budget) -> Result<DerivReport> {
    let items = non_structural(&case.target)
        .map(|g| Ok((g.clone(), case.dec_enc(&Term::gen(g))?, Term::gen(g))))
        .collect::<Result<Vec<_>>>()?;
    let rows = derive_rows(&case.target, items, budget)?;
    Ok(DerivReport {
        case: case.name.clone(),
        check: "decenc",
        budget,
        all_found: rows.iter().all(|r| r.found),
        rows,
    })
}

/// Searches D(L) = D(R) in the target for every source axiom L = R.
pub fn check_decrelations(case: &TransferCase, budget: Budget) -> Result<DerivReport> {
    let items = case
        .source
        .axioms
        .iter()
        .map(|a| Ok((a.name.clone(), case.dec(&a.lhs)?, case.dec(&a.rhs)?)))
        .collect::<Result<Vec<_>>>()?;
    let rows = derive_rows(&case.target, items, budget)?;
    Ok(DerivReport {
        case: case.name.clone(),
        check: "decrelations",
        budget,
        all_found: rows.iter().all(|r| r.found),
        rows,
    })
}

/// Replaces every structural swap in `t` by `tau`.
pub fn replace_swaps(t: &Term, tau: &Term) -> Term {
    match t {
        Term::Swap => tau.clone(),
        Term::Seq(a, b) => Term::Seq(Box::new(replace_swaps(a, tau)), Box::new(replace_swaps(b, tau))),
        Term::Par(a, b) => Term::Par(Box::new(replace_swaps(a, tau)), Box::new(replace_swaps(b, tau))),
        Term::Id(_) | Term::Gen(_) => t.clone(),
    }
}

/// Lifts a PRO presentation to a PROP one by adding σ = τ, after checking
/// exactly that ⟦τ⟧ is the swap. τ = σ itself is a no-op.
pub fn pro_to_prop_lift(f: &Fragment, tau: &Term) -> Result<Fragment> {
    if *tau == Term::Swap {
        return Ok(f.clone());
    }
    let swap = semantics::permutation_matrix(&[1, 0], f.dim);
    if f.canonical(tau)?.width() != 2 || f.eval_term(tau)? != swap {
        return Err(Error::NotASwap);
    }
    let mut g = f.clone();
    g.push_axiom("swap", Term::Swap, tau.clone())?;
    Ok(g)
}

/// Resolves a source presentation: a built-in refinement file, a built-in
/// fragment, or a path (relative to `base`) to a `.frag` or `.refine` file.
pub fn load_source(spec: &str, base: Option<&Path>) -> Result<Fragment> {
    if let Some(src) = builtin_refine(spec) {
        return refined_from_src(src);
    }
    if fragments::builtin_source(spec).is_some() {
        return fragments::load_fragment(spec);
    }
    let path: PathBuf = match base {
        Some(b) => b.join(spec),
        None => PathBuf::from(spec),
    };
    let src = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if spec.ends_with(".refine") {
        refined_from_src(&src)
    } else {
        fragments::parse_fragment(&src)
    }
}

fn refined_from_src(src: &str) -> Result<Fragment> {
    let spec = scalars::parse_refine(src)?;
    let base = fragments::load_fragment_or_file(&spec.fragment)?;
    Ok(scalars::refine_from_spec(&spec, &base)?.fragment)
}

fn translation(e: &Sexpr, head: &str, source: &[String]) -> Result<GenTranslation> {
    let mut map = BTreeMap::new();
    for it in sexpr::expect_form(e, head)? {
        match it.as_list() {
            Some([g, t]) => {
                let g = sexpr::name_atom(g)?;
                if !source.contains(&g) {
                    return Err(error_at(it.pos(), format!("{g} is not a generator of the domain"), &[]));
                }
                map.insert(g, diagram::term_from_sexpr(t)?);
            }
            _ => return Err(error_at(it.pos(), "expected (GEN TERM)", &["(g TERM)"])),
        }
    }
    Ok(GenTranslation {
        source: source.to_vec(),
        map,
    })
}

/// Parses `(transfer NAME (E (g TERM)*) (D (g TERM)*) (source-axioms FILE) (target FRAGMENT))`.
pub fn parse_transfer(src: &str, base: Option<&Path>) -> Result<TransferCase> {
    let e = sexpr::parse_one(src)?;
    let items = sexpr::expect_form(&e, "transfer")?;
    let (name, rest) = items
        .split_first()
        .ok_or_else(|| error_at(e.pos(), "missing case name", &["NAME"]))?;
    let name = sexpr::name_atom(name)?;
    let find = |h: &str| {
        rest.iter()
            .find(|x| x.head() == Some(h))
            .ok_or_else(|| error_at(e.pos(), format!("missing ({h} ...)"), &[h]))
    };
    let single = |h: &str| -> Result<String> {
        match sexpr::expect_form(find(h)?, h)? {
            [x] => sexpr::name_atom(x),
            _ => Err(error_at(e.pos(), format!("({h} ...) takes one argument"), &[h])),
        }
    };
    let source = load_source(&single("source-axioms")?, base)?;
    let target = fragments::load_fragment_or_file(&single("target")?)?;
    let enc = translation(find("E")?, "E", &target.generators)?;
    let dec = translation(find("D")?, "D", &source.generators)?;
    TransferCase::new(&name, enc, dec, source, target)
}

/// The five documented instances.
pub fn builtin_cases() -> Result<Vec<TransferCase>> {
    BUILTIN_CASES.iter().map(|(_, src)| parse_transfer(src, None)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_term;
    use crate::fragments::load_fragment;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn cliff_case() -> TransferCase {
        parse_transfer(BUILTIN_CASES[0].1, None).unwrap()
    }

    #[test]
    fn translate_basics() {
        let c = cliff_case();
        assert_eq!(c.e.translate(&t("(id 2)")).unwrap(), t("(id 2)"));
        assert_eq!(
            c.e.translate(&t("(gen CNOT)")).unwrap(),
            t("(seq (par (id 1) (gen H)) (gen CZ) (par (id 1) (gen H)))")
        );
        let tr = c.e.translate(&t("(seq (par (gen H) (gen S)) (swap))")).unwrap();
        assert_eq!(tr, t("(seq (par (gen H) (gen S)) (swap))"));
        assert!(matches!(c.e.translate(&t("(gen CZ)")), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn clifford_encdec_and_guard() {
        let c = cliff_case();
        assert!(check_encdec(&c).unwrap().all_equal);
        let mut bad = c.clone();
        bad.e.map.insert("CNOT".into(), t("(gen CZ)"));
        let r = check_encdec(&bad).unwrap();
        assert!(!r.all_equal);
        let row = r.rows.iter().find(|r| !r.equal).unwrap();
        assert_eq!(row.generator, "CNOT");
        assert!(row.diff.is_some());
    }

    #[test]
    fn identity_case() {
        let f = load_fragment("Cliff").unwrap();
        let id = GenTranslation::identity(&f.generators);
        let c = TransferCase::new("id", id.clone(), id, f.clone(), f).unwrap();
        assert!(check_encdec(&c).unwrap().all_equal);
        let r = check_decenc(&c, Budget::default()).unwrap();
        assert!(r.rows.iter().all(|x| x.steps == Some(0)));
    }

    #[test]
    fn clifford_decenc() {
        let r = check_decenc(&cliff_case(), Budget::default()).unwrap();
        assert!(r.all_found);
        let cnot = r.rows.iter().find(|x| x.item == "CNOT").unwrap();
        assert_eq!(cnot.steps, Some(2));
    }

    #[test]
    fn unsound_relation_is_flagged() {
        let c = cliff_case();
        let mut src = c.source.clone();
        src.push_axiom("bogus", t("(gen H)"), t("(gen S)")).unwrap();
        let c2 = TransferCase { source: src, ..c };
        let r = check_decrelations(&c2, Budget { max_depth: 2, ..Budget::default() }).unwrap();
        let row = r.rows.iter().find(|x| x.item == "bogus").unwrap();
        assert!(!row.semantically_equal && !row.found);
    }

    #[test]
    fn lift() {
        let f = load_fragment("CNOTdihe").unwrap();
        let tau = t("(seq (gen CNOT) (gen NOTC) (gen CNOT))");
        let g = pro_to_prop_lift(&f, &tau).unwrap();
        assert_eq!(g.axioms.len(), f.axioms.len() + 1);
        assert_eq!(pro_to_prop_lift(&f, &Term::Swap).unwrap().axioms.len(), f.axioms.len());
        assert_eq!(pro_to_prop_lift(&f, &t("(gen CNOT)")).unwrap_err(), Error::NotASwap);
        let lifted = replace_swaps(&t("(seq (swap) (gen CNOT))"), &tau);
        assert_eq!(f.eval_term(&lifted).unwrap(), f.eval_term(&t("(seq (swap) (gen CNOT))")).unwrap());
    }
}
