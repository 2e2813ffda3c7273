//! Presented fragments: a generator subset, a list of equational axioms, and
//! the exact soundness gate that guards every transcription.
//!
//! File format:
//!
//! ```text
//! (fragment NAME dim D)
//! (generators g1 g2 …)
//! (axiom NAME lhs TERM rhs TERM)
//! ```
//!
//! Axiom terms may use shortcut gates; they are expanded over the fragment's
//! generators before any use. A generator that is not in the master signature
//! but has a shortcut entry is treated as an opaque gate with the shortcut's
//! intended matrix, which is how source presentations with extra gates are written.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::diagram::{self, CanonicalDiagram, Term};
use crate::error::{Error, Result};
use crate::field::CycMatrix;
use crate::semantics::{self, GateSemantics, ShortcutTable};
use crate::sexpr::{self, error_at};

/// One equation of a presentation.
#[derive(Clone, Debug)]
pub struct Axiom {
    pub name: String,
    /// Sides as written, possibly using shortcuts.
    pub lhs: Term,
    pub rhs: Term,
    /// Sides after shortcut expansion, in canonical form.
    pub lhs_c: CanonicalDiagram,
    pub rhs_c: CanonicalDiagram,
    pub width: usize,
}

/// A named presentation over a qudit dimension.
#[derive(Clone, Debug)]
pub struct Fragment {
    pub name: String,
    pub dim: usize,
    pub generators: Vec<String>,
    pub axioms: Vec<Axiom>,
    pub semantics: GateSemantics,
    pub shortcuts: Arc<ShortcutTable>,
    /// SHA-256 of the source text, hex encoded.
    pub content_hash: String,
}

/// Names of the shipped fragments.
pub const FRAGMENT_NAMES: [&str; 6] = ["Cliff", "RCliff", "Cliff3", "CliffT", "CliffCS", "CNOTdihe"];

/// Source text of a shipped presentation, including the source-side presentations
/// used by the transfer and refinement instances.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "Cliff" => include_str!("../data/fragments/Cliff.frag"),
        "RCliff" => include_str!("../data/fragments/RCliff.frag"),
        "Cliff3" => include_str!("../data/fragments/Cliff3.frag"),
        "CliffT" => include_str!("../data/fragments/CliffT.frag"),
        "CliffCS" => include_str!("../data/fragments/CliffCS.frag"),
        "CNOTdihe" => include_str!("../data/fragments/CNOTdihe.frag"),
        "CliffCZsrc" => include_str!("../data/fragments/CliffCZsrc.frag"),
        "RCliffCZsrc" => include_str!("../data/fragments/RCliffCZsrc.frag"),
        "CliffTCZsrc" => include_str!("../data/fragments/CliffTCZsrc.frag"),
        "Cliff3src" => include_str!("../data/fragments/Cliff3src.frag"),
        "CliffCSsrc" => include_str!("../data/fragments/CliffCSsrc.frag"),
        "CNOTdiheOld" => include_str!("../data/fragments/CNOTdiheOld.frag"),
        _ => return None,
    })
}

/// Per-axiom soundness verdict.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SoundnessEntry {
    pub axiom: String,
    pub width: usize,
    pub sound: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SoundnessReport {
    pub fragment: String,
    pub entries: Vec<SoundnessEntry>,
    pub all_sound: bool,
}

impl Fragment {
    /// Generator set as a sorted set of names.
    pub fn generator_set(&self) -> BTreeSet<String> {
        self.generators.iter().cloned().collect()
    }

    /// Expands shortcuts in `t` over this fragment's generators.
    pub fn expand(&self, t: &Term) -> Result<Term> {
        self.shortcuts.expand(t, &self.generator_set())
    }

    /// Canonical form of a term written over this fragment (shortcuts allowed).
    pub fn canonical(&self, t: &Term) -> Result<CanonicalDiagram> {
        CanonicalDiagram::from_term(&self.expand(t)?, &self.semantics)
    }

    /// Exact semantics of a term written over this fragment.
    pub fn eval_term(&self, t: &Term) -> Result<CycMatrix> {
        semantics::eval(&self.canonical(t)?, &self.semantics)
    }

    pub fn eval(&self, c: &CanonicalDiagram) -> Result<CycMatrix> {
        semantics::eval(c, &self.semantics)
    }

    pub fn axiom(&self, name: &str) -> Option<&Axiom> {
        self.axioms.iter().find(|a| a.name == name)
    }

    /// Arity of a generator of this fragment.
    pub fn arity(&self, gen: &str) -> Option<usize> {
        self.semantics.get(gen).map(|g| g.arity)
    }

    /// Scalar (arity-0) generators.
    pub fn scalar_generators(&self) -> Vec<String> {
        self.generators
            .iter()
            .filter(|g| self.arity(g) == Some(0))
            .cloned()
            .collect()
    }

    /// Exact soundness of every axiom.
    pub fn soundness_check(&self) -> SoundnessReport {
        let entries: Vec<SoundnessEntry> = self
            .axioms
            .iter()
            .map(|a| SoundnessEntry {
                axiom: a.name.clone(),
                width: a.width,
                sound: axiom_sound(self, a),
            })
            .collect();
        let all_sound = entries.iter().all(|e| e.sound);
        SoundnessReport {
            fragment: self.name.clone(),
            entries,
            all_sound,
        }
    }

    /// Keeps only the axioms acting on at most `k` wires.
    pub fn truncate(&self, k: usize) -> Fragment {
        let mut f = self.clone();
        f.axioms.retain(|a| a.width <= k);
        f
    }

    /// A copy with the axioms not named in `drop` (used for independence checks).
    pub fn without(&self, drop: &str) -> Fragment {
        let mut f = self.clone();
        f.axioms.retain(|a| a.name != drop);
        f
    }

    /// Appends an axiom after checking widths (soundness is left to the caller).
    pub fn push_axiom(&mut self, name: &str, lhs: Term, rhs: Term) -> Result<()> {
        let ax = build_axiom(self, name, lhs, rhs)?;
        self.axioms.push(ax);
        Ok(())
    }
}

fn axiom_sound(f: &Fragment, a: &Axiom) -> bool {
    match (f.eval(&a.lhs_c), f.eval(&a.rhs_c)) {
        (Ok(l), Ok(r)) => l == r,
        _ => false,
    }
}

fn build_axiom(f: &Fragment, name: &str, lhs: Term, rhs: Term) -> Result<Axiom> {
    let lhs_c = f.canonical(&lhs)?;
    let rhs_c = f.canonical(&rhs)?;
    if lhs_c.width() != rhs_c.width() {
        return Err(Error::WidthMismatch(format!(
            "axiom {name}: lhs width {} but rhs width {}",
            lhs_c.width(),
            rhs_c.width()
        )));
    }
    Ok(Axiom {
        name: name.to_string(),
        width: lhs_c.width(),
        lhs,
        rhs,
        lhs_c,
        rhs_c,
    })
}

/// Parses a fragment without running the soundness gate.
pub fn parse_fragment_unchecked(src: &str) -> Result<Fragment> {
    let forms = sexpr::parse_all(src)?;
    let mut it = forms.iter();
    let header = it
        .next()
        .ok_or_else(|| error_at(sexpr::Pos { line: 1, col: 1 }, "empty fragment file", &["fragment"]))?;
    let h = sexpr::expect_form(header, "fragment")?;
    if h.len() != 3 || h[1].as_atom() != Some("dim") {
        return Err(error_at(header.pos(), "malformed header", &["(fragment NAME dim D)"]));
    }
    let name = sexpr::name_atom(&h[0])?;
    let dim = sexpr::int_atom(&h[2])? as usize;
    let base = semantics::semantics_for_dim(dim)?;
    let shortcuts = Arc::new(semantics::load_shortcuts(dim)?);

    let gens_form = it
        .next()
        .ok_or_else(|| error_at(header.pos(), "missing generator list", &["generators"]))?;
    let mut generators = Vec::new();
    let mut sem = GateSemantics::empty(dim);
    for g in sexpr::expect_form(gens_form, "generators")? {
        let g = sexpr::name_atom(g)?;
        let m = match base.get(&g) {
            Some(gate) => gate.matrix.clone(),
            None => shortcuts
                .get(&g)
                .map(|s| s.intended.clone())
                .ok_or_else(|| Error::UnknownGenerator(g.clone()))?,
        };
        sem.insert(&g, m)?;
        generators.push(g);
    }

    let mut f = Fragment {
        name,
        dim,
        generators,
        axioms: Vec::new(),
        semantics: sem,
        shortcuts,
        content_hash: hex::encode(Sha256::digest(src.as_bytes())),
    };
    for form in it {
        let a = sexpr::expect_form(form, "axiom")?;
        if a.len() != 5 || a[1].as_atom() != Some("lhs") || a[3].as_atom() != Some("rhs") {
            return Err(error_at(form.pos(), "malformed axiom", &["(axiom NAME lhs TERM rhs TERM)"]));
        }
        let name = sexpr::name_atom(&a[0])?;
        let lhs = diagram::term_from_sexpr(&a[2])?;
        let rhs = diagram::term_from_sexpr(&a[4])?;
        let ax = build_axiom(&f, &name, lhs, rhs)?;
        f.axioms.push(ax);
    }
    Ok(f)
}

/// Parses a fragment and rejects it if any axiom is semantically unsound.
pub fn parse_fragment(src: &str) -> Result<Fragment> {
    let f = parse_fragment_unchecked(src)?;
    if let Some(a) = f.axioms.iter().find(|a| !axiom_sound(&f, a)) {
        return Err(Error::UnsoundAxiom {
            fragment: f.name.clone(),
            axiom: a.name.clone(),
        });
    }
    Ok(f)
}

/// Loads a shipped fragment by name.
pub fn load_fragment(name: &str) -> Result<Fragment> {
    let src = builtin_source(name).ok_or_else(|| Error::UnknownFragment(name.to_string()))?;
    parse_fragment(src)
}

/// Loads a fragment by shipped name or from a file path.
pub fn load_fragment_or_file(spec: &str) -> Result<Fragment> {
    match builtin_source(spec) {
        Some(src) => parse_fragment(src),
        None if std::path::Path::new(spec).exists() => parse_fragment(&std::fs::read_to_string(spec)?),
        None => Err(Error::UnknownFragment(spec.to_string())),
    }
}

/// Every shipped fragment, in the fixed order Cliff, RCliff, Cliff3, CliffT, CliffCS, CNOTdihe.
pub fn all_fragments() -> Result<Vec<Fragment>> {
    FRAGMENT_NAMES.iter().map(|n| load_fragment(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axiom_counts_match_rule_table() {
        let counts: Vec<usize> = all_fragments()
            .unwrap()
            .iter()
            .map(|f| f.axioms.len())
            .collect();
        // CliffCS stores the repetition-box axiom as four instances
        assert_eq!(counts, vec![8, 10, 10, 11, 14, 11]);
    }

    #[test]
    fn all_fragments_sound() {
        for f in all_fragments().unwrap() {
            let r = f.soundness_check();
            assert!(r.all_sound, "{r:?}");
        }
    }

    #[test]
    fn truncation() {
        let q = load_fragment("Cliff3").unwrap();
        assert_eq!(q.truncate(1).axioms.len(), 5);
        let d = load_fragment("CNOTdihe").unwrap();
        let t3: Vec<String> = d.truncate(3).axioms.iter().map(|a| a.name.clone()).collect();
        assert_eq!(t3.len(), 10);
        assert!(!t3.contains(&"C3T".to_string()));
        for f in all_fragments().unwrap() {
            assert!(f.truncate(0).axioms.iter().all(|a| a.width == 0));
        }
    }

    #[test]
    fn unsound_axiom_is_rejected() {
        let src = "(fragment Bad dim 2)\n(generators H S)\n(axiom wrong lhs (gen H) rhs (gen S))";
        assert_eq!(
            parse_fragment(src).unwrap_err(),
            Error::UnsoundAxiom {
                fragment: "Bad".into(),
                axiom: "wrong".into()
            }
        );
        assert!(!parse_fragment_unchecked(src).unwrap().soundness_check().all_sound);
    }

    #[test]
    fn unknown_fragment() {
        assert!(matches!(load_fragment("Nope"), Err(Error::UnknownFragment(_))));
    }
}
