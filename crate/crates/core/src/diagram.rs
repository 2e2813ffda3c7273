//! Free-PROP terms and their structural canonical form.
//!
//! Every generator is an endomorphism, so a term denotes a trace of gate events
//! over wire threads followed by one permutation of the outputs. Threads are
//! named by their input position; pushing swaps through gates (naturality)
//! only relabels later events. Two terms are structurally congruent exactly when
//! their event traces agree up to commuting events with disjoint supports and
//! their boundary permutations agree, which the Foata normal form decides.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sexpr::{self, error_at, Sexpr};

/// Interned generator name.
pub type GenName = Arc<str>;

/// Supplies generator arities to width computations.
pub trait Arity {
    fn arity(&self, gen: &str) -> Option<usize>;
}

impl Arity for HashMap<String, usize> {
    fn arity(&self, gen: &str) -> Option<usize> {
        self.get(gen).copied()
    }
}

impl<F: Fn(&str) -> Option<usize>> Arity for F {
    fn arity(&self, gen: &str) -> Option<usize> {
        self(gen)
    }
}

/// A free-PROP term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Id(usize),
    Gen(GenName),
    Swap,
    Seq(Box<Term>, Box<Term>),
    Par(Box<Term>, Box<Term>),
}

impl Term {
    pub fn gen(name: &str) -> Term {
        Term::Gen(name.into())
    }

    /// Left-associated sequential composite; `first` acts first.
    pub fn seq(parts: impl IntoIterator<Item = Term>) -> Term {
        let mut it = parts.into_iter();
        let first = it.next().expect("seq needs at least one term");
        it.fold(first, |acc, t| Term::Seq(Box::new(acc), Box::new(t)))
    }

    /// Left-associated tensor product.
    pub fn par(parts: impl IntoIterator<Item = Term>) -> Term {
        let mut it = parts.into_iter();
        let first = it.next().expect("par needs at least one term");
        it.fold(first, |acc, t| Term::Par(Box::new(acc), Box::new(t)))
    }

    /// Width of the term; generators take their arity from `ar`.
    pub fn width(&self, ar: &dyn Arity) -> Result<usize> {
        match self {
            Term::Id(n) => Ok(*n),
            Term::Gen(g) => ar
                .arity(g)
                .ok_or_else(|| Error::UnknownGenerator(g.to_string())),
            Term::Swap => Ok(2),
            Term::Seq(a, b) => {
                let (wa, wb) = (a.width(ar)?, b.width(ar)?);
                if wa != wb {
                    return Err(Error::WidthMismatch(format!(
                        "seq of width {wa} and width {wb}"
                    )));
                }
                Ok(wa)
            }
            Term::Par(a, b) => Ok(a.width(ar)? + b.width(ar)?),
        }
    }

    /// Generator names occurring in the term, with repetition, left to right.
    pub fn generators(&self) -> Vec<GenName> {
        let mut out = Vec::new();
        self.collect_gens(&mut out);
        out
    }

    fn collect_gens(&self, out: &mut Vec<GenName>) {
        match self {
            Term::Gen(g) => out.push(g.clone()),
            Term::Seq(a, b) | Term::Par(a, b) => {
                a.collect_gens(out);
                b.collect_gens(out);
            }
            Term::Id(_) | Term::Swap => {}
        }
    }

    /// Replaces every generator by the term `f` returns for it (or keeps it on `None`).
    pub fn substitute(&self, f: &mut dyn FnMut(&str) -> Result<Option<Term>>) -> Result<Term> {
        Ok(match self {
            Term::Gen(g) => f(g)?.unwrap_or_else(|| self.clone()),
            Term::Seq(a, b) => Term::Seq(Box::new(a.substitute(f)?), Box::new(b.substitute(f)?)),
            Term::Par(a, b) => Term::Par(Box::new(a.substitute(f)?), Box::new(b.substitute(f)?)),
            Term::Id(_) | Term::Swap => self.clone(),
        })
    }

    /// A term realizing the permutation diagram that sends thread i to position `perm[i]`.
    pub fn permutation(perm: &[usize]) -> Term {
        let n = perm.len();
        // arrangement[p] = thread currently at position p; bubble towards target order
        let mut arrangement: Vec<usize> = (0..n).collect();
        let mut layers = Vec::new();
        loop {
            let mut swapped = false;
            for p in 0..n.saturating_sub(1) {
                if perm[arrangement[p]] > perm[arrangement[p + 1]] {
                    arrangement.swap(p, p + 1);
                    layers.push(pad(Term::Swap, p, n - p - 2));
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        if layers.is_empty() {
            Term::Id(n)
        } else {
            Term::seq(layers)
        }
    }

    /// The generator `gen` applied to the listed wires (0-based, in order) of an n-wire diagram.
    pub fn placed(gen: &str, wires: &[usize], n: usize) -> Term {
        let k = wires.len();
        if k == 0 {
            return if n == 0 {
                Term::gen(gen)
            } else {
                Term::Par(Box::new(Term::gen(gen)), Box::new(Term::Id(n)))
            };
        }
        let start = wires[0];
        if wires.iter().enumerate().all(|(j, &w)| w == start + j) {
            return pad(Term::gen(gen), start, n - start - k);
        }
        // route the wires to the top, apply, route back
        let mut perm = vec![usize::MAX; n];
        for (j, &w) in wires.iter().enumerate() {
            perm[w] = j;
        }
        let mut next = k;
        for p in perm.iter_mut() {
            if *p == usize::MAX {
                *p = next;
                next += 1;
            }
        }
        let mut inv = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        Term::seq([
            Term::permutation(&perm),
            pad(Term::gen(gen), 0, n - k),
            Term::permutation(&inv),
        ])
    }
}

fn pad(t: Term, above: usize, below: usize) -> Term {
    let mut parts = Vec::new();
    if above > 0 {
        parts.push(Term::Id(above));
    }
    parts.push(t);
    if below > 0 {
        parts.push(Term::Id(below));
    }
    Term::par(parts)
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

const TERM_HEADS: [&str; 5] = ["id", "gen", "swap", "seq", "par"];

/// Parses one term in the diagram grammar.
pub fn parse_term(src: &str) -> Result<Term> {
    term_from_sexpr(&sexpr::parse_one(src)?)
}

/// Converts an already-read s-expression into a term.
pub fn term_from_sexpr(e: &Sexpr) -> Result<Term> {
    let items = match e {
        Sexpr::Atom(_, p) => return Err(error_at(*p, "expected a term", &["("])),
        Sexpr::List(items, _) => items,
    };
    let head = match items.first() {
        Some(Sexpr::Atom(h, _)) => h.as_str(),
        Some(other) => return Err(error_at(other.pos(), "expected a term keyword", &TERM_HEADS)),
        None => return Err(error_at(e.pos(), "empty term", &TERM_HEADS)),
    };
    let args = &items[1..];
    let arity_err = |want: &str| {
        error_at(
            e.pos(),
            format!("wrong number of arguments to {head}"),
            &[want],
        )
    };
    match head {
        "id" => {
            if args.len() != 1 {
                return Err(arity_err("INT"));
            }
            let n = sexpr::int_atom(&args[0])?;
            if n < 0 {
                return Err(error_at(args[0].pos(), "negative width", &["INT"]));
            }
            Ok(Term::Id(n as usize))
        }
        "gen" => {
            if args.len() != 1 {
                return Err(arity_err("NAME"));
            }
            let name = sexpr::name_atom(&args[0])?;
            if !valid_name(&name) {
                return Err(error_at(args[0].pos(), "invalid generator name", &["NAME"]));
            }
            Ok(Term::gen(&name))
        }
        "swap" => {
            if !args.is_empty() {
                return Err(error_at(args[0].pos(), "swap takes no arguments", &[")"]));
            }
            Ok(Term::Swap)
        }
        "seq" | "par" => {
            if args.len() < 2 {
                return Err(arity_err("term"));
            }
            let parts = args.iter().map(term_from_sexpr).collect::<Result<Vec<_>>>()?;
            Ok(if head == "seq" {
                Term::seq(parts)
            } else {
                Term::par(parts)
            })
        }
        _ => Err(error_at(items[0].pos(), format!("unknown keyword {head}"), &TERM_HEADS)),
    }
}

impl fmt::Display for Term {
    /// Deterministic printing; left-nested chains print as one n-ary form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Id(n) => write!(f, "(id {n})"),
            Term::Gen(g) => write!(f, "(gen {g})"),
            Term::Swap => write!(f, "(swap)"),
            Term::Seq(..) | Term::Par(..) => {
                let is_seq = matches!(self, Term::Seq(..));
                let mut chain = Vec::new();
                let mut cur = self;
                loop {
                    match (cur, is_seq) {
                        (Term::Seq(a, b), true) | (Term::Par(a, b), false) => {
                            chain.push(b.as_ref());
                            cur = a;
                        }
                        _ => {
                            chain.push(cur);
                            break;
                        }
                    }
                }
                write!(f, "({}", if is_seq { "seq" } else { "par" })?;
                for t in chain.iter().rev() {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// One generator occurrence on a list of threads (0-based internally).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    pub gen: GenName,
    pub wires: Vec<usize>,
}

impl Event {
    pub fn new(gen: &str, wires: Vec<usize>) -> Event {
        Event {
            gen: gen.into(),
            wires,
        }
    }

    pub fn is_scalar(&self) -> bool {
        self.wires.is_empty()
    }
}

impl Serialize for Event {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Event", 2)?;
        st.serialize_field("gen", &*self.gen)?;
        let wires: Vec<usize> = self.wires.iter().map(|w| w + 1).collect();
        st.serialize_field("wires", &wires)?;
        st.end()
    }
}

/// An event list in some causal order plus the boundary permutation.
///
/// `perm[t]` is the output position of thread t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linear {
    pub width: usize,
    pub events: Vec<Event>,
    pub perm: Vec<usize>,
}

impl Linear {
    pub fn identity(width: usize) -> Linear {
        Linear {
            width,
            events: Vec::new(),
            perm: (0..width).collect(),
        }
    }

    /// `self` followed by `other`; later events are relabeled through the permutation.
    pub fn then(mut self, other: &Linear) -> Result<Linear> {
        if self.width != other.width {
            return Err(Error::WidthMismatch(format!(
                "seq of width {} and width {}",
                self.width, other.width
            )));
        }
        let mut inv = vec![0; self.width];
        for (t, &p) in self.perm.iter().enumerate() {
            inv[p] = t;
        }
        self.events.extend(other.events.iter().map(|e| Event {
            gen: e.gen.clone(),
            wires: e.wires.iter().map(|&w| inv[w]).collect(),
        }));
        self.perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        Ok(self)
    }

    pub fn tensor(mut self, other: &Linear) -> Linear {
        let off = self.width;
        self.events.extend(other.events.iter().map(|e| Event {
            gen: e.gen.clone(),
            wires: e.wires.iter().map(|&w| w + off).collect(),
        }));
        self.perm.extend(other.perm.iter().map(|&p| p + off));
        self.width += other.width;
        self
    }

    pub fn from_term(t: &Term, ar: &dyn Arity) -> Result<Linear> {
        Ok(match t {
            Term::Id(n) => Linear::identity(*n),
            Term::Gen(g) => {
                let k = ar
                    .arity(g)
                    .ok_or_else(|| Error::UnknownGenerator(g.to_string()))?;
                Linear {
                    width: k,
                    events: vec![Event {
                        gen: g.clone(),
                        wires: (0..k).collect(),
                    }],
                    perm: (0..k).collect(),
                }
            }
            Term::Swap => Linear {
                width: 2,
                events: Vec::new(),
                perm: vec![1, 0],
            },
            Term::Seq(a, b) => Linear::from_term(a, ar)?.then(&Linear::from_term(b, ar)?)?,
            Term::Par(a, b) => Linear::from_term(a, ar)?.tensor(&Linear::from_term(b, ar)?),
        })
    }

    /// Foata normal form of the trace.
    pub fn canonical(self) -> CanonicalDiagram {
        let mut last_level = vec![0usize; self.width];
        let mut blocks: Vec<Vec<Event>> = Vec::new();
        for e in self.events {
            let level = e.wires.iter().map(|&w| last_level[w]).max().unwrap_or(0);
            for &w in &e.wires {
                last_level[w] = level + 1;
            }
            if blocks.len() <= level {
                blocks.resize_with(level + 1, Vec::new);
            }
            blocks[level].push(e);
        }
        for b in blocks.iter_mut() {
            b.sort();
        }
        CanonicalDiagram {
            width: self.width,
            blocks,
            perm: self.perm,
        }
    }
}

/// Structural canonical form: Foata blocks of events plus the output-side permutation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalDiagram {
    width: usize,
    blocks: Vec<Vec<Event>>,
    perm: Vec<usize>,
}

impl CanonicalDiagram {
    pub fn identity(width: usize) -> Self {
        Linear::identity(width).canonical()
    }

    pub fn from_term(t: &Term, ar: &dyn Arity) -> Result<Self> {
        Ok(Linear::from_term(t, ar)?.canonical())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn blocks(&self) -> &[Vec<Event>] {
        &self.blocks
    }

    /// Boundary permutation, 0-based: thread t leaves at position `perm()[t]`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Events in block order.
    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.blocks.iter().flatten()
    }

    pub fn event_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn to_linear(&self) -> Linear {
        Linear {
            width: self.width,
            events: self.events().cloned().collect(),
            perm: self.perm.clone(),
        }
    }

    /// `a` first, then `b`.
    pub fn seq_c(&self, b: &CanonicalDiagram) -> Result<CanonicalDiagram> {
        Ok(self.to_linear().then(&b.to_linear())?.canonical())
    }

    pub fn par_c(&self, b: &CanonicalDiagram) -> CanonicalDiagram {
        self.to_linear().tensor(&b.to_linear()).canonical()
    }

    /// Parity of the boundary permutation (0 even, 1 odd).
    pub fn swap_parity(&self) -> u8 {
        perm_parity(&self.perm)
    }

    /// A term whose canonical form is `self`.
    pub fn to_term(&self) -> Term {
        let n = self.width;
        let mut layers: Vec<Term> = self
            .events()
            .map(|e| Term::placed(&e.gen, &e.wires, n))
            .collect();
        if self.perm.iter().enumerate().any(|(i, &p)| i != p) {
            layers.push(Term::permutation(&self.perm));
        }
        if layers.is_empty() {
            Term::Id(n)
        } else {
            Term::seq(layers)
        }
    }

    /// Stable 64-bit fingerprint of the canonical form.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.hash(&mut h);
        h.finish()
    }

    /// Compact human-readable rendering, e.g. `w | H[1] CNOT[1,2] ; S[2] | perm[2,1]`.
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|e| {
                        if e.is_scalar() {
                            e.gen.to_string()
                        } else {
                            let ws: Vec<String> =
                                e.wires.iter().map(|w| (w + 1).to_string()).collect();
                            format!("{}[{}]", e.gen, ws.join(","))
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        if parts.is_empty() {
            parts.push(format!("id{}", self.width));
        }
        if self.perm.iter().enumerate().any(|(i, &p)| i != p) {
            let ps: Vec<String> = self.perm.iter().map(|p| (p + 1).to_string()).collect();
            parts.push(format!("perm[{}]", ps.join(",")));
        }
        parts.join(" ; ")
    }
}

impl Serialize for CanonicalDiagram {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CanonicalDiagram", 3)?;
        st.serialize_field("width", &self.width)?;
        st.serialize_field("blocks", &self.blocks)?;
        let perm: Vec<usize> = self.perm.iter().map(|p| p + 1).collect();
        st.serialize_field("boundary_perm", &perm)?;
        st.end()
    }
}

/// Sign parity of a permutation (0 even, 1 odd).
pub fn perm_parity(perm: &[usize]) -> u8 {
    let mut seen = vec![false; perm.len()];
    let mut parity = 0u8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        parity ^= ((len + 1) % 2) as u8;
    }
    parity
}

/// True iff both terms have the same canonical form.
pub fn structurally_equal(a: &Term, b: &Term, ar: &dyn Arity) -> Result<bool> {
    Ok(CanonicalDiagram::from_term(a, ar)? == CanonicalDiagram::from_term(b, ar)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ar(g: &str) -> Option<usize> {
        match g {
            "w" | "minus" => Some(0),
            "H" | "S" | "T" | "X" | "Z" => Some(1),
            "CNOT" | "CS" => Some(2),
            _ => None,
        }
    }

    fn canon(s: &str) -> CanonicalDiagram {
        CanonicalDiagram::from_term(&parse_term(s).unwrap(), &ar).unwrap()
    }

    #[test]
    fn widths() {
        assert_eq!(parse_term("(id 3)").unwrap().width(&ar).unwrap(), 3);
        assert_eq!(parse_term("(par (gen H) (id 1))").unwrap().width(&ar).unwrap(), 2);
        assert_eq!(parse_term("(seq (gen H) (gen S))").unwrap().width(&ar).unwrap(), 1);
        assert_eq!(parse_term("(par (id 1) (swap))").unwrap().width(&ar).unwrap(), 3);
        assert!(matches!(
            parse_term("(seq (gen H) (gen CNOT))").unwrap().width(&ar),
            Err(Error::WidthMismatch(_))
        ));
    }

    #[test]
    fn parse_and_print() {
        let t = parse_term("(seq (gen H) (gen H))").unwrap();
        assert_eq!(t, Term::seq([Term::gen("H"), Term::gen("H")]));
        assert_eq!(t.to_string(), "(seq (gen H) (gen H))");
        let nested = "(seq (gen H) (seq (gen S) (gen T)) (gen H))";
        assert_eq!(parse_term(nested).unwrap().to_string(), nested);
        match parse_term("(gen CNOT") {
            Err(Error::Parse { msg, .. }) => assert_eq!(msg, "unbalanced parenthesis"),
            other => panic!("{other:?}"),
        }
        match parse_term("(frob 1)") {
            Err(Error::Parse { expected, line, col, .. }) => {
                assert_eq!((line, col), (1, 2));
                assert!(expected.contains(&"seq".to_string()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn interchange_involution_naturality() {
        assert_eq!(
            canon("(seq (par (gen H) (id 1)) (par (id 1) (gen H)))"),
            canon("(par (gen H) (gen H))")
        );
        let ss = canon("(seq (swap) (swap))");
        assert_eq!(ss, CanonicalDiagram::identity(2));
        assert_eq!(
            canon("(seq (par (gen H) (id 1)) (swap))"),
            canon("(seq (swap) (par (id 1) (gen H)))")
        );
        assert_ne!(canon("(seq (gen H) (gen S))"), canon("(seq (gen S) (gen H))"));
    }

    #[test]
    fn swap_parity_and_routing() {
        assert_eq!(canon("(swap)").swap_parity(), 1);
        assert_eq!(canon("(seq (swap) (swap))").swap_parity(), 0);
        let rev = canon("(seq (swap) (gen CNOT) (swap))");
        assert_eq!(rev.swap_parity(), 0);
        let ev: Vec<&Event> = rev.events().collect();
        assert_eq!(ev[0].wires, vec![1, 0]);
        assert_eq!(rev, canon(&Term::placed("CNOT", &[1, 0], 2).to_string()));
    }

    #[test]
    fn to_term_round_trips() {
        for s in [
            "(seq (par (gen H) (gen S) (gen w)) (swap) (gen CNOT) (par (id 1) (gen T)))",
            "(seq (par (gen CNOT) (id 1)) (par (id 1) (swap)) (par (gen CNOT) (id 1)))",
            "(id 0)",
        ] {
            let c = canon(s);
            assert_eq!(CanonicalDiagram::from_term(&c.to_term(), &ar).unwrap(), c, "{s}");
        }
    }

    #[test]
    fn placed_on_non_adjacent_wires() {
        let t = Term::placed("CNOT", &[2, 0], 3);
        let c = CanonicalDiagram::from_term(&t, &ar).unwrap();
        assert_eq!(c.perm(), &[0, 1, 2]);
        assert_eq!(c.events().next().unwrap().wires, vec![2, 0]);
    }

    #[test]
    fn parity_of_cycles() {
        assert_eq!(perm_parity(&[1, 2, 0]), 0);
        assert_eq!(perm_parity(&[1, 0, 2]), 1);
        assert_eq!(perm_parity(&[]), 0);
    }
}
