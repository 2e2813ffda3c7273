//! Separating interpretations and the independence checker.
//!
//! Three families of strict symmetric monoidal functors are supported:
//! counting and occurrence valuations into a commutative monoid with a swap value,
//! scaled determinant phases (`argdet_k`), and projective substitutions that
//! replace some generator matrices and compare results up to global phase.
//! An interpretation witnesses the independence of an axiom when it equalizes
//! every other axiom of the truncated system and separates the target.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::CanonicalDiagram;
use crate::error::{Error, Result};
use crate::field::CycMatrix;
use crate::fragments::Fragment;
use crate::semantics::{self, GateSemantics};

/// A rational multiple of π, reduced into [0, 2).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseQ(BigRational);

impl PhaseQ {
    pub fn zero() -> Self {
        PhaseQ(BigRational::zero())
    }

    /// The phase qπ.
    pub fn new(q: BigRational) -> Self {
        let two = BigRational::from_integer(BigInt::from(2));
        let k = (&q / &two).floor();
        PhaseQ(q - k * two)
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::new(BigRational::new(n.into(), d.into()))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.0 + &o.0)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(&self.0 * BigRational::from_integer(k.clone()))
    }

    /// The coefficient q of qπ.
    pub fn coefficient(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Display for PhaseQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}π", self.0)
        }
    }
}

/// Target monoid of a valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// Integers modulo k.
    Zk(u64),
    /// Booleans under disjunction.
    BoolOr,
    /// Phases qπ modulo 2π.
    Phase,
}

/// An element of a target monoid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Zk(u64),
    Bool(bool),
    Phase(PhaseQ),
}

impl Value {
    fn combine(&self, o: &Value, t: &Target) -> Value {
        match (self, o, t) {
            (Value::Zk(a), Value::Zk(b), Target::Zk(k)) => Value::Zk((a + b) % k),
            (Value::Bool(a), Value::Bool(b), _) => Value::Bool(*a || *b),
            (Value::Phase(a), Value::Phase(b), _) => Value::Phase(a.add(b)),
            _ => unreachable!("values are built for their target"),
        }
    }

    fn unit(t: &Target) -> Value {
        match t {
            Target::Zk(_) => Value::Zk(0),
            Target::BoolOr => Value::Bool(false),
            Target::Phase => Value::Phase(PhaseQ::zero()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Zk(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{}", u8::from(*b)),
            Value::Phase(p) => write!(f, "{p}"),
        }
    }
}

/// A valuation into a commutative monoid with swap value ε (ε ⊕ ε = 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidInterp {
    pub id: String,
    pub target: Target,
    pub swap: Value,
    pub weights: BTreeMap<String, Value>,
}

impl MonoidInterp {
    /// `#{g1,…}_[k]`: multiset count modulo k. `SWAP` in the multiset sets ε = 1.
    pub fn count(id: &str, names: &[&str], k: u64, f: &Fragment) -> Result<Self> {
        let mut weights: BTreeMap<String, Value> =
            f.generators.iter().map(|g| (g.clone(), Value::Zk(0))).collect();
        let mut swap = 0u64;
        for n in names {
            if *n == "SWAP" {
                swap += 1;
                continue;
            }
            match weights.get_mut(*n) {
                Some(Value::Zk(v)) => *v = (*v + 1) % k,
                _ => return Err(Error::UnknownGenerator(n.to_string())),
            }
        }
        if !(2 * swap).is_multiple_of(k) {
            return Err(Error::Invalid(format!("{id}: swap value must satisfy ε ⊕ ε = 0")));
        }
        Ok(MonoidInterp {
            id: id.to_string(),
            target: Target::Zk(k),
            swap: Value::Zk(swap % k),
            weights,
        })
    }

    /// `?g1,…`: occurrence of any listed generator.
    pub fn has(id: &str, names: &[&str], f: &Fragment) -> Result<Self> {
        let mut weights: BTreeMap<String, Value> =
            f.generators.iter().map(|g| (g.clone(), Value::Bool(false))).collect();
        for n in names {
            match weights.get_mut(*n) {
                Some(v) => *v = Value::Bool(true),
                None => return Err(Error::UnknownGenerator(n.to_string())),
            }
        }
        Ok(MonoidInterp {
            id: id.to_string(),
            target: Target::BoolOr,
            swap: Value::Bool(false),
            weights,
        })
    }

    pub fn eval(&self, c: &CanonicalDiagram) -> Result<Value> {
        let mut acc = Value::unit(&self.target);
        for e in c.events() {
            let w = self
                .weights
                .get(&*e.gen)
                .ok_or_else(|| Error::Invalid(format!("{}: no weight for generator {}", self.id, e.gen)))?;
            acc = acc.combine(w, &self.target);
        }
        if c.swap_parity() == 1 {
            acc = acc.combine(&self.swap, &self.target);
        }
        Ok(acc)
    }
}

/// `argdet_k`: weight(g) = 2^{k−n}·arg det⟦g⟧ for g of arity n, ε_k = 2^{k−2}π.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArgDetInterp {
    pub level: u32,
    pub weights: BTreeMap<String, PhaseQ>,
    pub swap: PhaseQ,
}

/// Scale factor 2^{k−n} as an exact rational.
fn pow2(e: i64) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut acc = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        acc = if e >= 0 { acc * &two } else { acc / &two };
    }
    acc
}

/// arg det of a matrix whose determinant is a 24th root of unity.
pub fn arg_det(m: &CycMatrix) -> Result<PhaseQ> {
    let k = m
        .det()
        .root_of_unity_exponent()
        .ok_or_else(|| Error::Invalid("determinant is not a 24th root of unity".into()))?;
    Ok(PhaseQ::from_ratio(k as i64, 12))
}

impl ArgDetInterp {
    pub fn new(level: u32, sem: &GateSemantics) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for name in sem.names() {
            let gate = sem.get(name).expect("listed generator");
            let base = arg_det(&gate.matrix)?;
            let w = PhaseQ::new(base.coefficient() * pow2(level as i64 - gate.arity as i64));
            weights.insert(name.to_string(), w);
        }
        Ok(ArgDetInterp {
            level,
            weights,
            swap: PhaseQ::new(pow2(level as i64 - 2)),
        })
    }

    pub fn eval(&self, c: &CanonicalDiagram) -> Result<PhaseQ> {
        let mut acc = PhaseQ::zero();
        for e in c.events() {
            let w = self
                .weights
                .get(&*e.gen)
                .ok_or_else(|| Error::UnknownGenerator(e.gen.to_string()))?;
            acc = acc.add(w);
        }
        if c.swap_parity() == 1 {
            acc = acc.add(&self.swap);
        }
        Ok(acc)
    }
}

/// A projective substitution: generator matrices overridden, equality up to phase.
#[derive(Clone, Debug)]
pub struct ProjInterp {
    pub id: String,
    pub semantics: GateSemantics,
}

impl ProjInterp {
    /// Overrides `gen` by the matrix of `replacement` (a generator, shortcut, or `I`).
    pub fn substitute(id: &str, f: &Fragment, gen: &str, replacement: &str) -> Result<Self> {
        let arity = f.arity(gen).ok_or_else(|| Error::UnknownGenerator(gen.to_string()))?;
        let m = if replacement == "I" {
            CycMatrix::identity_nd(arity, f.dim)
        } else if let Some(g) = f.semantics.get(replacement) {
            g.matrix.clone()
        } else if let Some(s) = f.shortcuts.get(replacement) {
            s.intended.clone()
        } else {
            semantics::semantics_for_dim(f.dim)?.matrix(replacement)?.clone()
        };
        if m.dim() != f.dim.pow(arity as u32) || !m.is_unitary() {
            return Err(Error::DimensionMismatch(format!(
                "{id}: replacement for {gen} is not a unitary of the right size"
            )));
        }
        let mut sem = f.semantics.clone();
        sem.insert(gen, m)?;
        Ok(ProjInterp {
            id: id.to_string(),
            semantics: sem,
        })
    }

    pub fn eval(&self, c: &CanonicalDiagram) -> Result<CycMatrix> {
        semantics::eval(c, &self.semantics)
    }
}

/// Any separating interpretation.
#[derive(Clone, Debug)]
pub enum Interpretation {
    Monoid(MonoidInterp),
    ArgDet(ArgDetInterp),
    Proj(ProjInterp),
}

/// The value of a diagram under an interpretation.
#[derive(Clone, Debug)]
pub enum InterpValue {
    Elem(Value),
    Matrix(CycMatrix),
}

impl Interpretation {
    pub fn id(&self) -> String {
        match self {
            Interpretation::Monoid(m) => m.id.clone(),
            Interpretation::ArgDet(a) => format!("argdet{}", a.level),
            Interpretation::Proj(p) => p.id.clone(),
        }
    }

    pub fn eval(&self, c: &CanonicalDiagram) -> Result<InterpValue> {
        Ok(match self {
            Interpretation::Monoid(m) => InterpValue::Elem(m.eval(c)?),
            Interpretation::ArgDet(a) => InterpValue::Elem(Value::Phase(a.eval(c)?)),
            Interpretation::Proj(p) => InterpValue::Matrix(p.eval(c)?),
        })
    }

    /// Whether two diagrams receive equal values (projective equality for substitutions).
    pub fn equalizes(&self, a: &CanonicalDiagram, b: &CanonicalDiagram) -> Result<bool> {
        match (self.eval(a)?, self.eval(b)?) {
            (InterpValue::Elem(x), InterpValue::Elem(y)) => Ok(x == y),
            (InterpValue::Matrix(x), InterpValue::Matrix(y)) => x.proj_equal(&y),
            _ => unreachable!("one interpretation yields one kind of value"),
        }
    }
}

/// Parses an interpretation written in the table notation.
///
/// `?H` or `?CNOT,CS`; `#{H}_[2]`, `#{T,w,w}_[8]`, `#{CNOT,SWAP}_[2]`; `argdet2`;
/// `Z->I`, `S->SX`, `CS->CSz` (the arrow `↦` is accepted too).
pub fn parse_interp(spec: &str, f: &Fragment) -> Result<Interpretation> {
    let s = spec.trim();
    let bad = || Error::Invalid(format!("malformed interpretation {spec:?}"));
    if let Some(rest) = s.strip_prefix('?') {
        let names: Vec<&str> = rest.split(',').map(str::trim).collect();
        return Ok(Interpretation::Monoid(MonoidInterp::has(s, &names, f)?));
    }
    if let Some(rest) = s.strip_prefix("#{") {
        let (inner, tail) = rest.split_once('}').ok_or_else(bad)?;
        let k: u64 = match tail {
            "" => 2,
            t => t
                .strip_prefix("_[")
                .and_then(|t| t.strip_suffix(']'))
                .and_then(|t| t.parse().ok())
                .ok_or_else(bad)?,
        };
        if k < 2 {
            return Err(bad());
        }
        let names: Vec<&str> = inner.split(',').map(str::trim).collect();
        return Ok(Interpretation::Monoid(MonoidInterp::count(s, &names, k, f)?));
    }
    if let Some(k) = s.strip_prefix("argdet") {
        let k: u32 = k.parse().map_err(|_| bad())?;
        return Ok(Interpretation::ArgDet(ArgDetInterp::new(k, &f.semantics)?));
    }
    let (g, r) = s.split_once("->").or_else(|| s.split_once('↦')).ok_or_else(bad)?;
    Ok(Interpretation::Proj(ProjInterp::substitute(s, f, g.trim(), r.trim())?))
}

/// One axiom's verdict inside an independence report.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Equalized {
    pub axiom: String,
    pub equalized: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct IndependenceReport {
    pub fragment: String,
    pub axiom: String,
    pub interp: String,
    pub truncation: usize,
    pub equalized: Vec<Equalized>,
    pub separated: bool,
    pub witness: bool,
}

/// Checks whether `interp` witnesses independence of `axiom` in `truncate(f, k)`.
pub fn independence_check(
    f: &Fragment,
    axiom: &str,
    interp: &Interpretation,
    k: usize,
) -> Result<IndependenceReport> {
    let target = f
        .axiom(axiom)
        .ok_or_else(|| Error::UnknownRule(axiom.to_string()))?;
    let separated = !interp.equalizes(&target.lhs_c, &target.rhs_c)?;
    let mut equalized = Vec::new();
    for a in f.truncate(k).axioms.iter().filter(|a| a.name != axiom) {
        equalized.push(Equalized {
            axiom: a.name.clone(),
            equalized: interp.equalizes(&a.lhs_c, &a.rhs_c)?,
        });
    }
    let witness = separated && equalized.iter().all(|e| e.equalized);
    Ok(IndependenceReport {
        fragment: f.name.clone(),
        axiom: axiom.to_string(),
        interp: interp.id(),
        truncation: k,
        equalized,
        separated,
        witness,
    })
}

/// Where a candidate interpretation is listed.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Listed identically in both tables.
    Both,
    /// Only in the per-fragment table.
    PerFragment,
    /// Only in the summary table.
    Summary,
}

/// A listed interpretation for an axiom.
#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    /// The notation as listed.
    pub listed: String,
    /// The notation actually evaluated, when a listed generator needed renaming.
    pub evaluated: String,
    pub source: Source,
}

fn cand(listed: &str, source: Source) -> Candidate {
    Candidate {
        listed: listed.into(),
        evaluated: listed.into(),
        source,
    }
}

fn alias(listed: &str, evaluated: &str, source: Source) -> Candidate {
    Candidate {
        listed: listed.into(),
        evaluated: evaluated.into(),
        source,
    }
}

/// The listed separating interpretations for each axiom of a shipped fragment.
/// An empty list means no interpretation is provided.
pub fn minimality_table(fragment: &str) -> Vec<(&'static str, Vec<Candidate>)> {
    use Source::*;
    match fragment {
        "Cliff" => vec![
            ("w8", vec![cand("?w", Both)]),
            ("H2", vec![cand("?H", Both)]),
            ("S4", vec![cand("?S", Both)]),
            ("E", vec![cand("#{H}_[2]", Both)]),
            ("CPh", vec![cand("?CNOT", Both)]),
            ("B", vec![cand("#{SWAP}_[2]", Both)]),
            ("CZ", vec![cand("#{CNOT,SWAP}_[2]", Both)]),
            ("I", vec![cand("argdet2", PerFragment), cand("argdet3", Summary)]),
        ],
        "RCliff" => vec![
            ("minus2", vec![cand("?minus", Both)]),
            ("H2", vec![cand("?H", Both)]),
            ("Z2", vec![cand("?Z", Both)]),
            ("F", vec![alias("#{w}_[2]", "#{minus}_[2]", Both)]),
            ("CX2", vec![cand("?CNOT", Both)]),
            ("B", vec![cand("#{SWAP}_[2]", Both)]),
            ("ZC", vec![cand("#{Z}_[2]", Both)]),
            ("CZr", vec![cand("H->I", Both)]),
            ("CF", vec![cand("Z->I", Both)]),
            ("I", vec![cand("argdet2", PerFragment), cand("argdet3", Summary)]),
        ],
        "Cliff3" => vec![
            ("w12", vec![cand("?wb", Both)]),
            ("H4", vec![cand("?H", Both)]),
            ("S3", vec![cand("?S", Both)]),
            ("E", vec![cand("#{H}_[2]", Both)]),
            ("SSp", vec![cand("S->SX", Both)]),
            ("CPh", vec![cand("?CNOT", Both)]),
            ("KC", vec![cand("#{CNOT}_[2]", Both)]),
            ("CZ", vec![cand("#{S}_[3]", Both)]),
            ("B", vec![cand("#{SWAP}_[2]", Both)]),
            ("I", vec![]),
        ],
        "CliffT" => vec![
            ("w8", vec![cand("?w", Both)]),
            ("T8", vec![cand("?T", Both)]),
            ("H2", vec![cand("?H", Both)]),
            ("E", vec![cand("#{H}_[2]", Both)]),
            ("TX", vec![cand("#{H,T,w}_[2]", PerFragment), cand("#{H,w}_[2]", Summary)]),
            ("CPh", vec![cand("?CNOT", Both)]),
            ("B", vec![cand("#{SWAP}_[2]", Both)]),
            ("CZ", vec![cand("#{CNOT,SWAP}_[2]", Both)]),
            ("CSH", vec![]),
            ("HT2", vec![]),
            ("HTH", vec![]),
        ],
        "CliffCS" => vec![
            ("w8", vec![cand("?w", Both)]),
            ("H2", vec![cand("?H", Both)]),
            ("S4", vec![cand("?S", Both)]),
            ("E", vec![cand("#{H}_[2]", Both)]),
            ("CPh", vec![alias("?CNOT", "?CS", Both)]),
            ("CSr", vec![cand("CS->CSz", Both)]),
            ("B", vec![cand("#{SWAP}_[2]", Both)]),
            ("XCS", vec![cand("#{S,H}_[2]", Both)]),
            ("CE", vec![cand("CS->CSzz", Both)]),
            ("I", vec![cand("argdet2", PerFragment), cand("argdet3", Summary)]),
            ("SH0", vec![]),
            ("SH1", vec![]),
            ("SH2", vec![]),
            ("SH3", vec![]),
        ],
        "CNOTdihe" => vec![
            ("w8", vec![cand("?w", Both)]),
            ("X2", vec![cand("?X", Both)]),
            ("T8", vec![cand("?T", Both)]),
            ("TX", vec![cand("#{w}_[2]", Both)]),
            ("XC", vec![cand("#{X}_[2]", Both)]),
            ("B", vec![cand("#{SWAP}_[2]", Both)]),
            ("ZC", vec![cand("#{T,w,w}_[8]", Both)]),
            ("CPh", vec![cand("?CNOT", Both)]),
            ("I", vec![cand("#{CNOT,SWAP}_[2]", Both)]),
            ("C2T", vec![cand("#{T,w,w}_[4]", Both)]),
            ("C3T", vec![cand("argdet3", PerFragment), cand("argdet4", Summary)]),
        ],
        _ => vec![],
    }
}

/// One row of a minimality suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteRow {
    pub axiom: String,
    pub interp: Option<String>,
    pub evaluated: Option<String>,
    pub source: Option<Source>,
    pub truncation: usize,
    pub equalized: Vec<Equalized>,
    pub separated: bool,
    pub witness: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalityReport {
    pub fragment: String,
    pub content_hash: String,
    pub rows: Vec<SuiteRow>,
}

impl MinimalityReport {
    /// Axioms with at least one witnessing interpretation.
    pub fn witnessed_axioms(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .rows
            .iter()
            .filter(|r| r.witness)
            .map(|r| r.axiom.clone())
            .collect();
        out.dedup();
        out
    }

    /// Axioms for which every listed interpretation was evaluated and none witnessed.
    pub fn failed_axioms(&self) -> Vec<String> {
        let witnessed = self.witnessed_axioms();
        let mut out: Vec<String> = self
            .rows
            .iter()
            .filter(|r| r.interp.is_some() && !witnessed.contains(&r.axiom))
            .map(|r| r.axiom.clone())
            .collect();
        out.dedup();
        out
    }
}

pub const NO_INTERPRETATION: &str = "no interpretation provided in the reference table";

/// Runs every listed interpretation for `f`, at truncation equal to the target's width.
pub fn minimality_suite(f: &Fragment) -> Result<MinimalityReport> {
    let table = minimality_table(&f.name);
    let mut jobs = Vec::new();
    for (axiom, cands) in &table {
        let width = f
            .axiom(axiom)
            .ok_or_else(|| Error::UnknownRule(axiom.to_string()))?
            .width;
        if cands.is_empty() {
            jobs.push((axiom.to_string(), None, width));
        }
        for c in cands {
            jobs.push((axiom.to_string(), Some(c.clone()), width));
        }
    }
    let rows: Result<Vec<SuiteRow>> = jobs
        .into_par_iter()
        .map(|(axiom, c, width)| match c {
            None => Ok(SuiteRow {
                axiom,
                interp: None,
                evaluated: None,
                source: None,
                truncation: width,
                equalized: vec![],
                separated: false,
                witness: false,
                note: Some(NO_INTERPRETATION.into()),
            }),
            Some(c) => {
                let interp = parse_interp(&c.evaluated, f)?;
                let r = independence_check(f, &axiom, &interp, width)?;
                let note = (c.evaluated != c.listed)
                    .then(|| format!("listed generator renamed for this fragment: {} evaluated as {}", c.listed, c.evaluated));
                Ok(SuiteRow {
                    axiom,
                    interp: Some(c.listed),
                    evaluated: Some(c.evaluated),
                    source: Some(c.source),
                    truncation: width,
                    equalized: r.equalized,
                    separated: r.separated,
                    witness: r.witness,
                    note,
                })
            }
        })
        .collect();
    Ok(MinimalityReport {
        fragment: f.name.clone(),
        content_hash: f.content_hash.clone(),
        rows: rows?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_term;
    use crate::fragments::load_fragment;

    fn canon(f: &Fragment, s: &str) -> CanonicalDiagram {
        f.canonical(&parse_term(s).unwrap()).unwrap()
    }

    #[test]
    fn has_and_count_examples() {
        let f = load_fragment("Cliff").unwrap();
        let h2 = f.axiom("H2").unwrap();
        let has_h = parse_interp("?H", &f).unwrap();
        assert!(matches!(has_h.eval(&h2.lhs_c).unwrap(), InterpValue::Elem(Value::Bool(true))));
        assert!(matches!(has_h.eval(&h2.rhs_c).unwrap(), InterpValue::Elem(Value::Bool(false))));
        let e = f.axiom("E").unwrap();
        let cnt = parse_interp("#{H}_[2]", &f).unwrap();
        assert!(matches!(cnt.eval(&e.lhs_c).unwrap(), InterpValue::Elem(Value::Zk(0))));
        assert!(matches!(cnt.eval(&e.rhs_c).unwrap(), InterpValue::Elem(Value::Zk(1))));
        let b = f.axiom("B").unwrap();
        let sw = parse_interp("#{SWAP}_[2]", &f).unwrap();
        assert!(matches!(sw.eval(&b.lhs_c).unwrap(), InterpValue::Elem(Value::Zk(0))));
        assert!(matches!(sw.eval(&b.rhs_c).unwrap(), InterpValue::Elem(Value::Zk(1))));
    }

    #[test]
    fn argdet_examples() {
        let f = load_fragment("Cliff").unwrap();
        let a = ArgDetInterp::new(2, &f.semantics).unwrap();
        assert_eq!(a.eval(&canon(&f, "(gen CNOT)")).unwrap(), PhaseQ::from_ratio(1, 1));
        assert_eq!(a.eval(&canon(&f, "(gen w)")).unwrap(), PhaseQ::from_ratio(1, 1));
        let i = f.axiom("I").unwrap();
        assert_eq!(a.eval(&i.lhs_c).unwrap(), PhaseQ::from_ratio(1, 1));
        assert_eq!(a.eval(&i.rhs_c).unwrap(), PhaseQ::zero());
        assert_eq!(a.swap, PhaseQ::from_ratio(1, 1));
    }

    #[test]
    fn projective_examples() {
        let r = load_fragment("RCliff").unwrap();
        let z = parse_interp("Z->I", &r).unwrap();
        let z2 = r.axiom("Z2").unwrap();
        assert!(z.equalizes(&z2.lhs_c, &z2.rhs_c).unwrap());
        let q = load_fragment("Cliff3").unwrap();
        let sx = parse_interp("S↦SX", &q).unwrap();
        let s3 = q.axiom("S3").unwrap();
        assert!(sx.equalizes(&s3.lhs_c, &s3.rhs_c).unwrap());
        let ssp = q.axiom("SSp").unwrap();
        assert!(!sx.equalizes(&ssp.lhs_c, &ssp.rhs_c).unwrap());
    }

    #[test]
    fn independence_examples() {
        let f = load_fragment("Cliff").unwrap();
        let r = independence_check(&f, "H2", &parse_interp("?H", &f).unwrap(), 1).unwrap();
        assert!(r.witness, "{r:?}");
        // at width 2 the CZ axiom enters, and its right side has no H
        let r = independence_check(&f, "H2", &parse_interp("?H", &f).unwrap(), 3).unwrap();
        assert!(r.separated && !r.witness);
        assert!(r.equalized.iter().any(|e| e.axiom == "CZ" && !e.equalized));
        let r = independence_check(&f, "H2", &parse_interp("?S", &f).unwrap(), 3).unwrap();
        assert!(!r.separated && !r.witness);
        let q = load_fragment("Cliff3").unwrap();
        let r = independence_check(&q, "SSp", &parse_interp("S->SX", &q).unwrap(), 1).unwrap();
        assert!(r.witness, "{r:?}");
    }

    #[test]
    fn phase_reduction() {
        assert_eq!(PhaseQ::from_ratio(5, 2), PhaseQ::from_ratio(1, 2));
        assert_eq!(PhaseQ::from_ratio(-1, 2), PhaseQ::from_ratio(3, 2));
    }
}
