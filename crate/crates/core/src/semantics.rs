//! Gate signatures, their exact unitary semantics, and the shortcut table.
//!
//! Basis states |x1…xn⟩ are indexed big-endian: wire 1 is the most significant
//! digit. A diagram is evaluated by applying its events in causal order to the
//! identity and finally the permutation matrix of its boundary permutation.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagram::{Arity, CanonicalDiagram, Term};
use crate::error::{Error, Result};
use crate::field::{CycMatrix, CycQ};
use crate::sexpr::{self, error_at, Sexpr};

/// A list of generator names with arities, for one qudit dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub dim: usize,
    pub generators: Vec<(String, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub arity: usize,
    pub matrix: CycMatrix,
}

/// Generator name to exact matrix of size d^arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateSemantics {
    dim: usize,
    gates: BTreeMap<String, Gate>,
}

impl Arity for GateSemantics {
    fn arity(&self, gen: &str) -> Option<usize> {
        self.gates.get(gen).map(|g| g.arity)
    }
}

/// Number of wires a d^n-dimensional matrix acts on.
fn arity_of(dim: usize, size: usize) -> Option<usize> {
    let mut n = 0;
    let mut s = 1;
    while s < size {
        s *= dim;
        n += 1;
    }
    (s == size).then_some(n)
}

impl GateSemantics {
    pub fn empty(dim: usize) -> Self {
        GateSemantics {
            dim,
            gates: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds or replaces a gate; the arity is inferred from the matrix size.
    pub fn insert(&mut self, name: &str, matrix: CycMatrix) -> Result<()> {
        let arity = arity_of(self.dim, matrix.dim()).ok_or_else(|| {
            Error::DimensionMismatch(format!(
                "{name}: size {} is not a power of {}",
                matrix.dim(),
                self.dim
            ))
        })?;
        self.gates.insert(name.to_string(), Gate { arity, matrix });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Gate> {
        self.gates.get(name)
    }

    pub fn matrix(&self, name: &str) -> Result<&CycMatrix> {
        self.gates
            .get(name)
            .map(|g| &g.matrix)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.gates.keys().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.gates.contains_key(name)
    }

    /// Keeps only the listed generators.
    pub fn restrict<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut out = Self::empty(self.dim);
        for n in names {
            out.gates.insert(
                n.to_string(),
                self.gates
                    .get(n)
                    .cloned()
                    .ok_or_else(|| Error::UnknownGenerator(n.to_string()))?,
            );
        }
        Ok(out)
    }

    pub fn signature(&self) -> Signature {
        Signature {
            dim: self.dim,
            generators: self
                .gates
                .iter()
                .map(|(n, g)| (n.clone(), g.arity))
                .collect(),
        }
    }

    /// True when every matrix is exactly unitary.
    pub fn all_unitary(&self) -> bool {
        self.gates.values().all(|g| g.matrix.is_unitary())
    }
}

fn c(name: &str) -> CycQ {
    CycQ::constant(name).expect("built-in constant")
}

/// The nine qubit generators: ω, − (scalars), H, Z, S, T, X, CNOT, CS.
pub fn master_signature() -> (Signature, GateSemantics) {
    let mut sem = GateSemantics::empty(2);
    let (one, zero) = (CycQ::one(), CycQ::zero());
    let h = c("inv_sqrt2");
    let gates = [
        ("w", CycMatrix::scalar(c("omega8"))),
        ("minus", CycMatrix::scalar(c("minus_one"))),
        (
            "H",
            CycMatrix::from_rows(vec![vec![h.clone(), h.clone()], vec![h.clone(), h.neg()]])
                .unwrap(),
        ),
        ("Z", CycMatrix::diagonal(vec![one.clone(), c("minus_one")])),
        ("S", CycMatrix::diagonal(vec![one.clone(), c("i")])),
        ("T", CycMatrix::diagonal(vec![one.clone(), c("omega8")])),
        (
            "X",
            CycMatrix::from_rows(vec![vec![zero.clone(), one.clone()], vec![one.clone(), zero]])
                .unwrap(),
        ),
        ("CNOT", CycMatrix::permutation(&[0, 1, 3, 2])),
        (
            "CS",
            CycMatrix::diagonal(vec![one.clone(), one.clone(), one, c("i")]),
        ),
    ];
    for (n, m) in gates {
        sem.insert(n, m).unwrap();
    }
    (sem.signature(), sem)
}

/// The qutrit generators: ω̄ (scalar e^{iπ/6}), H, S, CNOT.
pub fn qutrit_signature() -> (Signature, GateSemantics) {
    let mut sem = GateSemantics::empty(3);
    let z3 = c("zeta3");
    let s3 = c("inv_sqrt3");
    let zpow = |k: usize| z3.pow((k % 3) as i64).unwrap();
    let h_rows = (0..3)
        .map(|k| (0..3).map(|x| s3.mul(&zpow(x * k))).collect())
        .collect();
    let mut cnot = vec![0; 9];
    for x in 0..3 {
        for y in 0..3 {
            cnot[3 * x + y] = 3 * x + (x + y) % 3;
        }
    }
    sem.insert("wb", CycMatrix::scalar(c("zeta12"))).unwrap();
    sem.insert("H", CycMatrix::from_rows(h_rows).unwrap()).unwrap();
    sem.insert(
        "S",
        CycMatrix::diagonal((0..3).map(|x| zpow([0, 0, 1][x])).collect()),
    )
    .unwrap();
    sem.insert("CNOT", CycMatrix::permutation(&cnot)).unwrap();
    (sem.signature(), sem)
}

/// Master semantics for a qudit dimension (2 or 3).
pub fn semantics_for_dim(dim: usize) -> Result<GateSemantics> {
    match dim {
        2 => Ok(master_signature().1),
        3 => Ok(qutrit_signature().1),
        _ => Err(Error::Invalid(format!("unsupported qudit dimension {dim}"))),
    }
}

/// Left-multiplies `state` by `gate` acting on the listed wires of an n-wire register.
fn apply_gate(state: &CycMatrix, gate: &CycMatrix, wires: &[usize], n: usize, d: usize) -> CycMatrix {
    let total = state.dim();
    let k = wires.len();
    let local = d.pow(k as u32);
    let place: Vec<usize> = (0..n).map(|w| d.pow((n - 1 - w) as u32)).collect();
    let digit = |x: usize, w: usize| (x / place[w]) % d;
    let mut out = CycMatrix::zeros(total);
    let mut done = vec![false; total];
    for base in 0..total {
        if done[base] {
            continue;
        }
        // all indices sharing base's digits outside `wires`, ordered by local index
        let mut cleared = base;
        for &w in wires {
            cleared -= digit(base, w) * place[w];
        }
        let group: Vec<usize> = (0..local)
            .map(|l| {
                let mut idx = cleared;
                let mut rem = l;
                for j in (0..k).rev() {
                    idx += (rem % d) * place[wires[j]];
                    rem /= d;
                }
                idx
            })
            .collect();
        for &g in &group {
            done[g] = true;
        }
        for col in 0..total {
            for (a, &ra) in group.iter().enumerate() {
                let mut acc = CycQ::zero();
                for (b, &rb) in group.iter().enumerate() {
                    let gab = gate.get(a, b);
                    if gab.is_zero() {
                        continue;
                    }
                    let s = state.get(rb, col);
                    if !s.is_zero() {
                        acc = acc.add(&gab.mul(s));
                    }
                }
                out.set(ra, col, acc);
            }
        }
    }
    out
}

/// Matrix of the permutation diagram sending thread t to output position perm[t].
pub fn permutation_matrix(perm: &[usize], d: usize) -> CycMatrix {
    let n = perm.len();
    let total = d.pow(n as u32);
    let place = |w: usize| d.pow((n - 1 - w) as u32);
    let images: Vec<usize> = (0..total)
        .map(|x| {
            (0..n)
                .map(|t| ((x / place(t)) % d) * place(perm[t]))
                .sum()
        })
        .collect();
    CycMatrix::permutation(&images)
}

/// Exact semantics of a canonical diagram.
pub fn eval(c: &CanonicalDiagram, sem: &GateSemantics) -> Result<CycMatrix> {
    let n = c.width();
    let d = sem.dim;
    let mut state = CycMatrix::identity(d.pow(n as u32));
    let mut scalar = CycQ::one();
    for e in c.events() {
        let gate = sem.get(&e.gen).ok_or_else(|| Error::UnknownGenerator(e.gen.to_string()))?;
        if gate.arity != e.wires.len() {
            return Err(Error::WidthMismatch(format!(
                "{} has arity {} but is applied to {} wires",
                e.gen,
                gate.arity,
                e.wires.len()
            )));
        }
        if e.is_scalar() {
            scalar = scalar.mul(gate.matrix.get(0, 0));
        } else {
            state = apply_gate(&state, &gate.matrix, &e.wires, n, d);
        }
    }
    if c.perm().iter().enumerate().any(|(i, &p)| i != p) {
        state = permutation_matrix(c.perm(), d).matmul(&state)?;
    }
    Ok(if scalar.is_one() {
        state
    } else {
        state.scale(&scalar)
    })
}

/// Semantics of a term over the generators of `sem`.
pub fn eval_term(t: &Term, sem: &GateSemantics) -> Result<CycMatrix> {
    eval(&CanonicalDiagram::from_term(t, sem)?, sem)
}

/// Parses a cyclotomic value.
///
/// Forms: an integer or rational atom; `(cyc c0 … c7)` with rational coordinates;
/// `(const NAME)`; `(zeta K)` for ζ24^K; and `(add …)`, `(mul …)`, `(neg x)`, `(pow x K)`.
pub fn parse_cycq(e: &Sexpr) -> Result<CycQ> {
    if let Some(a) = e.as_atom() {
        return CycQ::from_strings(&[a, "0", "0", "0", "0", "0", "0", "0"])
            .map_err(|_| error_at(e.pos(), "malformed number", &["INT", "INT/INT", "("]));
    }
    let items = e.as_list().unwrap_or_default();
    let args = items.get(1..).unwrap_or_default();
    let expected = ["cyc", "const", "zeta", "add", "mul", "neg", "pow"];
    match e.head() {
        Some("cyc") => {
            let parts: Vec<&str> = args.iter().filter_map(Sexpr::as_atom).collect();
            if parts.len() != args.len() {
                return Err(error_at(e.pos(), "cyc takes rational atoms", &["INT/INT"]));
            }
            CycQ::from_strings(&parts).map_err(|m| error_at(e.pos(), m.to_string(), &["INT/INT"]))
        }
        Some("const") if args.len() == 1 => {
            CycQ::constant(&sexpr::name_atom(&args[0])?)
        }
        Some("zeta") if args.len() == 1 => Ok(CycQ::zeta_pow(sexpr::int_atom(&args[0])?)),
        Some("add") => args
            .iter()
            .try_fold(CycQ::zero(), |acc, a| Ok(acc.add(&parse_cycq(a)?))),
        Some("mul") => args
            .iter()
            .try_fold(CycQ::one(), |acc, a| Ok(acc.mul(&parse_cycq(a)?))),
        Some("neg") if args.len() == 1 => Ok(parse_cycq(&args[0])?.neg()),
        Some("pow") if args.len() == 2 => parse_cycq(&args[0])?.pow(sexpr::int_atom(&args[1])?),
        _ => Err(error_at(e.pos(), "malformed cyclotomic value", &expected)),
    }
}

/// Canonical text of a cyclotomic value: `(cyc n/d …)`.
pub fn print_cycq(x: &CycQ) -> String {
    format!("(cyc {})", x.to_strings().join(" "))
}

/// Parses `(matrix (row x …) …)`, `(diag x …)`, or `(perm i …)` sending |j⟩ to |i_j⟩.
pub fn parse_matrix(e: &Sexpr) -> Result<CycMatrix> {
    match e.head() {
        Some("matrix") => {
            let rows = e.as_list().unwrap()[1..]
                .iter()
                .map(|r| {
                    sexpr::expect_form(r, "row")?
                        .iter()
                        .map(parse_cycq)
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            CycMatrix::from_rows(rows).map_err(|m| error_at(e.pos(), m.to_string(), &["row"]))
        }
        Some("diag") => Ok(CycMatrix::diagonal(
            e.as_list().unwrap()[1..]
                .iter()
                .map(parse_cycq)
                .collect::<Result<Vec<_>>>()?,
        )),
        Some("perm") => {
            let images = e.as_list().unwrap()[1..]
                .iter()
                .map(|a| sexpr::int_atom(a).map(|i| i as usize))
                .collect::<Result<Vec<_>>>()?;
            let mut seen = vec![false; images.len()];
            for &i in &images {
                if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                    return Err(error_at(e.pos(), "not a permutation", &["INT"]));
                }
            }
            Ok(CycMatrix::permutation(&images))
        }
        _ => Err(error_at(e.pos(), "expected a matrix", &["matrix", "diag", "perm"])),
    }
}

/// Canonical text of a matrix, row-major.
pub fn print_matrix(m: &CycMatrix) -> String {
    let rows: Vec<String> = m
        .rows()
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(print_cycq).collect();
            format!("(row {})", cells.join(" "))
        })
        .collect();
    format!("(matrix {})", rows.join(" "))
}

/// One shortcut gate: alternative expansions over base generators and its intended matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shortcut {
    pub name: String,
    pub arity: usize,
    pub expansions: Vec<Term>,
    pub intended: CycMatrix,
}

/// Shortcut name to definition, validated against exact semantics at load time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortcutTable {
    pub dim: usize,
    entries: BTreeMap<String, Shortcut>,
}

impl ShortcutTable {
    pub fn empty(dim: usize) -> Self {
        ShortcutTable {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Shortcut> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Parses and validates a table.
    ///
    /// Each line is `(shortcut NAME (expansion TERM)+ (intended MATRIX))`. Every
    /// expansion may use base generators and earlier shortcuts; it must evaluate to
    /// the intended matrix exactly, otherwise loading fails with the entry's name.
    pub fn parse(src: &str, base: &GateSemantics) -> Result<Self> {
        let mut table = ShortcutTable::empty(base.dim);
        for form in sexpr::parse_all(src)? {
            let args = sexpr::expect_form(&form, "shortcut")?;
            let name = sexpr::name_atom(args.first().ok_or_else(|| {
                error_at(form.pos(), "shortcut needs a name", &["NAME"])
            })?)?;
            let mut expansions = Vec::new();
            let mut intended = None;
            for a in &args[1..] {
                match a.head() {
                    Some("expansion") => {
                        let inner = sexpr::expect_form(a, "expansion")?;
                        if inner.len() != 1 {
                            return Err(error_at(a.pos(), "expansion takes one term", &["term"]));
                        }
                        expansions.push(crate::diagram::term_from_sexpr(&inner[0])?);
                    }
                    Some("intended") => {
                        let inner = sexpr::expect_form(a, "intended")?;
                        if inner.len() != 1 {
                            return Err(error_at(a.pos(), "intended takes one matrix", &["matrix"]));
                        }
                        intended = Some(parse_matrix(&inner[0])?);
                    }
                    _ => return Err(error_at(a.pos(), "unexpected clause", &["expansion", "intended"])),
                }
            }
            let intended =
                intended.ok_or_else(|| error_at(form.pos(), "missing intended matrix", &["intended"]))?;
            table.add(base, name, expansions, intended)?;
        }
        Ok(table)
    }

    /// Adds one validated entry.
    pub fn add(
        &mut self,
        base: &GateSemantics,
        name: String,
        expansions: Vec<Term>,
        intended: CycMatrix,
    ) -> Result<()> {
        let arity = arity_of(self.dim, intended.dim())
            .ok_or_else(|| Error::ShortcutMismatch(name.clone()))?;
        // earlier shortcuts evaluate through their intended matrices
        let mut sem = base.clone();
        for s in self.entries.values() {
            if !sem.contains(&s.name) {
                sem.insert(&s.name, s.intended.clone())?;
            }
        }
        for e in &expansions {
            match eval_term(e, &sem) {
                Ok(m) if m == intended => {}
                _ => return Err(Error::ShortcutMismatch(name)),
            }
        }
        if expansions.is_empty() {
            return Err(Error::ShortcutMismatch(name));
        }
        self.entries.insert(
            name.clone(),
            Shortcut {
                name,
                arity,
                expansions,
                intended,
            },
        );
        Ok(())
    }

    /// The first expansion of `name` expressible with generators in `gens`,
    /// resolving nested shortcuts recursively.
    pub fn resolve(&self, name: &str, gens: &BTreeSet<String>) -> Option<Term> {
        self.resolve_inner(name, gens, &mut Vec::new())
    }

    fn resolve_inner(&self, name: &str, gens: &BTreeSet<String>, stack: &mut Vec<String>) -> Option<Term> {
        let sc = self.entries.get(name)?;
        if stack.iter().any(|s| s == name) {
            return None;
        }
        stack.push(name.to_string());
        let mut found = None;
        'alts: for e in &sc.expansions {
            let mut subst = BTreeMap::new();
            for g in e.generators() {
                if gens.contains(&*g) || subst.contains_key(&*g) {
                    continue;
                }
                match self.resolve_inner(&g, gens, stack) {
                    Some(t) => {
                        subst.insert(g.to_string(), t);
                    }
                    None => continue 'alts,
                }
            }
            found = e
                .substitute(&mut |g| Ok(subst.get(g).cloned()))
                .ok();
            break;
        }
        stack.pop();
        found
    }

    /// Replaces every shortcut occurrence not in `gens` by its expansion over `gens`.
    pub fn expand(&self, t: &Term, gens: &BTreeSet<String>) -> Result<Term> {
        t.substitute(&mut |g| {
            if gens.contains(g) {
                return Ok(None);
            }
            match self.resolve(g, gens) {
                Some(e) => Ok(Some(e)),
                None if self.entries.contains_key(g) => Err(Error::Invalid(format!(
                    "shortcut {g} has no expansion over the available generators"
                ))),
                None => Err(Error::UnknownGenerator(g.to_string())),
            }
        })
    }

    /// Arity of a shortcut or base generator.
    pub fn arity_with<'a>(&'a self, base: &'a GateSemantics) -> impl Fn(&str) -> Option<usize> + 'a {
        move |g| base.arity(g).or_else(|| self.get(g).map(|s| s.arity))
    }
}

const QUBIT_SHORTCUTS: &str = include_str!("../data/shortcuts/qubit.sc");
const QUTRIT_SHORTCUTS: &str = include_str!("../data/shortcuts/qutrit.sc");

/// The shipped shortcut table for a qudit dimension, validated against the master semantics.
pub fn load_shortcuts(dim: usize) -> Result<ShortcutTable> {
    let base = semantics_for_dim(dim)?;
    match dim {
        2 => ShortcutTable::parse(QUBIT_SHORTCUTS, &base),
        3 => ShortcutTable::parse(QUTRIT_SHORTCUTS, &base),
        _ => Err(Error::Invalid(format!("unsupported qudit dimension {dim}"))),
    }
}

/// Expands every shortcut of `tbl` in `t`, keeping base generators of dimension `tbl.dim`.
pub fn expand_shortcuts(t: &Term, tbl: &ShortcutTable) -> Result<Term> {
    let base = semantics_for_dim(tbl.dim)?;
    let gens: BTreeSet<String> = base.names().map(str::to_string).collect();
    tbl.expand(t, &gens)
}
