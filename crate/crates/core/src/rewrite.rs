//! Rule application modulo structural congruence, derivation scripts and bounded
//! bidirectional proof search.
//!
//! A match embeds a rule side into a host trace: an injective map from pattern
//! threads to host threads, a host event for every pattern event, and for pattern
//! wires that carry no event a cut position on the chosen host thread. A match is
//! valid when the selected events form a convex region: the host decomposes as
//! `X ; block ; Y` with the block acting on the matched threads only. The smallest
//! candidate for `X` is the down-closure of everything the block must wait for;
//! the match is convex iff that set avoids the block and everything after it.
//!
//! Replacement uses the residual permutation σ = πL⁻¹ ∘ πR: the host block equals
//! the pattern's events without its boundary permutation, so it is replaced by the
//! other side's events followed by σ, and naturality carries σ into `Y`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::{self, CanonicalDiagram, Event, GenName, Linear, Term};
use crate::error::{Error, Result};
use crate::fragments::{self, Fragment};
use crate::sexpr::{self, error_at, Sexpr};

/// Clifford lemmas (Z2, X2, CX2, C) as a checked corpus.
pub const CLIFF_LEMMAS: &str = include_str!("../data/derivations/cliff_lemmas.deriv");
/// Derivations of the omitted CNOTdiheOld axioms (R4, R2, R3, R5, R8, R11) in CNOTdihe.
pub const CNOTDIHE_CONSERVATIVITY: &str = include_str!("../data/derivations/cnotdihe_conservativity.deriv");

/// Orientation of an equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Direction {
    #[serde(rename = "lr")]
    LR,
    #[serde(rename = "rl")]
    RL,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::LR => Direction::RL,
            Direction::RL => Direction::LR,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lr" => Some(Direction::LR),
            "rl" => Some(Direction::RL),
            _ => None,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::LR => "lr",
            Direction::RL => "rl",
        })
    }
}

/// Precomputed shape of a rule's left side.
#[derive(Clone, Debug)]
struct Pattern {
    width: usize,
    /// Non-scalar events in canonical order.
    events: Vec<Event>,
    /// Per pattern thread: (event index, slot) in causal order.
    threads: Vec<Vec<(usize, usize)>>,
    /// For each event and slot, its position on that slot's thread.
    pos: Vec<Vec<usize>>,
    scalars: BTreeMap<GenName, usize>,
}

impl Pattern {
    fn new(c: &CanonicalDiagram) -> Self {
        let mut threads = vec![Vec::new(); c.width()];
        let mut events = Vec::new();
        let mut pos = Vec::new();
        let mut scalars = BTreeMap::new();
        for e in c.events() {
            if e.is_scalar() {
                *scalars.entry(e.gen.clone()).or_insert(0) += 1;
                continue;
            }
            let idx = events.len();
            let mut p = Vec::with_capacity(e.wires.len());
            for (slot, &w) in e.wires.iter().enumerate() {
                p.push(threads[w].len());
                threads[w].push((idx, slot));
            }
            pos.push(p);
            events.push(e.clone());
        }
        Pattern {
            width: c.width(),
            events,
            threads,
            pos,
            scalars,
        }
    }
}

/// An oriented equation ready for matching.
#[derive(Clone, Debug)]
pub struct Rule {
    pub name: String,
    pub dir: Direction,
    pub lhs: CanonicalDiagram,
    pub rhs: CanonicalDiagram,
    pattern: Arc<Pattern>,
    /// σ(t) = πL⁻¹(πR(t)).
    sigma: Vec<usize>,
}

impl Rule {
    pub fn new(name: &str, dir: Direction, lhs: CanonicalDiagram, rhs: CanonicalDiagram) -> Result<Self> {
        if lhs.width() != rhs.width() {
            return Err(Error::WidthMismatch(format!(
                "rule {name}: sides of width {} and {}",
                lhs.width(),
                rhs.width()
            )));
        }
        let mut inv_l = vec![0; lhs.width()];
        for (t, &p) in lhs.perm().iter().enumerate() {
            inv_l[p] = t;
        }
        let sigma = rhs.perm().iter().map(|&p| inv_l[p]).collect();
        Ok(Rule {
            name: name.to_string(),
            dir,
            pattern: Arc::new(Pattern::new(&lhs)),
            lhs,
            rhs,
            sigma,
        })
    }
}

/// Named equations with both orientations, in a fixed order.
#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    rules: Vec<Rule>,
}

impl RuleSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every axiom of `f`, each as `lr` then `rl`.
    pub fn from_fragment(f: &Fragment) -> Result<Self> {
        let mut rs = RuleSet::new();
        for a in &f.axioms {
            rs.add_equation(&a.name, a.lhs_c.clone(), a.rhs_c.clone())?;
        }
        Ok(rs)
    }

    pub fn add_equation(&mut self, name: &str, lhs: CanonicalDiagram, rhs: CanonicalDiagram) -> Result<()> {
        self.rules.retain(|r| r.name != name);
        self.rules.push(Rule::new(name, Direction::LR, lhs.clone(), rhs.clone())?);
        self.rules.push(Rule::new(name, Direction::RL, rhs, lhs)?);
        Ok(())
    }

    /// Keeps only the named equations.
    pub fn restrict(&self, names: &[&str]) -> Self {
        RuleSet {
            rules: self
                .rules
                .iter()
                .filter(|r| names.contains(&r.name.as_str()))
                .cloned()
                .collect(),
        }
    }

    pub fn get(&self, name: &str, dir: Direction) -> Result<&Rule> {
        self.rules
            .iter()
            .find(|r| r.name == name && r.dir == dir)
            .ok_or_else(|| Error::UnknownRule(name.to_string()))
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn names(&self) -> Vec<String> {
        let mut v: Vec<String> = self.rules.iter().map(|r| r.name.clone()).collect();
        v.dedup();
        v
    }
}

/// Causal structure of a host diagram.
struct HostIndex {
    events: Vec<Event>,
    threads: Vec<Vec<usize>>,
    pos: Vec<Vec<usize>>,
    preds: Vec<Vec<usize>>,
    by_gen: HashMap<GenName, Vec<usize>>,
    scalars: BTreeMap<GenName, Vec<usize>>,
}

impl HostIndex {
    fn new(c: &CanonicalDiagram) -> Self {
        let events: Vec<Event> = c.events().cloned().collect();
        let mut threads = vec![Vec::new(); c.width()];
        let mut pos = Vec::with_capacity(events.len());
        let mut preds = Vec::with_capacity(events.len());
        let mut by_gen: HashMap<GenName, Vec<usize>> = HashMap::new();
        let mut scalars: BTreeMap<GenName, Vec<usize>> = BTreeMap::new();
        for (i, e) in events.iter().enumerate() {
            let mut p = Vec::with_capacity(e.wires.len());
            let mut pr = Vec::new();
            for &w in &e.wires {
                if let Some(&last) = threads[w].last() {
                    pr.push(last);
                }
                p.push(threads[w].len());
                threads[w].push(i);
            }
            pos.push(p);
            preds.push(pr);
            if e.is_scalar() {
                scalars.entry(e.gen.clone()).or_default().push(i);
            } else {
                by_gen.entry(e.gen.clone()).or_default().push(i);
            }
        }
        HostIndex {
            events,
            threads,
            pos,
            preds,
            by_gen,
            scalars,
        }
    }
}

/// One embedding of a rule side into a host.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    /// Pattern thread ↦ host thread (0-based).
    pub wire_map: Vec<usize>,
    /// Host event index (canonical order) of each non-scalar pattern event.
    pub events: Vec<usize>,
    /// Host scalar events consumed.
    pub scalars: Vec<usize>,
    /// For pattern threads without events: cut position on the host thread.
    pub cuts: Vec<Option<usize>>,
    /// Smallest host position touched, used for ordering.
    pub anchor: usize,
    /// Host events that must precede the block.
    before: Vec<usize>,
    host_fingerprint: u64,
}

impl Match {
    fn key(&self) -> (usize, &[usize], &[usize], &[Option<usize>]) {
        (self.anchor, &self.wire_map, &self.events, &self.cuts)
    }
}

struct MatchState {
    phi: Vec<Option<usize>>,
    used: Vec<bool>,
    assign: Vec<Option<usize>>,
}

impl Clone for MatchState {
    fn clone(&self) -> Self {
        MatchState {
            phi: self.phi.clone(),
            used: self.used.clone(),
            assign: self.assign.clone(),
        }
    }
}

struct Matcher<'a> {
    host: &'a HostIndex,
    pat: &'a Pattern,
    scalars: Vec<usize>,
    fingerprint: u64,
    out: Vec<Match>,
}

impl Matcher<'_> {
    /// Binds pattern event `p` to host event `h` and propagates along threads.
    fn bind(&self, st: &mut MatchState, p: usize, h: usize) -> bool {
        let mut work = vec![(p, h)];
        while let Some((p, h)) = work.pop() {
            if let Some(x) = st.assign[p] {
                if x != h {
                    return false;
                }
                continue;
            }
            let pe = &self.pat.events[p];
            let he = &self.host.events[h];
            if pe.gen != he.gen || pe.wires.len() != he.wires.len() {
                return false;
            }
            for (j, &t) in pe.wires.iter().enumerate() {
                let ht = he.wires[j];
                match st.phi[t] {
                    Some(x) if x != ht => return false,
                    Some(_) => {}
                    None => {
                        if st.used[ht] {
                            return false;
                        }
                        st.phi[t] = Some(ht);
                        st.used[ht] = true;
                    }
                }
            }
            st.assign[p] = Some(h);
            for (j, &t) in pe.wires.iter().enumerate() {
                let i = self.pat.pos[p][j];
                let q = self.host.pos[h][j];
                let ht = he.wires[j];
                for (i2, &(p2, _)) in self.pat.threads[t].iter().enumerate() {
                    if i2 == i || st.assign[p2].is_some() {
                        continue;
                    }
                    let q2 = q as isize + i2 as isize - i as isize;
                    if q2 < 0 || q2 as usize >= self.host.threads[ht].len() {
                        return false;
                    }
                    work.push((p2, self.host.threads[ht][q2 as usize]));
                }
            }
        }
        true
    }

    fn run(&mut self, st: MatchState) {
        match st.assign.iter().position(Option::is_none) {
            Some(p) => {
                let gen = &self.pat.events[p].gen;
                let Some(cands) = self.host.by_gen.get(gen) else {
                    return;
                };
                for &h in cands {
                    let mut s = st.clone();
                    if self.bind(&mut s, p, h) {
                        self.run(s);
                    }
                }
            }
            None => {
                let idle: Vec<usize> = (0..self.pat.width).filter(|&t| st.phi[t].is_none()).collect();
                let mut cuts = vec![None; self.pat.width];
                self.place_idle(st, &idle, &mut cuts);
            }
        }
    }

    fn place_idle(&mut self, st: MatchState, idle: &[usize], cuts: &mut Vec<Option<usize>>) {
        let Some((&t, rest)) = idle.split_first() else {
            self.finish(&st, cuts);
            return;
        };
        for ht in 0..self.host.threads.len() {
            if st.used[ht] {
                continue;
            }
            for c in 0..=self.host.threads[ht].len() {
                let mut s = st.clone();
                s.phi[t] = Some(ht);
                s.used[ht] = true;
                cuts[t] = Some(c);
                self.place_idle(s, rest, cuts);
            }
        }
        cuts[t] = None;
    }

    fn finish(&mut self, st: &MatchState, cuts: &[Option<usize>]) {
        let n_ev = self.host.events.len();
        // 1 = selected, 2 = after the block on a matched thread
        let mut mark = vec![0u8; n_ev];
        let selected: Vec<usize> = st.assign.iter().map(|a| a.unwrap()).collect();
        for &h in &selected {
            mark[h] = 1;
        }
        let mut seeds = Vec::new();
        let mut anchor = usize::MAX;
        for (t, cut) in cuts.iter().enumerate().take(self.pat.width) {
            let ht = st.phi[t].unwrap();
            let thread = &self.host.threads[ht];
            let (first, end) = match *cut {
                Some(c) => {
                    anchor = anchor.min(thread.get(c).copied().unwrap_or(n_ev));
                    (c, c)
                }
                None => {
                    let ps = &self.pat.threads[t];
                    let (p0, s0) = ps[0];
                    let (p1, s1) = ps[ps.len() - 1];
                    let h0 = st.assign[p0].unwrap();
                    let h1 = st.assign[p1].unwrap();
                    debug_assert_eq!(self.host.events[h0].wires[s0], ht);
                    debug_assert_eq!(self.host.events[h1].wires[s1], ht);
                    (self.host.pos[h0][s0], self.host.pos[h1][s1] + 1)
                }
            };
            seeds.extend_from_slice(&thread[..first]);
            for &e in &thread[end..] {
                mark[e] |= 2;
            }
        }
        for &h in &selected {
            anchor = anchor.min(h);
            for &p in &self.host.preds[h] {
                if mark[p] != 1 {
                    seeds.push(p);
                }
            }
        }
        let mut in_before = vec![false; n_ev];
        let mut before = Vec::new();
        while let Some(e) = seeds.pop() {
            if in_before[e] {
                continue;
            }
            if mark[e] != 0 {
                return;
            }
            in_before[e] = true;
            before.push(e);
            seeds.extend_from_slice(&self.host.preds[e]);
        }
        before.sort_unstable();
        if anchor == usize::MAX {
            anchor = self.scalars.first().copied().unwrap_or(0);
        }
        self.out.push(Match {
            wire_map: st.phi.iter().map(|p| p.unwrap()).collect(),
            events: selected,
            scalars: self.scalars.clone(),
            cuts: cuts.to_vec(),
            anchor,
            before,
            host_fingerprint: self.fingerprint,
        });
    }
}

/// All convex matches of `rule`'s left side in `host`, in deterministic order:
/// by anchor position, then wire map, then selected events and cuts.
pub fn find_matches(host: &CanonicalDiagram, rule: &Rule) -> Vec<Match> {
    find_matches_indexed(host, &HostIndex::new(host), rule)
}

fn find_matches_indexed(host: &CanonicalDiagram, idx: &HostIndex, rule: &Rule) -> Vec<Match> {
    let pat = &rule.pattern;
    if pat.width > host.width() {
        return Vec::new();
    }
    let mut scalars = Vec::new();
    for (g, &k) in &pat.scalars {
        match idx.scalars.get(g) {
            Some(v) if v.len() >= k => scalars.extend_from_slice(&v[..k]),
            _ => return Vec::new(),
        }
    }
    scalars.sort_unstable();
    let mut m = Matcher {
        host: idx,
        pat,
        scalars,
        fingerprint: host.fingerprint(),
        out: Vec::new(),
    };
    m.run(MatchState {
        phi: vec![None; pat.width],
        used: vec![false; host.width()],
        assign: vec![None; pat.events.len()],
    });
    let mut out = m.out;
    out.sort_by(|a, b| a.key().cmp(&b.key()));
    out.dedup_by(|a, b| a.key() == b.key());
    out
}

/// Replaces the matched occurrence of `rule.lhs` by `rule.rhs`.
pub fn apply(host: &CanonicalDiagram, rule: &Rule, m: &Match) -> Result<CanonicalDiagram> {
    if host.fingerprint() != m.host_fingerprint {
        return Err(Error::StaleMatch(format!("rule {} {}", rule.name, rule.dir)));
    }
    Ok(apply_unchecked(host, rule, m))
}

fn apply_unchecked(host: &CanonicalDiagram, rule: &Rule, m: &Match) -> CanonicalDiagram {
    let n = host.width();
    let events: Vec<&Event> = host.events().collect();
    let mut role = vec![0u8; events.len()]; // 0 = after, 1 = before, 2 = removed
    for &b in &m.before {
        role[b] = 1;
    }
    for &e in m.events.iter().chain(&m.scalars) {
        role[e] = 2;
    }
    let part = |r: u8| -> Vec<Event> {
        events
            .iter()
            .zip(&role)
            .filter(|(_, &x)| x == r)
            .map(|(e, _)| (*e).clone())
            .collect()
    };
    let ident: Vec<usize> = (0..n).collect();
    let x = Linear {
        width: n,
        events: part(1),
        perm: ident.clone(),
    };
    let block = Linear {
        width: n,
        events: rule
            .rhs
            .events()
            .map(|e| Event {
                gen: e.gen.clone(),
                wires: e.wires.iter().map(|&w| m.wire_map[w]).collect(),
            })
            .collect(),
        perm: ident.clone(),
    };
    let mut lifted = ident;
    for (t, &s) in rule.sigma.iter().enumerate() {
        lifted[m.wire_map[t]] = m.wire_map[s];
    }
    let sigma = Linear {
        width: n,
        events: Vec::new(),
        perm: lifted,
    };
    let y = Linear {
        width: n,
        events: part(0),
        perm: host.perm().to_vec(),
    };
    x.then(&block)
        .and_then(|l| l.then(&sigma))
        .and_then(|l| l.then(&y))
        .expect("all parts share the host width")
        .canonical()
}

/// Every one-step rewrite of `host`, in rule order then match order.
pub fn successors(host: &CanonicalDiagram, rules: &RuleSet) -> Vec<(CanonicalDiagram, usize, usize)> {
    let idx = HostIndex::new(host);
    let mut out = Vec::new();
    for (ri, r) in rules.rules.iter().enumerate() {
        for (k, m) in find_matches_indexed(host, &idx, r).iter().enumerate() {
            out.push((apply_unchecked(host, r, m), ri, k));
        }
    }
    out
}

/// One script step: rule name, orientation, and 0-based match ordinal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub rule: String,
    pub dir: Direction,
    pub ordinal: usize,
}

/// A replayable derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationScript {
    /// When present, a checked script becomes a lemma usable by later scripts.
    pub name: Option<String>,
    pub fragment: String,
    pub initial: Term,
    pub steps: Vec<Step>,
    pub final_term: Term,
}

impl DerivationScript {
    pub fn to_text(&self) -> String {
        let mut s = String::from("(derivation");
        if let Some(n) = &self.name {
            s += &format!("\n  (name {n})");
        }
        s += &format!("\n  (fragment {})\n  (initial {})", self.fragment, self.initial);
        for st in &self.steps {
            s += &format!("\n  (step {} {} {})", st.rule, st.dir, st.ordinal);
        }
        s += &format!("\n  (final {}))\n", self.final_term);
        s
    }
}

fn script_from_sexpr(e: &Sexpr) -> Result<DerivationScript> {
    let items = sexpr::expect_form(e, "derivation")?;
    let mut name = None;
    let mut fragment = None;
    let mut initial = None;
    let mut final_term = None;
    let mut steps = Vec::new();
    for it in items {
        let one = |head: &str| -> Result<&Sexpr> {
            let a = sexpr::expect_form(it, head)?;
            match a {
                [x] => Ok(x),
                _ => Err(error_at(it.pos(), format!("({head} ...) takes one argument"), &[head])),
            }
        };
        match it.head() {
            Some("name") => name = Some(sexpr::name_atom(one("name")?)?),
            Some("fragment") => fragment = Some(sexpr::name_atom(one("fragment")?)?),
            Some("initial") => initial = Some(diagram::term_from_sexpr(one("initial")?)?),
            Some("final") => final_term = Some(diagram::term_from_sexpr(one("final")?)?),
            Some("step") => {
                let a = sexpr::expect_form(it, "step")?;
                if a.len() != 3 {
                    return Err(error_at(it.pos(), "malformed step", &["(step RULE lr|rl INT)"]));
                }
                let dir = a[1]
                    .as_atom()
                    .and_then(Direction::parse)
                    .ok_or_else(|| error_at(a[1].pos(), "expected a direction", &["lr", "rl"]))?;
                let ordinal = sexpr::int_atom(&a[2])?;
                if ordinal < 0 {
                    return Err(error_at(a[2].pos(), "negative match ordinal", &["INT"]));
                }
                steps.push(Step {
                    rule: sexpr::name_atom(&a[0])?,
                    dir,
                    ordinal: ordinal as usize,
                });
            }
            _ => {
                return Err(error_at(
                    it.pos(),
                    "unexpected clause",
                    &["name", "fragment", "initial", "step", "final"],
                ))
            }
        }
    }
    let missing = |what: &str| error_at(e.pos(), format!("derivation lacks ({what} ...)"), &[what]);
    Ok(DerivationScript {
        name,
        fragment: fragment.ok_or_else(|| missing("fragment"))?,
        initial: initial.ok_or_else(|| missing("initial"))?,
        steps,
        final_term: final_term.ok_or_else(|| missing("final"))?,
    })
}

/// Parses every `(derivation ...)` form of a file.
pub fn parse_scripts(src: &str) -> Result<Vec<DerivationScript>> {
    sexpr::parse_all(src)?.iter().map(script_from_sexpr).collect()
}

/// Outcome of a successful replay.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: Option<String>,
    pub fragment: String,
    pub steps: usize,
    pub final_form: String,
}

/// Replays `script` in `rules` (the fragment's axioms plus any lemmas).
pub fn check_derivation_with(script: &DerivationScript, f: &Fragment, rules: &RuleSet) -> Result<CheckReport> {
    let mut host = f.canonical(&script.initial)?;
    for (i, st) in script.steps.iter().enumerate() {
        let rule = rules.get(&st.rule, st.dir)?;
        let ms = find_matches(&host, rule);
        let m = ms.get(st.ordinal).ok_or_else(|| Error::StepFailed {
            step: i + 1,
            msg: format!(
                "{} {}: match ordinal {} out of range ({} matches)",
                st.rule,
                st.dir,
                st.ordinal,
                ms.len()
            ),
            host: host.to_term().to_string(),
        })?;
        host = apply(&host, rule, m)?;
    }
    let expected = f.canonical(&script.final_term)?;
    if host != expected {
        return Err(Error::FinalMismatch(format!(
            "reached:  {}\nexpected: {}",
            host.render(),
            expected.render()
        )));
    }
    Ok(CheckReport {
        name: script.name.clone(),
        fragment: f.name.clone(),
        steps: script.steps.len(),
        final_form: host.to_term().to_string(),
    })
}

/// Replays `script` against the axioms of `f`.
pub fn check_derivation(script: &DerivationScript, f: &Fragment) -> Result<CheckReport> {
    check_derivation_with(script, f, &RuleSet::from_fragment(f)?)
}

/// Checks every derivation of a corpus file in order. A named derivation that
/// checks becomes a lemma for the later derivations over the same fragment.
pub fn check_corpus(src: &str) -> Result<Vec<Result<CheckReport>>> {
    let scripts = parse_scripts(src)?;
    let mut frags: BTreeMap<String, (Fragment, RuleSet)> = BTreeMap::new();
    let mut out = Vec::new();
    for s in &scripts {
        if !frags.contains_key(&s.fragment) {
            let f = fragments::load_fragment_or_file(&s.fragment)?;
            let rs = RuleSet::from_fragment(&f)?;
            frags.insert(s.fragment.clone(), (f, rs));
        }
        let (f, rs) = frags.get_mut(&s.fragment).expect("inserted above");
        let r = check_derivation_with(s, f, rs);
        if let (Ok(_), Some(name)) = (&r, &s.name) {
            let lhs = f.canonical(&s.initial)?;
            let rhs = f.canonical(&s.final_term)?;
            rs.add_equation(name, lhs, rhs)?;
        }
        out.push(r);
    }
    Ok(out)
}

/// Search limits. `max_extra` bounds intermediate diagrams to at most
/// `max(|a|, |b|) + max_extra` events.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_depth: usize,
    pub max_states: usize,
    pub max_extra: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_depth: 12,
            max_states: 1_000_000,
            max_extra: 8,
        }
    }
}

/// Result of a bounded search.
#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(Vec<Step>),
    /// Budget exhausted; not a disproof.
    Exhausted { states: usize, depth: usize },
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

struct Side {
    states: Vec<CanonicalDiagram>,
    parent: Vec<Option<(usize, usize, usize)>>,
    index: HashMap<CanonicalDiagram, usize>,
    frontier: Vec<usize>,
    depth: usize,
}

impl Side {
    fn new(start: CanonicalDiagram) -> Self {
        let mut index = HashMap::new();
        index.insert(start.clone(), 0);
        Side {
            states: vec![start],
            parent: vec![None],
            index,
            frontier: vec![0],
            depth: 0,
        }
    }

    /// Path from the root to `i` as (state before, rule index, ordinal) triples.
    fn path(&self, mut i: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        while let Some((p, r, k)) = self.parent[i] {
            out.push((p, r, k));
            i = p;
        }
        out.reverse();
        out
    }
}

/// Bidirectional breadth-first search for a derivation from `a` to `b`.
///
/// Levels are expanded in parallel and merged in frontier order, so the
/// result does not depend on scheduling.
pub fn search_canonical(
    a: &CanonicalDiagram,
    b: &CanonicalDiagram,
    rules: &RuleSet,
    budget: Budget,
) -> Result<SearchOutcome> {
    if a.width() != b.width() {
        return Err(Error::WidthMismatch(format!(
            "cannot relate diagrams of width {} and {}",
            a.width(),
            b.width()
        )));
    }
    if a == b {
        return Ok(SearchOutcome::Found(Vec::new()));
    }
    let limit = a.event_count().max(b.event_count()) + budget.max_extra;
    let mut sides = [Side::new(a.clone()), Side::new(b.clone())];
    while sides[0].depth + sides[1].depth < budget.max_depth {
        let s = if sides[0].frontier.len() <= sides[1].frontier.len() { 0 } else { 1 };
        if sides[s].frontier.is_empty() {
            break;
        }
        let expanded: Vec<Vec<(CanonicalDiagram, usize, usize)>> = sides[s]
            .frontier
            .par_iter()
            .map(|&i| {
                successors(&sides[s].states[i], rules)
                    .into_iter()
                    .filter(|(c, _, _)| c.event_count() <= limit)
                    .collect()
            })
            .collect();
        let frontier = std::mem::take(&mut sides[s].frontier);
        let mut next = Vec::new();
        let mut meet = None;
        'merge: for (&pi, succ) in frontier.iter().zip(expanded) {
            for (c, ri, k) in succ {
                if sides[s].index.contains_key(&c) {
                    continue;
                }
                let id = sides[s].states.len();
                sides[s].index.insert(c.clone(), id);
                sides[s].parent.push(Some((pi, ri, k)));
                if let Some(&j) = sides[1 - s].index.get(&c) {
                    sides[s].states.push(c);
                    meet = Some((id, j));
                    break 'merge;
                }
                sides[s].states.push(c);
                next.push(id);
            }
        }
        sides[s].depth += 1;
        sides[s].frontier = next;
        if let Some((id, j)) = meet {
            let (fi, bi) = if s == 0 { (id, j) } else { (j, id) };
            return Ok(SearchOutcome::Found(assemble(&sides, fi, bi, rules)?));
        }
        if sides[0].states.len() + sides[1].states.len() > budget.max_states {
            break;
        }
    }
    Ok(SearchOutcome::Exhausted {
        states: sides[0].states.len() + sides[1].states.len(),
        depth: sides[0].depth + sides[1].depth,
    })
}

/// Joins the forward path to `fi` with the reversed backward path from `bi`.
fn assemble(sides: &[Side; 2], fi: usize, bi: usize, rules: &RuleSet) -> Result<Vec<Step>> {
    let mut steps: Vec<Step> = sides[0]
        .path(fi)
        .into_iter()
        .map(|(_, ri, k)| {
            let r = &rules.rules[ri];
            Step {
                rule: r.name.clone(),
                dir: r.dir,
                ordinal: k,
            }
        })
        .collect();
    // the backward side went b = s0 → … → sm; undo each step from sm down to s1
    let back = sides[1].path(bi);
    let mut cur = sides[1].states[bi].clone();
    for &(p, ri, _) in back.iter().rev() {
        let target = &sides[1].states[p];
        let r = &rules.rules[ri];
        let inverse = rules.get(&r.name, r.dir.flip())?;
        let ms = find_matches(&cur, inverse);
        let k = ms
            .iter()
            .position(|m| apply_unchecked(&cur, inverse, m) == *target)
            .ok_or_else(|| Error::Invalid(format!("cannot invert step {} {}", r.name, r.dir)))?;
        steps.push(Step {
            rule: r.name.clone(),
            dir: inverse.dir,
            ordinal: k,
        });
        cur = target.clone();
    }
    Ok(steps)
}

/// Searches for a derivation of `a = b` in `f` and returns a checked script.
pub fn search_equal(a: &Term, b: &Term, f: &Fragment, budget: Budget) -> Result<Option<DerivationScript>> {
    search_equal_with(a, b, f, &RuleSet::from_fragment(f)?, budget)
}

/// As [`search_equal`] with an explicit rule set (axioms subset and lemmas).
pub fn search_equal_with(
    a: &Term,
    b: &Term,
    f: &Fragment,
    rules: &RuleSet,
    budget: Budget,
) -> Result<Option<DerivationScript>> {
    let ca = f.canonical(a)?;
    let cb = f.canonical(b)?;
    match search_canonical(&ca, &cb, rules, budget)? {
        SearchOutcome::Found(steps) => {
            let script = DerivationScript {
                name: None,
                fragment: f.name.clone(),
                initial: a.clone(),
                steps,
                final_term: b.clone(),
            };
            check_derivation_with(&script, f, rules)?;
            Ok(Some(script))
        }
        SearchOutcome::Exhausted { .. } => Ok(None),
    }
}
