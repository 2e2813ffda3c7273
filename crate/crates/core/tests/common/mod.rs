//! Shared generators and an independent floating-point evaluator.
#![allow(dead_code)]

use num_complex::Complex64;
use qcprop::diagram::Term;
use qcprop::semantics::GateSemantics;
use rand::seq::SliceRandom;
use rand::Rng;

/// A flat circuit: gates on explicit wires and explicit permutation layers.
#[derive(Clone, Debug)]
pub enum Item {
    Gate(String, Vec<usize>),
    /// Thread at position i moves to position `perm[i]`.
    Perm(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct Circuit {
    pub n: usize,
    pub items: Vec<Item>,
}

pub fn gate_list(sem: &GateSemantics) -> Vec<(String, usize)> {
    sem.names()
        .map(|g| (g.to_string(), sem.get(g).unwrap().arity))
        .collect()
}

pub fn random_perm<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        q[j] = i;
    }
    q
}

pub fn random_circuit<R: Rng>(rng: &mut R, gates: &[(String, usize)], n: usize, len: usize) -> Circuit {
    let usable: Vec<_> = gates.iter().filter(|(_, a)| *a <= n).collect();
    let mut items = Vec::new();
    for _ in 0..len {
        if n >= 2 && rng.gen_bool(0.1) {
            items.push(Item::Perm(random_perm(rng, n)));
            continue;
        }
        let (g, a) = usable[rng.gen_range(0..usable.len())];
        let mut wires: Vec<usize> = (0..n).collect();
        wires.shuffle(rng);
        wires.truncate(*a);
        items.push(Item::Gate(g.clone(), wires));
    }
    Circuit { n, items }
}

fn item_term(item: &Item, n: usize) -> Term {
    match item {
        Item::Gate(g, w) => Term::placed(g, w, n),
        Item::Perm(p) => Term::permutation(p),
    }
}

fn crosses(item: &Item, k: usize) -> bool {
    match item {
        Item::Gate(_, w) => w.iter().any(|&x| x < k) && w.iter().any(|&x| x >= k),
        Item::Perm(_) => true,
    }
}

fn shift(item: &Item, lo: usize) -> Item {
    match item {
        Item::Gate(g, w) => Item::Gate(g.clone(), w.iter().map(|x| x - lo).collect()),
        Item::Perm(p) => Item::Perm(p.iter().map(|x| x - lo).collect()),
    }
}

fn on_range(item: &Item, lo: usize, hi: usize) -> bool {
    match item {
        Item::Gate(_, w) => !w.is_empty() && w.iter().all(|&x| x >= lo && x < hi),
        Item::Perm(_) => false,
    }
}

/// Builds a term with random bracketing, identity padding and, where no item
/// crosses a wire cut, a tensor split (interchange law).
pub fn build<R: Rng>(rng: &mut R, c: &Circuit) -> Term {
    build_rec(rng, &c.items, c.n, 4)
}

fn build_rec<R: Rng>(rng: &mut R, items: &[Item], n: usize, fuel: usize) -> Term {
    if items.is_empty() {
        return Term::Id(n);
    }
    if rng.gen_bool(0.15) {
        let inner = build_rec(rng, items, n, fuel);
        return if rng.gen() {
            Term::Seq(Box::new(Term::Id(n)), Box::new(inner))
        } else {
            Term::Seq(Box::new(inner), Box::new(Term::Id(n)))
        };
    }
    if fuel > 0 && n >= 2 && rng.gen_bool(0.4) {
        let k = rng.gen_range(1..n);
        let has_scalars = items.iter().any(|i| matches!(i, Item::Gate(_, w) if w.is_empty()));
        if !has_scalars && !items.iter().any(|i| crosses(i, k)) {
            let top: Vec<Item> = items.iter().filter(|i| on_range(i, 0, k)).cloned().collect();
            let bot: Vec<Item> = items
                .iter()
                .filter(|i| on_range(i, k, n))
                .map(|i| shift(i, k))
                .collect();
            let a = build_rec(rng, &top, k, fuel - 1);
            let b = build_rec(rng, &bot, n - k, fuel - 1);
            return Term::Par(Box::new(a), Box::new(b));
        }
    }
    if items.len() == 1 {
        return item_term(&items[0], n);
    }
    let cut = rng.gen_range(1..items.len());
    let a = build_rec(rng, &items[..cut], n, fuel);
    let b = build_rec(rng, &items[cut..], n, fuel);
    Term::Seq(Box::new(a), Box::new(b))
}

fn support(item: &Item) -> Option<&[usize]> {
    match item {
        Item::Gate(_, w) => Some(w),
        Item::Perm(_) => None,
    }
}

/// Applies one random structure-preserving move. Returns its name.
pub fn structural_move<R: Rng>(rng: &mut R, c: &mut Circuit) -> &'static str {
    let len = c.items.len();
    for _ in 0..8 {
        match rng.gen_range(0..4) {
            // commute adjacent gates with disjoint supports
            0 if len >= 2 => {
                let i = rng.gen_range(0..len - 1);
                if let (Some(a), Some(b)) = (support(&c.items[i]), support(&c.items[i + 1])) {
                    if a.iter().all(|x| !b.contains(x)) {
                        c.items.swap(i, i + 1);
                        return "commute";
                    }
                }
            }
            // slide a gate through a permutation (naturality)
            1 if len >= 2 => {
                let i = rng.gen_range(0..len - 1);
                if let (Item::Gate(g, w), Item::Perm(p)) = (&c.items[i], &c.items[i + 1]) {
                    let moved = Item::Gate(g.clone(), w.iter().map(|&x| p[x]).collect());
                    let perm = c.items[i + 1].clone();
                    c.items[i] = perm;
                    c.items[i + 1] = moved;
                    return "naturality";
                }
                if let (Item::Perm(p), Item::Gate(g, w)) = (&c.items[i], &c.items[i + 1]) {
                    let q = inverse(p);
                    let moved = Item::Gate(g.clone(), w.iter().map(|&x| q[x]).collect());
                    let perm = c.items[i].clone();
                    c.items[i] = moved;
                    c.items[i + 1] = perm;
                    return "naturality";
                }
            }
            // insert a permutation and its inverse
            2 => {
                let p = random_perm(rng, c.n);
                let at = rng.gen_range(0..=len);
                c.items.insert(at, Item::Perm(inverse(&p)));
                c.items.insert(at, Item::Perm(p));
                return "perm-pair";
            }
            // fuse two adjacent permutations
            3 if len >= 2 => {
                let i = rng.gen_range(0..len - 1);
                if let (Item::Perm(p), Item::Perm(q)) = (&c.items[i], &c.items[i + 1]) {
                    let fused: Vec<usize> = p.iter().map(|&x| q[x]).collect();
                    c.items[i] = Item::Perm(fused);
                    c.items.remove(i + 1);
                    return "fuse";
                }
            }
            _ => {}
        }
    }
    "rebracket"
}

// ---- independent floating-point evaluation over terms ----

pub type FMat = Vec<Vec<Complex64>>;

pub fn fmat_of(sem: &GateSemantics, g: &str) -> FMat {
    let m = sem.matrix(g).unwrap();
    let d = m.dim();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let (re, im) = m.get(i, j).to_f64_pair();
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect()
}

fn fid(d: usize) -> FMat {
    (0..d)
        .map(|i| (0..d).map(|j| Complex64::new((i == j) as u8 as f64, 0.0)).collect())
        .collect()
}

pub fn fmul(a: &FMat, b: &FMat) -> FMat {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn fkron(a: &FMat, b: &FMat) -> FMat {
    let (p, q) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); p * q]; p * q];
    for i in 0..p {
        for j in 0..p {
            for k in 0..q {
                for l in 0..q {
                    out[i * q + k][j * q + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// Evaluates a term directly from its syntax: `a ; b` is B·A, `a ⊗ b` is A⊗B.
pub fn float_eval(t: &Term, sem: &GateSemantics) -> FMat {
    let d = sem.dim();
    match t {
        Term::Id(n) => fid(d.pow(*n as u32)),
        Term::Gen(g) => fmat_of(sem, g),
        Term::Swap => {
            let mut m = vec![vec![Complex64::new(0.0, 0.0); d * d]; d * d];
            for x in 0..d {
                for y in 0..d {
                    m[y * d + x][x * d + y] = Complex64::new(1.0, 0.0);
                }
            }
            m
        }
        Term::Seq(a, b) => fmul(&float_eval(b, sem), &float_eval(a, sem)),
        Term::Par(a, b) => fkron(&float_eval(a, sem), &float_eval(b, sem)),
    }
}

pub fn exact_to_float(m: &qcprop::field::CycMatrix) -> FMat {
    let d = m.dim();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let (re, im) = m.get(i, j).to_f64_pair();
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect()
}

pub fn max_diff(a: &FMat, b: &FMat) -> f64 {
    let mut worst = 0.0f64;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            worst = worst.max((x - y).norm());
        }
    }
    worst
}

/// Tolerance for comparing exact values with the floating-point oracle.
pub const FLOAT_TOL: f64 = 1e-9;
