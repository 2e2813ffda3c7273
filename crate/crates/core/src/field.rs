//! Exact arithmetic in the cyclotomic field Q(ζ24) and square matrices over it.
//!
//! An element is stored as eight integer numerators over one shared positive
//! denominator, on the power basis ζ^0..ζ^7 with ζ = e^{2πi/24}. The minimal
//! polynomial of ζ is x^8 - x^4 + 1, so products are reduced with x^8 = x^4 - 1.
//! Every value is kept normalized (gcd of numerators and denominator is 1), which
//! makes structural equality coincide with field equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Degree of Q(ζ24) over Q.
pub const DEGREE: usize = 8;

/// Exponents k with gcd(k, 24) = 1 other than 1; the nontrivial Galois automorphisms ζ ↦ ζ^k.
const GALOIS: [u32; 7] = [5, 7, 11, 13, 17, 19, 23];

/// Power-basis coordinates of ζ^k for k in 0..24.
fn power_table() -> &'static [[i64; DEGREE]; 24] {
    static TABLE: OnceLock<[[i64; DEGREE]; 24]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[0i64; DEGREE]; 24];
        let mut cur = [0i64; DEGREE];
        cur[0] = 1;
        for row in t.iter_mut() {
            *row = cur;
            // multiply by x, then fold x^8 = x^4 - 1
            let top = cur[DEGREE - 1];
            let mut next = [0i64; DEGREE];
            next[1..DEGREE].copy_from_slice(&cur[..DEGREE - 1]);
            next[4] += top;
            next[0] -= top;
            cur = next;
        }
        t
    })
}

/// An element of Q(ζ24).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycQ {
    num: [BigInt; DEGREE],
    den: BigInt,
}

impl CycQ {
    pub fn zero() -> Self {
        CycQ {
            num: Default::default(),
            den: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        let mut num: [BigInt; DEGREE] = Default::default();
        num[0] = BigInt::from(n);
        CycQ {
            num,
            den: BigInt::one(),
        }
    }

    pub fn from_ratio(n: i64, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::DivisionByZero);
        }
        let mut num: [BigInt; DEGREE] = Default::default();
        num[0] = BigInt::from(n);
        Ok(Self::normalized(num, BigInt::from(d)))
    }

    /// Builds an element from rational coordinates on the power basis.
    pub fn from_coeffs(coeffs: &[BigRational; DEGREE]) -> Self {
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num: [BigInt; DEGREE] =
            std::array::from_fn(|j| coeffs[j].numer() * (&den / coeffs[j].denom()));
        Self::normalized(num, den)
    }

    /// ζ24^k for any integer k.
    pub fn zeta_pow(k: i64) -> Self {
        let row = &power_table()[k.rem_euclid(24) as usize];
        CycQ {
            num: std::array::from_fn(|j| BigInt::from(row[j])),
            den: BigInt::one(),
        }
    }

    fn normalized(mut num: [BigInt; DEGREE], mut den: BigInt) -> Self {
        if num.iter().all(Zero::is_zero) {
            return Self::zero();
        }
        if den.is_negative() {
            den = -den;
            for n in num.iter_mut() {
                *n = -&*n;
            }
        }
        let mut g = den.clone();
        for n in num.iter() {
            if g.is_one() {
                break;
            }
            g = g.gcd(n);
        }
        if !g.is_one() {
            for n in num.iter_mut() {
                *n = &*n / &g;
            }
            den /= g;
        }
        CycQ { num, den }
    }

    /// Rational coordinates on the power basis ζ^0..ζ^7.
    pub fn coeffs(&self) -> [BigRational; DEGREE] {
        std::array::from_fn(|j| BigRational::new(self.num[j].clone(), self.den.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// True when the element lies in Q.
    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.num[0].clone(), self.den.clone()))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            let num = std::array::from_fn(|j| &self.num[j] + &other.num[j]);
            return Self::normalized(num, self.den.clone());
        }
        let num = std::array::from_fn(|j| &self.num[j] * &other.den + &other.num[j] * &self.den);
        Self::normalized(num, &self.den * &other.den)
    }

    pub fn neg(&self) -> Self {
        CycQ {
            num: std::array::from_fn(|j| -&self.num[j]),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut prod: [BigInt; 2 * DEGREE - 1] = Default::default();
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Self::normalized(reduce(&prod), &self.den * &other.den)
    }

    /// Multiplication by an integer.
    pub fn scale_int(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        Self::normalized(
            std::array::from_fn(|j| &self.num[j] * &k),
            self.den.clone(),
        )
    }

    /// Applies the Galois automorphism ζ ↦ ζ^k (k coprime to 24).
    pub fn galois(&self, k: u32) -> Self {
        let table = power_table();
        let mut out: [BigInt; DEGREE] = Default::default();
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &table[(j as u32 * k % 24) as usize];
            for (o, r) in out.iter_mut().zip(row.iter()) {
                if *r != 0 {
                    *o += c * BigInt::from(*r);
                }
            }
        }
        Self::normalized(out, self.den.clone())
    }

    /// Complex conjugation, ζ ↦ ζ^23.
    pub fn conj(&self) -> Self {
        self.galois(23)
    }

    /// Multiplicative inverse via the product of the nontrivial Galois conjugates.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut adj = Self::one();
        for k in GALOIS {
            adj = adj.mul(&self.galois(k));
        }
        let norm = self
            .mul(&adj)
            .as_rational()
            .expect("field norm lies in Q");
        let inv_norm = CycQ::normalized(
            {
                let mut n: [BigInt; DEGREE] = Default::default();
                n[0] = norm.denom().clone();
                n
            },
            norm.numer().clone(),
        );
        Ok(adj.mul(&inv_norm))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Returns k in 0..24 with self = ζ^k, when self is a 24th root of unity.
    pub fn root_of_unity_exponent(&self) -> Option<u32> {
        if !self.den.is_one() {
            return None;
        }
        let table = power_table();
        (0..24u32).find(|&k| {
            table[k as usize]
                .iter()
                .zip(self.num.iter())
                .all(|(t, n)| BigInt::from(*t) == *n)
        })
    }

    /// Multiplicative order, if the element is a root of unity.
    pub fn root_of_unity_order(&self) -> Option<u32> {
        self.root_of_unity_exponent()
            .map(|k| 24 / num_integer::gcd(k, 24))
    }

    /// The named constants used by the gate semantics.
    pub fn constant(name: &str) -> Result<Self> {
        Ok(match name {
            "one" => Self::one(),
            "minus_one" => Self::from_int(-1),
            "omega8" => Self::zeta_pow(3),
            "i" => Self::zeta_pow(6),
            "zeta12" => Self::zeta_pow(2),
            "zeta3" => Self::zeta_pow(8),
            "inv_sqrt2" => {
                let z = Self::zeta_pow(3);
                z.add(&z.conj()).mul(&Self::from_ratio(1, 2)?)
            }
            "inv_sqrt3" => {
                let z = Self::zeta_pow(2);
                z.add(&z.conj()).mul(&Self::from_ratio(1, 3)?)
            }
            _ => return Err(Error::UnknownConstant(name.to_string())),
        })
    }

    /// Bit-exact serialization: eight "num/den" strings in basis order, each in lowest terms.
    pub fn to_strings(&self) -> [String; DEGREE] {
        std::array::from_fn(|j| {
            let r = BigRational::new(self.num[j].clone(), self.den.clone());
            format!("{}/{}", r.numer(), r.denom())
        })
    }

    /// Inverse of [`CycQ::to_strings`]; also accepts bare integers.
    pub fn from_strings<S: AsRef<str>>(parts: &[S]) -> Result<Self> {
        if parts.len() != DEGREE {
            return Err(Error::Invalid(format!(
                "a cyclotomic value needs {DEGREE} coefficients, got {}",
                parts.len()
            )));
        }
        let mut coeffs: [BigRational; DEGREE] = Default::default();
        for (c, p) in coeffs.iter_mut().zip(parts) {
            *c = parse_rational(p.as_ref())?;
        }
        Ok(Self::from_coeffs(&coeffs))
    }

    /// Numerical approximation, used only for diagnostics and test oracles.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        let d: f64 = self.den.to_string().parse().unwrap_or(f64::NAN);
        let (mut re, mut im) = (0.0, 0.0);
        for (j, n) in self.num.iter().enumerate() {
            let c: f64 = n.to_string().parse().unwrap_or(f64::NAN) / d;
            let a = std::f64::consts::PI * j as f64 / 12.0;
            re += c * a.cos();
            im += c * a.sin();
        }
        (re, im)
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Invalid(format!("malformed rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(BigRational::new(n, d))
}

/// Folds a degree-14 product back onto the power basis.
fn reduce(prod: &[BigInt; 2 * DEGREE - 1]) -> [BigInt; DEGREE] {
    let table = power_table();
    let mut out: [BigInt; DEGREE] = Default::default();
    for (k, c) in prod.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if k < DEGREE {
            out[k] += c;
        } else {
            for (o, r) in out.iter_mut().zip(table[k].iter()) {
                if *r != 0 {
                    *o += c * BigInt::from(*r);
                }
            }
        }
    }
    out
}

impl fmt::Display for CycQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (j, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (_, true) => write!(f, "z^{j}")?,
                (_, false) => write!(f, "{a}*z^{j}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycQ({self})")
    }
}

impl Add for &CycQ {
    type Output = CycQ;
    fn add(self, rhs: &CycQ) -> CycQ {
        CycQ::add(self, rhs)
    }
}

impl Sub for &CycQ {
    type Output = CycQ;
    fn sub(self, rhs: &CycQ) -> CycQ {
        CycQ::sub(self, rhs)
    }
}

impl Mul for &CycQ {
    type Output = CycQ;
    fn mul(self, rhs: &CycQ) -> CycQ {
        CycQ::mul(self, rhs)
    }
}

impl Neg for &CycQ {
    type Output = CycQ;
    fn neg(self) -> CycQ {
        CycQ::neg(self)
    }
}

/// A square matrix over Q(ζ24), row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycMatrix {
    dim: usize,
    entries: Vec<CycQ>,
}

impl CycMatrix {
    pub fn zeros(dim: usize) -> Self {
        CycMatrix {
            dim,
            entries: vec![CycQ::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = CycQ::one();
        }
        m
    }

    /// Identity on n wires of local dimension d.
    pub fn identity_nd(n: usize, d: usize) -> Self {
        Self::identity(d.pow(n as u32))
    }

    pub fn scalar(c: CycQ) -> Self {
        CycMatrix {
            dim: 1,
            entries: vec![c],
        }
    }

    pub fn diagonal(diag: Vec<CycQ>) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, c) in diag.into_iter().enumerate() {
            m.entries[i * dim + i] = c;
        }
        m
    }

    /// Matrix sending basis vector |j⟩ to |perm[j]⟩.
    pub fn permutation(perm: &[usize]) -> Self {
        let dim = perm.len();
        let mut m = Self::zeros(dim);
        for (j, &i) in perm.iter().enumerate() {
            m.entries[i * dim + j] = CycQ::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<CycQ>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("matrix is not square".into()));
        }
        Ok(CycMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &CycQ {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycQ) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[CycQ] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<CycQ>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Product self·other.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "matmul of {}x{} by {}x{}",
                self.dim, self.dim, other.dim, other.dim
            )));
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k * n + j];
                    if !b.is_zero() {
                        let idx = i * n + j;
                        out.entries[idx] = out.entries[idx].add(&a.mul(b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product self ⊗ other (self indexes the more significant digits).
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        let n = a * b;
        let mut out = Self::zeros(n);
        for i1 in 0..a {
            for j1 in 0..a {
                let x = &self.entries[i1 * a + j1];
                if x.is_zero() {
                    continue;
                }
                for i2 in 0..b {
                    for j2 in 0..b {
                        let y = &other.entries[i2 * b + j2];
                        if !y.is_zero() {
                            out.entries[(i1 * b + i2) * n + j1 * b + j2] = x.mul(y);
                        }
                    }
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, c: &CycQ) -> Self {
        CycMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.mul(c)).collect(),
        }
    }

    /// Determinant by Bareiss fraction-free elimination with row pivoting.
    pub fn det(&self) -> CycQ {
        let n = self.dim;
        if n == 0 {
            return CycQ::one();
        }
        let mut m = self.rows();
        let mut prev = CycQ::one();
        let mut sign_flip = false;
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign_flip = !sign_flip;
                    }
                    None => return CycQ::zero(),
                }
            }
            let prev_inv = prev.inv().expect("Bareiss pivot is nonzero");
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                    m[i][j] = t.mul(&prev_inv);
                }
                m[i][k] = CycQ::zero();
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        if sign_flip {
            d.neg()
        } else {
            d
        }
    }

    /// Exact check of M·M† = I.
    pub fn is_unitary(&self) -> bool {
        self.matmul(&self.dagger())
            .map(|p| p == Self::identity(self.dim))
            .unwrap_or(false)
    }

    /// Returns λ when self = λ·I.
    pub fn scalar_multiple_of_identity(&self) -> Option<CycQ> {
        let n = self.dim;
        let lambda = self.entries.first()?.clone();
        for i in 0..n {
            for j in 0..n {
                let e = &self.entries[i * n + j];
                let ok = if i == j { *e == lambda } else { e.is_zero() };
                if !ok {
                    return None;
                }
            }
        }
        Some(lambda)
    }

    /// Equality up to a global phase: A·B† = λ·I with |λ| = 1.
    pub fn proj_equal(&self, other: &Self) -> Result<bool> {
        let p = self.matmul(&other.dagger())?;
        Ok(match p.scalar_multiple_of_identity() {
            Some(l) => l.mul(&l.conj()).is_one(),
            None => false,
        })
    }

    /// Serialization of every entry, row-major.
    pub fn to_strings(&self) -> Vec<[String; DEGREE]> {
        self.entries.iter().map(CycQ::to_strings).collect()
    }
}

impl fmt::Debug for CycMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CycMatrix {}x{} [", self.dim, self.dim)?;
        for r in self.entries.chunks(self.dim.max(1)) {
            let cells: Vec<String> = r.iter().map(|c| c.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}
