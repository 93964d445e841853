//! Finite fields F_{p^k}.
//!
//! Elements are encoded as integers `0..p^k`: the base-p digits of an
//! element are its coefficients in the power basis `1, g, g^2, ...`, where
//! `g` is a root of the lexicographically smallest monic primitive
//! polynomial of degree k. For k = 1 the encoding is the residue itself.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field size; arithmetic is table driven.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

/// Characteristic and extension degree of the coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub k: u32,
}

impl FieldSpec {
    pub fn new(p: u32, k: u32) -> Self {
        FieldSpec { p, k }
    }

    pub fn build(self) -> Result<FieldRef> {
        Ok(Arc::new(Field::new(self.p, self.k)?))
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub type FieldRef = Arc<Field>;

pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, low degree first (length k+1). For k = 1 this is `x - g`.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p, self.k)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(p: u32, k: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::ZeroExtension);
        }
        let q64 = (p as u64).checked_pow(k).filter(|&q| q <= MAX_FIELD_SIZE);
        let q = q64.ok_or(Error::FieldTooLarge { p, k })? as u32;
        if k == 1 {
            let g = (1..p.max(2))
                .find(|&g| p == 2 || prime_field_order(g, p) == p - 1)
                .unwrap_or(1);
            let mut exp = Vec::with_capacity((q - 1) as usize);
            let mut log = vec![0u32; q as usize];
            let mut cur = 1u64;
            for i in 0..q - 1 {
                exp.push(cur as u32);
                log[cur as usize] = i;
                cur = cur * g as u64 % p as u64;
            }
            let modulus = vec![(p - g) % p, 1];
            return Ok(Field { p, k, q, modulus, exp, log });
        }
        for cand in 0..q {
            let mut modulus = digits(cand, p, k);
            if modulus[0] == 0 {
                continue;
            }
            modulus.push(1);
            if let Some((exp, log)) = power_tables(&modulus, p, k, q) {
                return Ok(Field { p, k, q, modulus, exp, log });
            }
        }
        Err(Error::InternalConsistency(format!(
            "no primitive polynomial of degree {k} over F_{p}"
        )))
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.p, k: self.k }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The fixed generator `g` of the power basis (k > 1), or a primitive root (k = 1).
    pub fn generator(&self) -> u32 {
        if self.k == 1 {
            self.exp[1 % self.exp.len()]
        } else {
            self.p
        }
    }

    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let (p, mut a, mut b) = (self.p, a, b);
        let (mut r, mut place) = (0, 1);
        for _ in 0..self.k {
            r += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        r
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.k == 1 {
            return (self.p - a) % self.p;
        }
        let (p, mut a) = (self.p, a);
        let (mut r, mut place) = (0, 1);
        for _ in 0..self.k {
            r += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        r
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        self.exp[((self.log[a as usize] + self.log[b as usize]) % n) as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.q - 1;
        Some(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.q - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    /// Scalar multiple by an integer.
    pub fn mul_int(&self, a: u32, n: i64) -> u32 {
        self.mul(a, self.from_int(n))
    }

    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p as u64)
    }

    /// Inverse Frobenius: the unique b with b^p = a.
    pub fn frobenius_inv(&self, a: u32) -> u32 {
        self.pow(a, (self.q / self.p) as u64)
    }

    /// All r-th roots of `a`, in increasing encoding order.
    pub fn roots(&self, a: u32, r: u64) -> Vec<u32> {
        (0..self.q).filter(|&x| self.pow(x, r) == a).collect()
    }

    pub fn in_prime_field(&self, a: u32) -> bool {
        a < self.p
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    /// Canonical rendering: the residue for k = 1, otherwise a polynomial in `g`.
    pub fn render(&self, a: u32) -> String {
        if self.k == 1 || a < self.p {
            return a.to_string();
        }
        let d = digits(a, self.p, self.k);
        let mut parts = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let base = match i {
                0 => String::new(),
                1 => "g".to_string(),
                _ => format!("g^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => base,
                _ => format!("{c}*{base}"),
            });
        }
        parts.join(" + ")
    }

    /// True when the rendering of `a` is a single term (needs no parentheses).
    pub fn is_single_term(&self, a: u32) -> bool {
        self.k == 1 || digits(a, self.p, self.k).iter().filter(|&&c| c != 0).count() <= 1
    }
}

fn prime_field_order(g: u32, p: u32) -> u32 {
    let mut cur = g as u64 % p as u64;
    let mut ord = 1;
    while cur != 1 {
        cur = cur * g as u64 % p as u64;
        ord += 1;
        if ord > p {
            return 0;
        }
    }
    ord
}

fn digits(mut a: u32, p: u32, k: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(k as usize);
    for _ in 0..k {
        d.push(a % p);
        a /= p;
    }
    d
}

fn encode(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Powers of `x` modulo a monic polynomial; `None` unless `x` has order q-1.
fn power_tables(modulus: &[u32], p: u32, k: u32, q: u32) -> Option<(Vec<u32>, Vec<u32>)> {
    let k = k as usize;
    let mut cur = vec![0u32; k];
    cur[0] = 1;
    let mut exp = Vec::with_capacity((q - 1) as usize);
    let mut log = vec![u32::MAX; q as usize];
    for i in 0..q - 1 {
        let code = encode(&cur, p);
        if log[code as usize] != u32::MAX || code == 0 {
            return None;
        }
        log[code as usize] = i;
        exp.push(code);
        let top = cur[k - 1];
        for j in (1..k).rev() {
            cur[j] = cur[j - 1];
        }
        cur[0] = 0;
        for (j, c) in cur.iter_mut().enumerate() {
            *c = (*c + (p - top * modulus[j] % p) % p) % p;
        }
    }
    if encode(&cur, p) != 1 {
        return None;
    }
    log[0] = 0;
    Some((exp, log))
}

/// Dense univariate polynomials over a finite field, low degree first.
pub mod poly1 {
    use super::Field;

    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn degree(a: &[u32]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    pub fn add(f: &Field, a: &[u32], b: &[u32]) -> Vec<u32> {
        let n = a.len().max(b.len());
        let r = (0..n)
            .map(|i| f.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        trim(r)
    }

    pub fn sub(f: &Field, a: &[u32], b: &[u32]) -> Vec<u32> {
        let n = a.len().max(b.len());
        let r = (0..n)
            .map(|i| f.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        trim(r)
    }

    pub fn mul(f: &Field, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = f.add(r[i + j], f.mul(x, y));
            }
        }
        trim(r)
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(f: &Field, a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let db = degree(b).expect("division by zero polynomial");
        let lead_inv = f.inv(b[db]).expect("nonzero leading coefficient");
        let mut r = trim(a.to_vec());
        let mut q = vec![0u32; r.len().saturating_sub(db)];
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let c = f.mul(r[dr], lead_inv);
            q[dr - db] = c;
            for (j, &bj) in b.iter().enumerate().take(db + 1) {
                r[dr - db + j] = f.sub(r[dr - db + j], f.mul(c, bj));
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn monic(f: &Field, a: &[u32]) -> Vec<u32> {
        match degree(a) {
            None => Vec::new(),
            Some(d) => {
                let inv = f.inv(a[d]).expect("nonzero");
                trim(a.iter().map(|&c| f.mul(c, inv)).collect())
            }
        }
    }

    pub fn gcd(f: &Field, a: &[u32], b: &[u32]) -> Vec<u32> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let (_, r) = divrem(f, &a, &b);
            a = b;
            b = r;
        }
        monic(f, &a)
    }

    pub fn eval(f: &Field, a: &[u32], x: u32) -> u32 {
        a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn derivative(f: &Field, a: &[u32]) -> Vec<u32> {
        trim(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul_int(c, i as i64))
                .collect(),
        )
    }

    pub fn powmod(f: &Field, base: &[u32], mut e: u64, m: &[u32]) -> Vec<u32> {
        let mut result = vec![1u32];
        let mut b = divrem(f, base, m).1;
        while e > 0 {
            if e & 1 == 1 {
                result = divrem(f, &mul(f, &result, &b), m).1;
            }
            b = divrem(f, &mul(f, &b, &b), m).1;
            e >>= 1;
        }
        result
    }

    /// Distinct roots in the field, ascending.
    pub fn roots(f: &Field, a: &[u32]) -> Vec<u32> {
        if degree(a).is_none() {
            return Vec::new();
        }
        f.elements().filter(|&x| eval(f, a, x) == 0).collect()
    }

    /// Multiplicity of the root `x` in `a` (nonzero `a`).
    pub fn root_multiplicity(f: &Field, a: &[u32], x: u32) -> usize {
        let lin = vec![f.neg(x), 1];
        let mut cur = trim(a.to_vec());
        let mut m = 0;
        loop {
            if cur.is_empty() {
                return m;
            }
            let (q, r) = divrem(f, &cur, &lin);
            if !r.is_empty() {
                return m;
            }
            cur = q;
            m += 1;
        }
    }

    /// Degrees of the irreducible factors of a nonzero polynomial, with multiplicity, ascending.
    pub fn factor_degrees(f: &Field, a: &[u32]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut rest = monic(f, a);
        // Peel off repeated factors through gcd with the derivative.
        while degree(&rest).unwrap_or(0) > 0 {
            let sqf = squarefree_part(f, &rest);
            for d in distinct_degree(f, &sqf) {
                out.push(d);
            }
            rest = divrem(f, &rest, &sqf).0;
        }
        out.sort_unstable();
        out
    }

    /// Product of the distinct irreducible factors of a nonzero polynomial.
    pub fn squarefree_part(f: &Field, a: &[u32]) -> Vec<u32> {
        let a = monic(f, a);
        if degree(&a).unwrap_or(0) == 0 {
            return vec![1];
        }
        let da = derivative(f, &a);
        if da.is_empty() {
            // a = b^p with b obtained by inverse Frobenius on coefficients.
            let p = f.p() as usize;
            let b: Vec<u32> = a.iter().step_by(p).map(|&c| f.frobenius_inv(c)).collect();
            return squarefree_part(f, &b);
        }
        let g = gcd(f, &a, &da);
        let core = divrem(f, &a, &g).0;
        let rest = squarefree_part(f, &g);
        // core contains every factor whose multiplicity is prime to p; merge with rest.
        let common = gcd(f, &core, &rest);
        mul(f, &core, &divrem(f, &rest, &common).0)
    }

    fn distinct_degree(f: &Field, a: &[u32]) -> Vec<usize> {
        let q = f.size() as u64;
        let mut out = Vec::new();
        let mut rest = monic(f, a);
        let x = vec![0u32, 1];
        let mut xq = x.clone();
        let mut d = 0;
        while degree(&rest).unwrap_or(0) > 0 {
            d += 1;
            if 2 * d > degree(&rest).unwrap() {
                out.push(degree(&rest).unwrap());
                break;
            }
            xq = powmod(f, &xq, q, &rest);
            let g = gcd(f, &rest, &sub(f, &xq, &x));
            let dg = degree(&g).unwrap_or(0);
            for _ in 0..dg / d {
                out.push(d);
            }
            if dg > 0 {
                rest = divrem(f, &rest, &g).0;
                xq = divrem(f, &xq, &rest).1;
            }
        }
        out
    }
}
