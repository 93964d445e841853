use std::collections::BTreeMap;

use super::{Monomial, Series};
use crate::error::{Error, Result};

impl Series {
    /// Exact polynomial division; `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Series) -> Result<Option<Series>> {
        self.check_compatible(divisor)?;
        if !self.is_exact() || !divisor.is_exact() {
            return Err(Error::InvalidArgument("exact division needs exact operands".into()));
        }
        let (lm, lc) = match divisor.leading_term() {
            Some((m, c)) => (m.clone(), c),
            None => return Err(Error::InvalidArgument("division by zero".into())),
        };
        let inv = self.field.inv(lc).expect("nonzero");
        let mut rem = self.clone();
        let mut quot = Series::zero(&self.field, self.nvars);
        while let Some((m, c)) = rem.leading_term() {
            if !lm.divides(m) {
                return Ok(None);
            }
            let qm = lm.quotient_of(m);
            let qc = self.field.mul(c, inv);
            let t = Series::monomial(&self.field, qm, qc);
            rem = &rem - &(&t * divisor);
            quot = &quot + &t;
        }
        Ok(Some(quot))
    }

    pub fn divides(&self, other: &Series) -> Result<bool> {
        Ok(other.exact_div(self)?.is_some())
    }

    fn has_var(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.0[v] > 0)
    }

    fn deg_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    /// Coefficients with respect to variable v, keyed by its exponent.
    fn coeffs_in(&self, v: usize) -> BTreeMap<u32, Series> {
        let mut out: BTreeMap<u32, Series> = BTreeMap::new();
        for (m, &c) in &self.terms {
            let e = m.0[v];
            let mut rest = m.0.clone();
            rest[v] = 0;
            out.entry(e)
                .or_insert_with(|| Series::zero(&self.field, self.nvars))
                .add_term(Monomial(rest), c);
        }
        out
    }

    fn lc_in(&self, v: usize) -> Series {
        let d = self.deg_in(v);
        self.coeffs_in(v).remove(&d).unwrap_or_else(|| Series::zero(&self.field, self.nvars))
    }
}

fn content_in(f: &Series, v: usize) -> Series {
    let mut g = Series::zero(f.field(), f.nvars());
    for c in f.coeffs_in(v).values() {
        g = gcd2(&g, c);
        if g.is_constant() && !g.is_zero() {
            break;
        }
    }
    g
}

fn primitive_part(f: &Series, v: usize) -> Series {
    let c = content_in(f, v);
    f.exact_div(&c).expect("exact").expect("content divides")
}

/// Pseudo-remainder of a by b with respect to variable v.
fn prem(a: &Series, b: &Series, v: usize) -> Series {
    let n = b.deg_in(v);
    let lcb = b.lc_in(v);
    let mut r = a.clone();
    while !r.is_zero() && r.deg_in(v) >= n && (r.has_var(v) || n == 0) {
        let d = r.deg_in(v);
        let lcr = r.lc_in(v);
        r = &(&lcb * &r) - &(&lcr.mul_var_power(v, d - n) * b);
        if n == 0 {
            break;
        }
    }
    r
}

fn gcd2(a: &Series, b: &Series) -> Series {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Series::one(a.field(), a.nvars());
    }
    let v = match (0..a.nvars()).rev().find(|&i| a.has_var(i) || b.has_var(i)) {
        Some(v) => v,
        None => return Series::one(a.field(), a.nvars()),
    };
    if !a.has_var(v) {
        return gcd2(a, &content_in(b, v));
    }
    if !b.has_var(v) {
        return gcd2(&content_in(a, v), b);
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd2(&ca, &cb);
    let mut x = a.exact_div(&ca).expect("exact").expect("content divides");
    let mut y = b.exact_div(&cb).expect("exact").expect("content divides");
    if x.deg_in(v) < y.deg_in(v) {
        std::mem::swap(&mut x, &mut y);
    }
    loop {
        let r = prem(&x, &y, v);
        if r.is_zero() {
            break;
        }
        if !r.has_var(v) {
            // Nonzero remainder free of v: the primitive gcd is 1.
            return c.monic();
        }
        x = y;
        y = primitive_part(&r, v);
    }
    (&c * &primitive_part(&y, v)).monic()
}

/// Gcd of exact polynomials, normalized to leading coefficient 1.
pub fn content_gcd(items: &[Series]) -> Result<Series> {
    let first = items.first().ok_or(Error::AllZero)?;
    for s in items {
        first.check_compatible(s)?;
        if !s.is_exact() {
            return Err(Error::InvalidArgument("gcd needs exact polynomials".into()));
        }
    }
    if items.iter().all(Series::is_zero) {
        return Err(Error::AllZero);
    }
    let mut g = Series::zero(first.field(), first.nvars());
    for s in items {
        g = gcd2(&g, s);
    }
    Ok(g)
}
