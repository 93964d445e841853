//! Sparse multivariate polynomials and total-degree truncated power series.

mod gcd;
mod roots;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Field, FieldRef};

pub use gcd::content_gcd;

/// Exponent vector. Ordered graded-lexicographically with x1 > x2 > ...
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn weighted_degree(&self, w: &[u64]) -> u64 {
        self.0.iter().zip(w).map(|(&e, &wi)| e as u64 * wi).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Precision {
    Exact,
    /// Every term of total degree >= N is unknown.
    Truncated(u32),
}

impl Precision {
    pub fn bound(self) -> u64 {
        match self {
            Precision::Exact => u64::MAX,
            Precision::Truncated(n) => n as u64,
        }
    }

    pub fn from_bound(b: u64) -> Precision {
        if b == u64::MAX {
            Precision::Exact
        } else {
            Precision::Truncated(b.min(u32::MAX as u64 - 1) as u32)
        }
    }
}

/// Positive integer weights per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSpec(pub Vec<u64>);

impl WeightSpec {
    pub fn standard(nvars: usize) -> Self {
        WeightSpec(vec![1; nvars])
    }
}

/// Exact sparse polynomial or truncated power series over F_{p^k}.
#[derive(Clone)]
pub struct Series {
    field: FieldRef,
    nvars: usize,
    terms: BTreeMap<Monomial, u32>,
    prec: Precision,
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field
            && self.nvars == other.nvars
            && self.prec == other.prec
            && self.terms == other.terms
    }
}

impl Eq for Series {}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series({})", self.render())
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Default variable names: x, y, z, w, then x5, x6, ...
pub fn default_var_names(nvars: usize) -> Vec<String> {
    let base = ["x", "y", "z", "w"];
    (0..nvars)
        .map(|i| {
            if nvars <= base.len() {
                base[i].to_string()
            } else {
                format!("x{}", i + 1)
            }
        })
        .collect()
}

impl Series {
    pub fn zero(field: &FieldRef, nvars: usize) -> Series {
        Series { field: field.clone(), nvars, terms: BTreeMap::new(), prec: Precision::Exact }
    }

    pub fn constant(field: &FieldRef, nvars: usize, c: u32) -> Series {
        Series::monomial(field, Monomial::one(nvars), c)
    }

    pub fn one(field: &FieldRef, nvars: usize) -> Series {
        Series::constant(field, nvars, 1)
    }

    pub fn var(field: &FieldRef, nvars: usize, i: usize) -> Series {
        Series::monomial(field, Monomial::var(nvars, i), 1)
    }

    pub fn monomial(field: &FieldRef, m: Monomial, c: u32) -> Series {
        let nvars = m.0.len();
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(m, c);
        }
        Series { field: field.clone(), nvars, terms, prec: Precision::Exact }
    }

    /// Builds a series from (exponents, coefficient) pairs, summing repeats.
    pub fn from_terms<I>(field: &FieldRef, nvars: usize, terms: I, prec: Precision) -> Series
    where
        I: IntoIterator<Item = (Vec<u32>, u32)>,
    {
        let mut s = Series { field: field.clone(), nvars, terms: BTreeMap::new(), prec };
        let bound = prec.bound();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            let m = Monomial(e);
            if m.degree() < bound {
                s.add_term(m, c);
            }
        }
        s
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec == Precision::Exact
    }

    /// No stored terms (for truncated series: zero up to the precision).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.is_zero() && self.is_exact()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> u32 {
        self.terms.get(&Monomial(exps.to_vec())).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> u32 {
        self.coeff(&vec![0; self.nvars])
    }

    /// Highest term under graded-lex.
    pub fn leading_term(&self) -> Option<(&Monomial, u32)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    /// Total degree of the highest stored term.
    pub fn degree(&self) -> Option<u64> {
        self.leading_term().map(|(m, _)| m.degree())
    }

    /// Order (lowest total degree) of the stored terms.
    pub fn order(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).min()
    }

    /// Lower bound for the true order: infinite for exact zero.
    pub fn order_lower_bound(&self) -> u64 {
        match self.order() {
            Some(o) => o,
            None => self.prec.bound(),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.constant_term() != 0
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// Indices of the variables that occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    fn add_term(&mut self, m: Monomial, c: u32) {
        if c == 0 {
            return;
        }
        let f = self.field.clone();
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Series) -> Result<()> {
        if *self.field != *other.field {
            return Err(Error::FieldMismatch);
        }
        if self.nvars != other.nvars {
            return Err(Error::VariableCountMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    /// Drops all terms of degree >= n and records the truncation.
    pub fn truncate(&self, n: u64) -> Series {
        let bound = n.min(self.prec.bound());
        if bound == u64::MAX {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() < bound)
            .map(|(m, &c)| (m.clone(), c))
            .collect();
        Series {
            field: self.field.clone(),
            nvars: self.nvars,
            terms,
            prec: Precision::from_bound(bound),
        }
    }

    /// Forgets truncation; only valid when the caller knows the stored terms are the whole series.
    pub fn assume_exact(&self) -> Series {
        Series { prec: Precision::Exact, ..self.clone() }
    }

    pub fn try_add(&self, other: &Series) -> Result<Series> {
        self.check_compatible(other)?;
        let bound = self.prec.bound().min(other.prec.bound());
        let mut out = self.truncate(bound);
        for (m, &c) in &other.terms {
            if m.degree() < bound {
                out.add_term(m.clone(), c);
            }
        }
        out.prec = Precision::from_bound(bound);
        Ok(out)
    }

    pub fn try_sub(&self, other: &Series) -> Result<Series> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Series {
        self.scale(self.field.neg(1))
    }

    pub fn scale(&self, c: u32) -> Series {
        if c == 0 {
            return Series::zero(&self.field, self.nvars);
        }
        let f = &self.field;
        let terms = self.terms.iter().map(|(m, &a)| (m.clone(), f.mul(a, c))).collect();
        Series { field: self.field.clone(), nvars: self.nvars, terms, prec: self.prec }
    }

    pub fn try_mul(&self, other: &Series) -> Result<Series> {
        self.mul_capped(other, u64::MAX)
    }

    /// Product, additionally truncated at total degree `cap`.
    pub fn mul_capped(&self, other: &Series, cap: u64) -> Result<Series> {
        self.check_compatible(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Series::zero(&self.field, self.nvars));
        }
        let va = self.order_lower_bound();
        let vb = other.order_lower_bound();
        let bound = self
            .prec
            .bound()
            .saturating_add(vb)
            .min(other.prec.bound().saturating_add(va))
            .min(cap);
        let f = &self.field;
        let mut acc: std::collections::HashMap<Monomial, u32> = std::collections::HashMap::new();
        for (ma, &ca) in &self.terms {
            let da = ma.degree();
            if da >= bound {
                continue;
            }
            for (mb, &cb) in &other.terms {
                if da + mb.degree() >= bound {
                    continue;
                }
                let m = ma.mul(mb);
                let e = acc.entry(m).or_insert(0);
                *e = f.add(*e, f.mul(ca, cb));
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        Ok(Series {
            field: self.field.clone(),
            nvars: self.nvars,
            terms,
            prec: Precision::from_bound(bound),
        })
    }

    pub fn pow(&self, e: u64) -> Series {
        self.pow_capped(e, u64::MAX)
    }

    pub fn pow_capped(&self, mut e: u64, cap: u64) -> Series {
        let mut result = Series::one(&self.field, self.nvars).truncate(cap);
        let mut base = self.truncate(cap);
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_capped(&base, cap).expect("compatible");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_capped(&base, cap).expect("compatible");
            }
        }
        result
    }

    /// Formal partial derivative in variable i.
    pub fn derivative(&self, i: usize) -> Series {
        let f = &self.field;
        let mut out = Series::zero(&self.field, self.nvars);
        for (m, &c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let coeff = f.mul_int(c, e as i64);
            if coeff == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, coeff);
        }
        out.prec = match self.prec {
            Precision::Exact => Precision::Exact,
            Precision::Truncated(n) => Precision::Truncated(n.saturating_sub(1)),
        };
        out
    }

    /// Minimum weighted degree of the series; `None` means infinity (exact zero).
    pub fn weighted_order(&self, w: &WeightSpec) -> Result<Option<u64>> {
        if w.0.len() != self.nvars || w.0.contains(&0) {
            return Err(Error::InvalidArgument("weights must be positive, one per variable".into()));
        }
        let stored = self.terms.keys().map(|m| m.weighted_degree(&w.0)).min();
        match self.prec {
            Precision::Exact => Ok(stored),
            Precision::Truncated(n) => {
                let unseen = n as u64 * w.0.iter().copied().min().unwrap_or(1);
                match stored {
                    Some(s) if s <= unseen => Ok(Some(s)),
                    _ => Err(Error::InsufficientPrecision(format!(
                        "weighted order not determined below {unseen} at truncation {n}"
                    ))),
                }
            }
        }
    }

    /// True if every term (including unseen ones) has weighted degree >= `bound`.
    pub fn weighted_order_at_least(&self, w: &WeightSpec, bound: u64) -> Result<bool> {
        let stored_ok = self.terms.keys().all(|m| m.weighted_degree(&w.0) >= bound);
        if !stored_ok {
            return Ok(false);
        }
        match self.prec {
            Precision::Exact => Ok(true),
            Precision::Truncated(n) => {
                if n as u64 * w.0.iter().copied().min().unwrap_or(1) >= bound {
                    Ok(true)
                } else {
                    Err(Error::InsufficientPrecision(format!(
                        "cannot certify weighted order {bound} at truncation {n}"
                    )))
                }
            }
        }
    }

    /// Composition f(images[0], ..., images[n-1]).
    pub fn substitute(&self, images: &[Series]) -> Result<Series> {
        if images.len() != self.nvars {
            return Err(Error::VariableCountMismatch { left: self.nvars, right: images.len() });
        }
        let target = match images.first() {
            Some(g) => g.nvars,
            None => 0,
        };
        for g in images {
            if *g.field != *self.field {
                return Err(Error::FieldMismatch);
            }
            if g.nvars != target {
                return Err(Error::VariableCountMismatch { left: target, right: g.nvars });
            }
        }
        let mut cap = u64::MAX;
        if let Precision::Truncated(n) = self.prec {
            if images.iter().any(|g| g.constant_term() != 0) {
                return Err(Error::InsufficientPrecision(
                    "substituting images with nonzero constant term into a truncated series".into(),
                ));
            }
            let min_val = images.iter().map(Series::order_lower_bound).min().unwrap_or(1).max(1);
            cap = (n as u64).saturating_mul(min_val);
        }
        let mut powers: Vec<Vec<Series>> =
            images.iter().map(|g| vec![Series::one(&g.field, target).truncate(cap)]).collect();
        let mut out = Series::zero(&self.field, target).truncate(cap);
        for (m, &c) in &self.terms {
            let mut term = Series::constant(&self.field, target, c).truncate(cap);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul_capped(&images[i], cap)?;
                    powers[i].push(next);
                }
                term = term.mul_capped(&powers[i][e as usize], cap)?;
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    /// Translates the origin: f(x + c).
    pub fn translate(&self, shift: &[u32]) -> Result<Series> {
        if shift.iter().all(|&c| c == 0) {
            return Ok(self.clone());
        }
        if !self.is_exact() {
            return Err(Error::InsufficientPrecision("translating a truncated series".into()));
        }
        let images: Vec<Series> = (0..self.nvars)
            .map(|i| {
                Series::var(&self.field, self.nvars, i)
                    .try_add(&Series::constant(&self.field, self.nvars, shift[i]))
                    .expect("compatible")
            })
            .collect();
        self.substitute(&images)
    }

    /// Coefficient-wise Frobenius with the same exponents: f^(p).
    pub fn frobenius_twist(&self) -> Series {
        let f = &self.field;
        let terms = self.terms.iter().map(|(m, &c)| (m.clone(), f.frobenius(c))).collect();
        Series { field: self.field.clone(), nvars: self.nvars, terms, prec: self.prec }
    }

    /// Smallest exponent of variable i over the stored terms.
    pub fn var_valuation(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[i]).min()
    }

    /// Divides by x_i^m; every stored term must be divisible.
    pub fn div_var_power(&self, i: usize, m: u32) -> Result<Series> {
        if m == 0 {
            return Ok(self.clone());
        }
        if self.var_valuation(i).is_some_and(|v| v < m) {
            return Err(Error::NonPolynomialResult(format!("not divisible by x{}^{}", i + 1, m)));
        }
        let terms = self
            .terms
            .iter()
            .map(|(mon, &c)| {
                let mut e = mon.0.clone();
                e[i] -= m;
                (Monomial(e), c)
            })
            .collect();
        let prec = match self.prec {
            Precision::Exact => Precision::Exact,
            Precision::Truncated(n) => Precision::Truncated(n.saturating_sub(m)),
        };
        Ok(Series { field: self.field.clone(), nvars: self.nvars, terms, prec })
    }

    pub fn mul_var_power(&self, i: usize, m: u32) -> Series {
        let terms = self
            .terms
            .iter()
            .map(|(mon, &c)| {
                let mut e = mon.0.clone();
                e[i] += m;
                (Monomial(e), c)
            })
            .collect();
        let prec = match self.prec {
            Precision::Exact => Precision::Exact,
            Precision::Truncated(n) => Precision::Truncated(n + m),
        };
        Series { field: self.field.clone(), nvars: self.nvars, terms, prec }
    }

    /// Sets variable i to zero.
    pub fn restrict_zero(&self, i: usize) -> Series {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[i] == 0)
            .map(|(m, &c)| (m.clone(), c))
            .collect();
        Series { field: self.field.clone(), nvars: self.nvars, terms, prec: self.prec }
    }

    /// Dense univariate coefficients in variable i; other variables must be absent.
    pub fn to_univariate(&self, i: usize) -> Result<Vec<u32>> {
        let mut out = Vec::new();
        for (m, &c) in &self.terms {
            if m.0.iter().enumerate().any(|(j, &e)| j != i && e > 0) {
                return Err(Error::InvalidArgument("series depends on other variables".into()));
            }
            let e = m.0[i] as usize;
            if out.len() <= e {
                out.resize(e + 1, 0);
            }
            out[e] = c;
        }
        Ok(out)
    }

    /// Homogeneous component of total degree d.
    pub fn homogeneous_part(&self, d: u64) -> Series {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() == d)
            .map(|(m, &c)| (m.clone(), c))
            .collect();
        Series { field: self.field.clone(), nvars: self.nvars, terms, prec: Precision::Exact }
    }

    /// Scales so the leading (graded-lex highest) coefficient is 1.
    pub fn monic(&self) -> Series {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => self.scale(self.field.inv(c).expect("nonzero")),
        }
    }

    /// Scales so the lowest term under graded-lex is 1.
    pub fn monic_initial(&self) -> Series {
        match self.terms.iter().next() {
            None => self.clone(),
            Some((_, &c)) => self.scale(self.field.inv(c).expect("nonzero")),
        }
    }

    /// Re-embeds into `nvars` variables, variable i going to position `map[i]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Series {
        let terms = self
            .terms
            .iter()
            .map(|(m, &c)| {
                let mut e = vec![0; nvars];
                for (i, &x) in m.0.iter().enumerate() {
                    e[map[i]] += x;
                }
                (Monomial(e), c)
            })
            .collect();
        Series { field: self.field.clone(), nvars, terms, prec: self.prec }
    }

    pub fn render(&self) -> String {
        self.render_with(&default_var_names(self.nvars))
    }

    /// Canonical text: terms in descending graded-lex order.
    pub fn render_with(&self, names: &[String]) -> String {
        let f = &self.field;
        let mut parts: Vec<String> = Vec::new();
        for (m, &c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            let coeff = if factors.is_empty() {
                f.render(c)
            } else if c == 1 {
                String::new()
            } else if f.is_single_term(c) {
                f.render(c)
            } else {
                format!("({})", f.render(c))
            };
            let mut s = coeff;
            for fac in factors {
                if !s.is_empty() {
                    s.push('*');
                }
                s.push_str(&fac);
            }
            parts.push(s);
        }
        let mut out = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
        if let Precision::Truncated(n) = self.prec {
            out.push_str(&format!(" + O({n})"));
        }
        out
    }
}

impl std::ops::Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        self.try_add(rhs).expect("series operands must share field and variables")
    }
}

impl std::ops::Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        self.try_sub(rhs).expect("series operands must share field and variables")
    }
}

impl std::ops::Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        self.try_mul(rhs).expect("series operands must share field and variables")
    }
}

impl std::ops::Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series::neg(self)
    }
}

/// Shared field handle for tests and callers that build many series.
pub fn field(p: u32, k: u32) -> Result<FieldRef> {
    Ok(Arc::new(Field::new(p, k)?))
}

#[cfg(test)]
mod tests;
