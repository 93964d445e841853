//! Kernel of a derivation on bounded-degree polynomials, algebra generators and relations.

use std::collections::{BTreeMap, BTreeSet};

use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::field::FieldRef;
use crate::linalg::{Matrix, SpanBasis};
use crate::series::{Monomial, Precision, Series};

/// Pivot convention of an echelonized kernel basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Echelon {
    /// Each element is monic in its highest monomial, and no other element contains that monomial.
    Leading,
    /// Same, for the lowest monomial; this exposes the initial forms of invariants of each order.
    Initial,
}

/// Exponent vectors of total degree <= n, ascending in graded-lex.
pub fn monomials_up_to(nvars: usize, n: u64) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(i: usize, left: u64, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i + 1 == cur.len() {
            for e in 0..=left {
                cur[i] = e as u32;
                out.push(Monomial::new(cur.clone()));
            }
            cur[i] = 0;
            return;
        }
        for e in 0..=left {
            cur[i] = e as u32;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    if nvars == 0 {
        return out;
    }
    rec(0, n, &mut cur, &mut out);
    out.sort();
    out
}

fn require_exact(delta: &Derivation) -> Result<()> {
    if !delta.is_exact() {
        return Err(Error::InvalidArgument("invariant computations need exact coefficients".into()));
    }
    Ok(())
}

/// Basis of `{f : deg f <= n, d(f) = 0}` in the requested echelon form, sorted by pivot ascending.
pub fn kernel_basis(delta: &Derivation, n: u64, echelon: Echelon) -> Result<Vec<Series>> {
    require_exact(delta)?;
    let field = delta.field().clone();
    let nv = delta.nvars();
    let mut cols = monomials_up_to(nv, n);
    if echelon == Echelon::Initial {
        cols.reverse();
    }
    let images = cols
        .iter()
        .map(|m| delta.apply(&Series::monomial(&field, m.clone(), 1)))
        .collect::<Result<Vec<_>>>()?;
    let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
    for img in &images {
        for (m, _) in img.terms() {
            let next = rows.len();
            rows.entry(m.clone()).or_insert(next);
        }
    }
    let mut mat = Matrix::zeros(rows.len(), cols.len());
    for (c, img) in images.iter().enumerate() {
        for (m, v) in img.terms() {
            mat.set(rows[m], c, v);
        }
    }
    let mut basis: Vec<Series> = mat
        .nullspace(&field)
        .into_iter()
        .map(|v| {
            let terms = cols.iter().zip(&v).filter(|(_, &c)| c != 0).map(|(m, &c)| (m.exps().to_vec(), c));
            Series::from_terms(&field, nv, terms, Precision::Exact)
        })
        .collect();
    if echelon == Echelon::Initial {
        basis.reverse();
    }
    Ok(basis)
}

/// Kernel of `f -> d(f)` on polynomials of total degree <= n, echelonized by leading monomial.
pub fn invariant_basis(delta: &Derivation, n: u64) -> Result<Vec<Series>> {
    kernel_basis(delta, n, Echelon::Leading)
}

fn coordinate_power(field: &FieldRef, nvars: usize, i: usize, e: u32) -> Series {
    let mut exps = vec![0u32; nvars];
    exps[i] = e;
    Series::monomial(field, Monomial::new(exps), 1)
}

/// Greedy minimal algebra generators of the bounded-degree kernel.
///
/// Kernel elements are visited by increasing degree (coordinate p-th powers first within a degree)
/// and kept only when they are not polynomials, of degree <= n, in the generators already kept.
/// Coordinate p-th powers that are kept are listed first.
pub fn invariant_generators(delta: &Derivation, n: u64) -> Result<Vec<Series>> {
    let field = delta.field().clone();
    let p = field.p();
    let nv = delta.nvars();
    if n < p as u64 {
        return Err(Error::InsufficientPrecision(format!(
            "degree bound {n} is below p = {p}; generator minimality cannot be certified"
        )));
    }
    let powers: Vec<Series> = (0..nv).map(|i| coordinate_power(&field, nv, i, p)).collect();
    let basis = invariant_basis(delta, n)?;
    let mut candidates: Vec<(u64, usize, Series)> = basis
        .into_iter()
        .filter(|s| !s.is_constant())
        .map(|s| {
            let d = s.degree().expect("nonzero");
            let rank = if powers.contains(&s) { 0 } else { 1 };
            (d, rank, s)
        })
        .collect();
    // Stable: within a degree, coordinate powers first, then ascending leading monomial.
    candidates.sort_by_key(|a| (a.0, a.1));

    let mut span = SpanBasis::new();
    let one = Series::one(&field, nv);
    span.insert(&one);
    let mut products: Vec<(Series, u64)> = vec![(one, 0)];
    let mut gens: Vec<Series> = Vec::new();
    for (d, _, cand) in candidates {
        let r = span.reduce(&cand);
        if r.is_zero() {
            continue;
        }
        let g = r.monic();
        let gd = g.degree().expect("nonzero");
        debug_assert!(gd <= d);
        let mut fresh = Vec::new();
        for (prod, pd) in &products {
            let mut acc = prod.clone();
            let mut deg = *pd;
            while deg + gd <= n {
                acc = &acc * &g;
                deg += gd;
                fresh.push((acc.clone(), deg));
            }
        }
        for (s, _) in &fresh {
            span.insert(s);
        }
        products.extend(fresh);
        gens.push(g);
    }
    for g in &gens {
        if !delta.apply(g)?.is_zero() {
            return Err(Error::InternalConsistency(format!("generator {g} is not invariant")));
        }
    }
    let (mut first, rest): (Vec<Series>, Vec<Series>) = gens.into_iter().partition(|g| powers.contains(g));
    first.sort_by_key(|g| powers.iter().position(|q| q == g));
    first.extend(rest);
    Ok(first)
}

/// Symbol names for a generator list: `U, V` for the coordinate p-th powers, then `T` or `T1, T2, ...`.
pub fn generator_names(gens: &[Series]) -> Vec<String> {
    let Some(first) = gens.first() else { return Vec::new() };
    let field = first.field().clone();
    let nv = first.nvars();
    let p = field.p();
    let standard = nv == 2
        && gens.len() >= 2
        && gens[0] == coordinate_power(&field, nv, 0, p)
        && gens[1] == coordinate_power(&field, nv, 1, p);
    if !standard {
        return (1..=gens.len()).map(|i| format!("G{i}")).collect();
    }
    let mut names = vec!["U".to_string(), "V".to_string()];
    match gens.len() {
        2 => {}
        3 => names.push("T".into()),
        k => names.extend((1..=k - 2).map(|i| format!("T{i}"))),
    }
    names
}

fn top_weight(m: &Monomial, w: &[u64]) -> u64 {
    m.weighted_degree(w)
}

fn relation_weight(r: &Series, w: &[u64]) -> u64 {
    r.terms().map(|(m, _)| top_weight(m, w)).max().unwrap_or(0)
}

/// Minimal generators, up to weight `bound`, of the ideal of polynomial relations among `gens`.
///
/// Symbol `i` has weight `deg gens[i]`; a relation's weight is that of its heaviest monomial.
/// Relations are found by exact linear algebra on the evaluated monomials and hold to the
/// precision of the generators.
pub fn find_relations(gens: &[Series], bound: u64) -> Result<Vec<Series>> {
    relations_impl(gens, bound, false)
}

/// The relation of least weight among `gens`, for hypersurface presentations.
pub fn find_relation(gens: &[Series], bound: u64) -> Result<Series> {
    relations_impl(gens, bound, true)?.into_iter().next().ok_or(Error::NoRelationFound(bound))
}

fn relations_impl(gens: &[Series], bound: u64, first_only: bool) -> Result<Vec<Series>> {
    let first = gens.first().ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
    let field = first.field().clone();
    let k = gens.len();
    let mut w = Vec::with_capacity(k);
    for g in gens {
        match g.degree() {
            Some(d) if d > 0 => w.push(d),
            _ => return Err(Error::InvalidArgument(format!("generator {g} is constant"))),
        }
    }
    // Exponent vectors by weight, each evaluated once.
    let mut exps: Vec<Vec<u32>> = vec![vec![0; k]];
    let mut frontier = vec![vec![0u32; k]];
    let mut seen: BTreeSet<Vec<u32>> = frontier.iter().cloned().collect();
    while let Some(e) = frontier.pop() {
        let we: u64 = e.iter().zip(&w).map(|(&a, &b)| a as u64 * b).sum();
        for i in 0..k {
            if we + w[i] <= bound {
                let mut f = e.clone();
                f[i] += 1;
                if seen.insert(f.clone()) {
                    exps.push(f.clone());
                    frontier.push(f);
                }
            }
        }
    }
    let weight_of = |e: &[u32]| -> u64 { e.iter().zip(&w).map(|(&a, &b)| a as u64 * b).sum() };
    exps.sort_by(|a, b| {
        weight_of(a).cmp(&weight_of(b)).then_with(|| Monomial::new(a.clone()).cmp(&Monomial::new(b.clone())))
    });
    let mut values: BTreeMap<Vec<u32>, Series> = BTreeMap::new();
    values.insert(vec![0; k], Series::one(&field, first.nvars()));
    for e in &exps {
        if values.contains_key(e) {
            continue;
        }
        let j = e.iter().rposition(|&a| a > 0).expect("nonzero exponent");
        let mut prev = e.clone();
        prev[j] -= 1;
        let v = values[&prev].try_mul(&gens[j])?;
        values.insert(e.clone(), v);
    }
    let prec = values.values().map(|v| v.precision().bound()).min().unwrap_or(u64::MAX);
    let weights: BTreeSet<u64> = exps.iter().map(|e| weight_of(e)).collect();

    let mut relations: Vec<Series> = Vec::new();
    let mut ideal = SpanBasis::new();
    let mut multiplied: BTreeSet<(usize, Vec<u32>)> = BTreeSet::new();
    for &wt in &weights {
        let cols: Vec<&Vec<u32>> = exps.iter().filter(|e| weight_of(e) <= wt).collect();
        let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
        for e in &cols {
            for (m, _) in values[*e].terms() {
                if m.degree() < prec {
                    let next = rows.len();
                    rows.entry(m.clone()).or_insert(next);
                }
            }
        }
        let mut mat = Matrix::zeros(rows.len(), cols.len());
        for (c, e) in cols.iter().enumerate() {
            for (m, v) in values[*e].terms() {
                if let Some(&r) = rows.get(m) {
                    mat.set(r, c, v);
                }
            }
        }
        let null = mat.nullspace(&field);
        if null.is_empty() {
            continue;
        }
        for (ri, rel) in relations.iter().enumerate() {
            let rw = relation_weight(rel, &w);
            for e in &cols {
                if rw + weight_of(e) <= wt && multiplied.insert((ri, (*e).clone())) {
                    ideal.insert(&(rel * &Series::monomial(&field, Monomial::new((*e).clone()), 1)));
                }
            }
        }
        for v in null {
            let terms = cols.iter().zip(&v).filter(|(_, &c)| c != 0).map(|(e, &c)| ((*e).clone(), c));
            let r = Series::from_terms(&field, k, terms, Precision::Exact);
            let red = ideal.reduce(&r);
            if red.is_zero() {
                continue;
            }
            let red = red.monic();
            ideal.insert(&red);
            multiplied.insert((relations.len(), vec![0; k]));
            relations.push(red);
            if first_only {
                return Ok(relations);
            }
        }
    }
    Ok(relations)
}

/// Evaluates a relation at the generators.
pub fn evaluate_relation(rel: &Series, gens: &[Series]) -> Result<Series> {
    rel.substitute(gens)
}

/// Text of a relation in generator symbols: terms with higher powers of the last symbol first,
/// then by descending total degree and graded-lex.
pub fn render_relation(r: &Series, names: &[String]) -> String {
    let mut terms: Vec<(&Monomial, u32)> = r.terms().collect();
    terms.sort_by(|(a, _), (b, _)| {
        let (ea, eb) = (a.exps(), b.exps());
        let key = |e: &[u32]| e.last().copied().unwrap_or(0);
        key(eb).cmp(&key(ea)).then_with(|| b.cmp(a))
    });
    let mut parts: Vec<String> = terms
        .into_iter()
        .map(|(m, c)| Series::monomial(r.field(), m.clone(), c).render_with(names))
        .collect();
    if parts.is_empty() {
        parts.push("0".into());
    }
    if let Precision::Truncated(n) = r.precision() {
        parts.push(format!("O({n})"));
    }
    parts.join(" + ")
}
