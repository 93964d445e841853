//! Invariant rings of p-closed derivations in two variables and their singularity types.

pub mod e8;
pub mod invariants;
pub mod p3;
pub mod toric;

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::derivation::{Derivation, PClosedness};
use crate::error::{Error, Result};
use crate::field::{poly1, FieldRef};
use crate::series::{Precision, Series};

pub use e8::{e8_pipeline, E8Pipeline};
pub use invariants::{
    find_relation, find_relations, generator_names, invariant_basis, invariant_generators, render_relation,
};
pub use p3::{p3_decompose, P3Case, P3Decomposition};
pub use toric::{blowup_image_discrepancy, hj_continued_fraction, hj_discrepancies, normalize_lambda};

/// The symbols `U, V, T, ...` as variables of a `k`-variable ring.
pub fn generator_symbol_ring(field: &FieldRef, k: usize) -> Vec<Series> {
    (0..k).map(|i| Series::var(field, k, i)).collect()
}

/// Rewrites a series in `x^p, y^p` as a series in the first two of `k` symbols.
///
/// `x^(p i) y^(p j)` maps to `U^i V^j` with the same coefficient.
pub fn from_frobenius_base(s: &Series, p: u32, k: usize) -> Result<Series> {
    let mut terms = Vec::with_capacity(s.num_terms());
    for (m, c) in s.terms() {
        let e = m.exps();
        if e.iter().any(|&a| a % p != 0) {
            return Err(Error::ExponentNotDivisible(s.render()));
        }
        let mut out = vec![0u32; k];
        for (i, &a) in e.iter().enumerate() {
            out[i] = a / p;
        }
        terms.push((out, c));
    }
    let prec = match s.precision() {
        Precision::Exact => Precision::Exact,
        Precision::Truncated(n) => Precision::Truncated(n.div_ceil(p)),
    };
    Ok(Series::from_terms(s.field(), k, terms, prec))
}

/// Singularity type of the quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SingularityType {
    Smooth,
    Toric { p: u32, lambda: u32 },
    RdpA(u32),
    RdpD0(u32),
    RdpE0(u32),
    /// Hypersurface whose relation matches none of the known normal forms.
    UnrecognizedHypersurface(String),
    /// No classifying pipeline applies; the reason is recorded.
    Unclassified(String),
}

impl SingularityType {
    pub fn kind(&self) -> &'static str {
        match self {
            SingularityType::Smooth => "Smooth",
            SingularityType::Toric { .. } => "Toric",
            SingularityType::RdpA(_) => "RDP_A",
            SingularityType::RdpD0(_) => "RDP_D0",
            SingularityType::RdpE0(_) => "RDP_E0",
            SingularityType::UnrecognizedHypersurface(_) => "UnrecognizedHypersurface",
            SingularityType::Unclassified(_) => "Unclassified",
        }
    }

    pub fn params(&self) -> Value {
        match self {
            SingularityType::Smooth => json!({}),
            SingularityType::Toric { p, lambda } => json!({ "p": p, "lambda": lambda }),
            SingularityType::RdpA(n) | SingularityType::RdpD0(n) | SingularityType::RdpE0(n) => json!({ "n": n }),
            SingularityType::UnrecognizedHypersurface(r) => json!({ "relation": r }),
            SingularityType::Unclassified(why) => json!({ "reason": why }),
        }
    }

    /// Types the classification lists as klt: smooth, toric and rational double points.
    pub fn is_klt_type(&self) -> bool {
        !matches!(self, SingularityType::UnrecognizedHypersurface(_) | SingularityType::Unclassified(_))
    }

    /// Short human-readable label, e.g. `RDP_E0(8)` or `Toric 1/3(1,1)`.
    pub fn label(&self) -> String {
        match self {
            SingularityType::Smooth => "Smooth".into(),
            SingularityType::Toric { p, lambda } => format!("Toric 1/{p}(1,{lambda})"),
            SingularityType::RdpA(n) => format!("RDP_A({n})"),
            SingularityType::RdpD0(n) => format!("RDP_D0({n})"),
            SingularityType::RdpE0(n) => format!("RDP_E0({n})"),
            SingularityType::UnrecognizedHypersurface(r) => format!("UnrecognizedHypersurface({r})"),
            SingularityType::Unclassified(_) => "Unclassified".into(),
        }
    }
}

/// Generators, relations and type of the invariant ring.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientPresentation {
    pub p: u32,
    pub precision: u64,
    pub generators: Vec<Series>,
    pub generator_names: Vec<String>,
    /// Relations in the generator symbols, each a series in `generators.len()` variables.
    pub relations: Vec<Series>,
    pub sing_type: SingularityType,
    pub normal_form: Option<String>,
    pub notes: Vec<String>,
    /// Intermediate data of the classifying pipeline.
    pub pipeline: Option<Value>,
}

impl QuotientPresentation {
    fn new(p: u32, n: u64, generators: Vec<Series>, relations: Vec<Series>, sing_type: SingularityType) -> Self {
        let generator_names = generator_names(&generators);
        QuotientPresentation {
            p,
            precision: n,
            generators,
            generator_names,
            relations,
            sing_type,
            normal_form: None,
            notes: Vec::new(),
            pipeline: None,
        }
    }

    /// The defining relation of a hypersurface presentation.
    pub fn relation(&self) -> Option<&Series> {
        match self.relations.as_slice() {
            [r] => Some(r),
            _ => None,
        }
    }

    pub fn render_relation(&self, r: &Series) -> String {
        render_relation(r, &self.generator_names)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "p": self.p,
            "N": self.precision,
            "generators": self.generators.iter().map(Series::render).collect::<Vec<_>>(),
            "generator_names": self.generator_names,
            "relation": self.relation().map(|r| self.render_relation(r)),
            "relations": self.relations.iter().map(|r| self.render_relation(r)).collect::<Vec<_>>(),
            "type": { "kind": self.sing_type.kind(), "params": self.sing_type.params() },
            "normal_form": self.normal_form,
            "notes": self.notes,
        });
        if let Some(p) = &self.pipeline {
            v["pipeline"] = p.clone();
        }
        v
    }
}

/// Exponent support of a relation.
fn support(r: &Series) -> BTreeSet<Vec<u32>> {
    r.terms().map(|(m, _)| m.exps().to_vec()).collect()
}

/// Support built from `(a, b, t)` triples, also returned with `a` and `b` swapped.
fn both_orders(terms: &[[u32; 3]]) -> [BTreeSet<Vec<u32>>; 2] {
    let direct = terms.iter().map(|t| t.to_vec()).collect();
    let swapped = terms.iter().map(|t| vec![t[1], t[0], t[2]]).collect();
    [direct, swapped]
}

fn matches_support(sup: &BTreeSet<Vec<u32>>, terms: &[[u32; 3]]) -> bool {
    both_orders(terms).iter().any(|s| s == sup)
}

/// Matches the characteristic-2 normal forms by exact support.
fn match_p2(rel: &Series) -> Option<(SingularityType, String)> {
    let sup = support(rel);
    if matches_support(&sup, &[[0, 0, 2], [1, 1, 0]]) {
        return Some((SingularityType::RdpA(1), "Z^2 + X*Y".into()));
    }
    if matches_support(&sup, &[[0, 0, 2], [3, 0, 0], [1, 3, 0]]) {
        return Some((SingularityType::RdpE0(7), "Z^2 + X^3 + X*Y^3".into()));
    }
    if matches_support(&sup, &[[0, 0, 2], [3, 0, 0], [0, 5, 0]]) {
        return Some((SingularityType::RdpE0(8), "Z^2 + X^3 + Y^5".into()));
    }
    if squarefree_binary_cubic_plus_square(rel) {
        // A reduced cubic form splits over the algebraic closure into three distinct lines,
        // which a linear change of U, V moves to U^2 V + U V^2.
        return Some((SingularityType::RdpD0(4), "Z^2 + X^2*Y + X*Y^2".into()));
    }
    let m_max = sup.iter().flat_map(|e| e.iter().copied()).max().unwrap_or(0);
    for m in 2..=m_max {
        if matches_support(&sup, &[[0, 0, 2], [2, 1, 0], [1, m, 0]]) {
            return Some((SingularityType::RdpD0(2 * m), format!("Z^2 + X^2*Y + X*Y^{m}")));
        }
    }
    None
}

/// `c T^2 + f(U, V)` with `f` a binary cubic form without repeated factors.
fn squarefree_binary_cubic_plus_square(rel: &Series) -> bool {
    let f = rel.field();
    let mut cubic = [0u32; 4];
    for (m, c) in rel.terms() {
        match m.exps() {
            [0, 0, 2] => {}
            &[a, b, 0] if a + b == 3 => cubic[a as usize] = c,
            _ => return false,
        }
    }
    if rel.coeff(&[0, 0, 2]) == 0 || !rel.is_exact() {
        return false;
    }
    // Dehomogenize at V = 1: f(U, 1) has degree 3, or degree 2 when V divides the form once.
    let g = poly1::trim(cubic.to_vec());
    match poly1::degree(&g) {
        Some(d) if d >= 2 => {
            let dg = poly1::derivative(f, &g);
            poly1::degree(&poly1::gcd(f, &g, &dg)) == Some(0)
        }
        _ => false,
    }
}

/// Matches the characteristic-3 normal forms by exact support.
fn match_p3(rel: &Series) -> Option<(SingularityType, String)> {
    let sup = support(rel);
    if matches_support(&sup, &[[0, 0, 3], [1, 1, 0]]) {
        return Some((SingularityType::RdpA(2), "Z^3 + X*Y".into()));
    }
    if matches_support(&sup, &[[0, 0, 3], [2, 0, 0], [0, 4, 0]]) {
        return Some((SingularityType::RdpE0(6), "Z^2 + X^3 + Y^4".into()));
    }
    if matches_support(&sup, &[[0, 0, 3], [2, 0, 0], [0, 5, 0]]) {
        return Some((SingularityType::RdpE0(8), "Z^2 + X^3 + Y^5".into()));
    }
    if matches_support(&sup, &[[0, 0, 3], [0, 2, 0], [3, 0, 1]]) {
        return Some((SingularityType::RdpE0(7), "Z^2 + X^3 + X*Y^3".into()));
    }
    None
}

/// In characteristic 2, with no `T`-linear term, absorbs square monomials `c U^2i V^2j` into `T`.
///
/// Returns the new relation and the correction added to the third generator.
fn absorb_squares(rel: &Series, field: &FieldRef) -> Option<(Series, Series)> {
    let t2 = rel.coeff(&[0, 0, 2]);
    if t2 == 0 || rel.terms().any(|(m, _)| m.exps()[2] == 1) {
        return None;
    }
    let rel = rel.scale(field.inv(t2).expect("nonzero"));
    let mut shift_uv = Vec::new();
    let mut cancel = Vec::new();
    for (m, c) in rel.terms() {
        let e = m.exps();
        if e[2] == 0 && e[0] % 2 == 0 && e[1] % 2 == 0 {
            let s = field.frobenius_inv(c);
            shift_uv.push((vec![e[0], e[1]], s));
            cancel.push((e.to_vec(), c));
        }
    }
    if cancel.is_empty() {
        return None;
    }
    // T -> T + sum s U^(i/2) V^(j/2) adds sum s^2 U^i V^j = sum c U^i V^j in characteristic 2.
    let removed = Series::from_terms(field, 3, cancel, Precision::Exact);
    let new_rel = &rel - &removed;
    let correction = Series::from_terms(field, 2, shift_uv, Precision::Exact);
    Some((new_rel, correction))
}

fn max_degree(gens: &[Series]) -> u64 {
    gens.iter().filter_map(Series::degree).max().unwrap_or(0)
}

/// Generators and, for three generators, the hypersurface relation, without a type.
fn generic_presentation(delta: &Derivation, n: u64, sing_type: SingularityType) -> Result<QuotientPresentation> {
    let p = delta.field().p();
    let gens = invariant_generators(delta, n)?;
    let mut notes = Vec::new();
    let relations = if gens.len() == 3 {
        match find_relation(&gens, p as u64 * max_degree(&gens)) {
            Ok(r) => vec![r],
            Err(Error::NoRelationFound(b)) => {
                notes.push(format!("no relation among the generators up to weight {b}"));
                Vec::new()
            }
            Err(e) => return Err(e),
        }
    } else {
        find_relations(&gens, 2 * max_degree(&gens))?
    };
    let mut q = QuotientPresentation::new(p, n, gens, relations, sing_type);
    q.notes = notes;
    Ok(q)
}

/// Eigenvalue ratio of a semisimple linear part, from `tr^2 / det = lambda + 1/lambda + 2`.
fn eigenvalue_ratio(delta: &Derivation) -> Result<Option<u32>> {
    let f = delta.field().clone();
    let m = delta.linear_part()?.matrix;
    let tr = f.add(m[0][0], m[1][1]);
    let det = f.sub(f.mul(m[0][0], m[1][1]), f.mul(m[0][1], m[1][0]));
    let Some(dinv) = f.inv(det) else { return Ok(None) };
    let q = f.mul(f.mul(tr, tr), dinv);
    let p = f.p();
    for l in 1..p {
        let le = f.from_int(l as i64);
        let linv = f.inv(le).expect("nonzero");
        if f.add(f.add(le, linv), f.from_int(2)) == q {
            return Ok(Some(normalize_lambda(p, l)?));
        }
    }
    Ok(None)
}

fn classify_multiplicative(delta: &Derivation, n: u64) -> Result<QuotientPresentation> {
    let p = delta.field().p();
    let Some(lambda) = eigenvalue_ratio(delta)? else {
        let mut q = generic_presentation(delta, n, SingularityType::Smooth)?;
        q.notes.push("linear part has a zero eigenvalue: the quotient is smooth".into());
        return Ok(q);
    };
    let gens = invariant_generators(delta, n)?;
    let relations = find_relations(&gens, 2 * max_degree(&gens))?;
    let (ty, nf) = if lambda == p - 1 {
        (SingularityType::RdpA(p - 1), Some(format!("X*Y + Z^{p}")))
    } else {
        (SingularityType::Toric { p, lambda }, None)
    };
    let mut q = QuotientPresentation::new(p, n, gens, relations, ty);
    q.normal_form = nf;
    q.notes.push(format!("eigenvalue ratio {lambda} of the linear part"));
    Ok(q)
}

fn classify_p2(delta: &Derivation, n: u64) -> Result<QuotientPresentation> {
    let field = delta.field().clone();
    let mut gens = invariant_generators(delta, n)?;
    if gens.len() != 3 {
        let why = format!("{} generators; not a hypersurface", gens.len());
        return generic_presentation(delta, n, SingularityType::Unclassified(why));
    }
    let mut rel = find_relation(&gens, 2 * max_degree(&gens))?;
    let mut notes = Vec::new();
    if let Some((r, corr)) = absorb_squares(&rel, &field) {
        let corr_xy = corr.substitute(&[gens[0].clone(), gens[1].clone()])?;
        gens[2] = &gens[2] + &corr_xy;
        notes.push(format!("T replaced by T + {} to remove square terms", corr.render_with(&["U".into(), "V".into()])));
        rel = r;
    }
    Ok(finish_hypersurface(2, n, gens, rel, notes, match_p2))
}

fn finish_hypersurface(
    p: u32,
    n: u64,
    gens: Vec<Series>,
    rel: Series,
    notes: Vec<String>,
    matcher: fn(&Series) -> Option<(SingularityType, String)>,
) -> QuotientPresentation {
    let names = generator_names(&gens);
    let (ty, nf) = match matcher(&rel) {
        Some((t, nf)) => (t, Some(nf)),
        None => (SingularityType::UnrecognizedHypersurface(render_relation(&rel, &names)), None),
    };
    let mut q = QuotientPresentation::new(p, n, gens, vec![rel], ty);
    q.normal_form = nf;
    q.notes = notes;
    q
}

fn classify_p3(delta: &Derivation, n: u64) -> Result<QuotientPresentation> {
    let dec = match p3_decompose(delta, n) {
        Ok(d) => d,
        Err(Error::BasisConditionsUnattainable(why)) => {
            return generic_presentation(delta, n, SingularityType::Unclassified(format!("basis conditions unattainable: {why}")));
        }
        Err(e) => return Err(e),
    };
    let mut q = match dec.case {
        P3Case::UnitCase => {
            let (gens, rel) = dec.hypersurface()?;
            finish_hypersurface(3, n, gens, rel, Vec::new(), match_p3)
        }
        P3Case::ParameterCase => {
            let (gens, rels) = dec.minor_presentation()?;
            let ty = if dec.determinant != 0 {
                SingularityType::Toric { p: 3, lambda: 1 }
            } else {
                SingularityType::Unclassified("parameter case with degenerate linear parts; not 2/3-klt".into())
            };
            QuotientPresentation::new(3, n, gens, rels, ty)
        }
    };
    q.pipeline = Some(dec.to_json());
    Ok(q)
}

fn classify_p5(delta: &Derivation, n: u64) -> Result<QuotientPresentation> {
    if delta.order()? >= 2 {
        return generic_presentation(
            delta,
            n,
            SingularityType::Unclassified("order at least 2; the foliation is not 2/3-klt".into()),
        );
    }
    match e8_pipeline(delta, n) {
        Ok(e) => {
            let mut q = QuotientPresentation::new(5, n, e.generators.clone(), vec![e.relation.clone()], SingularityType::RdpE0(8));
            q.generator_names = vec!["U".into(), "V".into(), "T".into()];
            q.normal_form = Some("X^2 + Y^3 + Z^5".into());
            q.pipeline = Some(e.to_json());
            Ok(q)
        }
        Err(Error::NotInNormalFormReach(why)) => generic_presentation(delta, n, SingularityType::Unclassified(why)),
        Err(e) => Err(e),
    }
}

/// Classifies the quotient by the saturation of `delta`, working with polynomials of degree <= n.
pub fn classify(delta: &Derivation, n: u64) -> Result<QuotientPresentation> {
    let p = delta.field().p();
    if !matches!(p, 2 | 3 | 5) {
        return Err(Error::UnsupportedCharacteristic(p));
    }
    if delta.nvars() != 2 {
        return Err(Error::InvalidArgument("quotients are classified in two variables only".into()));
    }
    if !delta.is_exact() {
        return Err(Error::InvalidArgument("classification needs exact coefficients".into()));
    }
    let (d, content) = delta.saturate()?;
    let mut q = if d.order()? == 0 {
        generic_presentation(&d, n, SingularityType::Smooth)?
    } else {
        match d.pclosedness(n.min(u32::MAX as u64) as u32)? {
            PClosedness::NotPClosed => return Err(Error::NotPClosed),
            PClosedness::Multiplicative(_) => classify_multiplicative(&d, n)?,
            PClosedness::Additive | PClosedness::PClosedNonUnit(_) => match p {
                2 => classify_p2(&d, n)?,
                3 => classify_p3(&d, n)?,
                _ => classify_p5(&d, n)?,
            },
        }
    };
    if !content.is_constant() {
        q.notes.insert(0, format!("saturated by dividing out {}", content.render()));
    }
    Ok(q)
}
