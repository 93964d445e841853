//! Characteristic 3: the free basis `1, tau1, tau2` of the invariant ring over `k[[x^3, y^3]]`
//! and its factorization `tau1 = phi^2 psi`, `tau2 = phi psi^2`.

use serde_json::{json, Value};

use super::invariants::{kernel_basis, Echelon};
use super::{from_frobenius_base, generator_symbol_ring};
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::field::FieldRef;
use crate::linalg::{Matrix, SpanBasis};
use crate::series::{content_gcd, Monomial, Series};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum P3Case {
    /// `phi` or `psi` is a unit: the invariant ring is a hypersurface `k[[x^3, y^3, t]]`.
    UnitCase,
    /// Both lie in the maximal ideal; `determinant` is that of their linear parts.
    ParameterCase,
}

impl P3Case {
    pub fn as_str(&self) -> &'static str {
        match self {
            P3Case::UnitCase => "UnitCase",
            P3Case::ParameterCase => "ParameterCase",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P3Decomposition {
    /// Normalized basis elements with `tau1^2 = a2 tau2`, `tau2^2 = b1 tau1`, `tau1 tau2 = a2 b1`.
    pub tau1: Series,
    pub tau2: Series,
    pub phi: Series,
    pub psi: Series,
    /// `phi^3`.
    pub a2: Series,
    /// `psi^3`.
    pub b1: Series,
    pub case: P3Case,
    /// `ad - bc` for `phi = ax + by + ...`, `psi = cx + dy + ...`.
    pub determinant: u32,
}

fn p_divisible(m: &Monomial, p: u32) -> bool {
    m.exps().iter().all(|&e| e % p == 0)
}

fn frobenius_monomials(field: &FieldRef, degree: u64, p: u32) -> Vec<Series> {
    if !degree.is_multiple_of(p as u64) {
        return Vec::new();
    }
    let d = (degree / p as u64) as u32;
    (0..=d).map(|i| Series::monomial(field, Monomial::new(vec![p * i, p * (d - i)]), 1)).collect()
}

/// Frobenius-base monomials `x^(pi) y^(pj)` of total degree <= n.
fn frobenius_monomials_up_to(field: &FieldRef, n: u64, p: u32) -> Vec<Series> {
    (0..=n).step_by(p as usize).flat_map(|d| frobenius_monomials(field, d, p)).collect()
}

/// Coefficients `c_k` in `k[x^p, y^p]` with `target = sum c_k basis[k]`, if unique.
fn solve_over_base(target: &Series, basis: &[Series], p: u32) -> Result<Option<Vec<Series>>> {
    let field = target.field().clone();
    let top = basis.iter().filter_map(Series::degree).max().unwrap_or(0);
    let bound = target.degree().unwrap_or(0) + top;
    let mons = frobenius_monomials_up_to(&field, bound, p);
    let mut cols: Vec<(usize, Series, Series)> = Vec::new();
    for (k, b) in basis.iter().enumerate() {
        for m in &mons {
            cols.push((k, m.clone(), m * b));
        }
    }
    let mut rows = std::collections::BTreeMap::new();
    for s in cols.iter().map(|c| &c.2).chain(std::iter::once(target)) {
        for (m, _) in s.terms() {
            let next = rows.len();
            rows.entry(m.clone()).or_insert(next);
        }
    }
    let mut mat = Matrix::zeros(rows.len(), cols.len());
    for (c, (_, _, s)) in cols.iter().enumerate() {
        for (m, v) in s.terms() {
            mat.set(rows[m], c, v);
        }
    }
    if !mat.nullspace(&field).is_empty() {
        return Err(Error::BasisConditionsUnattainable(
            "1, tau1, tau2 are linearly dependent over k[x^3, y^3]".into(),
        ));
    }
    let mut rhs = vec![0u32; rows.len()];
    for (m, v) in target.terms() {
        rhs[rows[m]] = v;
    }
    let Some(sol) = mat.solve(&field, &rhs) else { return Ok(None) };
    let mut out = vec![Series::zero(&field, 2); basis.len()];
    for ((k, m, _), v) in cols.iter().zip(sol) {
        if v != 0 {
            out[*k] = &out[*k] + &m.scale(v);
        }
    }
    Ok(Some(out))
}

fn represent(target: &Series, basis: &[Series], p: u32) -> Result<Vec<Series>> {
    solve_over_base(target, basis, p)?.ok_or_else(|| {
        Error::BasisConditionsUnattainable(format!(
            "{target} is not in the k[x^3, y^3]-span of 1, tau1, tau2 at this degree"
        ))
    })
}

/// Lowest-order kernel elements satisfying the basis conditions on initial forms.
fn choose_taus(delta: &Derivation, n: u64) -> Result<(Series, Series)> {
    let field = delta.field().clone();
    let p = field.p();
    let basis = kernel_basis(delta, n, Echelon::Initial)?;
    let initial = |s: &Series| s.homogeneous_part(s.order().expect("nonzero"));
    let tau1 = basis
        .iter()
        .filter(|s| s.order().unwrap_or(0) > 0)
        .find(|s| initial(s).terms().any(|(m, _)| !p_divisible(m, p)))
        .cloned()
        .ok_or_else(|| {
            Error::PrecisionTooLow(format!("no invariant of degree <= {n} has an initial form outside k[x^3, y^3]"))
        })?;
    let in1 = initial(&tau1);
    let nu1 = tau1.order().expect("nonzero");
    let tau2 = basis
        .iter()
        .filter(|s| s.order().unwrap_or(0) >= nu1 && **s != tau1)
        .find(|s| {
            let nu = s.order().expect("nonzero");
            let mut span = SpanBasis::new();
            for m in frobenius_monomials(&field, nu, p) {
                span.insert(&m);
            }
            for m in frobenius_monomials(&field, nu - nu1, p) {
                span.insert(&(&m * &in1));
            }
            !span.contains(&initial(s))
        })
        .cloned()
        .ok_or_else(|| {
            Error::PrecisionTooLow(format!("no second basis element found among invariants of degree <= {n}"))
        })?;
    Ok((tau1, tau2))
}

fn linear_coeffs(s: &Series) -> (u32, u32) {
    (s.coeff(&[1, 0]), s.coeff(&[0, 1]))
}

/// Runs the characteristic-3 decomposition on a p-closed derivation of `k[[x, y]]`.
pub fn p3_decompose(delta: &Derivation, n: u64) -> Result<P3Decomposition> {
    let field = delta.field().clone();
    if field.p() != 3 {
        return Err(Error::UnsupportedCharacteristic(field.p()));
    }
    if delta.nvars() != 2 {
        return Err(Error::InvalidArgument("the decomposition is for two variables".into()));
    }
    let p = 3;
    let (t1, t2) = choose_taus(delta, n)?;
    let one = Series::one(&field, 2);
    let basis = [one.clone(), t1.clone(), t2.clone()];
    let a = represent(&(&t1 * &t1), &basis, p)?;
    let b = represent(&(&t2 * &t2), &basis, p)?;
    // Shifting by the linear coefficients kills them (2c = -c in characteristic 3).
    let tau1 = &t1 + &a[1];
    let tau2 = &t2 + &b[2];
    let basis = [one.clone(), tau1.clone(), tau2.clone()];
    let a = represent(&(&tau1 * &tau1), &basis, p)?;
    let b = represent(&(&tau2 * &tau2), &basis, p)?;
    let c = represent(&(&tau1 * &tau2), &basis, p)?;
    let expect_zero = [(&a[0], "a0"), (&a[1], "a1"), (&b[0], "b0"), (&b[2], "b2"), (&c[1], "c1"), (&c[2], "c2")];
    for (s, name) in expect_zero {
        if !s.is_zero() {
            return Err(Error::BasisConditionsUnattainable(format!("{name} = {s} after normalization")));
        }
    }
    let (a2, b1) = (a[2].clone(), b[1].clone());
    if c[0] != &a2 * &b1 {
        return Err(Error::BasisConditionsUnattainable("tau1 tau2 differs from a2 b1".into()));
    }
    let phi = a2.pth_root()?;
    let psi = b1.pth_root()?;
    if &(&phi * &phi) * &psi != tau1 || &(&psi * &psi) * &phi != tau2 {
        return Err(Error::InternalConsistency("tau1, tau2 do not factor as phi^2 psi, phi psi^2".into()));
    }
    if !content_gcd(&[phi.clone(), psi.clone()])?.is_unit() {
        return Err(Error::InternalConsistency(format!("gcd(phi, psi) is not a unit for phi = {phi}, psi = {psi}")));
    }
    let w1 = &(&phi * &psi.derivative(0)) - &(&phi.derivative(0) * &psi);
    let w2 = &(&phi * &psi.derivative(1)) - &(&phi.derivative(1) * &psi);
    if !(w1.is_zero() && w2.is_zero()) && !content_gcd(&[w1.clone(), w2.clone()])?.is_unit() {
        return Err(Error::InternalConsistency("Wronskian-type minors share a factor".into()));
    }
    let (pa, pb) = linear_coeffs(&phi);
    let (qc, qd) = linear_coeffs(&psi);
    let determinant = field.sub(field.mul(pa, qd), field.mul(pb, qc));
    let case = if phi.is_unit() || psi.is_unit() { P3Case::UnitCase } else { P3Case::ParameterCase };
    Ok(P3Decomposition { tau1, tau2, phi, psi, a2, b1, case, determinant })
}

impl P3Decomposition {
    /// `(phi_y psi - phi psi_y) d/dx - (phi_x psi - phi psi_x) d/dy`, a generator of the same foliation.
    pub fn companion_derivation(&self) -> Result<Derivation> {
        companion(&self.phi, &self.psi)
    }

    /// Hypersurface presentation in the unit case: generators `x^3, y^3, t` and the relation in `U, V, T`.
    pub fn hypersurface(&self) -> Result<(Vec<Series>, Series)> {
        if self.case != P3Case::UnitCase {
            return Err(Error::InvalidArgument("hypersurface presentation needs the unit case".into()));
        }
        let field = self.phi.field().clone();
        // With phi a unit, tau1 = phi^3 t and tau1^3 = a2^2 b1; symmetrically for psi.
        let (t, cube) = if self.phi.is_unit() {
            (self.tau1.clone(), &(&self.a2 * &self.a2) * &self.b1)
        } else {
            (self.tau2.clone(), &(&self.b1 * &self.b1) * &self.a2)
        };
        let gens = vec![
            Series::monomial(&field, Monomial::new(vec![3, 0]), 1),
            Series::monomial(&field, Monomial::new(vec![0, 3]), 1),
            t,
        ];
        let ring = generator_symbol_ring(&field, 3);
        let rel = &ring[2].pow(3) - &from_frobenius_base(&cube, 3, 3)?;
        Ok((gens, rel))
    }

    /// Generators `x^3, y^3, tau1, tau2` and the three quadrics cutting out the invariant ring.
    pub fn minor_presentation(&self) -> Result<(Vec<Series>, Vec<Series>)> {
        let field = self.phi.field().clone();
        let gens = vec![
            Series::monomial(&field, Monomial::new(vec![3, 0]), 1),
            Series::monomial(&field, Monomial::new(vec![0, 3]), 1),
            self.tau1.clone(),
            self.tau2.clone(),
        ];
        let s = generator_symbol_ring(&field, 4);
        let a2 = from_frobenius_base(&self.a2, 3, 4)?;
        let b1 = from_frobenius_base(&self.b1, 3, 4)?;
        let rels = vec![
            &(&s[2] * &s[2]) - &(&a2 * &s[3]),
            &(&s[3] * &s[3]) - &(&b1 * &s[2]),
            &(&s[2] * &s[3]) - &(&a2 * &b1),
        ];
        Ok((gens, rels))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "case": self.case.as_str(),
            "tau1": self.tau1.render(),
            "tau2": self.tau2.render(),
            "phi": self.phi.render(),
            "psi": self.psi.render(),
            "a2": self.a2.render(),
            "b1": self.b1.render(),
            "determinant": self.phi.field().render(self.determinant),
        })
    }
}

/// The derivation annihilating `phi / psi` built from the two factors.
pub fn companion(phi: &Series, psi: &Series) -> Result<Derivation> {
    let f1 = &(&phi.derivative(1) * psi) - &(phi * &psi.derivative(1));
    let f2 = &(phi * &psi.derivative(0)) - &(&phi.derivative(0) * psi);
    Derivation::new(vec![f1, f2])
}
