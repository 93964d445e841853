//! Derivations `f_1 d/dx_1 + ... + f_n d/dx_n` of a polynomial or power series ring.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{poly1, FieldRef};
use crate::series::{content_gcd, default_var_names, Series};

#[derive(Clone, PartialEq, Eq)]
pub struct Derivation {
    field: FieldRef,
    nvars: usize,
    coeffs: Vec<Series>,
}

impl std::fmt::Debug for Derivation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Derivation({})", self.render())
    }
}

impl std::fmt::Display for Derivation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

/// Outcome of testing whether `d^p` is a multiple of `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PClosedness {
    NotPClosed,
    /// `d^p = alpha d` with `alpha` a unit.
    Multiplicative(Series),
    /// `d^p = 0`.
    Additive,
    /// `d^p = alpha d` with `alpha(0) = 0`, `alpha != 0`.
    PClosedNonUnit(Series),
}

impl PClosedness {
    pub fn alpha(&self) -> Option<&Series> {
        match self {
            PClosedness::Multiplicative(a) | PClosedness::PClosedNonUnit(a) => Some(a),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PClosedness::NotPClosed => "NotPClosed",
            PClosedness::Multiplicative(_) => "Multiplicative",
            PClosedness::Additive => "Additive",
            PClosedness::PClosedNonUnit(_) => "PClosedNonUnit",
        }
    }
}

/// Action of a derivation on the cotangent space `m/m^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearPart {
    /// Row i holds the degree-one coefficients of `f_i`.
    pub matrix: Vec<Vec<u32>>,
    pub nilpotent: bool,
    /// Characteristic polynomial, low degree first.
    pub charpoly: Vec<u32>,
    /// Eigenvalues in the coefficient field with multiplicity, ascending.
    pub eigenvalues: Vec<(u32, usize)>,
    /// Degrees of irreducible charpoly factors with no root in the field.
    pub irrational_factor_degrees: Vec<usize>,
    /// Set when the derivation has order 0, so the linear part is not the relevant invariant.
    pub order_zero: bool,
}

impl Derivation {
    /// Builds a derivation from its coefficients `f_i = d(x_i)`; the zero derivation is allowed here.
    pub fn new(coeffs: Vec<Series>) -> Result<Derivation> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidArgument("derivation needs at least one variable".into()))?;
        let field = first.field().clone();
        let nvars = coeffs.len();
        for c in &coeffs {
            if **c.field() != *field {
                return Err(Error::FieldMismatch);
            }
            if c.nvars() != nvars {
                return Err(Error::VariableCountMismatch { left: nvars, right: c.nvars() });
            }
        }
        Ok(Derivation { field, nvars, coeffs })
    }

    /// Like `new`, but rejects the zero derivation.
    pub fn nonzero(coeffs: Vec<Series>) -> Result<Derivation> {
        let d = Derivation::new(coeffs)?;
        if d.is_zero() {
            return Err(Error::ZeroDerivation);
        }
        Ok(d)
    }

    /// `d/dx_i`.
    pub fn partial(field: &FieldRef, nvars: usize, i: usize) -> Derivation {
        let coeffs = (0..nvars)
            .map(|j| if i == j { Series::one(field, nvars) } else { Series::zero(field, nvars) })
            .collect();
        Derivation { field: field.clone(), nvars, coeffs }
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn coeffs(&self) -> &[Series] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Series {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Series::is_zero)
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(Series::is_exact)
    }

    fn check_compatible(&self, other: &Derivation) -> Result<()> {
        if *self.field != *other.field {
            return Err(Error::FieldMismatch);
        }
        if self.nvars != other.nvars {
            return Err(Error::VariableCountMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    /// `d(f) = sum f_i * df/dx_i`.
    pub fn apply(&self, f: &Series) -> Result<Series> {
        if **f.field() != *self.field {
            return Err(Error::FieldMismatch);
        }
        if f.nvars() != self.nvars {
            return Err(Error::VariableCountMismatch { left: self.nvars, right: f.nvars() });
        }
        if let crate::series::Precision::Truncated(n) = f.precision() {
            if n < 2 {
                return Err(Error::InsufficientPrecision(
                    "applying a derivation needs precision at least 2".into(),
                ));
            }
        }
        let mut out = Series::zero(&self.field, self.nvars);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            out = out.try_add(&c.try_mul(&f.derivative(i))?)?;
        }
        Ok(out)
    }

    /// Repeated application `d^m(f)`.
    pub fn apply_n(&self, f: &Series, m: u32) -> Result<Series> {
        let mut cur = f.clone();
        for _ in 0..m {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    /// `[d, e] = de - ed`.
    pub fn lie_bracket(&self, other: &Derivation) -> Result<Derivation> {
        self.check_compatible(other)?;
        let coeffs = (0..self.nvars)
            .map(|i| self.apply(&other.coeffs[i])?.try_sub(&other.apply(&self.coeffs[i])?))
            .collect::<Result<Vec<_>>>()?;
        Derivation::new(coeffs)
    }

    /// `d^p`, computed on coordinates: `d^p(x_i) = d^(p-1)(f_i)`.
    pub fn p_power(&self) -> Result<Derivation> {
        let p = self.field.p();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| self.apply_n(c, p - 1))
            .collect::<Result<Vec<_>>>()?;
        Derivation::new(coeffs)
    }

    /// Multiplies every coefficient by `s`.
    pub fn scale_by(&self, s: &Series) -> Result<Derivation> {
        let coeffs = self.coeffs.iter().map(|c| c.try_mul(s)).collect::<Result<Vec<_>>>()?;
        Derivation::new(coeffs)
    }

    /// Classifies `d^p` against `d`; `alpha` is a truncated series at `prec` only when it is not a polynomial.
    pub fn pclosedness(&self, prec: u32) -> Result<PClosedness> {
        if self.is_zero() {
            return Err(Error::ZeroDerivation);
        }
        if !self.is_exact() {
            return Err(Error::InvalidArgument("p-closedness needs exact coefficients".into()));
        }
        let dp = self.p_power()?;
        if dp.is_zero() {
            return Ok(PClosedness::Additive);
        }
        let f = &self.coeffs;
        let g = &dp.coeffs;
        for i in 0..self.nvars {
            for j in i + 1..self.nvars {
                if !(&g[i] * &f[j]).try_sub(&(&g[j] * &f[i]))?.is_zero() {
                    return Ok(PClosedness::NotPClosed);
                }
            }
        }
        let i = (0..self.nvars).find(|&i| !f[i].is_zero()).expect("nonzero derivation");
        let alpha = match g[i].exact_div(&f[i])? {
            Some(a) => a,
            None => {
                let c = content_gcd(&[g[i].clone(), f[i].clone()])?;
                let num = g[i].exact_div(&c)?.expect("gcd divides");
                let den = f[i].exact_div(&c)?.expect("gcd divides");
                if !den.is_unit() {
                    return Err(Error::NonDivisible(format!(
                        "d^p(x{}) = {} is not a power-series multiple of {}",
                        i + 1,
                        g[i],
                        f[i]
                    )));
                }
                num.try_mul(&den.inverse(prec)?)?
            }
        };
        let check = self.apply(&alpha)?;
        if !check.is_zero() {
            return Err(Error::InternalConsistency(format!(
                "d(alpha) = {check} is nonzero for alpha = {alpha}"
            )));
        }
        if alpha.is_unit() {
            Ok(PClosedness::Multiplicative(alpha))
        } else {
            Ok(PClosedness::PClosedNonUnit(alpha))
        }
    }

    /// Witness `alpha` with `d^p = alpha d`; errors when `d` is not p-closed.
    pub fn p_closed_witness(&self) -> Result<PClosedness> {
        let prec = 20.max(4 * self.field.p());
        match self.pclosedness(prec)? {
            PClosedness::NotPClosed => Err(Error::NotPClosed),
            other => Ok(other),
        }
    }

    /// Largest d with every coefficient in `m^d`.
    pub fn order(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroDerivation);
        }
        Ok(self
            .coeffs
            .iter()
            .filter(|c| !c.is_exact_zero())
            .map(Series::order_lower_bound)
            .min()
            .expect("nonzero derivation"))
    }

    /// `(d', c)` with `d = c d'` and the coefficients of `d'` coprime.
    pub fn saturate(&self) -> Result<(Derivation, Series)> {
        if self.is_zero() {
            return Err(Error::ZeroDerivation);
        }
        let c = content_gcd(&self.coeffs)?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|f| {
                f.exact_div(&c)?
                    .ok_or_else(|| Error::InternalConsistency("content does not divide".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((Derivation::new(coeffs)?, c))
    }

    pub fn linear_part(&self) -> Result<LinearPart> {
        let n = self.nvars;
        let f = &self.field;
        for c in &self.coeffs {
            if c.precision().bound() < 2 {
                return Err(Error::InsufficientPrecision("linear part needs precision 2".into()));
            }
        }
        let matrix: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut e = vec![0u32; n];
                        e[j] = 1;
                        self.coeffs[i].coeff(&e)
                    })
                    .collect()
            })
            .collect();
        let order_zero = self.coeffs.iter().any(|c| c.constant_term() != 0);
        let mut power = matrix.clone();
        for _ in 1..n {
            power = mat_mul(f, &power, &matrix);
        }
        let nilpotent = power.iter().all(|r| r.iter().all(|&v| v == 0));
        let charpoly = charpoly(f, &matrix);
        let mut eigenvalues: Vec<(u32, usize)> = poly1::roots(f, &charpoly)
            .into_iter()
            .map(|r| (r, poly1::root_multiplicity(f, &charpoly, r)))
            .collect();
        eigenvalues.sort_unstable();
        let mut rest = charpoly.clone();
        for &(r, m) in &eigenvalues {
            for _ in 0..m {
                rest = poly1::divrem(f, &rest, &[f.neg(r), 1]).0;
            }
        }
        let irrational_factor_degrees = poly1::factor_degrees(f, &rest);
        Ok(LinearPart { matrix, nilpotent, charpoly, eigenvalues, irrational_factor_degrees, order_zero })
    }

    pub fn render(&self) -> String {
        self.render_with(&default_var_names(self.nvars))
    }

    /// Canonical text such as `y*dx + (x^2 + x*y)*dy`.
    pub fn render_with(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() && c.is_exact() {
                continue;
            }
            let d = format!("d{}", names[i]);
            let body = c.render_with(names);
            let single = c.is_exact() && c.num_terms() == 1;
            let text = if single && body == "1" {
                d
            } else if single && !body.contains(['(', ' ']) {
                format!("{body}*{d}")
            } else {
                format!("({body})*{d}")
            };
            parts.push(text);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

fn mat_mul(f: &crate::field::Field, a: &[Vec<u32>], b: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(0, |acc, k| f.add(acc, f.mul(a[i][k], b[k][j]))))
                .collect()
        })
        .collect()
}

/// `det(tI - M)` by cofactor expansion over `F[t]`.
fn charpoly(f: &crate::field::Field, m: &[Vec<u32>]) -> Vec<u32> {
    let n = m.len();
    let entries: Vec<Vec<Vec<u32>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = f.neg(m[i][j]);
                    if i == j {
                        poly1::trim(vec![c, 1])
                    } else {
                        poly1::trim(vec![c])
                    }
                })
                .collect()
        })
        .collect();
    let cols: Vec<usize> = (0..n).collect();
    det_poly(f, &entries, 0, &cols)
}

fn det_poly(f: &crate::field::Field, e: &[Vec<Vec<u32>>], row: usize, cols: &[usize]) -> Vec<u32> {
    if cols.is_empty() {
        return vec![1];
    }
    let mut acc = Vec::new();
    for (k, &c) in cols.iter().enumerate() {
        if e[row][c].is_empty() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = poly1::mul(f, &e[row][c], &det_poly(f, e, row + 1, &rest));
        acc = if k % 2 == 0 { poly1::add(f, &acc, &term) } else { poly1::sub(f, &acc, &term) };
    }
    acc
}

#[cfg(test)]
mod tests;
