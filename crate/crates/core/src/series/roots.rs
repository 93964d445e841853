use super::{Monomial, Precision, Series};
use crate::error::{Error, Result};

impl Series {
    /// Multiplicative inverse of a unit, to `prec` when the input is exact.
    pub fn inverse(&self, prec: u32) -> Result<Series> {
        let c0 = self.constant_term();
        let inv0 = self.field.inv(c0).ok_or(Error::NotAUnit)?;
        if self.is_exact() && self.is_constant() {
            return Ok(Series::constant(&self.field, self.nvars, inv0));
        }
        let target = self.prec.bound().min(prec as u64);
        let two = Series::constant(&self.field, self.nvars, self.field.from_int(2));
        let mut h = Series::constant(&self.field, self.nvars, inv0).truncate(target);
        // Newton: h <- h (2 - u h) doubles the number of correct degrees.
        let mut known = 1u64;
        while known < target {
            let uh = self.mul_capped(&h, target)?;
            h = h.mul_capped(&two.try_sub(&uh)?, target)?;
            known = known.saturating_mul(2);
        }
        Ok(h.truncate(target))
    }

    /// r-th root of a unit with gcd(r, p) = 1, to `prec` when the input is exact.
    ///
    /// The constant term of the result is the smallest root in encoding order.
    pub fn unit_root(&self, r: u64, prec: u32) -> Result<Series> {
        let f = self.field.clone();
        if r == 0 || r.is_multiple_of(f.p() as u64) {
            return Err(Error::RDivisibleByP { r, p: f.p() });
        }
        let c0 = self.constant_term();
        if c0 == 0 {
            return Err(Error::NotAUnit);
        }
        let root0 = *f.roots(c0, r).first().ok_or_else(|| Error::NoRootInField {
            what: format!("constant term {}", f.render(c0)),
            r,
            p: f.p(),
            k: f.k(),
        })?;
        if self.is_exact() && self.is_constant() {
            return Ok(Series::constant(&f, self.nvars, root0));
        }
        let target = self.prec.bound().min(prec as u64);
        let r_elem = f.from_int(r as i64);
        let mut g = Series::constant(&f, self.nvars, root0).truncate(target);
        let mut known = 1u64;
        while known < target {
            // g <- g - (g^r - f) / (r g^(r-1))
            let g_r1 = g.pow_capped(r - 1, target);
            let g_r = g_r1.mul_capped(&g, target)?;
            let resid = g_r.try_sub(self)?.truncate(target);
            let denom = g_r1.scale(r_elem).inverse(target as u32)?;
            g = g.try_sub(&resid.mul_capped(&denom, target)?)?;
            known = known.saturating_mul(2);
        }
        let g = g.truncate(target);
        let check = g.pow_capped(r, target).try_sub(&self.truncate(target))?;
        if !check.is_zero() {
            return Err(Error::InternalConsistency("unit root failed to converge".into()));
        }
        Ok(g)
    }

    /// p-th root of a series whose exponents are all divisible by p.
    pub fn pth_root(&self) -> Result<Series> {
        let f = self.field.clone();
        let p = f.p();
        let mut terms = std::collections::BTreeMap::new();
        for (m, &c) in &self.terms {
            if m.0.iter().any(|&e| e % p != 0) {
                return Err(Error::ExponentNotDivisible(self.render()));
            }
            terms.insert(Monomial(m.0.iter().map(|&e| e / p).collect()), f.frobenius_inv(c));
        }
        let prec = match self.prec {
            Precision::Exact => Precision::Exact,
            Precision::Truncated(n) => Precision::Truncated(n.div_ceil(p)),
        };
        Ok(Series { field: f, nvars: self.nvars, terms, prec })
    }
}
