//! Cyclic quotient singularities `1/p(1, lambda)`: continued fractions and discrepancies.

use crate::error::{Error, Result};
use crate::singclass::Rational;

fn check(p: u32, lambda: u32) -> Result<()> {
    if lambda == 0 || lambda >= p {
        return Err(Error::InvalidLambda { p, lambda });
    }
    Ok(())
}

/// The representative of `{lambda, lambda^-1 mod p}` that is smallest.
pub fn normalize_lambda(p: u32, lambda: u32) -> Result<u32> {
    check(p, lambda)?;
    let inv = (1..p).find(|&m| (m as u64 * lambda as u64) % p as u64 == 1).ok_or(Error::InvalidLambda { p, lambda })?;
    Ok(lambda.min(inv))
}

/// Hirzebruch-Jung expansion `n/q = b1 - 1/(b2 - 1/(...))`.
pub fn hj_continued_fraction(n: u32, q: u32) -> Vec<u32> {
    let (mut a, mut b) = (n as u64, q as u64);
    let mut out = Vec::new();
    while b > 0 {
        let c = a.div_ceil(b);
        out.push(c as u32);
        let r = c * b - a;
        a = b;
        b = r;
    }
    out
}

/// Discrepancies of the exceptional curves of the minimal resolution of `1/p(1, lambda)`.
///
/// The chain has self-intersections `-b_i` from the expansion of `p/lambda`; the canonical
/// class `sum a_i E_i` solves `K.E_j = b_j - 2` by exact elimination.
#[allow(clippy::needless_range_loop)]
pub fn hj_discrepancies(p: u32, lambda: u32) -> Result<Vec<Rational>> {
    check(p, lambda)?;
    let b = hj_continued_fraction(p, lambda);
    let r = b.len();
    let zero = Rational::from_integer(0);
    // Intersection matrix augmented with the right-hand side.
    let mut m = vec![vec![zero; r + 1]; r];
    for j in 0..r {
        m[j][j] = Rational::from_integer(-(b[j] as i64));
        if j > 0 {
            m[j][j - 1] = Rational::from_integer(1);
        }
        if j + 1 < r {
            m[j][j + 1] = Rational::from_integer(1);
        }
        m[j][r] = Rational::from_integer(b[j] as i64 - 2);
    }
    for c in 0..r {
        let piv = (c..r).find(|&i| m[i][c] != zero).ok_or_else(|| {
            Error::InternalConsistency("singular intersection matrix".into())
        })?;
        m.swap(c, piv);
        let inv = Rational::from_integer(1) / m[c][c];
        for x in m[c].iter_mut() {
            *x *= inv;
        }
        for i in 0..r {
            if i != c && m[i][c] != zero {
                let f = m[i][c];
                for k in c..=r {
                    let v = m[c][k];
                    m[i][k] -= f * v;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[r]).collect())
}

/// Discrepancy over `1/p(1, lambda)` of the toric divisor on the ray through `(w1, w2)`.
///
/// The cone is the positive quadrant in `Z^2 + Z (1,lambda)/p`; the divisor of a primitive
/// lattice vector `v` has discrepancy `v1 + v2 - 1`.
pub fn toric_divisor_discrepancy(p: u32, lambda: u32, w: (u64, u64)) -> Result<Rational> {
    check(p, lambda)?;
    if w == (0, 0) {
        return Err(Error::InvalidArgument("direction must be nonzero".into()));
    }
    let g = num_integer::gcd(w.0, w.1);
    let (w1, w2) = (w.0 / g, w.1 / g);
    let p64 = p as u64;
    // (m/p) w lies in the lattice iff m (w2 - lambda w1) = 0 mod p.
    let m = if (w2 + p64 * w1 - (lambda as u64 * w1) % p64).is_multiple_of(p64) { 1 } else { p64 };
    Ok(Rational::new((m * (w1 + w2)) as i64, p as i64) - 1)
}

/// Discrepancy of the image of the first exceptional curve over the origin of the cover.
pub fn blowup_image_discrepancy(p: u32, lambda: u32) -> Result<Rational> {
    toric_divisor_discrepancy(p, lambda, (1, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(hj_continued_fraction(5, 1), vec![5]);
        assert_eq!(hj_continued_fraction(5, 4), vec![2, 2, 2, 2]);
        assert_eq!(hj_continued_fraction(5, 2), vec![3, 2]);
        assert_eq!(hj_continued_fraction(5, 3), vec![2, 3]);
        assert_eq!(hj_continued_fraction(7, 3), vec![3, 2, 2]);
    }

    #[test]
    fn discrepancy_examples() {
        assert_eq!(hj_discrepancies(5, 1).unwrap(), vec![r(-3, 5)]);
        assert_eq!(hj_discrepancies(5, 4).unwrap(), vec![r(0, 1); 4]);
        assert_eq!(hj_discrepancies(3, 1).unwrap(), vec![r(-1, 3)]);
        assert_eq!(hj_discrepancies(2, 1).unwrap(), vec![r(0, 1)]);
        assert_eq!(hj_discrepancies(5, 2).unwrap(), vec![r(-2, 5), r(-1, 5)]);
        assert!(matches!(hj_discrepancies(5, 0), Err(Error::InvalidLambda { .. })));
        assert!(matches!(hj_discrepancies(5, 5), Err(Error::InvalidLambda { .. })));
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_lambda(5, 3).unwrap(), 2);
        assert_eq!(normalize_lambda(5, 2).unwrap(), 2);
        assert_eq!(normalize_lambda(5, 4).unwrap(), 4);
        assert_eq!(normalize_lambda(3, 2).unwrap(), 2);
        assert_eq!(normalize_lambda(7, 5).unwrap(), 3);
    }

    #[test]
    fn toric_rays() {
        assert_eq!(blowup_image_discrepancy(5, 1).unwrap(), r(-3, 5));
        assert_eq!(blowup_image_discrepancy(3, 1).unwrap(), r(-1, 3));
        assert_eq!(blowup_image_discrepancy(5, 2).unwrap(), r(1, 1));
        // (1,2)/5 is the first curve of 1/5(1,2).
        assert_eq!(toric_divisor_discrepancy(5, 2, (1, 2)).unwrap(), r(-2, 5));
    }
}
