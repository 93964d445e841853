//! Dense Gaussian elimination and an incremental echelon basis over F_{p^k}.

use std::collections::BTreeMap;

use crate::field::Field;
use crate::series::{Monomial, Series};

#[derive(Clone, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self, f: &Field) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..self.cols {
                    self.data.swap(pr * self.cols + c, row * self.cols + c);
                }
            }
            let inv = f.inv(self.get(row, col)).expect("pivot nonzero");
            for c in col..self.cols {
                let v = self.get(row, c);
                if v != 0 {
                    self.set(row, c, f.mul(v, inv));
                }
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..self.cols {
                    let v = self.get(row, c);
                    if v != 0 {
                        let cur = self.get(r, c);
                        self.set(r, c, f.sub(cur, f.mul(factor, v)));
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Basis of {v : A v = 0}, one vector per free column, in column order.
    pub fn nullspace(&self, f: &Field) -> Vec<Vec<u32>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let mut is_pivot = vec![None; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(r);
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                let a = m.get(r, free);
                if a != 0 {
                    v[pc] = f.neg(a);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of A v = b, if any.
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, f: &Field, b: &[u32]) -> Option<Vec<u32>> {
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let pivots = aug.rref(f);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut v = vec![0u32; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = aug.get(r, self.cols);
        }
        Some(v)
    }
}

/// Echelon basis of a space of polynomials keyed by leading monomial.
///
/// Used for subalgebra membership and span tests; every stored row is monic.
#[derive(Clone, Debug, Default)]
pub struct SpanBasis {
    rows: BTreeMap<Monomial, Series>,
}

impl SpanBasis {
    pub fn new() -> Self {
        SpanBasis { rows: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Remainder of `s` after eliminating every pivot it touches.
    pub fn reduce(&self, s: &Series) -> Series {
        let mut r = s.clone();
        // Walk from the top term down, cancelling pivots.
        let mut bound: Option<Monomial> = None;
        loop {
            let next = r
                .terms()
                .rev()
                .find(|(m, _)| {
                    bound.as_ref().is_none_or(|b| *m < b) && self.rows.contains_key(*m)
                })
                .map(|(m, c)| (m.clone(), c));
            let Some((m, c)) = next else { break };
            let row = &self.rows[&m];
            r = &r - &row.scale(c);
            bound = Some(m);
        }
        r
    }

    pub fn contains(&self, s: &Series) -> bool {
        self.reduce(s).is_zero()
    }

    /// Inserts `s`; returns false when it was already in the span.
    pub fn insert(&mut self, s: &Series) -> bool {
        let r = self.reduce(s);
        let Some((lead, _)) = r.leading_term() else {
            return false;
        };
        let lead = lead.clone();
        let r = r.monic();
        self.rows.insert(lead, r);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{field, Precision};

    #[test]
    fn nullspace_and_solve() {
        let f = Field::new(5, 1).unwrap();
        let mut a = Matrix::zeros(2, 3);
        // x + 2y + 3z = 0, y + z = 0
        for (r, row) in [[1, 2, 3], [0, 1, 1]].iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                a.set(r, c, v);
            }
        }
        let ns = a.nullspace(&f);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert_eq!((v[0] + 2 * v[1] + 3 * v[2]) % 5, 0);
        assert_eq!((v[1] + v[2]) % 5, 0);
        let sol = a.solve(&f, &[1, 0]).unwrap();
        assert_eq!((sol[0] + 2 * sol[1] + 3 * sol[2]) % 5, 1);
    }

    #[test]
    fn span_membership() {
        let fr = field(3, 1).unwrap();
        let x = Series::var(&fr, 2, 0);
        let y = Series::var(&fr, 2, 1);
        let mut sb = SpanBasis::new();
        assert!(sb.insert(&(&x + &y)));
        assert!(sb.insert(&(&x - &y)));
        assert!(sb.contains(&x));
        assert!(!sb.contains(&(&x * &y)));
        assert!(!sb.insert(&y.scale(2)));
        let z = Series::from_terms(&fr, 2, vec![(vec![0, 0], 1)], Precision::Exact);
        assert!(!sb.contains(&z));
    }
}
