//! Small exact-arithmetic helpers: rationals, Gaussian rationals, and dense
//! matrices over them with just enough linear algebra for this crate
//! (products, RREF, nullspaces, inverses).

use num::complex::Complex;
use num::rational::Rational64;
use num::{One, Zero};

pub type Q = Rational64;
/// Gaussian rational a + bi, used for the complex irreducible matrices.
pub type QI = Complex<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn qi(re: i64, im: i64) -> QI {
    QI::new(q(re), q(im))
}

/// Dense row-major matrix over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        QMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Permutation matrix P with P[perm[j]][j] = 1: coordinates of basis
    /// vector j are sent to slot perm[j].
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n, n);
        for (j, &i) in perm.iter().enumerate() {
            *m.at_mut(i, j) = Q::one();
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> Q {
        self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matmul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + a * other.at(k, j);
                    *out.at_mut(i, j) = v;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, k: Q) -> QMat {
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    pub fn transpose(&self) -> QMat {
        let mut out = QMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Q::zero(), |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    /// In-place reduced row echelon form; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            for j in 0..self.cols {
                let tmp = self.at(r, j);
                *self.at_mut(r, j) = self.at(p, j);
                *self.at_mut(p, j) = tmp;
            }
            let inv = self.at(r, c).recip();
            for j in 0..self.cols {
                let v = self.at(r, j) * inv;
                *self.at_mut(r, j) = v;
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c);
                    for j in 0..self.cols {
                        let v = self.at(i, j) - f * self.at(r, j);
                        *self.at_mut(i, j) = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Basis of the right nullspace {x : Ax = 0}.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Q::zero(); self.cols];
                v[fc] = Q::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m.at(r, fc);
                }
                v
            })
            .collect()
    }

    /// Exact inverse; None when singular.
    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = QMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                *aug.at_mut(i, j) = self.at(i, j);
            }
            *aug.at_mut(i, n + i) = Q::one();
        }
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(k, &c)| c != k) {
            return None;
        }
        let mut inv = QMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                *inv.at_mut(i, j) = aug.at(i, n + j);
            }
        }
        Some(inv)
    }

    /// Least trivial membership test: does `v` lie in the span of `basis`?
    pub fn in_span(basis: &[Vec<Q>], v: &[Q]) -> bool {
        if basis.is_empty() {
            return v.iter().all(|a| a.is_zero());
        }
        let n = v.len();
        // Columns are basis vectors plus v; v is in the span iff the rank
        // does not grow.
        let mut with = QMat::zeros(n, basis.len() + 1);
        let mut without = QMat::zeros(n, basis.len());
        for (j, b) in basis.iter().enumerate() {
            assert_eq!(b.len(), n);
            for i in 0..n {
                *with.at_mut(i, j) = b[i];
                *without.at_mut(i, j) = b[i];
            }
        }
        for i in 0..n {
            *with.at_mut(i, basis.len()) = v[i];
        }
        with.rref().len() == without.rref().len()
    }
}

/// Dense row-major matrix over the Gaussian rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QIMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<QI>,
}

impl QIMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QIMat {
            rows,
            cols,
            data: vec![QI::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = QI::one();
        }
        m
    }

    pub fn from_rows_i64(rows: &[&[(i64, i64)]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, &(re, im)) in row.iter().enumerate() {
                *m.at_mut(i, j) = qi(re, im);
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> QI {
        self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut QI {
        &mut self.data[i * self.cols + j]
    }

    pub fn matmul(&self, other: &QIMat) -> QIMat {
        assert_eq!(self.cols, other.rows);
        let mut out = QIMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + a * other.at(k, j);
                    *out.at_mut(i, j) = v;
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: usize) -> QIMat {
        assert_eq!(self.rows, self.cols);
        let mut acc = QIMat::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.matmul(&base);
            }
            base = base.matmul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn trace(&self) -> QI {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).fold(QI::zero(), |acc, i| acc + self.at(i, i))
    }
}

/// Greatest common divisor of the denominators, for integer scaling.
pub fn denominator_lcm(values: impl Iterator<Item = Q>) -> i64 {
    values.fold(1i64, |acc, v| {
        let d = *v.denom();
        let g = gcd(acc.abs(), d.abs());
        acc / g * d
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_and_nullspace() {
        // x + y + z = 0 has a 2-dimensional solution space.
        let m = QMat::from_rows(vec![vec![q(1), q(1), q(1)]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.apply(v).iter().all(|a| a.is_zero()));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = QMat::from_rows(vec![
            vec![q(2), q(1), q(0)],
            vec![q(1), q(3), q(1)],
            vec![q(0), q(1), q(2)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), QMat::identity(3));
        let singular = QMat::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn gaussian_matrix_powers() {
        // diag(i, -i) has order 4.
        let mut m = QIMat::zeros(2, 2);
        *m.at_mut(0, 0) = qi(0, 1);
        *m.at_mut(1, 1) = qi(0, -1);
        assert_eq!(m.pow(4), QIMat::identity(2));
        assert_ne!(m.pow(2), QIMat::identity(2));
    }

    #[test]
    fn span_membership() {
        let b = vec![vec![q(1), q(0), q(1)], vec![q(0), q(1), q(1)]];
        assert!(QMat::in_span(&b, &[q(2), q(3), q(5)]));
        assert!(!QMat::in_span(&b, &[q(0), q(0), q(1)]));
    }
}
