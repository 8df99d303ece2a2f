//! Dense exact vectors and matrices.

use crate::error::{check_dim, Result};
use crate::rational::Rat;

pub type RatVec = Vec<Rat>;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMat {
    rows: Vec<RatVec>,
    ncols: usize,
}

pub fn zeros(n: usize) -> RatVec {
    vec![Rat::zero(); n]
}

pub fn unit(n: usize, i: usize) -> RatVec {
    let mut v = zeros(n);
    v[i] = Rat::one();
    v
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn add(a: &[Rat], b: &[Rat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(t: &Rat, a: &[Rat]) -> RatVec {
    a.iter().map(|x| t * x).collect()
}

pub fn neg(a: &[Rat]) -> RatVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero(a: &[Rat]) -> bool {
    a.iter().all(Rat::is_zero)
}

/// `t a + (1 - t) b`
pub fn lerp(t: &Rat, a: &[Rat], b: &[Rat]) -> RatVec {
    let s = Rat::one() - t;
    a.iter().zip(b).map(|(x, y)| t * x + &s * y).collect()
}

pub fn ints(v: &[i64]) -> RatVec {
    v.iter().map(|&x| Rat::from_integer(x)).collect()
}

impl RatMat {
    pub fn from_rows(rows: Vec<RatVec>, ncols: usize) -> Result<RatMat> {
        for r in &rows {
            check_dim(ncols, r.len())?;
        }
        Ok(RatMat { rows, ncols })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> RatMat {
        RatMat { rows: vec![zeros(ncols); nrows], ncols }
    }

    pub fn identity(n: usize) -> RatMat {
        RatMat { rows: (0..n).map(|i| unit(n, i)).collect(), ncols: n }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[RatVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.rows[i][j]
    }

    pub fn transpose(&self) -> RatMat {
        let rows = (0..self.ncols)
            .map(|j| self.rows.iter().map(|r| r[j].clone()).collect())
            .collect();
        RatMat { rows, ncols: self.rows.len() }
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Result<RatVec> {
        check_dim(self.ncols, x.len())?;
        Ok(self.rows.iter().map(|r| dot(r, x)).collect())
    }

    pub fn mul(&self, other: &RatMat) -> Result<RatMat> {
        check_dim(self.ncols, other.nrows())?;
        let t = other.transpose();
        let rows = self
            .rows
            .iter()
            .map(|r| t.rows.iter().map(|c| dot(r, c)).collect())
            .collect();
        Ok(RatMat { rows, ncols: other.ncols })
    }

    pub fn add(&self, other: &RatMat) -> Result<RatMat> {
        check_dim(self.nrows(), other.nrows())?;
        check_dim(self.ncols, other.ncols)?;
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| add(a, b)).collect();
        Ok(RatMat { rows, ncols: self.ncols })
    }

    /// Reduced row echelon form; returns the matrix and its pivot columns.
    pub fn rref(&self) -> (RatMat, Vec<usize>) {
        let mut m = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let inv = m[r][c].recip();
            for x in m[r].iter_mut() {
                *x = &*x * &inv;
            }
            let pivot_row = m[r].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i != r && !row[c].is_zero() {
                    let f = row[c].clone();
                    for (x, p) in row.iter_mut().zip(&pivot_row) {
                        if !p.is_zero() {
                            *x -= &f * p;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.len() {
                break;
            }
        }
        m.truncate(r);
        (RatMat { rows: m, ncols: self.ncols }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
}

/// A basis of `{v | M v = 0}`, one vector per free column of the RREF.
pub fn nullspace_basis(m: &RatMat) -> Vec<RatVec> {
    let (r, pivots) = m.rref();
    let n = m.ncols();
    let mut basis = Vec::new();
    let mut pivot_of = vec![None; n];
    for (i, &c) in pivots.iter().enumerate() {
        pivot_of[c] = Some(i);
    }
    for free in (0..n).filter(|&c| pivot_of[c].is_none()) {
        let mut v = zeros(n);
        v[free] = Rat::one();
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = -r.get(i, free);
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> RatMat {
        let n = rows.first().map_or(0, |r| r.len());
        RatMat::from_rows(rows.iter().map(|r| ints(r)).collect(), n).unwrap()
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(nullspace_basis(&mat(&[&[1, -1]])), vec![ints(&[1, 1])]);
        assert!(nullspace_basis(&RatMat::identity(2)).is_empty());
        assert_eq!(nullspace_basis(&RatMat::zeros(1, 2)).len(), 2);
    }

    #[test]
    fn nullspace_vectors_are_independent_kernel_elements() {
        let m = mat(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 0, 1]]);
        let basis = nullspace_basis(&m);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(is_zero(&m.mul_vec(v).unwrap()));
        }
        let b = RatMat::from_rows(basis, 4).unwrap();
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn rref_rank_and_product() {
        let a = mat(&[&[1, 2], &[3, 4]]);
        assert_eq!(a.rank(), 2);
        let p = a.mul(&RatMat::identity(2)).unwrap();
        assert_eq!(p, a);
        assert!(RatMat::from_rows(vec![ints(&[1])], 2).is_err());
    }
}
