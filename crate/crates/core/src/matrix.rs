//! Dense square matrices over F_q.

use rand::Rng;
use thiserror::Error;

use crate::field::{Fe, Field};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is singular")]
    Singular,
}

/// An `n × n` matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    data: Vec<Fe>,
}

impl Matrix {
    pub fn zero(n: usize) -> Self {
        Matrix {
            n,
            data: vec![Fe::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = Fe::ONE;
        }
        m
    }

    /// Wraps `n*n` row-major entries.
    pub fn from_rows(n: usize, data: Vec<Fe>) -> Result<Self, MatrixError> {
        if data.len() != n * n {
            return Err(MatrixError::DimensionMismatch(data.len(), n * n));
        }
        Ok(Matrix { n, data })
    }

    pub fn from_u16(n: usize, values: &[u16]) -> Result<Self, MatrixError> {
        Self::from_rows(n, values.iter().map(|&v| Fe::new(v)).collect())
    }

    pub fn random<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Self {
        Matrix {
            n,
            data: (0..n * n).map(|_| field.random(rng)).collect(),
        }
    }

    /// Uniform over GL(n, F_q) by rejection.
    pub fn random_invertible<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(field, n, rng);
            if m.is_invertible(field) {
                return m;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Fe] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Fe {
        self.data[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: Fe) {
        self.data[row * self.n + col] = v;
    }

    /// Column `col` (0-based) as a vector.
    pub fn column(&self, col: usize) -> Vec<Fe> {
        (0..self.n).map(|r| self.get(r, col)).collect()
    }

    pub fn row(&self, row: usize) -> &[Fe] {
        &self.data[row * self.n..(row + 1) * self.n]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn mul(&self, field: &Field, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let cur = out.data[i * n + j];
                    out.data[i * n + j] = field.add(cur, field.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, field: &Field, v: &[Fe]) -> Result<Vec<Fe>, MatrixError> {
        if v.len() != self.n {
            return Err(MatrixError::DimensionMismatch(self.n, v.len()));
        }
        Ok((0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Fe::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
            })
            .collect())
    }

    pub fn add(&self, field: &Field, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::DimensionMismatch(self.n, other.n));
        }
        Ok(Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| field.add(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, field: &Field, c: Fe) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|&a| field.mul(c, a)).collect(),
        }
    }

    /// Gauss–Jordan inversion.
    pub fn inverse(&self, field: &Field) -> Result<Matrix, MatrixError> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(MatrixError::Singular)?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p_inv = field
                .inv(a.get(col, col))
                .map_err(|_| MatrixError::Singular)?;
            for j in 0..n {
                a.data[col * n + j] = field.mul(p_inv, a.data[col * n + j]);
                inv.data[col * n + j] = field.mul(p_inv, inv.data[col * n + j]);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col);
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = field.mul(factor, a.data[col * n + j]);
                    a.data[r * n + j] = field.sub(a.data[r * n + j], t);
                    let t = field.mul(factor, inv.data[col * n + j]);
                    inv.data[r * n + j] = field.sub(inv.data[r * n + j], t);
                }
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self, field: &Field) -> bool {
        rank(
            field,
            &self
                .data
                .chunks(self.n)
                .map(<[Fe]>::to_vec)
                .collect::<Vec<_>>(),
        ) == self.n
    }

    pub fn determinant(&self, field: &Field) -> Fe {
        let n = self.n;
        let mut a = self.clone();
        let mut det = Fe::ONE;
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Fe::ZERO;
            };
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                }
                det = field.neg(det);
            }
            let p = a.get(col, col);
            det = field.mul(det, p);
            let p_inv = field.inv(p).expect("pivot is nonzero");
            for r in col + 1..n {
                let factor = field.mul(a.get(r, col), p_inv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let t = field.mul(factor, a.data[col * n + j]);
                    a.data[r * n + j] = field.sub(a.data[r * n + j], t);
                }
            }
        }
        det
    }

    pub fn zero_count(&self) -> usize {
        self.data.iter().filter(|x| x.is_zero()).count()
    }
}

/// Rank of a list of equal-length row vectors.
pub fn rank(field: &Field, rows: &[Vec<Fe>]) -> usize {
    let mut rows: Vec<Vec<Fe>> = rows.to_vec();
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let p_inv = field.inv(rows[rank][col]).expect("pivot is nonzero");
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in rest.iter_mut() {
            let factor = field.mul(row[col], p_inv);
            if factor.is_zero() {
                continue;
            }
            for (x, &p) in row[col..width].iter_mut().zip(&pivot[col..width]) {
                *x = field.sub(*x, field.mul(factor, p));
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f5() -> Field {
        Field::new(FieldSpec::prime(5)).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let f = Field::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Matrix::random(&f, 6, &mut rng);
        assert_eq!(a.mul(&f, &Matrix::identity(6)).unwrap(), a);
        let v: Vec<Fe> = (0..6).map(|_| f.random(&mut rng)).collect();
        assert_eq!(Matrix::identity(6).mul_vec(&f, &v).unwrap(), v);
    }

    #[test]
    fn small_product_mod_5() {
        let f = f5();
        let a = Matrix::from_u16(2, &[1, 2, 3, 4]).unwrap();
        let v = [Fe::new(1), Fe::new(1)];
        // [1+2, 3+4] = [3, 7 mod 5 = 2]
        assert_eq!(a.mul_vec(&f, &v).unwrap(), vec![Fe::new(3), Fe::new(2)]);
        assert!(a.mul_vec(&f, &[Fe::ONE]).is_err());
        assert!(a.mul(&f, &Matrix::identity(3)).is_err());
    }

    #[test]
    fn inverse_properties() {
        let f = Field::gf256();
        assert_eq!(
            Matrix::identity(5).inverse(&f).unwrap(),
            Matrix::identity(5)
        );
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let a = Matrix::random_invertible(&f, 8, &mut rng);
            let inv = a.inverse(&f).unwrap();
            assert!(a.mul(&f, &inv).unwrap().is_identity());
            assert!(inv.mul(&f, &a).unwrap().is_identity());
            assert_eq!(inv.inverse(&f).unwrap(), a);
            assert!(!a.determinant(&f).is_zero());
        }
        assert_eq!(Matrix::zero(3).inverse(&f), Err(MatrixError::Singular));
        let singular = Matrix::from_u16(2, &[1, 2, 2, 4]).unwrap();
        assert_eq!(singular.inverse(&f5()), Err(MatrixError::Singular));
        assert!(singular.determinant(&f5()).is_zero());
    }

    #[test]
    fn determinant_is_multiplicative() {
        let f = f5();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = Matrix::random(&f, 4, &mut rng);
            let b = Matrix::random(&f, 4, &mut rng);
            let ab = a.mul(&f, &b).unwrap();
            assert_eq!(
                ab.determinant(&f),
                f.mul(a.determinant(&f), b.determinant(&f))
            );
            assert_eq!(a.is_invertible(&f), !a.determinant(&f).is_zero());
        }
    }

    #[test]
    fn rank_of_dependent_rows() {
        let f = f5();
        let rows = vec![
            vec![Fe::new(1), Fe::new(2), Fe::new(3)],
            vec![Fe::new(2), Fe::new(4), Fe::new(1)],
            vec![Fe::new(0), Fe::new(1), Fe::new(0)],
        ];
        assert_eq!(rank(&f, &rows), 2);
    }
}
