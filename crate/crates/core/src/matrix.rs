//! Dense matrices over [`QuadExt`].

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::exactnum::{common_disc, QuadExt};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadMatrix {
    rows: usize,
    cols: usize,
    data: Vec<QuadExt>,
}

impl QuadMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QuadMatrix { rows, cols, data: vec![QuadExt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = QuadExt::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length and share
    /// one quadratic field.
    pub fn from_rows(rows: Vec<Vec<QuadExt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, found: bad.len() });
        }
        let data: Vec<QuadExt> = rows.into_iter().flatten().collect();
        common_disc(&data)?;
        Ok(QuadMatrix { rows: r, cols: c, data })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let data: Vec<Vec<QuadExt>> =
            rows.iter().map(|r| r.iter().map(|&x| QuadExt::from(x)).collect()).collect();
        Self::from_rows(data).expect("integer rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[QuadExt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<QuadExt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &QuadExt> {
        self.data.iter()
    }

    pub fn disc(&self) -> Result<u64> {
        common_disc(&self.data)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn try_mul(&self, other: &QuadMatrix) -> Result<QuadMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = QuadExt::zero();
                for k in 0..self.cols {
                    let a = &self[(i, k)];
                    let b = &other[(k, j)];
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.try_add(&a.try_mul(b)?)?;
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &QuadExt) -> QuadMatrix {
        QuadMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[QuadExt]) -> Vec<QuadExt> {
        assert_eq!(v.len(), self.rows, "vector length must match row count");
        (0..self.cols)
            .map(|j| {
                v.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(i, x)| x * &self[(i, j)])
                    .sum()
            })
            .collect()
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[QuadExt]) -> Vec<QuadExt> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Row-reduces a copy and returns (rank, reduced matrix, pivot columns).
    fn row_reduce(&self) -> Result<(usize, QuadMatrix)> {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(rank, p);
            let inv = m[(rank, col)].try_inv()?;
            for j in 0..m.cols {
                m[(rank, j)] = m[(rank, j)].try_mul(&inv)?;
            }
            for r in 0..m.rows {
                if r != rank && !m[(r, col)].is_zero() {
                    let f = m[(r, col)].clone();
                    for j in 0..m.cols {
                        let delta = f.try_mul(&m[(rank, j)])?;
                        m[(r, j)] = m[(r, j)].try_sub(&delta)?;
                    }
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        Ok((rank, m))
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.row_reduce()?.0)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Exact inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Result<Option<QuadMatrix>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut aug = QuadMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = QuadExt::one();
        }
        let (_, red) = aug.row_reduce()?;
        for i in 0..n {
            if !red[(i, i)].is_one() {
                return Ok(None);
            }
        }
        let mut inv = QuadMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = red[(i, n + j)].clone();
            }
        }
        Ok(Some(inv))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(QuadExt::to_f64).collect()).collect()
    }
}

impl Index<(usize, usize)> for QuadMatrix {
    type Output = QuadExt;
    fn index(&self, (i, j): (usize, usize)) -> &QuadExt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QuadMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut QuadExt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for QuadMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QuadMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}
