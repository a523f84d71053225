//! Gram matrices of clusters, the dual form, the bends group, and the
//! cyclic-product arithmeticity test.

use serde::Serialize;

use crate::coxeter::GramMatrix;
use crate::error::{Error, Result};
use crate::exactnum::{common_disc, QuadExt};
use crate::inversive::InversiveVector;
use crate::matrix::QuadMatrix;

pub const DEFAULT_MAX_CYCLE: usize = 8;

/// A stack of inversive vectors, one per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterMatrix {
    rows: Vec<InversiveVector>,
}

impl ClusterMatrix {
    pub fn new(rows: Vec<InversiveVector>) -> Result<Self> {
        if let Some(first) = rows.first() {
            let dim = first.dim();
            for r in &rows {
                if r.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: r.dim() });
                }
                if !r.validate() {
                    return Err(Error::InvalidWall);
                }
            }
        }
        common_disc(rows.iter().flat_map(|r| r.coords()))?;
        Ok(ClusterMatrix { rows })
    }

    pub fn rows(&self) -> &[InversiveVector] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn matrix(&self) -> QuadMatrix {
        QuadMatrix::from_rows(self.rows.iter().map(|r| r.coords().to_vec()).collect())
            .expect("rows share a field")
    }

    /// The column of bends `V·(0,1,0,...,0)ᵀ`.
    pub fn bends(&self) -> Vec<QuadExt> {
        self.rows.iter().map(|r| r.bend().clone()).collect()
    }
}

/// `G = V·Q·Vᵀ`.
pub fn gram_matrix(v: &ClusterMatrix) -> Result<GramMatrix> {
    let k = v.len();
    let mut m = QuadMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let p = v.rows[i].product(&v.rows[j])?;
            m[(j, i)] = p.clone();
            m[(i, j)] = p;
        }
    }
    GramMatrix::new(m)
}

/// `F = G⁻¹`.
pub fn dual_form(g: &GramMatrix) -> Result<QuadMatrix> {
    g.matrix()?.inverse()?.ok_or(Error::SingularGram)
}

pub fn is_rational_matrix(m: &QuadMatrix) -> bool {
    m.entries().all(QuadExt::is_rational)
}

/// `bᵀ·F·b`.
pub fn quadratic_value(f: &QuadMatrix, b: &[QuadExt]) -> Result<QuadExt> {
    let fb = f.apply(b);
    let mut acc = QuadExt::zero();
    for (x, y) in b.iter().zip(&fb) {
        acc = acc.try_add(&x.try_mul(y)?)?;
    }
    Ok(acc)
}

/// `A = V·M·V⁻¹`, so that the bends of the cluster moved by `M` are `A·b`.
pub fn bends_conjugate(m: &QuadMatrix, v: &ClusterMatrix) -> Result<QuadMatrix> {
    let vm = v.matrix();
    if !vm.is_square() {
        return Err(Error::SingularCluster);
    }
    let inv = vm.inverse()?.ok_or(Error::SingularCluster)?;
    vm.try_mul(m)?.try_mul(&inv)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum VinbergVerdict {
    /// A cycle (0-based, closing back to its first index) whose product of
    /// doubled entries is not a rational integer.
    NonArithmetic { cycle: Vec<usize>, product: QuadExt },
    /// Every simple cycle up to this length has an integral product.
    PassesUpTo { max_len: usize },
}

/// Scans simple cycles of the graph of nonzero entries, shortest first and
/// lexicographically within a length, and reports the first product of
/// `2G` entries that is not a rational integer.
pub fn vinberg_test(g: &GramMatrix, max_len: usize) -> Result<VinbergVerdict> {
    let m = g.matrix()?;
    let n = m.rows();
    let two = QuadExt::from(2);
    let doubled: Vec<Vec<Option<QuadExt>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let x = &m[(i, j)];
                    (i != j && !x.is_zero()).then(|| x * &two)
                })
                .collect()
        })
        .collect();

    struct Search<'a> {
        w: &'a [Vec<Option<QuadExt>>],
        len: usize,
        path: Vec<usize>,
        onpath: Vec<bool>,
    }

    impl Search<'_> {
        fn run(&mut self, acc: &QuadExt) -> Option<(Vec<usize>, QuadExt)> {
            let start = self.path[0];
            let last = *self.path.last().unwrap();
            let n = self.w.len();
            if self.path.len() == self.len {
                let close = self.w[last][start].as_ref()?;
                if self.len >= 3 && self.path[1] > last {
                    return None;
                }
                let p = acc * close;
                return (!p.is_rational_integer()).then(|| (self.path.clone(), p));
            }
            for next in start + 1..n {
                if self.onpath[next] {
                    continue;
                }
                let Some(e) = self.w[last][next].as_ref() else { continue };
                self.path.push(next);
                self.onpath[next] = true;
                let hit = self.run(&(acc * e));
                self.onpath[next] = false;
                self.path.pop();
                if hit.is_some() {
                    return hit;
                }
            }
            None
        }
    }

    for len in 2..=max_len.min(n) {
        for start in 0..n {
            let mut s = Search { w: &doubled, len, path: vec![start], onpath: vec![false; n] };
            s.onpath[start] = true;
            if let Some((cycle, product)) = s.run(&QuadExt::one()) {
                return Ok(VinbergVerdict::NonArithmetic { cycle, product });
            }
        }
    }
    Ok(VinbergVerdict::PassesUpTo { max_len })
}
