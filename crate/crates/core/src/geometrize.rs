//! Numeric realization of wall systems from combinatorial targets, and the
//! guess-then-verify route back to exact coordinates.
//!
//! The solver works in the plane (vectors of length 4). A realization is
//! only determined up to Möbius maps, so three walls are pinned:
//! a mutually tangent triple goes to the lines `y = 0`, `y = 1` and the
//! circle of radius 1/2 centred at `(0, 1/2)`; failing that, a tangent pair
//! goes to the two lines and a wall orthogonal to both goes to `x = 0`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coxeter::GramMatrix;
use crate::error::{Error, Result};
use crate::exactnum::QuadExt;
use crate::inversive::{qform_f64, InversiveVector};
use crate::orbit::{check_format, WallSystem, FORMAT_VERSION};

const VEC_LEN: usize = 4;
const MAX_REPORTED: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Exact(QuadExt),
    /// Interiors disjoint; the product only has to exceed 1.
    DisjointFree,
}

/// Prescribed pairwise products. Pairs absent from the map are free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSpec {
    pub wall_count: usize,
    targets: BTreeMap<(usize, usize), Target>,
    pub cluster: Option<Vec<usize>>,
}

impl TargetSpec {
    pub fn new(wall_count: usize) -> Self {
        TargetSpec { wall_count, targets: BTreeMap::new(), cluster: None }
    }

    pub fn set(&mut self, i: usize, j: usize, t: Target) -> Result<()> {
        if i == j || i.max(j) >= self.wall_count {
            return Err(Error::Format(format!("bad target pair ({}, {})", i + 1, j + 1)));
        }
        self.targets.insert((i.min(j), i.max(j)), t);
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Target> {
        self.targets.get(&(i.min(j), i.max(j)))
    }

    pub fn targets(&self) -> &BTreeMap<(usize, usize), Target> {
        &self.targets
    }

    /// Every off-diagonal entry becomes a target; placeholders become
    /// [`Target::DisjointFree`].
    pub fn from_gram(g: &GramMatrix) -> Self {
        let mut t = TargetSpec::new(g.size());
        for i in 0..g.size() {
            for j in i + 1..g.size() {
                let target = match g.get(i, j) {
                    Some(v) => Target::Exact(v.clone()),
                    None => Target::DisjointFree,
                };
                t.targets.insert((i, j), target);
            }
        }
        t
    }

    /// Vertex circles followed by face circles of a convex polyhedron.
    /// Faces are vertex sets (0-based, any order). Vertices on a common edge
    /// and faces sharing an edge are tangent, a vertex is orthogonal to its
    /// faces, and every other pair is disjoint.
    pub fn from_polyhedron(vertex_count: usize, faces: &[Vec<usize>]) -> Result<Self> {
        let v = vertex_count;
        let mut t = TargetSpec::new(v + faces.len());
        let shared = |a: usize, b: usize| faces.iter().filter(|f| f.contains(&a) && f.contains(&b)).count();
        for f in faces {
            if f.len() < 3 || f.iter().any(|&x| x >= v) {
                return Err(Error::Format("faces need at least three valid vertices".into()));
            }
        }
        for a in 0..v {
            for b in a + 1..v {
                let kind = if shared(a, b) >= 2 { Target::Exact(QuadExt::one()) } else { Target::DisjointFree };
                t.set(a, b, kind)?;
            }
            for (k, f) in faces.iter().enumerate() {
                let kind = if f.contains(&a) { Target::Exact(QuadExt::zero()) } else { Target::DisjointFree };
                t.set(a, v + k, kind)?;
            }
        }
        for (k, f) in faces.iter().enumerate() {
            for (l, g) in faces.iter().enumerate().skip(k + 1) {
                let common = f.iter().filter(|x| g.contains(x)).count();
                let kind = if common >= 2 { Target::Exact(QuadExt::one()) } else { Target::DisjointFree };
                t.set(v + k, v + l, kind)?;
            }
        }
        t.cluster = Some((0..v).collect());
        Ok(t)
    }

    pub fn to_json(&self) -> TargetFile {
        TargetFile {
            format: FORMAT_VERSION,
            dim: 2,
            walls: self.wall_count,
            cluster: self.cluster.as_ref().map(|c| c.iter().map(|i| i + 1).collect()),
            targets: self
                .targets
                .iter()
                .map(|(&(i, j), t)| match t {
                    Target::Exact(v) => TargetRecord { i: i + 1, j: j + 1, value: Some(v.clone()), disjoint: None },
                    Target::DisjointFree => TargetRecord { i: i + 1, j: j + 1, value: None, disjoint: Some(true) },
                })
                .collect(),
        }
    }

    pub fn from_json(f: TargetFile) -> Result<Self> {
        check_format(f.format)?;
        if f.dim != 2 {
            return Err(Error::UnsupportedDimension(f.dim));
        }
        let mut t = TargetSpec::new(f.walls);
        for r in f.targets {
            if r.i == 0 || r.j == 0 {
                return Err(Error::Format("wall indices are 1-based".into()));
            }
            let target = match (r.value, r.disjoint) {
                (Some(v), None | Some(false)) => Target::Exact(v),
                (None, Some(true)) => Target::DisjointFree,
                _ => return Err(Error::Format(format!("target ({}, {}) needs exactly one of value or disjoint", r.i, r.j))),
            };
            t.set(r.i - 1, r.j - 1, target)?;
        }
        if let Some(c) = f.cluster {
            if c.iter().any(|&i| i == 0 || i > f.walls) {
                return Err(Error::Format("cluster index out of range".into()));
            }
            t.cluster = Some(c.into_iter().map(|i| i - 1).collect());
        }
        Ok(t)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_json(serde_json::from_str(text)?)
    }

    fn common_disc(&self) -> Result<u64> {
        crate::exactnum::common_disc(self.targets.values().filter_map(|t| match t {
            Target::Exact(v) => Some(v),
            Target::DisjointFree => None,
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetRecord {
    pub i: usize,
    pub j: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<QuadExt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disjoint: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetFile {
    pub format: u32,
    pub dim: usize,
    pub walls: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<Vec<usize>>,
    pub targets: Vec<TargetRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloatWallSystem {
    pub walls: Vec<[f64; VEC_LEN]>,
    /// Largest absolute constraint violation.
    pub residual: f64,
    pub iterations: usize,
    /// Euclidean residual norm after each accepted step, starting with the
    /// initial value.
    pub history: Vec<f64>,
    /// Walls held fixed by the gauge.
    pub pinned: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub completion_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-11, max_iterations: 500, completion_iterations: 4000 }
    }
}

const LINE_Y0: [f64; 4] = [0.0, 0.0, 0.0, -1.0];
const LINE_Y1: [f64; 4] = [2.0, 0.0, 0.0, 1.0];
const HALF_CIRCLE: [f64; 4] = [0.0, 2.0, 0.0, 1.0];
const LINE_X0: [f64; 4] = [0.0, 0.0, 1.0, 0.0];
const ORIGIN: [f64; 4] = [0.0, 1.0, 0.0, 0.0];

#[derive(Debug, Clone, Copy)]
enum Gauge {
    Triple([usize; 3]),
    PairOrthogonal([usize; 3]),
}

impl Gauge {
    fn pinned(&self) -> Vec<usize> {
        match self {
            Gauge::Triple(w) | Gauge::PairOrthogonal(w) => w.to_vec(),
        }
    }

    fn images(&self) -> [[f64; 4]; 3] {
        match self {
            Gauge::Triple(_) => [LINE_Y0, LINE_Y1, HALF_CIRCLE],
            Gauge::PairOrthogonal(_) => [LINE_Y0, LINE_Y1, LINE_X0],
        }
    }
}

fn choose_gauge(t: &TargetSpec) -> Result<Gauge> {
    let n = t.wall_count;
    let is = |i: usize, j: usize, v: i64| matches!(t.get(i, j), Some(Target::Exact(x)) if *x == QuadExt::from(v));
    for i in 0..n {
        for j in i + 1..n {
            if !is(i, j, 1) {
                continue;
            }
            if let Some(k) = (j + 1..n).find(|&k| is(i, k, 1) && is(j, k, 1)) {
                return Ok(Gauge::Triple([i, j, k]));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if !is(i, j, 1) {
                continue;
            }
            if let Some(k) = (0..n).find(|&k| k != i && k != j && is(i, k, 0) && is(j, k, 0)) {
                return Ok(Gauge::PairOrthogonal([i, j, k]));
            }
        }
    }
    Err(Error::GaugeDeficient("no tangent triple and no tangent pair with a common orthogonal wall".into()))
}

fn q_row(v: &[f64]) -> [f64; 4] {
    [0.5 * v[1], 0.5 * v[0], -v[2], -v[3]]
}

/// Orthonormal basis (Euclidean) of `{x : ⟨v, x⟩ = 0 for v in vs}`.
fn q_complement(vs: &[[f64; 4]]) -> Vec<[f64; 4]> {
    let mut m = Matrix4::<f64>::zeros();
    for (r, v) in vs.iter().enumerate() {
        let q = q_row(v);
        for c in 0..4 {
            m[(r, c)] = q[c];
        }
    }
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut idx: Vec<usize> = (0..4).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].partial_cmp(&svd.singular_values[b]).unwrap_or(Ordering::Equal));
    idx.iter()
        .take(4 - vs.len())
        .map(|&r| [vt[(r, 0)], vt[(r, 1)], vt[(r, 2)], vt[(r, 3)]])
        .collect()
}

fn scaled(v: [f64; 4], s: f64) -> [f64; 4] {
    [v[0] * s, v[1] * s, v[2] * s, v[3] * s]
}

/// Lorentz map `T` with `v·T = target` for the pinned walls.
fn gauge_transform(g: Gauge, walls: &[[f64; 4]]) -> Option<Matrix4<f64>> {
    let p = g.pinned();
    let (a, b, c) = (walls[p[0]], walls[p[1]], walls[p[2]]);
    let [ya, yb, yc] = g.images();
    let (x4, y4) = match g {
        Gauge::Triple(_) => {
            let k = q_complement(&[a, b, c])[0];
            let n = qform_f64(&k, &k);
            if n >= 0.0 {
                return None;
            }
            (scaled(k, 1.0 / (-n).sqrt()), LINE_X0)
        }
        Gauge::PairOrthogonal(_) => {
            // The two points where walls a and c cross; one of them is the
            // tangency point of a and b.
            let basis = q_complement(&[a, c]);
            let (e1, e2) = (basis[0], basis[1]);
            let (p11, p12, p22) = (qform_f64(&e1, &e1), qform_f64(&e1, &e2), qform_f64(&e2, &e2));
            let disc = p12 * p12 - p11 * p22;
            if disc < 0.0 {
                return None;
            }
            let tangency = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
            let roots: Vec<[f64; 4]> = if p11.abs() > 1e-14 {
                [(-p12 + disc.sqrt()) / p11, (-p12 - disc.sqrt()) / p11]
                    .iter()
                    .map(|&s| [s * e1[0] + e2[0], s * e1[1] + e2[1], s * e1[2] + e2[2], s * e1[3] + e2[3]])
                    .collect()
            } else {
                vec![e1, [2.0 * p12 * e2[0] - p22 * e1[0], 2.0 * p12 * e2[1] - p22 * e1[1], 2.0 * p12 * e2[2] - p22 * e1[2], 2.0 * p12 * e2[3] - p22 * e1[3]]]
            };
            let align = |r: &[f64; 4]| {
                let dot: f64 = r.iter().zip(&tangency).map(|(x, y)| x * y).sum();
                let nr: f64 = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nt: f64 = tangency.iter().map(|x| x * x).sum::<f64>().sqrt();
                (dot / (nr * nt)).abs()
            };
            let w = *roots.iter().min_by(|r, s| align(r).partial_cmp(&align(s)).unwrap_or(Ordering::Equal))?;
            let s = qform_f64(&w, &b);
            if s.abs() < 1e-12 {
                return None;
            }
            (scaled(w, 1.0 / s), ORIGIN)
        }
    };
    let x = Matrix4::from_rows(&[a, b, c, x4].map(nalgebra::RowVector4::from));
    let y = Matrix4::from_rows(&[ya, yb, yc, y4].map(nalgebra::RowVector4::from));
    Some(x.try_inverse()? * y)
}

/// Fills a Gram matrix consistent with the targets by alternating between
/// the rank/signature constraint and the prescribed entries.
fn complete_gram(t: &TargetSpec, rng: &mut ChaCha8Rng, iterations: usize) -> DMatrix<f64> {
    let n = t.wall_count;
    let mut g = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = -1.0;
        for j in i + 1..n {
            let v = match t.get(i, j) {
                Some(Target::Exact(x)) => x.to_f64(),
                Some(Target::DisjointFree) => 3.0 + rng.gen::<f64>(),
                None => rng.gen_range(-1.0..1.0),
            };
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    for _ in 0..iterations {
        let low = low_rank(&g);
        let mut err: f64 = 0.0;
        g = low;
        for i in 0..n {
            err = err.max((g[(i, i)] + 1.0).abs());
            g[(i, i)] = -1.0;
            for j in i + 1..n {
                let fixed = match t.get(i, j) {
                    Some(Target::Exact(x)) => Some(x.to_f64()),
                    Some(Target::DisjointFree) if g[(i, j)] < 1.0 => Some(1.0),
                    _ => None,
                };
                if let Some(v) = fixed {
                    err = err.max((g[(i, j)] - v).abs());
                    g[(i, j)] = v;
                    g[(j, i)] = v;
                }
            }
        }
        if err < 1e-10 {
            break;
        }
    }
    g
}

/// Closest matrix with one positive and three negative eigenvalues.
fn low_rank(g: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = split_spectrum(g);
    let mut out = DMatrix::<f64>::zeros(g.nrows(), g.ncols());
    for (lam, u) in vals.iter().zip(&vecs) {
        out += u * u.transpose() * *lam;
    }
    out
}

/// The largest positive and three most negative eigenpairs, in that order.
fn split_spectrum(g: &DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let eig = SymmetricEigen::new(g.clone());
    let mut idx: Vec<usize> = (0..g.nrows()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(Ordering::Equal));
    let mut pick = Vec::new();
    if let Some(&top) = idx.last() {
        if eig.eigenvalues[top] > 0.0 {
            pick.push(top);
        }
    }
    pick.extend(idx.iter().take(3).filter(|&&i| eig.eigenvalues[i] < 0.0));
    let vals = pick.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = pick.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    (vals, vecs)
}

/// Rows `V` with `V Q Vᵀ ≈ G`. Missing or wrongly signed parts of the
/// spectrum are replaced by small values of the right sign; the solver
/// removes the error.
fn factor_gram(g: &DMatrix<f64>) -> Option<Vec<[f64; 4]>> {
    let n = g.nrows();
    if n < 4 {
        return None;
    }
    let eig = SymmetricEigen::new(g.clone());
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(Ordering::Equal));
    let pick = [idx[n - 1], idx[0], idx[1], idx[2]];
    let scale: Vec<f64> = pick.iter().map(|&k| eig.eigenvalues[k].abs().max(1e-2).sqrt()).collect();
    // (a, b, c, d) in the signature basis maps to (a + b, a - b, c, d).
    Some(
        (0..n)
            .map(|i| {
                let w: Vec<f64> = (0..4).map(|k| eig.eigenvectors[(i, pick[k])] * scale[k]).collect();
                [w[0] + w[1], w[0] - w[1], w[2], w[3]]
            })
            .collect(),
    )
}

struct Problem<'a> {
    t: &'a TargetSpec,
    free: Vec<usize>,
    exact: Vec<(usize, usize, f64)>,
    disjoint: Vec<(usize, usize)>,
}

impl Problem<'_> {
    fn residuals(&self, w: &[[f64; 4]]) -> DVector<f64> {
        let mut r = Vec::with_capacity(self.free.len() + self.exact.len() + self.disjoint.len());
        for &i in &self.free {
            r.push(qform_f64(&w[i], &w[i]) + 1.0);
        }
        for &(i, j, v) in &self.exact {
            r.push(qform_f64(&w[i], &w[j]) - v);
        }
        for &(i, j) in &self.disjoint {
            r.push((qform_f64(&w[i], &w[j]) - 1.0).min(0.0));
        }
        DVector::from_vec(r)
    }

    fn jacobian(&self, w: &[[f64; 4]]) -> DMatrix<f64> {
        let m = self.free.len() + self.exact.len() + self.disjoint.len();
        let mut col = vec![usize::MAX; self.t.wall_count];
        for (k, &i) in self.free.iter().enumerate() {
            col[i] = 4 * k;
        }
        let mut j = DMatrix::<f64>::zeros(m, 4 * self.free.len());
        let mut row = 0;
        for &i in &self.free {
            let g = q_row(&w[i]);
            for c in 0..4 {
                j[(row, col[i] + c)] = 2.0 * g[c];
            }
            row += 1;
        }
        let pair = |row: usize, a: usize, b: usize, j: &mut DMatrix<f64>| {
            if col[a] != usize::MAX {
                let g = q_row(&w[b]);
                for c in 0..4 {
                    j[(row, col[a] + c)] += g[c];
                }
            }
            if col[b] != usize::MAX {
                let g = q_row(&w[a]);
                for c in 0..4 {
                    j[(row, col[b] + c)] += g[c];
                }
            }
        };
        for &(a, b, _) in &self.exact {
            pair(row, a, b, &mut j);
            row += 1;
        }
        for &(a, b) in &self.disjoint {
            if qform_f64(&w[a], &w[b]) < 1.0 {
                pair(row, a, b, &mut j);
            }
            row += 1;
        }
        j
    }

    fn step(&self, w: &[[f64; 4]], delta: &DVector<f64>) -> Vec<[f64; 4]> {
        let mut out = w.to_vec();
        for (k, &i) in self.free.iter().enumerate() {
            for c in 0..4 {
                out[i][c] += delta[4 * k + c];
            }
        }
        out
    }
}

fn max_abs(r: &DVector<f64>) -> f64 {
    r.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Levenberg-Marquardt on the free walls; pinned walls stay fixed.
fn solve(p: &Problem<'_>, start: Vec<[f64; 4]>, opts: &SolverOptions, pinned: Vec<usize>) -> Result<FloatWallSystem> {
    let mut w = start;
    let mut r = p.residuals(&w);
    let mut history = vec![r.norm()];
    let mut mu = 1e-3;
    let mut iterations = 0;
    while max_abs(&r) >= opts.tol {
        if iterations >= opts.max_iterations || mu > 1e16 {
            return Err(Error::NoConvergence { iterations, residual: max_abs(&r) });
        }
        iterations += 1;
        let j = p.jacobian(&w);
        let jt = j.transpose();
        let jtj = &jt * &j;
        let grad = &jt * &r;
        loop {
            let mut a = jtj.clone();
            for d in 0..a.nrows() {
                a[(d, d)] += mu * jtj[(d, d)].max(1e-9);
            }
            let accepted = a.cholesky().map(|ch| ch.solve(&(-&grad))).and_then(|delta| {
                let cand = p.step(&w, &delta);
                let rc = p.residuals(&cand);
                (rc.norm() < r.norm()).then_some((cand, rc))
            });
            match accepted {
                Some((cand, rc)) => {
                    w = cand;
                    r = rc;
                    history.push(r.norm());
                    mu = (mu / 3.0).max(1e-15);
                    break;
                }
                None => {
                    mu *= 4.0;
                    if mu > 1e16 {
                        break;
                    }
                }
            }
        }
    }
    // The gauge must leave no continuous freedom.
    if !p.free.is_empty() {
        let j = p.jacobian(&w);
        let sv = j.svd(false, false).singular_values;
        let top = sv.iter().cloned().fold(0.0, f64::max);
        let rank = sv.iter().filter(|&&s| s > top * 1e-9).count();
        if rank < 4 * p.free.len() {
            return Err(Error::GaugeDeficient(format!(
                "solution has {} free directions after pinning",
                4 * p.free.len() - rank
            )));
        }
    }
    Ok(FloatWallSystem { walls: w, residual: max_abs(&r), iterations, history, pinned })
}

fn problem<'a>(t: &'a TargetSpec, pinned: &[usize]) -> Problem<'a> {
    let free = (0..t.wall_count).filter(|i| !pinned.contains(i)).collect();
    let mut exact = Vec::new();
    let mut disjoint = Vec::new();
    for (&(i, j), target) in t.targets() {
        if pinned.contains(&i) && pinned.contains(&j) {
            continue;
        }
        match target {
            Target::Exact(v) => exact.push((i, j, v.to_f64())),
            Target::DisjointFree => disjoint.push((i, j)),
        }
    }
    Problem { t, free, exact, disjoint }
}

/// Finds floating-point walls meeting the targets to within `tol`.
pub fn realize(t: &TargetSpec, seed: u64, tol: f64) -> Result<FloatWallSystem> {
    realize_with(t, seed, &SolverOptions { tol, ..SolverOptions::default() })
}

pub fn realize_with(t: &TargetSpec, seed: u64, opts: &SolverOptions) -> Result<FloatWallSystem> {
    if !(opts.tol > 0.0) {
        return Err(Error::Format("tolerance must be positive".into()));
    }
    t.common_disc()?;
    let gauge = choose_gauge(t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = complete_gram(t, &mut rng, opts.completion_iterations);
    let raw = factor_gram(&g).ok_or(Error::NoConvergence { iterations: 0, residual: f64::INFINITY })?;
    let tr = gauge_transform(gauge, &raw).ok_or(Error::NoConvergence { iterations: 0, residual: f64::INFINITY })?;
    let walls = placed(gauge, raw.iter().map(|v| apply4(v, &tr)).collect());
    solve(&problem(t, &gauge.pinned()), walls, opts, gauge.pinned())
}

/// Polishes a given starting configuration (already in the gauge).
pub fn refine(t: &TargetSpec, start: Vec<[f64; 4]>, opts: &SolverOptions) -> Result<FloatWallSystem> {
    if start.len() != t.wall_count {
        return Err(Error::DimensionMismatch { expected: t.wall_count, found: start.len() });
    }
    let gauge = choose_gauge(t)?;
    let tr = gauge_transform(gauge, &start).ok_or(Error::GaugeDeficient("pinned walls are degenerate".into()))?;
    let walls = placed(gauge, start.iter().map(|v| apply4(v, &tr)).collect());
    solve(&problem(t, &gauge.pinned()), walls, opts, gauge.pinned())
}

fn placed(g: Gauge, mut walls: Vec<[f64; 4]>) -> Vec<[f64; 4]> {
    for (&i, img) in g.pinned().iter().zip(g.images()) {
        walls[i] = img;
    }
    walls
}

fn apply4(v: &[f64; 4], t: &Matrix4<f64>) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (c, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|r| v[r] * t[(r, c)]).sum();
    }
    out
}

/// The unique `a/q + (b/q)·sqrt(d)` with `q <= denom_bound` within `tol` of
/// `x`. Surd coefficients are searched up to `2(|x| + 1)` in size; `d = 0`
/// searches rationals only.
pub fn algebraic_guess(x: f64, d: u64, denom_bound: u64, tol: f64) -> Result<QuadExt> {
    if denom_bound == 0 || !x.is_finite() {
        return Err(Error::NoCandidate { x });
    }
    if d != 0 && !crate::exactnum::is_square_free(d) {
        return Err(Error::BadDiscriminant(d));
    }
    let root = (d as f64).sqrt();
    let span = 2.0 * (x.abs() + 1.0);
    let mut found: std::collections::HashSet<QuadExt> = std::collections::HashSet::new();
    for q in 1..=denom_bound as i64 {
        let bmax = if d == 0 { 0 } else { (span * q as f64 / root).floor() as i64 };
        for b in -bmax..=bmax {
            let rest = x * q as f64 - b as f64 * root;
            let a = rest.round();
            if ((a - rest) / q as f64).abs() > tol {
                continue;
            }
            let cand = QuadExt::frac(a as i64, q);
            let cand = if b == 0 { cand } else { cand + QuadExt::surd_frac(b, q, d)? };
            found.insert(cand);
        }
    }
    let mut found: Vec<QuadExt> = found.into_iter().collect();
    match found.len() {
        0 => Err(Error::NoCandidate { x }),
        1 => Ok(found.pop().expect("one candidate")),
        _ => {
            // Nearest first; long lists are cut short.
            found.sort_by(|a, b| (a.to_f64() - x).abs().total_cmp(&(b.to_f64() - x).abs()));
            found.truncate(MAX_REPORTED);
            Err(Error::Ambiguous { x, candidates: found.iter().map(ToString::to_string).collect() })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    /// 1-based wall indices; `i == j` flags a wall off the quadric.
    pub i: usize,
    pub j: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub mismatches: Vec<Mismatch>,
}

/// Exact check of every target against the given walls.
pub fn verify_realization(walls: &[InversiveVector], t: &TargetSpec) -> VerifyReport {
    let mut mismatches = Vec::new();
    if walls.len() != t.wall_count {
        mismatches.push(Mismatch {
            i: 0,
            j: 0,
            expected: format!("{} walls", t.wall_count),
            found: format!("{} walls", walls.len()),
        });
        return VerifyReport { ok: false, mismatches };
    }
    for (i, w) in walls.iter().enumerate() {
        let norm = w.norm();
        if !matches!(&norm, Ok(v) if *v == QuadExt::from(-1)) {
            mismatches.push(Mismatch {
                i: i + 1,
                j: i + 1,
                expected: "-1".into(),
                found: norm.map_or_else(|e| e.to_string(), |v| v.to_string()),
            });
        }
    }
    for (&(i, j), target) in t.targets() {
        let found = walls[i].product(&walls[j]);
        let good = match (&found, target) {
            (Ok(p), Target::Exact(v)) => p == v,
            (Ok(p), Target::DisjointFree) => p.try_cmp(&QuadExt::one()) == Ok(Ordering::Greater),
            (Err(_), _) => false,
        };
        if !good {
            mismatches.push(Mismatch {
                i: i + 1,
                j: j + 1,
                expected: match target {
                    Target::Exact(v) => v.to_string(),
                    Target::DisjointFree => "> 1".into(),
                },
                found: found.map_or_else(|e| e.to_string(), |v| v.to_string()),
            });
        }
    }
    VerifyReport { ok: mismatches.is_empty(), mismatches }
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub d: u64,
    pub denom_bound: u64,
    pub solver: SolverOptions,
    /// Starting tolerance for matching coordinates; tightened on ambiguity.
    pub guess_tol: f64,
    pub seed: u64,
    pub attempts: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { d: 0, denom_bound: 64, solver: SolverOptions::default(), guess_tol: 1e-8, seed: 0, attempts: 8 }
    }
}

/// One coordinate, retrying with tighter tolerances while ambiguous.
fn guess_coordinate(x: f64, opts: &PipelineOptions) -> Result<QuadExt> {
    let mut tol = opts.guess_tol;
    loop {
        match algebraic_guess(x, opts.d, opts.denom_bound, tol) {
            Err(Error::Ambiguous { .. }) if tol > 1e-13 => tol /= 10.0,
            other => return other,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub system: WallSystem,
    pub float: FloatWallSystem,
    pub seed: u64,
}

/// realize, guess every coordinate, and verify exactly. Seeds are tried in
/// turn until one verifies.
pub fn geometrize(t: &TargetSpec, opts: &PipelineOptions) -> Result<PipelineResult> {
    let mut last = Error::NoConvergence { iterations: 0, residual: f64::INFINITY };
    for seed in opts.seed..opts.seed + opts.attempts.max(1) {
        let float = match realize_with(t, seed, &opts.solver) {
            Ok(f) => f,
            Err(e @ Error::GaugeDeficient(_)) => return Err(e),
            Err(e) => {
                last = e;
                continue;
            }
        };
        let walls = match exact_walls(&float, opts) {
            Ok(w) => w,
            Err(e) => {
                last = e;
                continue;
            }
        };
        let report = verify_realization(&walls, t);
        if !report.ok {
            last = Error::InvalidSystem(format!("guessed coordinates fail {} targets", report.mismatches.len()));
            continue;
        }
        let cluster = match &t.cluster {
            Some(c) => c.clone(),
            None => default_cluster(t)?,
        };
        let cocluster = (0..t.wall_count).filter(|i| !cluster.contains(i)).collect();
        let system = WallSystem::new("geometrized", walls, cluster, cocluster)?;
        return Ok(PipelineResult { system, float, seed });
    }
    Err(last)
}

fn exact_walls(f: &FloatWallSystem, opts: &PipelineOptions) -> Result<Vec<InversiveVector>> {
    f.walls
        .iter()
        .map(|w| {
            let coords = w.iter().map(|&x| guess_coordinate(x, opts)).collect::<Result<Vec<_>>>()?;
            InversiveVector::from_coords(coords)
        })
        .collect()
}

/// First cluster from the decomposition search when the target names none.
fn default_cluster(t: &TargetSpec) -> Result<Vec<usize>> {
    let n = t.wall_count;
    let mut m = crate::matrix::QuadMatrix::zeros(n, n);
    let mut mask = vec![false; n * n];
    for i in 0..n {
        m[(i, i)] = QuadExt::from(-1);
        for j in 0..n {
            if i == j {
                continue;
            }
            match t.get(i, j) {
                Some(Target::Exact(v)) => m[(i, j)] = v.clone(),
                _ => mask[i * n + j] = true,
            }
        }
    }
    let g = GramMatrix::with_placeholders(m, mask)?;
    crate::structure::enumerate_decompositions(&g)?
        .into_iter()
        .next()
        .map(|d| d.cluster)
        .ok_or_else(|| Error::InvalidDecomposition("targets admit no cluster".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuadExt {
        s.parse().unwrap()
    }

    pub(crate) fn tetrahedron() -> TargetSpec {
        TargetSpec::from_polyhedron(4, &[vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn guess_examples() {
        assert_eq!(algebraic_guess(1.1547005384, 3, 6, 1e-9).unwrap(), q("2/3*sqrt(3)"));
        assert_eq!(algebraic_guess(0.5, 3, 6, 1e-9).unwrap(), q("1/2"));
        assert!(matches!(algebraic_guess(3.9999, 0, 10_000, 1e-3), Err(Error::Ambiguous { .. })));
        assert!(matches!(algebraic_guess(std::f64::consts::PI, 0, 3, 1e-9), Err(Error::NoCandidate { .. })));
        assert_eq!(algebraic_guess(-2.0 * 6f64.sqrt(), 6, 4, 1e-9).unwrap(), q("-2*sqrt(6)"));
    }

    #[test]
    fn polyhedron_targets() {
        let t = tetrahedron();
        assert_eq!(t.wall_count, 8);
        assert_eq!(t.get(0, 1), Some(&Target::Exact(q("1"))));
        assert_eq!(t.get(0, 4), Some(&Target::DisjointFree));
        assert_eq!(t.get(0, 5), Some(&Target::Exact(q("0"))));
        assert_eq!(t.get(4, 5), Some(&Target::Exact(q("1"))));
        let back = TargetSpec::from_json(serde_json::from_str(&serde_json::to_string(&t.to_json()).unwrap()).unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn tetrahedron_realizes() {
        let t = tetrahedron();
        let f = realize(&t, 1, 1e-10).unwrap();
        assert!(f.residual < 1e-10);
        assert!(f.history.windows(2).all(|w| w[1] < w[0]));
        for i in 0..4 {
            for j in i + 1..4 {
                assert!((qform_f64(&f.walls[i], &f.walls[j]) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn exact_start_needs_no_steps() {
        let t = tetrahedron();
        let f = realize(&t, 1, 1e-10).unwrap();
        let exact: Vec<[f64; 4]> = exact_walls(&f, &PipelineOptions::default())
            .unwrap()
            .iter()
            .map(|w| {
                let v = w.to_f64();
                [v[0], v[1], v[2], v[3]]
            })
            .collect();
        let again = refine(&t, exact, &SolverOptions::default()).unwrap();
        assert_eq!(again.iterations, 0);
        assert!(again.residual < 1e-12);
    }

    #[test]
    fn tetrahedron_pipeline() {
        let r = geometrize(&tetrahedron(), &PipelineOptions::default()).unwrap();
        assert!(verify_realization(r.system.walls(), &tetrahedron()).ok);
        assert_eq!(r.system.cluster(), &[0, 1, 2, 3]);
    }

    #[test]
    fn infeasible_targets_fail() {
        // Four mutually tangent circles cannot all be orthogonal to a fifth
        // that is also tangent to one of them.
        let mut t = TargetSpec::new(5);
        for i in 0..4 {
            for j in i + 1..4 {
                t.set(i, j, Target::Exact(q("1"))).unwrap();
            }
            t.set(i, 4, Target::Exact(q("0"))).unwrap();
        }
        t.set(0, 4, Target::Exact(q("1"))).unwrap();
        let err = realize(&t, 3, 1e-10).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. }), "{err:?}");
    }

    #[test]
    fn gauge_needs_structure() {
        let t = TargetSpec::new(3);
        assert!(matches!(realize(&t, 0, 1e-10), Err(Error::GaugeDeficient(_))));
    }

    fn spec(n: usize, pairs: &[(usize, usize, &str)]) -> TargetSpec {
        let mut t = TargetSpec::new(n);
        for &(i, j, v) in pairs {
            t.set(i, j, Target::Exact(q(v))).unwrap();
        }
        t
    }

    #[test]
    fn pair_orthogonal_gauge() {
        // Lines y=0, y=1, x=0, x=-1 and the unit circle; no tangent triple.
        let t = spec(
            5,
            &[
                (0, 1, "1"), (0, 2, "0"), (0, 3, "0"), (0, 4, "0"), (1, 2, "0"),
                (1, 3, "0"), (1, 4, "1"), (2, 3, "1"), (2, 4, "0"), (3, 4, "1"),
            ],
        );
        let f = realize(&t, 0, 1e-11).unwrap();
        assert_eq!(f.walls[0], LINE_Y0);
        assert_eq!(f.walls[1], LINE_Y1);
        assert_eq!(f.walls[2], LINE_X0);
        let exact = exact_walls(&f, &PipelineOptions::default()).unwrap();
        assert!(verify_realization(&exact, &t).ok);
        assert_eq!(exact[4].bend(), &q("1"));
    }

    #[test]
    fn flexible_targets_are_gauge_deficient() {
        // The last wall can slide along the strip.
        let t = spec(4, &[(0, 1, "1"), (0, 2, "0"), (1, 2, "0"), (0, 3, "0"), (1, 3, "0"), (2, 3, "1")]);
        let r = realize(&t, 0, 1e-10);
        assert!(matches!(r, Err(Error::GaugeDeficient(_))), "{r:?}");
    }

    #[test]
    fn verify_flags_perturbation() {
        let r = geometrize(&tetrahedron(), &PipelineOptions::default()).unwrap();
        let mut walls = r.system.walls().to_vec();
        let mut c = walls[0].coords().to_vec();
        c[1] = &c[1] + &QuadExt::one();
        walls[0] = InversiveVector::from_coords(c).unwrap();
        let rep = verify_realization(&walls, &tetrahedron());
        assert!(!rep.ok);
        assert!(rep.mismatches.iter().any(|m| m.i == 1));
    }
}
